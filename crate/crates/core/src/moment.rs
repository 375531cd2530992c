//! Polynomials in the moment coordinates `q_1, q_2, ...` (the algebra the
//! generator acts on). `q_0` is rewritten to the unit on construction.

use crate::coeff::{CoeffElem, CoeffError, Param};
use crate::nat::NatPoly;
use crate::poly::{GenId, Monomial, RawPoly, Truncation};
use num_rational::BigRational;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MomentPoly {
    raw: RawPoly,
}

impl MomentPoly {
    pub fn zero() -> Self {
        MomentPoly {
            raw: RawPoly::zero(),
        }
    }

    pub fn one() -> Self {
        MomentPoly {
            raw: RawPoly::one(),
        }
    }

    pub fn constant(c: CoeffElem) -> Self {
        MomentPoly {
            raw: RawPoly::constant(c),
        }
    }

    /// The generator `q_k`; `q_0` is the unit by convention.
    pub fn q(k: u32) -> Self {
        if k == 0 {
            MomentPoly::one()
        } else {
            MomentPoly {
                raw: RawPoly::var(GenId::Q(k)),
            }
        }
    }

    /// Monomial `q_{k_1}^{e_1} ... q_{k_r}^{e_r}` from (index, exponent) pairs.
    pub fn q_monomial(pairs: &[(u32, u32)]) -> Self {
        let mut m = Monomial::unit();
        for (k, e) in pairs {
            if *k == 0 {
                continue;
            }
            m = m.mul(&Monomial::var_pow(GenId::Q(*k), *e));
        }
        MomentPoly {
            raw: RawPoly::monomial(m, CoeffElem::one()),
        }
    }

    pub(crate) fn from_raw(raw: RawPoly) -> Self {
        debug_assert!(raw
            .gens()
            .iter()
            .all(|g| matches!(g, GenId::Q(k) if *k >= 1)));
        MomentPoly { raw }
    }

    pub(crate) fn raw(&self) -> &RawPoly {
        &self.raw
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.raw.num_terms()
    }

    pub fn add(&self, other: &MomentPoly) -> MomentPoly {
        MomentPoly {
            raw: self.raw.add(&other.raw),
        }
    }

    pub fn sub(&self, other: &MomentPoly) -> MomentPoly {
        MomentPoly {
            raw: self.raw.sub(&other.raw),
        }
    }

    pub fn neg(&self) -> MomentPoly {
        MomentPoly {
            raw: self.raw.neg(),
        }
    }

    pub fn mul(&self, other: &MomentPoly) -> MomentPoly {
        MomentPoly {
            raw: self.raw.mul(&other.raw),
        }
    }

    pub fn scale(&self, c: &CoeffElem) -> MomentPoly {
        MomentPoly {
            raw: self.raw.scale(c),
        }
    }

    pub fn scale_int(&self, n: i64) -> MomentPoly {
        MomentPoly {
            raw: self.raw.scale_int(n),
        }
    }

    pub fn pow(&self, e: u32) -> MomentPoly {
        MomentPoly {
            raw: self.raw.pow(e),
        }
    }

    /// Formal partial derivative with respect to `q_k` (k >= 1).
    pub fn partial(&self, k: u32) -> MomentPoly {
        assert!(k >= 1, "q_0 is the unit, not a generator");
        MomentPoly {
            raw: self.raw.partial(GenId::Q(k)),
        }
    }

    /// Largest moment index occurring, 0 when none.
    pub fn max_index(&self) -> u32 {
        self.raw
            .gens()
            .iter()
            .map(|g| match g {
                GenId::Q(k) => *k,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Grading with `deg q_k = k + 1`; `None` for the zero polynomial.
    pub fn grading(&self) -> Option<u64> {
        self.raw.degree(|g| match g {
            GenId::Q(k) => (k + 1) as u64,
            _ => unreachable!("moment polynomial holds only q generators"),
        })
    }

    /// Replace every `q_k` by the truncated power sum
    /// `sum_{i=1..n} x_i^{k+1} + (-theta)^k sum_{j=1..m} x_{-j}^{k+1}`.
    pub fn substitute_moments(&self, n: u32, m: u32) -> NatPoly {
        let trunc = Truncation::new(n, m);
        let mut out = RawPoly::zero();
        for (mono, c) in self.raw.terms() {
            let mut acc = RawPoly::constant(c.clone());
            for (g, e) in mono.factors() {
                let k = match g {
                    GenId::Q(k) => *k,
                    _ => unreachable!(),
                };
                acc = acc.mul(&truncated_power_sum(k, trunc).pow(*e));
            }
            out = out.add(&acc);
        }
        NatPoly::from_raw(out, trunc)
    }

    /// Numeric evaluation; `q_values` assigns a value to each moment index.
    pub fn eval_f64(
        &self,
        params: &crate::coeff::ParamValues,
        q_values: impl Fn(u32) -> f64,
    ) -> f64 {
        self.raw.eval_f64(params, |g| match g {
            GenId::Q(k) => q_values(k),
            _ => unreachable!("moment polynomial holds only q generators"),
        })
    }

    pub fn map_coeffs(&self, f: impl Fn(&CoeffElem) -> CoeffElem) -> MomentPoly {
        MomentPoly {
            raw: self.raw.map_coeffs(f),
        }
    }

    pub fn try_map_coeffs<E>(
        &self,
        f: impl Fn(&CoeffElem) -> Result<CoeffElem, E>,
    ) -> Result<MomentPoly, E> {
        Ok(MomentPoly {
            raw: self.raw.try_map_coeffs(f)?,
        })
    }

    /// Bind a coefficient parameter to an exact rational.
    pub fn bind(&self, p: Param, value: &BigRational) -> Result<MomentPoly, CoeffError> {
        self.try_map_coeffs(|c| c.bind(p, value))
    }
}

/// The truncated moment coordinate `q_k` as a polynomial in `x_i`:
/// `sum_{i<=n} x_i^{k+1} + (-theta)^k sum_{j<=m} x_{-j}^{k+1}`; `q_0` maps to 1.
pub(crate) fn truncated_power_sum(k: u32, trunc: Truncation) -> RawPoly {
    if k == 0 {
        return RawPoly::one();
    }
    let mut out = RawPoly::zero();
    for i in 1..=trunc.n {
        out.insert(
            Monomial::var_pow(GenId::X(i as i32), k + 1),
            CoeffElem::one(),
        );
    }
    // (-theta)^k
    let mut beta_coeff = CoeffElem::theta_pow(k as i64);
    if k % 2 == 1 {
        beta_coeff = beta_coeff.neg();
    }
    for j in 1..=trunc.m {
        out.insert(
            Monomial::var_pow(GenId::X(-(j as i32)), k + 1),
            beta_coeff.clone(),
        );
    }
    out
}

impl fmt::Display for MomentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.raw.fmt_with(f, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q0_is_unit() {
        assert_eq!(MomentPoly::q(0), MomentPoly::one());
    }

    #[test]
    fn laurent_coefficient_collection() {
        let p = MomentPoly::q(1)
            .scale(&CoeffElem::theta_pow(1))
            .add(&MomentPoly::q(1).scale(&CoeffElem::theta_pow(-1)));
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.to_string(), "(theta^-1 + theta)*q1");
    }

    #[test]
    fn substitute_q1() {
        // q1 with n=1, m=1 -> x1^2 - theta*b1^2
        let s = MomentPoly::q(1).substitute_moments(1, 1);
        assert_eq!(s.to_string(), "a1^2 - theta*b1^2");
    }

    #[test]
    fn substitute_q2() {
        let s = MomentPoly::q(2).substitute_moments(2, 0);
        assert_eq!(s.to_string(), "a1^3 + a2^3");
    }

    #[test]
    fn substitute_unit() {
        let s = MomentPoly::one().substitute_moments(3, 2);
        assert!(s.sub(&NatPoly::one(Truncation::new(3, 2))).is_zero());
    }

    #[test]
    fn substitution_is_ring_homomorphism_spot() {
        let p = MomentPoly::q(1).mul(&MomentPoly::q(2));
        let lhs = p.substitute_moments(2, 1);
        let rhs = MomentPoly::q(1)
            .substitute_moments(2, 1)
            .checked_mul(&MomentPoly::q(2).substitute_moments(2, 1))
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn grading_examples() {
        assert_eq!(MomentPoly::q(3).grading(), Some(4));
        assert_eq!(
            MomentPoly::constant(CoeffElem::from_int(5)).grading(),
            Some(0)
        );
        assert_eq!(MomentPoly::zero().grading(), None);
    }
}
