//! Polynomials in the natural coordinates `x_i` alone, at a fixed truncation
//! `(n, m)`. A value represents the member `f_{n,m}` of a compatible family:
//! setting the last variable to zero must recover the member one truncation
//! down, which is exposed through [`NatPoly::set_var_zero`].

use crate::coeff::{CoeffElem, ParamValues};
use crate::poly::{GenId, Monomial, PolyError, RawPoly, Truncation};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatPoly {
    raw: RawPoly,
    trunc: Truncation,
}

impl NatPoly {
    pub fn zero(trunc: Truncation) -> Self {
        NatPoly {
            raw: RawPoly::zero(),
            trunc,
        }
    }

    pub fn one(trunc: Truncation) -> Self {
        NatPoly {
            raw: RawPoly::one(),
            trunc,
        }
    }

    pub fn constant(c: CoeffElem, trunc: Truncation) -> Self {
        NatPoly {
            raw: RawPoly::constant(c),
            trunc,
        }
    }

    pub fn x(i: i32, trunc: Truncation) -> Result<Self, PolyError> {
        if !trunc.contains(i) {
            return Err(PolyError::IndexOutsideTruncation { index: i, trunc });
        }
        Ok(NatPoly {
            raw: RawPoly::var(GenId::X(i)),
            trunc,
        })
    }

    pub(crate) fn from_raw(raw: RawPoly, trunc: Truncation) -> Self {
        debug_assert!(raw
            .gens()
            .iter()
            .all(|g| matches!(g, GenId::X(i) if trunc.contains(*i))));
        NatPoly { raw, trunc }
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.raw.num_terms()
    }

    fn check_same(&self, other: &NatPoly) -> Result<(), PolyError> {
        if self.trunc != other.trunc {
            return Err(PolyError::TruncationMismatch {
                left: self.trunc,
                right: other.trunc,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &NatPoly) -> Result<NatPoly, PolyError> {
        self.check_same(other)?;
        Ok(NatPoly {
            raw: self.raw.add(&other.raw),
            trunc: self.trunc,
        })
    }

    pub fn checked_sub(&self, other: &NatPoly) -> Result<NatPoly, PolyError> {
        self.check_same(other)?;
        Ok(NatPoly {
            raw: self.raw.sub(&other.raw),
            trunc: self.trunc,
        })
    }

    pub fn checked_mul(&self, other: &NatPoly) -> Result<NatPoly, PolyError> {
        self.check_same(other)?;
        Ok(NatPoly {
            raw: self.raw.mul(&other.raw),
            trunc: self.trunc,
        })
    }

    /// Difference, panicking on truncation mismatch.
    pub fn sub(&self, other: &NatPoly) -> NatPoly {
        self.checked_sub(other).expect("truncation mismatch")
    }

    pub fn neg(&self) -> NatPoly {
        NatPoly {
            raw: self.raw.neg(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &CoeffElem) -> NatPoly {
        NatPoly {
            raw: self.raw.scale(c),
            trunc: self.trunc,
        }
    }

    pub fn scale_int(&self, n: i64) -> NatPoly {
        NatPoly {
            raw: self.raw.scale_int(n),
            trunc: self.trunc,
        }
    }

    pub fn pow(&self, e: u32) -> NatPoly {
        NatPoly {
            raw: self.raw.pow(e),
            trunc: self.trunc,
        }
    }

    pub fn partial(&self, i: i32) -> Result<NatPoly, PolyError> {
        if !self.trunc.contains(i) {
            return Err(PolyError::IndexOutsideTruncation {
                index: i,
                trunc: self.trunc,
            });
        }
        Ok(NatPoly {
            raw: self.raw.partial(GenId::X(i)),
            trunc: self.trunc,
        })
    }

    /// Grading with `deg x_i = 1`; `None` for the zero polynomial.
    pub fn grading(&self) -> Option<u64> {
        self.raw.degree(|_| 1)
    }

    /// The simplex sum `x_1 + ... + x_n + x_{-1} + ... + x_{-m}`.
    pub fn simplex_sum(trunc: Truncation) -> NatPoly {
        let mut raw = RawPoly::zero();
        for i in trunc.indices() {
            raw.insert(Monomial::var(GenId::X(i)), CoeffElem::one());
        }
        NatPoly { raw, trunc }
    }

    /// Normal form modulo the principal ideal generated by `sum_i x_i - 1`,
    /// obtained by eliminating the highest positive variable
    /// `x_n := 1 - (sum of the remaining variables)`. The result is zero
    /// exactly when the input lies in the ideal.
    pub fn reduce_mod_simplex(&self) -> Result<NatPoly, PolyError> {
        if self.trunc.n == 0 {
            return Err(PolyError::EmptyTruncation);
        }
        let target = GenId::X(self.trunc.n as i32);
        let mut replacement = RawPoly::one();
        for i in self.trunc.indices() {
            if GenId::X(i) != target {
                replacement = replacement.sub(&RawPoly::var(GenId::X(i)));
            }
        }
        Ok(NatPoly {
            raw: self.raw.subst_gen(target, &replacement),
            trunc: self.trunc,
        })
    }

    /// View the polynomial inside a larger truncation (the natural embedding
    /// of the compatible family).
    pub fn embed(&self, target: Truncation) -> Result<NatPoly, PolyError> {
        if target.n < self.trunc.n || target.m < self.trunc.m {
            return Err(PolyError::TruncationMismatch {
                left: self.trunc,
                right: target,
            });
        }
        Ok(NatPoly {
            raw: self.raw.clone(),
            trunc: target,
        })
    }

    /// Restriction map of the compatible family: set `x_i := 0` and drop the
    /// variable from the truncation (only the outermost index of either sign).
    pub fn set_var_zero(&self, i: i32) -> Result<NatPoly, PolyError> {
        let valid = (i > 0 && i as u32 == self.trunc.n && self.trunc.n > 0)
            || (i < 0 && (-i) as u32 == self.trunc.m && self.trunc.m > 0);
        if !valid {
            return Err(PolyError::IndexOutsideTruncation {
                index: i,
                trunc: self.trunc,
            });
        }
        let raw = self.raw.subst_gen(GenId::X(i), &RawPoly::zero());
        let trunc = if i > 0 {
            Truncation::new(self.trunc.n - 1, self.trunc.m)
        } else {
            Truncation::new(self.trunc.n, self.trunc.m - 1)
        };
        Ok(NatPoly { raw, trunc })
    }

    /// Numeric evaluation; `xs` assigns a value to each index of the truncation.
    pub fn eval_f64(&self, params: &ParamValues, xs: impl Fn(i32) -> f64) -> f64 {
        self.raw.eval_f64(params, |g| match g {
            GenId::X(i) => xs(i),
            _ => unreachable!("natural polynomial holds only x generators"),
        })
    }
}

impl fmt::Display for NatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.raw.fmt_with(f, None)
    }
}
