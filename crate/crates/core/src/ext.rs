//! The extended algebra at a shift level `(N, M)`: split-off natural
//! coordinates `x_1..x_N`, `x_{-1}..x_{-M}` together with the shifted moment
//! coordinates `q_k^(N,M)`, plus the auxiliary univariate polynomials in `t`
//! that feed the transform brackets.

use crate::coeff::CoeffElem;
use crate::moment::MomentPoly;
use crate::poly::{GenId, Monomial, PolyError, RawPoly, ShiftLevel};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtPoly {
    raw: RawPoly,
    level: ShiftLevel,
}

impl ExtPoly {
    pub fn zero(level: ShiftLevel) -> Self {
        ExtPoly {
            raw: RawPoly::zero(),
            level,
        }
    }

    pub fn one(level: ShiftLevel) -> Self {
        ExtPoly {
            raw: RawPoly::one(),
            level,
        }
    }

    pub fn constant(c: CoeffElem, level: ShiftLevel) -> Self {
        ExtPoly {
            raw: RawPoly::constant(c),
            level,
        }
    }

    pub fn x(i: i32, level: ShiftLevel) -> Result<Self, PolyError> {
        if !level.contains_x(i) {
            return Err(PolyError::IndexOutsideLevel { index: i, level });
        }
        Ok(ExtPoly {
            raw: RawPoly::var(GenId::X(i)),
            level,
        })
    }

    /// The shifted moment `q_k^(N,M)`; `k = 0` is the unit.
    pub fn qs(k: u32, level: ShiftLevel) -> Self {
        if k == 0 {
            ExtPoly::one(level)
        } else {
            ExtPoly {
                raw: RawPoly::var(GenId::Qs(k)),
                level,
            }
        }
    }

    pub(crate) fn from_raw(raw: RawPoly, level: ShiftLevel) -> Self {
        debug_assert!(raw.gens().iter().all(|g| match g {
            GenId::X(i) => level.contains_x(*i),
            GenId::Qs(k) => *k >= 1,
            GenId::Q(_) => false,
        }));
        ExtPoly { raw, level }
    }

    pub(crate) fn raw(&self) -> &RawPoly {
        &self.raw
    }

    pub fn level(&self) -> ShiftLevel {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.raw.num_terms()
    }

    fn check_same(&self, other: &ExtPoly) -> Result<(), PolyError> {
        if self.level != other.level {
            return Err(PolyError::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &ExtPoly) -> Result<ExtPoly, PolyError> {
        self.check_same(other)?;
        Ok(ExtPoly {
            raw: self.raw.add(&other.raw),
            level: self.level,
        })
    }

    pub fn checked_sub(&self, other: &ExtPoly) -> Result<ExtPoly, PolyError> {
        self.check_same(other)?;
        Ok(ExtPoly {
            raw: self.raw.sub(&other.raw),
            level: self.level,
        })
    }

    pub fn checked_mul(&self, other: &ExtPoly) -> Result<ExtPoly, PolyError> {
        self.check_same(other)?;
        Ok(ExtPoly {
            raw: self.raw.mul(&other.raw),
            level: self.level,
        })
    }

    pub fn sub(&self, other: &ExtPoly) -> ExtPoly {
        self.checked_sub(other).expect("shift level mismatch")
    }

    pub fn neg(&self) -> ExtPoly {
        ExtPoly {
            raw: self.raw.neg(),
            level: self.level,
        }
    }

    pub fn scale(&self, c: &CoeffElem) -> ExtPoly {
        ExtPoly {
            raw: self.raw.scale(c),
            level: self.level,
        }
    }

    pub fn scale_int(&self, n: i64) -> ExtPoly {
        ExtPoly {
            raw: self.raw.scale_int(n),
            level: self.level,
        }
    }

    pub fn pow(&self, e: u32) -> ExtPoly {
        ExtPoly {
            raw: self.raw.pow(e),
            level: self.level,
        }
    }

    pub fn partial_x(&self, i: i32) -> Result<ExtPoly, PolyError> {
        if !self.level.contains_x(i) {
            return Err(PolyError::IndexOutsideLevel {
                index: i,
                level: self.level,
            });
        }
        Ok(ExtPoly {
            raw: self.raw.partial(GenId::X(i)),
            level: self.level,
        })
    }

    pub fn partial_qs(&self, k: u32) -> ExtPoly {
        assert!(k >= 1);
        ExtPoly {
            raw: self.raw.partial(GenId::Qs(k)),
            level: self.level,
        }
    }

    /// Largest shifted-moment index occurring, 0 when none.
    pub fn max_qs_index(&self) -> u32 {
        self.raw
            .gens()
            .iter()
            .map(|g| match g {
                GenId::Qs(k) => *k,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// x-indices occurring in the polynomial.
    pub fn x_indices(&self) -> Vec<i32> {
        self.raw
            .gens()
            .iter()
            .filter_map(|g| match g {
                GenId::X(i) => Some(*i),
                _ => None,
            })
            .collect()
    }

    /// Grading with `deg x_i = 1`, `deg q_k^(N,M) = k + 1`.
    pub fn grading(&self) -> Option<u64> {
        self.raw.degree(|g| match g {
            GenId::X(_) => 1,
            GenId::Qs(k) => (k + 1) as u64,
            GenId::Q(_) => unreachable!(),
        })
    }

    /// Numeric evaluation against values for the split-off coordinates and
    /// the shifted moments.
    pub fn eval_f64(
        &self,
        params: &crate::coeff::ParamValues,
        x_values: impl Fn(i32) -> f64,
        qs_values: impl Fn(u32) -> f64,
    ) -> f64 {
        self.raw.eval_f64(params, |g| match g {
            GenId::X(i) => x_values(i),
            GenId::Qs(k) => qs_values(k),
            GenId::Q(_) => unreachable!(),
        })
    }

    /// View a moment polynomial in the extended algebra at level `(0,0)`,
    /// under the identification `q_k^(0,0) = q_k`.
    pub fn from_moment(p: &MomentPoly) -> ExtPoly {
        let mut raw = RawPoly::zero();
        for (mono, c) in p.raw().terms() {
            let mut m = Monomial::unit();
            for (g, e) in mono.factors() {
                let k = match g {
                    GenId::Q(k) => *k,
                    _ => unreachable!(),
                };
                m = m.mul(&Monomial::var_pow(GenId::Qs(k), *e));
            }
            raw.insert(m, c.clone());
        }
        ExtPoly {
            raw,
            level: ShiftLevel::new(0, 0),
        }
    }

    /// Inverse of [`ExtPoly::from_moment`]; only valid at level `(0,0)`.
    pub fn to_moment(&self) -> Option<MomentPoly> {
        if self.level != ShiftLevel::new(0, 0) {
            return None;
        }
        let mut raw = RawPoly::zero();
        for (mono, c) in self.raw.terms() {
            let mut m = Monomial::unit();
            for (g, e) in mono.factors() {
                match g {
                    GenId::Qs(k) => m = m.mul(&Monomial::var_pow(GenId::Q(*k), *e)),
                    _ => return None,
                }
            }
            raw.insert(m, c.clone());
        }
        Some(MomentPoly::from_raw(raw))
    }
}

impl fmt::Display for ExtPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.raw.fmt_with(f, Some(self.level))
    }
}

/// Exact univariate polynomial in the auxiliary variable `t`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PhiPoly {
    coeffs: BTreeMap<u32, CoeffElem>,
}

impl PhiPoly {
    pub fn zero() -> Self {
        PhiPoly {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        PhiPoly::t_pow(0)
    }

    pub fn t_pow(k: u32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k, CoeffElem::one());
        PhiPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn insert(&mut self, k: u32, c: CoeffElem) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&k) {
            Some(existing) => {
                *existing = existing.add(&c);
                if existing.is_zero() {
                    self.coeffs.remove(&k);
                }
            }
            None => {
                self.coeffs.insert(k, c);
            }
        }
    }

    pub fn add(&self, other: &PhiPoly) -> PhiPoly {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.insert(*k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &CoeffElem) -> PhiPoly {
        let mut out = PhiPoly::zero();
        for (k, ck) in &self.coeffs {
            out.insert(*k, ck.mul(c));
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> PhiPoly {
        self.scale(&CoeffElem::from_int(n))
    }

    pub fn mul(&self, other: &PhiPoly) -> PhiPoly {
        let mut out = PhiPoly::zero();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &other.coeffs {
                out.insert(ka + kb, ca.mul(cb));
            }
        }
        out
    }

    /// Multiplication by `t`.
    pub fn t_times(&self) -> PhiPoly {
        let mut out = PhiPoly::zero();
        for (k, c) in &self.coeffs {
            out.insert(k + 1, c.clone());
        }
        out
    }

    /// Formal derivative in `t`.
    pub fn derivative(&self) -> PhiPoly {
        let mut out = PhiPoly::zero();
        for (k, c) in &self.coeffs {
            if *k >= 1 {
                out.insert(k - 1, c.scale_int(*k as i64));
            }
        }
        out
    }

    /// Value at `t = 0`, i.e. the constant coefficient.
    pub fn at_zero(&self) -> CoeffElem {
        self.coeffs.get(&0).cloned().unwrap_or_else(CoeffElem::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&u32, &CoeffElem)> {
        self.coeffs.iter()
    }
}
