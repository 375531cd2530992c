//! Coefficient ring for the symbolic layer.
//!
//! Coefficients are finite sums of terms `r * theta^e0 * s1^e1 * s2^e2 * pa^e3 * ptau^e4`
//! with `r` an arbitrary-precision rational. The exponent of `theta` is a Laurent
//! exponent (may be negative); all other exponents are nonnegative. Canonical form:
//! no duplicate parameter monomials, no zero rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Symbolic parameters of the coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    /// Jack parameter theta (Laurent exponent allowed).
    Theta,
    /// z + z'.
    S1,
    /// z z'.
    S2,
    /// Petrov parameter a.
    PetA,
    /// Petrov parameter tau.
    PetTau,
}

/// Exponent vector of one parameter monomial. `theta` is a Laurent exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ParamPow {
    pub theta: i64,
    pub s1: u32,
    pub s2: u32,
    pub pa: u32,
    pub ptau: u32,
}

impl ParamPow {
    fn is_unit(&self) -> bool {
        *self == ParamPow::default()
    }

    fn mul(&self, other: &ParamPow) -> ParamPow {
        ParamPow {
            theta: self.theta + other.theta,
            s1: self.s1 + other.s1,
            s2: self.s2 + other.s2,
            pa: self.pa + other.pa,
            ptau: self.ptau + other.ptau,
        }
    }
}

/// Numeric bindings for all parameters, used by the evaluation layer.
#[derive(Clone, Copy, Debug)]
pub struct ParamValues {
    pub theta: f64,
    pub s1: f64,
    pub s2: f64,
    pub pa: f64,
    pub ptau: f64,
}

impl ParamValues {
    pub fn new(theta: f64, s1: f64, s2: f64) -> Self {
        ParamValues {
            theta,
            s1,
            s2,
            pa: 0.0,
            ptau: 0.0,
        }
    }
}

/// Error raised when a substitution leaves the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffError {
    /// theta -> 0 requested while a term still carries a negative theta exponent.
    ResidualThetaInverse,
    /// A zero value was bound to a parameter occurring with negative exponent.
    ZeroToNegativePower,
}

impl fmt::Display for CoeffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffError::ResidualThetaInverse => {
                write!(f, "negative theta exponent remains after substitution")
            }
            CoeffError::ZeroToNegativePower => {
                write!(f, "cannot bind zero to a parameter with negative exponent")
            }
        }
    }
}

impl std::error::Error for CoeffError {}

/// Element of the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CoeffElem {
    terms: BTreeMap<ParamPow, BigRational>,
}

impl CoeffElem {
    pub fn zero() -> Self {
        CoeffElem {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        CoeffElem::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        CoeffElem::from_rational(BigRational::from(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        CoeffElem::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(ParamPow::default(), r);
        }
        CoeffElem { terms }
    }

    /// The monomial `param^exp` (exp may be negative only for theta).
    pub fn param_pow(p: Param, exp: i64) -> Self {
        let mut pw = ParamPow::default();
        match p {
            Param::Theta => pw.theta = exp,
            Param::S1 => {
                assert!(exp >= 0);
                pw.s1 = exp as u32;
            }
            Param::S2 => {
                assert!(exp >= 0);
                pw.s2 = exp as u32;
            }
            Param::PetA => {
                assert!(exp >= 0);
                pw.pa = exp as u32;
            }
            Param::PetTau => {
                assert!(exp >= 0);
                pw.ptau = exp as u32;
            }
        }
        let mut terms = BTreeMap::new();
        terms.insert(pw, BigRational::one());
        CoeffElem { terms }
    }

    pub fn theta_pow(exp: i64) -> Self {
        CoeffElem::param_pow(Param::Theta, exp)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&ParamPow::default())
                .map(|r| r.is_one())
                .unwrap_or(false)
    }

    /// The rational part if the element is a pure rational (possibly zero).
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(r) = self.terms.get(&ParamPow::default()) {
                return Some(r.clone());
            }
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamPow, &BigRational)> {
        self.terms.iter()
    }

    fn insert_term(&mut self, pw: ParamPow, r: BigRational) {
        if r.is_zero() {
            return;
        }
        match self.terms.get_mut(&pw) {
            Some(existing) => {
                *existing += r;
                if existing.is_zero() {
                    self.terms.remove(&pw);
                }
            }
            None => {
                self.terms.insert(pw, r);
            }
        }
    }

    pub fn add(&self, other: &CoeffElem) -> CoeffElem {
        let mut out = self.clone();
        for (pw, r) in &other.terms {
            out.insert_term(*pw, r.clone());
        }
        out
    }

    pub fn sub(&self, other: &CoeffElem) -> CoeffElem {
        let mut out = self.clone();
        for (pw, r) in &other.terms {
            out.insert_term(*pw, -r.clone());
        }
        out
    }

    pub fn neg(&self) -> CoeffElem {
        CoeffElem {
            terms: self.terms.iter().map(|(pw, r)| (*pw, -r.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &CoeffElem) -> CoeffElem {
        let mut out = CoeffElem::zero();
        for (pa, ra) in &self.terms {
            for (pb, rb) in &other.terms {
                out.insert_term(pa.mul(pb), ra * rb);
            }
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> CoeffElem {
        self.mul(&CoeffElem::from_int(n))
    }

    pub fn pow(&self, exp: u32) -> CoeffElem {
        let mut out = CoeffElem::one();
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    /// Substitute `s2 -> ptau * theta` (first half of the Petrov regime).
    pub fn subst_s2_tau_theta(&self) -> CoeffElem {
        let mut out = CoeffElem::zero();
        for (pw, r) in &self.terms {
            let mut npw = *pw;
            npw.theta += pw.s2 as i64;
            npw.ptau += pw.s2;
            npw.s2 = 0;
            out.insert_term(npw, r.clone());
        }
        out
    }

    /// Substitute `s1 -> -pa` (second half of the Petrov regime).
    pub fn subst_s1_neg_a(&self) -> CoeffElem {
        let mut out = CoeffElem::zero();
        for (pw, r) in &self.terms {
            let mut npw = *pw;
            npw.pa += pw.s1;
            npw.s1 = 0;
            let signed = if pw.s1 % 2 == 1 {
                -r.clone()
            } else {
                r.clone()
            };
            out.insert_term(npw, signed);
        }
        out
    }

    /// Substitute `theta -> 0`: terms with positive theta exponent vanish; a
    /// residual negative exponent is a degeneration failure.
    pub fn set_theta_zero(&self) -> Result<CoeffElem, CoeffError> {
        let mut out = CoeffElem::zero();
        for (pw, r) in &self.terms {
            if pw.theta < 0 {
                return Err(CoeffError::ResidualThetaInverse);
            }
            if pw.theta == 0 {
                out.insert_term(*pw, r.clone());
            }
        }
        Ok(out)
    }

    /// Bind one parameter to an exact rational value.
    pub fn bind(&self, p: Param, value: &BigRational) -> Result<CoeffElem, CoeffError> {
        let mut out = CoeffElem::zero();
        for (pw, r) in &self.terms {
            let mut npw = *pw;
            let exp: i64 = match p {
                Param::Theta => std::mem::take(&mut npw.theta),
                Param::S1 => std::mem::take(&mut npw.s1) as i64,
                Param::S2 => std::mem::take(&mut npw.s2) as i64,
                Param::PetA => std::mem::take(&mut npw.pa) as i64,
                Param::PetTau => std::mem::take(&mut npw.ptau) as i64,
            };
            if exp < 0 && value.is_zero() {
                return Err(CoeffError::ZeroToNegativePower);
            }
            let factor = rational_powi(value, exp);
            out.insert_term(npw, r * factor);
        }
        Ok(out)
    }

    pub fn eval_f64(&self, v: &ParamValues) -> f64 {
        let mut acc = 0.0;
        for (pw, r) in &self.terms {
            let mut t = rational_to_f64(r);
            t *= v.theta.powi(pw.theta as i32);
            t *= v.s1.powi(pw.s1 as i32);
            t *= v.s2.powi(pw.s2 as i32);
            t *= v.pa.powi(pw.pa as i32);
            t *= v.ptau.powi(pw.ptau as i32);
            acc += t;
        }
        acc
    }

    fn fmt_term(
        pw: &ParamPow,
        r: &BigRational,
        lead: bool,
        f: &mut fmt::Formatter<'_>,
    ) -> fmt::Result {
        let mag = r.abs();
        if lead {
            if r.is_negative() {
                write!(f, "-")?;
            }
        } else if r.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mut parts: Vec<String> = Vec::new();
        if !mag.is_one() || pw.is_unit() {
            parts.push(format_rational(&mag));
        }
        push_pow(&mut parts, "theta", pw.theta);
        push_pow(&mut parts, "s1", pw.s1 as i64);
        push_pow(&mut parts, "s2", pw.s2 as i64);
        push_pow(&mut parts, "pa", pw.pa as i64);
        push_pow(&mut parts, "ptau", pw.ptau as i64);
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Display for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (pw, r)) in self.terms.iter().enumerate() {
            CoeffElem::fmt_term(pw, r, i == 0, f)?;
        }
        Ok(())
    }
}

fn push_pow(parts: &mut Vec<String>, name: &str, exp: i64) {
    if exp == 0 {
        return;
    }
    if exp == 1 {
        parts.push(name.to_string());
    } else {
        parts.push(format!("{}^{}", name, exp));
    }
}

pub(crate) fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_powi(v: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let base = if exp > 0 { v.clone() } else { v.recip() };
    let mut out = BigRational::one();
    for _ in 0..exp.unsigned_abs() {
        out *= &base;
    }
    out
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}
