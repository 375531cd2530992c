//! Signed log-space numbers: a value is stored as `(sign, ln|value|)` so that
//! quantities like `Q[e^{Ct}] ~ e^{C alpha_1}` stay representable for
//! `|C|` up to 1e5 and beyond. Addition resolves signs through log-sum-exp;
//! multiplication and division add and subtract log-magnitudes.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    sign: i8,
    ln: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLog = SignedLog { sign: 1, ln: 0.0 };

    pub fn new(sign: i8, ln: f64) -> Self {
        if sign == 0 || ln == f64::NEG_INFINITY {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                ln,
            }
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            SignedLog::ZERO
        } else if v > 0.0 {
            SignedLog {
                sign: 1,
                ln: v.ln(),
            }
        } else {
            SignedLog {
                sign: -1,
                ln: (-v).ln(),
            }
        }
    }

    /// The value `e^u`, exact in log space.
    pub fn exp_of(u: f64) -> Self {
        SignedLog { sign: 1, ln: u }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_abs(&self) -> f64 {
        self.ln
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(&self) -> SignedLog {
        if self.sign == 0 {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: 1,
                ln: self.ln,
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.ln.exp()
    }

    pub fn recip(&self) -> SignedLog {
        assert!(self.sign != 0, "division by zero in log space");
        SignedLog {
            sign: self.sign,
            ln: -self.ln,
        }
    }

    pub fn powi(&self, k: i32) -> SignedLog {
        if self.sign == 0 {
            return if k == 0 {
                SignedLog::ONE
            } else {
                SignedLog::ZERO
            };
        }
        let sign = if k % 2 == 0 { 1 } else { self.sign };
        SignedLog {
            sign,
            ln: self.ln * k as f64,
        }
    }

    /// `ln(1 + self)` for a nonnegative value, overflow-free.
    pub fn ln_1p(&self) -> f64 {
        assert!(self.sign >= 0, "ln(1+x) requires x >= 0 here");
        if self.sign == 0 {
            return 0.0;
        }
        if self.ln > 0.0 {
            // 1 + x = x (1 + 1/x)
            self.ln + (-self.ln).exp().ln_1p()
        } else {
            self.ln.exp().ln_1p()
        }
    }

    /// Compare magnitudes.
    pub fn cmp_abs(&self, other: &SignedLog) -> Ordering {
        self.ln.partial_cmp(&other.ln).unwrap_or(Ordering::Equal)
    }
}

impl Add for SignedLog {
    type Output = SignedLog;

    fn add(self, other: SignedLog) -> SignedLog {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        if self.sign == other.sign {
            let (hi, lo) = if self.ln >= other.ln {
                (self.ln, other.ln)
            } else {
                (other.ln, self.ln)
            };
            return SignedLog {
                sign: self.sign,
                ln: hi + (lo - hi).exp().ln_1p(),
            };
        }
        // opposite signs: larger magnitude wins
        match self.ln.partial_cmp(&other.ln) {
            Some(Ordering::Equal) | None => SignedLog::ZERO,
            Some(Ordering::Greater) => {
                let d = (other.ln - self.ln).exp();
                SignedLog::new(self.sign, self.ln + (-d).ln_1p())
            }
            Some(Ordering::Less) => {
                let d = (self.ln - other.ln).exp();
                SignedLog::new(other.sign, other.ln + (-d).ln_1p())
            }
        }
    }
}

impl Sub for SignedLog {
    type Output = SignedLog;

    fn sub(self, other: SignedLog) -> SignedLog {
        self + (-other)
    }
}

impl Neg for SignedLog {
    type Output = SignedLog;

    fn neg(self) -> SignedLog {
        SignedLog {
            sign: -self.sign,
            ln: self.ln,
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, other: SignedLog) -> SignedLog {
        if self.sign == 0 || other.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln: self.ln + other.ln,
        }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;

    fn div(self, other: SignedLog) -> SignedLog {
        assert!(other.sign != 0, "division by zero in log space");
        if self.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln: self.ln - other.ln,
        }
    }
}

impl fmt::Display for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.ln),
            _ => write!(f, "-exp({})", self.ln),
        }
    }
}

/// Sum a slice in log space, left to right (deterministic order).
pub fn sum(values: &[SignedLog]) -> SignedLog {
    values.iter().fold(SignedLog::ZERO, |acc, v| acc + *v)
}

/// `e^u - 1`, stable across all magnitudes of `u`.
pub fn expm1_sl(u: f64) -> SignedLog {
    if u.abs() <= 30.0 {
        SignedLog::from_f64(u.exp_m1())
    } else {
        SignedLog::exp_of(u) - SignedLog::ONE
    }
}

/// `e^u - 1 - u`, stable across all magnitudes of `u`.
pub fn expm1m_sl(u: f64) -> SignedLog {
    if u.abs() <= 1e-4 {
        // u^2/2 (1 + u/3 + u^2/12)
        SignedLog::from_f64(0.5 * u * u * (1.0 + u / 3.0 + u * u / 12.0))
    } else if u.abs() <= 30.0 {
        SignedLog::from_f64(u.exp_m1() - u)
    } else {
        SignedLog::exp_of(u) - SignedLog::ONE - SignedLog::from_f64(u)
    }
}

/// `(1 + u) e^u - 1 = u e^u + (e^u - 1)`: both pieces share a sign, so the
/// sum never cancels.
pub fn one_plus_u_exp_u_minus_1(u: f64) -> SignedLog {
    SignedLog::from_f64(u) * SignedLog::exp_of(u) + expm1_sl(u)
}
