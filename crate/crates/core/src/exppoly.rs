//! Finite sums of terms `c * t^k * e^{C t}`, the function class fed to the
//! Q-transform. Canonical form keys terms by `(k, C)`.

use crate::signed_log::SignedLog;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpTerm {
    pub coeff: f64,
    pub power: u32,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExpPoly {
    terms: Vec<ExpTerm>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        ExpPoly::term(c, 0, 0.0)
    }

    /// `e^{C t}`.
    pub fn exp(rate: f64) -> Self {
        ExpPoly::term(1.0, 0, rate)
    }

    /// `c * t^k * e^{C t}`.
    pub fn term(coeff: f64, power: u32, rate: f64) -> Self {
        let mut p = ExpPoly::zero();
        p.push(ExpTerm { coeff, power, rate });
        p
    }

    pub fn push(&mut self, t: ExpTerm) {
        if t.coeff == 0.0 {
            return;
        }
        match self
            .terms
            .iter_mut()
            .find(|u| u.power == t.power && u.rate == t.rate)
        {
            Some(u) => {
                u.coeff += t.coeff;
                if u.coeff == 0.0 {
                    let keep: Vec<ExpTerm> = self
                        .terms
                        .iter()
                        .copied()
                        .filter(|v| v.coeff != 0.0)
                        .collect();
                    self.terms = keep;
                }
            }
            None => {
                self.terms.push(t);
                self.terms
                    .sort_by(|a, b| (a.power, a.rate.to_bits()).cmp(&(b.power, b.rate.to_bits())));
            }
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(*t);
        }
        out
    }

    pub fn scale(&self, c: f64) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for t in &self.terms {
            out.push(ExpTerm {
                coeff: t.coeff * c,
                ..*t
            });
        }
        out
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    /// `Some(c)` when the function is the constant `c`.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => {
                let t = self.terms[0];
                (t.power == 0 && t.rate == 0.0).then_some(t.coeff)
            }
            _ => None,
        }
    }

    /// Plain f64 evaluation (used by sup-norm style tests at moderate rates).
    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|u| u.coeff * t.powi(u.power as i32) * (u.rate * t).exp())
            .sum()
    }

    /// Overflow-free evaluation at one location: each term carries the exact
    /// sign `sign(c) * sign(t)^k` and log-magnitude `ln|c| + k ln|t| + C t`.
    pub fn eval_log(&self, t: f64) -> SignedLog {
        let mut acc = SignedLog::ZERO;
        for u in &self.terms {
            let base = SignedLog::from_f64(u.coeff)
                * SignedLog::from_f64(t).powi(u.power as i32)
                * SignedLog::exp_of(u.rate * t);
            acc = acc + base;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_merge() {
        let mut p = ExpPoly::term(2.0, 1, 3.0);
        p.push(ExpTerm {
            coeff: 4.0,
            power: 1,
            rate: 3.0,
        });
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].coeff, 6.0);
    }

    #[test]
    fn constant_detection() {
        assert_eq!(ExpPoly::constant(3.5).as_constant(), Some(3.5));
        assert_eq!(ExpPoly::zero().as_constant(), Some(0.0));
        assert_eq!(ExpPoly::exp(1.0).as_constant(), None);
    }

    #[test]
    fn log_eval_matches_direct() {
        let p = ExpPoly::term(2.0, 2, 1.5).add(&ExpPoly::term(-0.5, 0, -1.0));
        for t in [-0.3, 0.0, 0.7] {
            let direct = p.eval(t);
            let logged = p.eval_log(t).to_f64();
            assert!((direct - logged).abs() < 1e-12 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn log_eval_survives_huge_rates() {
        let p = ExpPoly::term(1.0, 3, 1000.0);
        let v = p.eval_log(0.9);
        assert_eq!(v.sign(), 1);
        assert!((v.ln_abs() - (900.0 + 3.0 * 0.9f64.ln())).abs() < 1e-9);
    }
}
