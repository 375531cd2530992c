//! Log-space verification of the transform inequalities: the four
//! `Q[t^k e^{+-Ct}]` bounds with their two lower companions, the uniform
//! `chi_C` bound `1 + theta + ln 2`, and the envelope
//! `(lambda x C + 1) e^{lambda x C} / (C (1 + x e^{lambda x C})) <= lambda (1 + 1/ln 2)`
//! used by the uniform-boundedness argument. Everything is compared through
//! log-magnitudes so the suite passes at `C = 1e5` without overflow.

use crate::exppoly::ExpPoly;
use crate::point::ThomaPoint;
use crate::qnum::{chi, eval_q_transform};
use serde::{Deserialize, Serialize};

/// Absolute slack in log space for floating-point rounding of exact
/// inequalities.
const LOG_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundsConfig {
    /// Positive magnitudes; each is checked at +C and -C.
    pub c_grid: Vec<f64>,
    pub thetas: Vec<f64>,
    pub max_power: u32,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            c_grid: vec![1.0, 10.0, 1e2, 1e3, 1e4, 1e5],
            thetas: vec![0.5, 1.0, 2.0],
            max_power: 8,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundsReport {
    pub points: usize,
    pub checks: usize,
    pub violations: usize,
    /// First few violation descriptions.
    pub messages: Vec<String>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Recorder {
    checks: usize,
    violations: usize,
    messages: Vec<String>,
}

impl Recorder {
    fn new() -> Self {
        Recorder {
            checks: 0,
            violations: 0,
            messages: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.messages.len() < 20 {
                self.messages.push(describe());
            }
        }
    }
}

/// `ln(x^k e^{x C})` with the `x = 0` and `k = 0` cases handled exactly.
fn ln_pow_exp(x: f64, k: u32, c: f64) -> f64 {
    if k == 0 {
        return x * c;
    }
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    k as f64 * x.ln() + x * c
}

fn check_point(p: &ThomaPoint, c: f64, theta: f64, max_power: u32, rec: &mut Recorder) {
    debug_assert!(c > 0.0);
    let a1 = p.alpha1();
    let b1 = p.beta1();
    let chi_cap = 1.0 + theta + std::f64::consts::LN_2;

    for k in 0..=max_power {
        // |Q[t^k e^{Ct}]| <= max(alpha1^k e^{alpha1 C}, theta^k)
        let q_pos = eval_q_transform(p, &ExpPoly::term(1.0, k, c), theta);
        let cap_pos = ln_pow_exp(a1, k, c).max(k as f64 * theta.ln());
        rec.check(q_pos.ln_abs() <= cap_pos + LOG_SLACK, || {
            format!(
                "upper bound failed: ln|Q[t^{} e^{{{} t}}]| = {:.6} > {:.6} (theta={})",
                k,
                c,
                q_pos.ln_abs(),
                cap_pos,
                theta
            )
        });
        // |Q[t^k e^{-Ct}]| <= max(theta^k beta1^k e^{theta beta1 C}, 1)
        let q_neg = eval_q_transform(p, &ExpPoly::term(1.0, k, -c), theta);
        let cap_neg = (ln_pow_exp(theta * b1, k, 0.0) + theta * b1 * c).max(0.0);
        rec.check(q_neg.ln_abs() <= cap_neg + LOG_SLACK, || {
            format!(
                "upper bound failed: ln|Q[t^{} e^{{-{} t}}]| = {:.6} > {:.6} (theta={})",
                k,
                c,
                q_neg.ln_abs(),
                cap_neg,
                theta
            )
        });
    }

    // alpha1 e^{alpha1 C} <= Q[e^{Ct}]
    let q_exp_pos = eval_q_transform(p, &ExpPoly::exp(c), theta);
    rec.check(
        ln_pow_exp(a1, 1, c) <= q_exp_pos.ln_abs() + LOG_SLACK,
        || {
            format!(
                "lower bound failed: alpha1 e^(alpha1 C) > Q[e^(Ct)] at C={}",
                c
            )
        },
    );
    // beta1 e^{theta beta1 C} <= Q[e^{-Ct}]
    let q_exp_neg = eval_q_transform(p, &ExpPoly::exp(-c), theta);
    let lower_neg = if b1 == 0.0 {
        f64::NEG_INFINITY
    } else {
        b1.ln() + theta * b1 * c
    };
    rec.check(lower_neg <= q_exp_neg.ln_abs() + LOG_SLACK, || {
        format!(
            "lower bound failed: beta1 e^(theta beta1 C) > Q[e^(-Ct)] at C={}",
            c
        )
    });

    // |chi_{+-C}| <= 1 + theta + ln 2 for C >= 1
    if c >= 1.0 {
        for signed_c in [c, -c] {
            let v = chi(p, signed_c, theta).expect("nonzero C");
            rec.check(v.abs() <= chi_cap + 1e-12, || {
                format!("chi bound failed: |chi_{}| = {} > {}", signed_c, v, chi_cap)
            });
        }
    }
}

/// Envelope value `(lambda x C + 1) e^{lambda x C} / (C (1 + x e^{lambda x C}))`
/// in log space.
fn envelope_ln(x: f64, lambda: f64, c: f64) -> f64 {
    let u = lambda * x * c;
    let ln_num = (u + 1.0).ln() + u;
    let ln_tail = if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln() + u
    };
    let ln_den = c.ln() + crate::signed_log::SignedLog::exp_of(ln_tail).ln_1p();
    ln_num - ln_den
}

fn check_envelope(lambda: f64, c: f64, rec: &mut Recorder) {
    if c <= 2.0 / lambda {
        return;
    }
    let cap = (lambda * (1.0 + 1.0 / std::f64::consts::LN_2)).ln();
    for i in 0..=100 {
        let x = i as f64 / 100.0;
        rec.check(envelope_ln(x, lambda, c) <= cap + LOG_SLACK, || {
            format!(
                "envelope failed at x={}, lambda={}, C={}: ln value {:.6} > {:.6}",
                x,
                lambda,
                c,
                envelope_ln(x, lambda, c),
                cap
            )
        });
    }
    // at the case-split boundary x* = ln(C lambda)/(C lambda) the value is <= lambda
    let xs = (c * lambda).ln() / (c * lambda);
    if (0.0..=1.0).contains(&xs) {
        rec.check(
            envelope_ln(xs, lambda, c) <= lambda.ln() + LOG_SLACK,
            || {
                format!(
                    "envelope case-split failed at x*={}, lambda={}, C={}",
                    xs, lambda, c
                )
            },
        );
    }
}

/// Run the full bounds suite over a set of points.
pub fn check_bounds(points: &[ThomaPoint], cfg: &BoundsConfig) -> BoundsReport {
    let mut rec = Recorder::new();
    for theta in &cfg.thetas {
        for c in &cfg.c_grid {
            for p in points {
                check_point(p, *c, *theta, cfg.max_power, &mut rec);
            }
            for lambda in [1.0, *theta] {
                check_envelope(lambda, *c, &mut rec);
            }
        }
    }
    BoundsReport {
        points: points.len(),
        checks: rec.checks,
        violations: rec.violations,
        messages: rec.messages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{seeded_points, ThomaPoint};

    #[test]
    fn bounds_hold_on_seeded_points() {
        let mut points = seeded_points(42, 60);
        points.push(ThomaPoint::empty());
        points.push(ThomaPoint::new(vec![1.0], vec![]).unwrap());
        points.push(ThomaPoint::new(vec![], vec![0.5, 0.5]).unwrap());
        let cfg = BoundsConfig {
            c_grid: vec![1.0, 10.0, 700.0, 1e5],
            thetas: vec![0.5, 1.0, 2.0],
            max_power: 6,
        };
        let report = check_bounds(&points, &cfg);
        assert!(report.passed(), "violations: {:?}", report.messages);
        assert!(report.checks > 1000);
    }

    #[test]
    fn chi_bound_at_overflow_scale() {
        // the delta point at alpha1 = 1 with C = 700 exceeds f64 range in
        // linear space; the log-space bound still verifies
        let p = ThomaPoint::new(vec![1.0], vec![]).unwrap();
        let cfg = BoundsConfig {
            c_grid: vec![700.0],
            thetas: vec![1.0],
            max_power: 2,
        };
        let report = check_bounds(&[p], &cfg);
        assert!(report.passed(), "violations: {:?}", report.messages);
    }

    #[test]
    fn envelope_value_at_case_split() {
        // value at x* = ln(C lambda)/(C lambda) stays below lambda
        for (lambda, c) in [(1.0f64, 10.0f64), (0.5, 100.0), (2.0, 1e4)] {
            let xs = (c * lambda).ln() / (c * lambda);
            assert!(envelope_ln(xs, lambda, c) <= lambda.ln() + LOG_SLACK);
        }
    }
}
