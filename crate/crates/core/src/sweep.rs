//! Limit sweeps: evaluate an approximant along a C-grid, compare against the
//! claimed limit, and report a monotone-tail convergence verdict.

use crate::exppoly::ExpPoly;
use crate::point::{NumParams, ThomaPoint};
use crate::poly::ShiftLevel;
use crate::qnum::{self, GenRef, NumError};
use crate::signed_log::SignedLog;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Named limits. The `gammaC-v` target carries its generator and the sweep
/// direction (both one-sided limits exist).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitTarget {
    ExasymptPos,
    ExasymptNeg,
    ChiPos,
    ChiNeg,
    GammaCdPos,
    GammaCdNeg,
    GammaCV(GenRef, bool),
    AChi,
}

impl LimitTarget {
    pub fn name(&self) -> &'static str {
        match self {
            LimitTarget::ExasymptPos => "exasympt-pos",
            LimitTarget::ExasymptNeg => "exasympt-neg",
            LimitTarget::ChiPos => "chi-pos",
            LimitTarget::ChiNeg => "chi-neg",
            LimitTarget::GammaCdPos => "gammaCD-pos",
            LimitTarget::GammaCdNeg => "gammaCD-neg",
            LimitTarget::GammaCV(..) => "gammaC-v",
            LimitTarget::AChi => "a-chi",
        }
    }

    /// Whether the sweep runs along positive C.
    pub fn positive_side(&self) -> bool {
        match self {
            LimitTarget::ExasymptNeg | LimitTarget::ChiNeg | LimitTarget::GammaCdNeg => false,
            LimitTarget::GammaCV(_, positive) => *positive,
            _ => true,
        }
    }
}

impl fmt::Display for LimitTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitTarget::GammaCV(v, positive) => {
                write!(f, "gammaC-v[{}{}]", v, if *positive { "" } else { ",neg" })
            }
            other => write!(f, "{}", other.name()),
        }
    }
}

/// Parse a limit name; `gammaC-v` requires a generator suffix like
/// `gammaC-v:q1` or `gammaC-v:b1` (positive direction) and `gammaC-v-neg:...`
/// sweeps towards `C -> -inf`.
impl FromStr for LimitTarget {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exasympt-pos" => Ok(LimitTarget::ExasymptPos),
            "exasympt-neg" => Ok(LimitTarget::ExasymptNeg),
            "chi-pos" => Ok(LimitTarget::ChiPos),
            "chi-neg" => Ok(LimitTarget::ChiNeg),
            "gammaCD-pos" => Ok(LimitTarget::GammaCdPos),
            "gammaCD-neg" => Ok(LimitTarget::GammaCdNeg),
            "a-chi" => Ok(LimitTarget::AChi),
            other => {
                if let Some(gen) = other.strip_prefix("gammaC-v-neg:") {
                    parse_gen(gen).map(|g| LimitTarget::GammaCV(g, false))
                } else if let Some(gen) = other.strip_prefix("gammaC-v:") {
                    parse_gen(gen).map(|g| LimitTarget::GammaCV(g, true))
                } else {
                    Err(NumError::UnknownLimit(other.to_string()))
                }
            }
        }
    }
}

fn parse_gen(s: &str) -> Result<GenRef, NumError> {
    let bad = || NumError::UnknownLimit(format!("bad generator: {}", s));
    if let Some(rest) = s.strip_prefix('q') {
        rest.parse::<u32>().map(GenRef::Q).map_err(|_| bad())
    } else if let Some(rest) = s.strip_prefix('a') {
        rest.parse::<i32>().map(GenRef::X).map_err(|_| bad())
    } else if let Some(rest) = s.strip_prefix('b') {
        rest.parse::<i32>()
            .map(|j| GenRef::X(-j))
            .map_err(|_| bad())
    } else {
        Err(bad())
    }
}

/// Default grid of |C| values.
pub fn default_grid() -> Vec<f64> {
    vec![1.0, 10.0, 1e2, 1e3, 1e4, 1e5]
}

/// Tolerance model `const / |C|`; the constant defaults to 20.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SweepTolerance {
    pub constant: f64,
}

impl Default for SweepTolerance {
    fn default() -> Self {
        SweepTolerance { constant: 20.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub c: f64,
    pub value: f64,
    pub claimed_limit: f64,
    pub abs_err: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub target: String,
    pub level: (u32, u32),
    pub rows: Vec<SweepRow>,
    /// Tail errors non-increasing and the final error within tolerance.
    pub converged: bool,
    pub final_tolerance: f64,
}

/// Evaluate one limit target at a single C.
pub fn eval_target(
    p: &ThomaPoint,
    target: LimitTarget,
    c: f64,
    lvl: ShiftLevel,
    params: &NumParams,
) -> Result<f64, NumError> {
    let theta = params.theta;
    match target {
        LimitTarget::ExasymptPos => {
            // e^{-C alpha1} Q[e^{Ct}]
            let q = qnum::eval_q_transform(p, &ExpPoly::exp(c), theta);
            Ok((q * SignedLog::exp_of(-c * p.alpha1())).to_f64())
        }
        LimitTarget::ExasymptNeg => {
            // e^{C theta beta1} Q[e^{Ct}] with C < 0
            let q = qnum::eval_q_transform(p, &ExpPoly::exp(c), theta);
            Ok((q * SignedLog::exp_of(c * theta * p.beta1())).to_f64())
        }
        LimitTarget::ChiPos | LimitTarget::ChiNeg => qnum::chi(p, c, theta),
        LimitTarget::GammaCdPos | LimitTarget::GammaCdNeg => qnum::gamma_cd(p, c, c, lvl, params),
        LimitTarget::GammaCV(v, _) => qnum::gamma_c(p, c, v, lvl, params),
        LimitTarget::AChi => qnum::a_chi(p, c, params),
    }
}

/// The claimed limit of a target at a point.
pub fn claimed_limit(
    p: &ThomaPoint,
    target: LimitTarget,
    lvl: ShiftLevel,
    params: &NumParams,
) -> Result<f64, NumError> {
    let theta = params.theta;
    let shifted = p.shift(lvl.n as usize, lvl.m as usize);
    Ok(match target {
        LimitTarget::ExasymptPos => p.top_alpha_mass(theta),
        LimitTarget::ExasymptNeg => p.bottom_beta_mass(theta),
        LimitTarget::ChiPos => p.alpha1(),
        LimitTarget::ChiNeg => -theta * p.beta1(),
        LimitTarget::GammaCdPos => {
            let a = shifted.alpha1();
            a - a * a
        }
        LimitTarget::GammaCdNeg => {
            let b = shifted.beta1();
            theta * theta * (b - b * b)
        }
        LimitTarget::GammaCV(v, positive) => qnum::gamma_c_limit(p, positive, v, lvl, params),
        LimitTarget::AChi => qnum::nat_limit_alpha1(p, params)?,
    })
}

/// Run a sweep along the grid of |C| magnitudes (sign fixed by the target).
pub fn limit_sweep(
    p: &ThomaPoint,
    target: LimitTarget,
    grid: &[f64],
    lvl: ShiftLevel,
    params: &NumParams,
    tol: SweepTolerance,
) -> Result<SweepReport, NumError> {
    let sign = if target.positive_side() { 1.0 } else { -1.0 };
    let claimed = claimed_limit(p, target, lvl, params)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut magnitudes: Vec<f64> = grid.to_vec();
    magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &mag in &magnitudes {
        let c = sign * mag;
        let value = eval_target(p, target, c, lvl, params)?;
        rows.push(SweepRow {
            c,
            value,
            claimed_limit: claimed,
            abs_err: (value - claimed).abs(),
        });
    }
    let final_tolerance = tol.constant / magnitudes.last().copied().unwrap_or(1.0);
    // fluctuation far below the tolerance is noise, not divergence
    let noise_floor = final_tolerance * 1e-4;
    let tail: Vec<f64> = rows.iter().rev().take(3).map(|r| r.abs_err).collect();
    let tail_monotone = tail.windows(2).all(|w| w[0] <= w[1] + noise_floor);
    let converged = tail_monotone
        && rows
            .last()
            .map(|r| r.abs_err <= final_tolerance)
            .unwrap_or(false);
    Ok(SweepReport {
        target: target.to_string(),
        level: (lvl.n, lvl.m),
        rows,
        converged,
        final_tolerance,
    })
}
