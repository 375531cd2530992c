//! Euler-Maruyama simulation of the truncated natural-coordinate diffusion.
//!
//! The state lives in modified coordinates `xt_i = sgn_theta(i) x_i` for
//! `i in {-m..-1, 1..n}`. Drift and second-order coefficients come from the
//! natural-coordinate generator: drift
//! `s1 - theta sgn^{-1}(i) - theta^{-1} s2 xt_i + 2 theta sum_{j != i} x_j/(xt_i - xt_j)`
//! and coefficient matrix `sgn_theta(i) xt_i 1_{i=j} - xt_i xt_j`. The noise
//! uses `sigma sigma^T = 2 (D - xt xt^T)` so that the one-step mean
//! displacement reproduces the generator (whose second-order part carries no
//! one-half factor). Ordering of coordinates is not enforced during
//! simulation; the drift is label-symmetric.
//!
//! Boundary handling: natural coordinates reflect at zero, and the state is
//! rescaled by `1/sum x` whenever the total mass exceeds one. Near-collisions
//! of the singular drift trigger recursive step halving.

use crate::moment::MomentPoly;
use crate::nat::NatPoly;
use crate::ops;
use crate::point::{NumParams, ThomaPoint};
use crate::poly::Truncation;
use crate::simmat::SymMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum SimError {
    SubstepLimit { path: u64, time: f64 },
    BadConfig(String),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::SubstepLimit { path, time } => {
                write!(
                    f,
                    "path {} aborted at t = {}: substep limit exceeded",
                    path, time
                )
            }
            SimError::BadConfig(msg) => write!(f, "bad simulation config: {}", msg),
        }
    }
}

impl std::error::Error for SimError {}

/// Simulation state: modified coordinates in the fixed slot layout
/// `x_1..x_n, x_{-1}..x_{-m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    trunc: Truncation,
    x_tilde: Vec<f64>,
    pub time: f64,
}

impl SimState {
    /// Build from natural coordinates (alphas then betas).
    pub fn from_point(p: &ThomaPoint, n: u32, m: u32, theta: f64) -> Result<Self, SimError> {
        if p.alpha.len() > n as usize || p.beta.len() > m as usize {
            return Err(SimError::BadConfig(format!(
                "point with {} alphas / {} betas does not fit truncation ({},{})",
                p.alpha.len(),
                p.beta.len(),
                n,
                m
            )));
        }
        let mut x_tilde = vec![0.0; (n + m) as usize];
        for (i, &a) in p.alpha.iter().enumerate() {
            x_tilde[i] = a;
        }
        for (j, &b) in p.beta.iter().enumerate() {
            x_tilde[n as usize + j] = -theta * b;
        }
        Ok(SimState {
            trunc: Truncation::new(n, m),
            x_tilde,
            time: 0.0,
        })
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.x_tilde.len()
    }

    fn sgn_theta_inv(&self, slot: usize, theta: f64) -> f64 {
        if slot < self.trunc.n as usize {
            1.0
        } else {
            -1.0 / theta
        }
    }

    /// Natural coordinate of a slot.
    pub fn natural(&self, slot: usize, theta: f64) -> f64 {
        self.x_tilde[slot] * self.sgn_theta_inv(slot, theta)
    }

    /// Natural coordinates in slot order.
    pub fn naturals(&self, theta: f64) -> Vec<f64> {
        (0..self.dim()).map(|s| self.natural(s, theta)).collect()
    }

    pub fn sum_natural(&self, theta: f64) -> f64 {
        (0..self.dim()).map(|s| self.natural(s, theta)).sum()
    }

    pub fn x_tilde(&self) -> &[f64] {
        &self.x_tilde
    }

    /// Natural coordinate lookup by signed index, for polynomial evaluation.
    pub fn natural_by_index(&self, i: i32, theta: f64) -> f64 {
        let n = self.trunc.n as usize;
        if i > 0 && (i as usize) <= n {
            self.x_tilde[(i - 1) as usize]
        } else if i < 0 && ((-i) as usize) <= self.trunc.m as usize {
            -self.x_tilde[n + (-i - 1) as usize] / theta
        } else {
            0.0
        }
    }
}

/// Substep policy: recursive halving near drift singularities.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SubstepPolicy {
    /// Pairs of live coordinates closer than this count as a near-collision,
    /// which tightens the displacement cap tenfold.
    pub gap_threshold: f64,
    /// Maximum recursion depth; exceeded depth aborts the path.
    pub max_halvings: u32,
    /// Halve whenever `dt * max |drift|` exceeds this displacement cap.
    pub max_drift_step: f64,
}

impl Default for SubstepPolicy {
    fn default() -> Self {
        SubstepPolicy {
            gap_threshold: 1e-6,
            max_halvings: 20,
            max_drift_step: 0.05,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: u32,
    pub m: u32,
    pub dt: f64,
    pub t_end: f64,
    pub paths: u64,
    pub seed: u64,
    pub theta: f64,
    pub s1: f64,
    pub s2: f64,
    #[serde(default)]
    pub substep: SubstepPolicy,
    /// Record every k-th step (1 = every step).
    #[serde(default = "default_record_every")]
    pub record_every: u32,
}

fn default_record_every() -> u32 {
    10
}

impl SimConfig {
    pub fn params(&self) -> NumParams {
        NumParams::new(self.theta, self.s1, self.s2)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.dt <= 0.0 {
            return Err(SimError::BadConfig("dt must be positive".into()));
        }
        if self.paths == 0 {
            return Err(SimError::BadConfig("need at least one path".into()));
        }
        if self.theta <= 0.0 {
            return Err(SimError::BadConfig("theta must be positive".into()));
        }
        if self.n == 0 && self.m == 0 {
            return Err(SimError::BadConfig("empty truncation".into()));
        }
        Ok(())
    }
}

/// Drift of the modified coordinates. Pair terms with a vanishing numerator
/// contribute zero even at zero gap (the coordinate is absent), so the
/// all-zero state has plain affine drift.
pub fn drift_nat(state: &SimState, params: &NumParams) -> Vec<f64> {
    let theta = params.theta;
    let d = state.dim();
    let mut drift = vec![0.0; d];
    for s in 0..d {
        let sgn_inv = state.sgn_theta_inv(s, theta);
        drift[s] = params.s1 - theta * sgn_inv - params.s2 / theta * state.x_tilde[s];
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let gap = state.x_tilde[a] - state.x_tilde[b];
            let xa = state.natural(a, theta);
            let xb = state.natural(b, theta);
            if xb > 0.0 {
                drift[a] += 2.0 * theta * xb / gap;
            }
            if xa > 0.0 {
                drift[b] += 2.0 * theta * xa / (-gap);
            }
        }
    }
    drift
}

/// Second-order coefficient matrix `D - xt xt^T` with
/// `D = diag(sgn_theta(i) xt_i)`; positive semidefinite on the simplex.
pub fn diffusion_matrix(state: &SimState, theta: f64) -> SymMatrix {
    let d = state.dim();
    let mut m = SymMatrix::zeros(d);
    for i in 0..d {
        let sgn = 1.0 / state.sgn_theta_inv(i, theta);
        for j in i..d {
            let mut v = -state.x_tilde[i] * state.x_tilde[j];
            if i == j {
                v += sgn * state.x_tilde[i];
            }
            m.set(i, j, v);
        }
    }
    m
}

/// Whether the current state sits inside a drift singularity: two live
/// coordinates with nearly equal modified values.
fn near_collision(state: &SimState, theta: f64, gap_threshold: f64) -> bool {
    let d = state.dim();
    for a in 0..d {
        for b in (a + 1)..d {
            if state.natural(a, theta) > gap_threshold
                && state.natural(b, theta) > gap_threshold
                && (state.x_tilde[a] - state.x_tilde[b]).abs() < gap_threshold
            {
                return true;
            }
        }
    }
    false
}

fn reflect_and_rescale(state: &mut SimState, theta: f64) {
    let n = state.trunc.n as usize;
    for (s, xt) in state.x_tilde.iter_mut().enumerate() {
        if s < n {
            *xt = xt.abs();
        } else {
            *xt = -xt.abs();
        }
    }
    let total = state.sum_natural(theta);
    if total > 1.0 {
        for xt in state.x_tilde.iter_mut() {
            *xt /= total;
        }
    }
}

fn em_update(
    state: &mut SimState,
    dt: f64,
    params: &NumParams,
    drift: &[f64],
    rng: &mut ChaCha8Rng,
) {
    let d = state.dim();
    let sigma = diffusion_matrix(state, params.theta).scaled(2.0).sqrt_psd();
    let xi: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let noise = sigma.mul_vec(&xi);
    let sqrt_dt = dt.sqrt();
    for s in 0..d {
        state.x_tilde[s] += drift[s] * dt + sqrt_dt * noise[s];
    }
    state.time += dt;
    reflect_and_rescale(state, params.theta);
}

/// Advance one (possibly subdivided) step of nominal size `dt`.
pub fn step(
    state: &mut SimState,
    dt: f64,
    params: &NumParams,
    policy: &SubstepPolicy,
    rng: &mut ChaCha8Rng,
    path: u64,
) -> Result<(), SimError> {
    advance(state, dt, params, policy, rng, path, 0)
}

fn advance(
    state: &mut SimState,
    dt: f64,
    params: &NumParams,
    policy: &SubstepPolicy,
    rng: &mut ChaCha8Rng,
    path: u64,
    depth: u32,
) -> Result<(), SimError> {
    let drift = drift_nat(state, params);
    let max_drift = drift.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    // near a collision the displacement cap tightens by 10x: halving the step
    // then resolves the stiff drift (the gap itself only moves at leaf steps)
    let cap = if near_collision(state, params.theta, policy.gap_threshold) {
        policy.max_drift_step * 0.1
    } else {
        policy.max_drift_step
    };
    if dt * max_drift > cap {
        if depth >= policy.max_halvings {
            return Err(SimError::SubstepLimit {
                path,
                time: state.time,
            });
        }
        advance(state, dt / 2.0, params, policy, rng, path, depth + 1)?;
        return advance(state, dt / 2.0, params, policy, rng, path, depth + 1);
    }
    em_update(state, dt, params, &drift, rng);
    Ok(())
}

/// One recorded frame of a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct Frame {
    pub path: u64,
    pub t: f64,
    /// Natural coordinates in slot order `x_1..x_n, x_{-1}..x_{-m}`.
    pub coords: Vec<f64>,
    pub sum_x: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathOutcome {
    pub path: u64,
    pub aborted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abort_time: Option<f64>,
}

/// Run every path sequentially; each path owns the ChaCha stream keyed by its
/// index, so any parallel schedule would produce the same trajectories.
pub fn run_paths(
    cfg: &SimConfig,
    start: &SimState,
    mut on_frame: impl FnMut(&Frame),
) -> Result<Vec<PathOutcome>, SimError> {
    cfg.validate()?;
    let params = cfg.params();
    let steps = (cfg.t_end / cfg.dt).round() as u64;
    let mut outcomes = Vec::with_capacity(cfg.paths as usize);
    for path in 0..cfg.paths {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path);
        let mut state = start.clone();
        state.time = 0.0;
        on_frame(&Frame {
            path,
            t: 0.0,
            coords: state.naturals(params.theta),
            sum_x: state.sum_natural(params.theta),
        });
        let mut aborted = None;
        for k in 1..=steps {
            match step(&mut state, cfg.dt, &params, &cfg.substep, &mut rng, path) {
                Ok(()) => {}
                Err(SimError::SubstepLimit { time, .. }) => {
                    aborted = Some(time);
                    break;
                }
                Err(e) => return Err(e),
            }
            // nominal step time: keeps record times exactly aligned across
            // paths regardless of substep-accumulated rounding
            state.time = k as f64 * cfg.dt;
            if k % cfg.record_every as u64 == 0 || k == steps {
                on_frame(&Frame {
                    path,
                    t: state.time,
                    coords: state.naturals(params.theta),
                    sum_x: state.sum_natural(params.theta),
                });
            }
        }
        outcomes.push(PathOutcome {
            path,
            aborted: aborted.is_some(),
            abort_time: aborted,
        });
    }
    Ok(outcomes)
}

/// Monte-Carlo generator check: compares the one-step mean displacement rate
/// `(E f(X_dt) - f(x0)) / dt` against the exact symbolic image of `f` under
/// the natural-coordinate operator, evaluated at the start state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub f: String,
    pub n: u32,
    pub m: u32,
    pub dt: f64,
    pub paths: u64,
    pub seed: u64,
    pub exact: f64,
    pub mc_mean: f64,
    pub std_err: f64,
    pub z_score: f64,
}

pub fn generator_consistency(
    f: &MomentPoly,
    label: &str,
    start: &SimState,
    cfg: &SimConfig,
) -> Result<ConsistencyReport, SimError> {
    cfg.validate()?;
    let params = cfg.params();
    let theta = params.theta;
    if near_collision(start, theta, cfg.substep.gap_threshold) {
        return Err(SimError::BadConfig(
            "degenerate start state: coinciding coordinates".into(),
        ));
    }
    let trunc = start.truncation();
    let f_nat: NatPoly = f.substitute_moments(trunc.n, trunc.m);
    let exact_poly =
        ops::apply_a_nat(f, trunc.n, trunc.m).map_err(|e| SimError::BadConfig(e.to_string()))?;
    let values = params.values();
    let exact = exact_poly.eval_f64(&values, |i| start.natural_by_index(i, theta));
    let f0 = f_nat.eval_f64(&values, |i| start.natural_by_index(i, theta));

    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut count = 0u64;
    for path in 0..cfg.paths {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path);
        let mut state = start.clone();
        state.time = 0.0;
        step(&mut state, cfg.dt, &params, &cfg.substep, &mut rng, path)?;
        let f1 = f_nat.eval_f64(&values, |i| state.natural_by_index(i, theta));
        let sample = (f1 - f0) / cfg.dt;
        count += 1;
        let delta = sample - mean;
        mean += delta / count as f64;
        m2 += delta * (sample - mean);
    }
    let var = if count > 1 {
        m2 / (count as f64 - 1.0)
    } else {
        0.0
    };
    let std_err = (var / count as f64).sqrt();
    let z_score = if std_err > 0.0 {
        (mean - exact) / std_err
    } else {
        0.0
    };
    Ok(ConsistencyReport {
        f: label.to_string(),
        n: trunc.n,
        m: trunc.m,
        dt: cfg.dt,
        paths: cfg.paths,
        seed: cfg.seed,
        exact,
        mc_mean: mean,
        std_err,
        z_score,
    })
}

/// Observational study of the total mass `sum x` along paths.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Omega0Report {
    pub times: Vec<f64>,
    pub sum_min: Vec<f64>,
    pub sum_q25: Vec<f64>,
    pub sum_median: Vec<f64>,
    pub sum_q75: Vec<f64>,
    pub sum_max: Vec<f64>,
    /// Median non-decreasing (up to noise) after the first quarter of the run.
    pub median_trend_up: bool,
    /// Once the median is within 1e-3 of one it stays within the
    /// discretization tolerance `5 sqrt(dt)`.
    pub face_retention: bool,
    pub aborted_paths: u64,
}

pub fn omega0_report(cfg: &SimConfig, start: &SimState) -> Result<Omega0Report, SimError> {
    cfg.validate()?;
    let mut frames: Vec<(u64, f64, f64)> = Vec::new();
    let outcomes = run_paths(cfg, start, |frame| {
        frames.push((frame.path, frame.t, frame.sum_x));
    })?;
    // all distinct record times (robust to paths aborting early)
    let mut times: Vec<f64> = {
        let set: std::collections::BTreeSet<u64> =
            frames.iter().map(|(_, t, _)| t.to_bits()).collect();
        set.into_iter().map(f64::from_bits).collect()
    };
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut sum_min = Vec::new();
    let mut sum_q25 = Vec::new();
    let mut sum_median = Vec::new();
    let mut sum_q75 = Vec::new();
    let mut sum_max = Vec::new();
    for &t in &times {
        let mut vals: Vec<f64> = frames
            .iter()
            .filter(|(_, ft, _)| *ft == t)
            .map(|(_, _, s)| *s)
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = |p: f64| -> f64 {
            let idx = ((vals.len() - 1) as f64 * p).round() as usize;
            vals[idx]
        };
        sum_min.push(q(0.0));
        sum_q25.push(q(0.25));
        sum_median.push(q(0.5));
        sum_q75.push(q(0.75));
        sum_max.push(q(1.0));
    }
    let transient = sum_median.len() / 4;
    let median_trend_up = sum_median
        .iter()
        .skip(transient)
        .zip(sum_median.iter().skip(transient + 1))
        .all(|(a, b)| *b >= *a - 0.02);
    let disc_tol = 5.0 * cfg.dt.sqrt();
    let mut reached = false;
    let mut face_retention = true;
    for &v in &sum_median {
        if (v - 1.0).abs() <= 1e-3 {
            reached = true;
        } else if reached && (v - 1.0).abs() > disc_tol {
            face_retention = false;
        }
    }
    let aborted_paths = outcomes.iter().filter(|o| o.aborted).count() as u64;
    Ok(Omega0Report {
        times,
        sum_min,
        sum_q25,
        sum_median,
        sum_q75,
        sum_max,
        median_trend_up,
        face_retention,
        aborted_paths,
    })
}

/// Seeded random states inside the simplex (natural masses from a normalized
/// split with a gamma remainder), for property sweeps.
pub fn random_simplex_states(seed: u64, count: usize, n: u32, m: u32, theta: f64) -> Vec<SimState> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = (n + m) as usize;
    (0..count)
        .map(|_| {
            let mut raw: Vec<f64> = (0..dim + 1).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            for v in raw.iter_mut() {
                *v /= total;
            }
            let mut x_tilde = vec![0.0; dim];
            for s in 0..dim {
                x_tilde[s] = if s < n as usize {
                    raw[s]
                } else {
                    -theta * raw[s]
                };
            }
            SimState {
                trunc: Truncation::new(n, m),
                x_tilde,
                time: 0.0,
            }
        })
        .collect()
}
