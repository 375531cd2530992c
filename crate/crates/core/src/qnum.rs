//! Numeric evaluation on finitely supported Thoma points: Q-transforms in
//! signed log space, the `chi_C` approximants, the shifted bilinear forms
//! `Gamma_{C,D}` and `Gamma_C(v)`, and the closed four-term evaluation of
//! `A chi_C` whose large-C limit is the natural-coordinate drift.

use crate::exppoly::ExpPoly;
use crate::point::{NumParams, ThomaMeasure, ThomaPoint, ATOM_MERGE_EPS};
use crate::poly::ShiftLevel;
use crate::signed_log::{self, SignedLog};
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum NumError {
    ZeroC,
    CoincidingAtoms { gap: f64 },
    NotOnBoundaryFace { gamma: f64 },
    TopCoordinateMissing,
    IndexOutsideLevel { index: i32, level: ShiftLevel },
    UnknownLimit(String),
}

impl fmt::Display for NumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumError::ZeroC => write!(f, "C must be nonzero"),
            NumError::CoincidingAtoms { gap } => {
                write!(f, "coinciding atoms (min modified gap {:.3e})", gap)
            }
            NumError::NotOnBoundaryFace { gamma } => {
                write!(
                    f,
                    "point has gamma = {:.3e} > 0, not on the boundary face",
                    gamma
                )
            }
            NumError::TopCoordinateMissing => {
                write!(
                    f,
                    "the asymptotic formulas need a positive top alpha coordinate"
                )
            }
            NumError::IndexOutsideLevel { index, level } => {
                write!(f, "generator x_{} outside level {}", index, level)
            }
            NumError::UnknownLimit(s) => write!(f, "unknown limit name: {}", s),
        }
    }
}

impl std::error::Error for NumError {}

/// Generator reference for `Gamma_C(v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenRef {
    X(i32),
    Q(u32),
}

impl fmt::Display for GenRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenRef::X(i) if *i > 0 => write!(f, "a{}", i),
            GenRef::X(i) => write!(f, "b{}", -i),
            GenRef::Q(k) => write!(f, "q{}", k),
        }
    }
}

/// Moment coordinate value `q_k` of a point (`q_0 = 1`).
pub fn eval_q(p: &ThomaPoint, k: u32, theta: f64) -> f64 {
    p.moment(k, theta)
}

/// `Q[phi]` over the point's Thoma measure, accumulated in signed log space.
/// Constant integrands use the definitional mass `nu([-theta,1]) = 1`, so
/// `Q[1]` is exactly one.
pub fn eval_q_transform(p: &ThomaPoint, phi: &ExpPoly, theta: f64) -> SignedLog {
    eval_over_measure(&p.measure(theta), phi)
}

pub(crate) fn eval_over_measure(m: &ThomaMeasure, phi: &ExpPoly) -> SignedLog {
    if let Some(c) = phi.as_constant() {
        return SignedLog::from_f64(c);
    }
    let mut acc = SignedLog::ZERO;
    for atom in &m.atoms {
        if atom.weight == 0.0 {
            continue;
        }
        acc = acc + SignedLog::from_f64(atom.weight) * phi.eval_log(atom.location);
    }
    acc
}

/// `1 + Q[e^{Ct}]` over a measure.
fn one_plus_q_exp(m: &ThomaMeasure, c: f64) -> SignedLog {
    SignedLog::ONE + eval_over_measure(m, &ExpPoly::exp(c))
}

/// `chi_C = C^{-1} ln(1 + Q[e^{Ct}])`, finite for every C != 0.
pub fn chi(p: &ThomaPoint, c: f64, theta: f64) -> Result<f64, NumError> {
    if c == 0.0 {
        return Err(NumError::ZeroC);
    }
    let q = eval_q_transform(p, &ExpPoly::exp(c), theta);
    Ok(q.ln_1p() / c)
}

/// `(1 + Ct) e^{Ct}` as an exponential polynomial.
fn one_plus_ct_ect(c: f64) -> ExpPoly {
    ExpPoly::exp(c).add(&ExpPoly::term(c, 1, c))
}

/// `Gamma^(N,M)_{C,D}` evaluated at a point: the bracket of `e^{Ct}` and
/// `e^{Dt}` against the shifted measure, normalised by
/// `CD (1 + Q[e^{Ct}])(1 + Q[e^{Dt}])`. Symmetric in `(C, D)` bit-for-bit.
pub fn gamma_cd(
    p: &ThomaPoint,
    c: f64,
    d: f64,
    lvl: ShiftLevel,
    params: &NumParams,
) -> Result<f64, NumError> {
    if c == 0.0 || d == 0.0 {
        return Err(NumError::ZeroC);
    }
    // canonical argument order makes the symmetry exact in floating point
    let (c, d) = if d < c { (d, c) } else { (c, d) };
    let m = p
        .shift(lvl.n as usize, lvl.m as usize)
        .measure(params.theta);

    // (1+Ct)(1+Dt) e^{(C+D)t} = (1 + (C+D)t + CD t^2) e^{(C+D)t}
    let mut joint = ExpPoly::exp(c + d);
    joint = joint.add(&ExpPoly::term(c + d, 1, c + d));
    joint = joint.add(&ExpPoly::term(c * d, 2, c + d));

    let a = eval_over_measure(&m, &joint);
    let b1 = eval_over_measure(&m, &one_plus_ct_ect(c));
    let b2 = eval_over_measure(&m, &one_plus_ct_ect(d));
    let numer = a - b1 * b2;
    let denom = SignedLog::from_f64(c)
        * SignedLog::from_f64(d)
        * one_plus_q_exp(&m, c)
        * one_plus_q_exp(&m, d);
    Ok((numer / denom).to_f64())
}

/// `Gamma^(N,M)_C(v)` for a generator `v` of the level-(N,M) algebra.
pub fn gamma_c(
    p: &ThomaPoint,
    c: f64,
    v: GenRef,
    lvl: ShiftLevel,
    params: &NumParams,
) -> Result<f64, NumError> {
    if c == 0.0 {
        return Err(NumError::ZeroC);
    }
    let m = p
        .shift(lvl.n as usize, lvl.m as usize)
        .measure(params.theta);
    let one_plus = one_plus_q_exp(&m, c);
    let denom = SignedLog::from_f64(c) * one_plus;
    match v {
        GenRef::X(i) => {
            if !lvl.contains_x(i) {
                return Err(NumError::IndexOutsideLevel {
                    index: i,
                    level: lvl,
                });
            }
            let x_val = p.x(i);
            // -x_i Q[(tC+1)e^{Ct} - 1]
            let numer = (eval_over_measure(&m, &one_plus_ct_ect(c)) - SignedLog::ONE)
                * SignedLog::from_f64(-x_val);
            Ok((numer / denom).to_f64())
        }
        GenRef::Q(k) => {
            let shifted = p.shift(lvl.n as usize, lvl.m as usize);
            let qk = shifted.moment(k, params.theta);
            let weighted = {
                // (Ct+1) e^{Ct} t^k
                let mut phi = ExpPoly::term(1.0, k, c);
                phi = phi.add(&ExpPoly::term(c, k + 1, c));
                eval_over_measure(&m, &phi)
            };
            let plain = eval_over_measure(&m, &one_plus_ct_ect(c));
            let numer =
                (weighted - plain * SignedLog::from_f64(qk)) * SignedLog::from_f64((k + 1) as f64);
            Ok((numer / denom).to_f64())
        }
    }
}

/// Pointwise limits of `Gamma_C(v)` as `C -> +inf` (towards `alpha_{N+1}`) and
/// `C -> -inf` (towards `-theta beta_{M+1}`).
pub fn gamma_c_limit(
    p: &ThomaPoint,
    positive: bool,
    v: GenRef,
    lvl: ShiftLevel,
    params: &NumParams,
) -> f64 {
    let shifted = p.shift(lvl.n as usize, lvl.m as usize);
    let theta = params.theta;
    if positive {
        let a_next = shifted.alpha1();
        match v {
            GenRef::X(i) => -a_next * p.x(i),
            GenRef::Q(k) => {
                let qk = shifted.moment(k, theta);
                (k + 1) as f64 * (a_next.powi(k as i32 + 1) - a_next * qk)
            }
        }
    } else {
        let b_next = shifted.beta1();
        match v {
            GenRef::X(i) => theta * b_next * p.x(i),
            GenRef::Q(k) => {
                let qk = shifted.moment(k, theta);
                -theta
                    * (k + 1) as f64
                    * ((-theta).powi(k as i32) * b_next.powi(k as i32 + 1) - b_next * qk)
            }
        }
    }
}

/// Coordinate atoms `(xt_i, x_i, sgn_theta(i)^{-2})` of a point, positive side
/// first. Zero coordinates are dropped (their contributions vanish).
fn coordinate_atoms(p: &ThomaPoint, theta: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(p.alpha.len() + p.beta.len());
    for &a in &p.alpha {
        if a > 0.0 {
            out.push((a, a, 1.0));
        }
    }
    for &b in &p.beta {
        if b > 0.0 {
            out.push((-theta * b, b, theta.powi(-2)));
        }
    }
    out
}

fn require_omega0_distinct(p: &ThomaPoint, theta: f64) -> Result<Vec<(f64, f64, f64)>, NumError> {
    if !p.on_omega0(ATOM_MERGE_EPS) {
        return Err(NumError::NotOnBoundaryFace { gamma: p.gamma() });
    }
    if p.alpha1() <= 0.0 {
        return Err(NumError::TopCoordinateMissing);
    }
    let atoms = coordinate_atoms(p, theta);
    let mut min_gap = f64::INFINITY;
    for (i, a) in atoms.iter().enumerate() {
        for b in atoms.iter().skip(i + 1) {
            min_gap = min_gap.min((a.0 - b.0).abs());
        }
    }
    if min_gap < ATOM_MERGE_EPS {
        return Err(NumError::CoincidingAtoms { gap: min_gap });
    }
    Ok(atoms)
}

/// `(u^2 + u - 1) e^u + 1`, stable near `u = 0` where it is `1.5 u^2 + O(u^3)`.
fn p1_kernel(u: f64) -> SignedLog {
    if u.abs() <= 1e-2 {
        SignedLog::from_f64(u * u * (1.5 + 4.0 * u / 3.0 + 0.625 * u * u))
    } else if u.abs() <= 30.0 {
        SignedLog::from_f64((u * u + u - 1.0) * u.exp() + 1.0)
    } else {
        (SignedLog::from_f64(u * u + u - 1.0)) * SignedLog::exp_of(u) + SignedLog::ONE
    }
}

/// `G(u) = u^{-1}(e^u - 1 - u) + (e^u - 1)`, the pair kernel of the singular
/// drift term; `G(0) = 0`.
fn pair_kernel(u: f64) -> SignedLog {
    if u == 0.0 {
        return SignedLog::ZERO;
    }
    signed_log::expm1m_sl(u) / SignedLog::from_f64(u) + signed_log::expm1_sl(u)
}

/// `A chi_C` at a boundary-face point with distinct coordinate atoms,
/// evaluated exactly through the four closed-form blocks: the second-order
/// `q_{k+l}` and `q_k q_l` sums collapse onto `(1+Ct)e^{Ct} - 1`, the drift
/// block onto an exponential polynomial plus the `((1+Ct)e^{Ct}-1)/t`
/// kernel, and the last block onto a per-atom part plus a pairwise
/// divided-difference part.
pub fn a_chi(p: &ThomaPoint, c: f64, params: &NumParams) -> Result<f64, NumError> {
    if c == 0.0 {
        return Err(NumError::ZeroC);
    }
    let theta = params.theta;
    let atoms = require_omega0_distinct(p, theta)?;
    let c_sl = SignedLog::from_f64(c);

    let one_plus = {
        let mut acc = SignedLog::ONE;
        for &(xt, x, _) in &atoms {
            acc = acc + SignedLog::from_f64(x) * SignedLog::exp_of(c * xt);
        }
        acc
    };

    // h(u) = (1+u)e^u - 1 per atom
    let h = |u: f64| signed_log::one_plus_u_exp_u_minus_1(u);

    // Term 1: -Q[h^2] / (C (1+Q)^2)
    let mut q_h2 = SignedLog::ZERO;
    let mut q_h = SignedLog::ZERO;
    for &(xt, x, _) in &atoms {
        let hu = h(c * xt);
        let w = SignedLog::from_f64(x);
        q_h2 = q_h2 + w * hu * hu;
        q_h = q_h + w * hu;
    }
    let term1 = -(q_h2 / (c_sl * one_plus * one_plus));

    // Term 2: C^{-1} (Q[h] / (1+Q))^2
    let ratio = q_h / one_plus;
    let term2 = ratio * ratio / c_sl;

    // Term 3: Q[phi3] / (C (1+Q)), with
    // phi3 = (1-theta) C (2+Ct) e^{Ct} + s1 h(Ct)/t - Ct(2+Ct) e^{Ct} - (s2/theta) h(Ct)
    let mut q_phi3 = SignedLog::ZERO;
    for &(xt, x, _) in &atoms {
        let u = c * xt;
        let e_u = SignedLog::exp_of(u);
        let two_plus_u = SignedLog::from_f64(2.0 + u);
        let part_1theta = SignedLog::from_f64((1.0 - theta) * c) * two_plus_u * e_u;
        let psi1 = if xt == 0.0 {
            SignedLog::from_f64(2.0 * c)
        } else {
            h(u) / SignedLog::from_f64(xt)
        };
        let part_s1 = SignedLog::from_f64(params.s1) * psi1;
        let part_quad = SignedLog::from_f64(u) * two_plus_u * e_u;
        let part_s2 = SignedLog::from_f64(params.s2 / theta) * h(u);
        let phi3 = part_1theta + part_s1 - part_quad - part_s2;
        q_phi3 = q_phi3 + SignedLog::from_f64(x) * phi3;
    }
    let term3 = q_phi3 / (c_sl * one_plus);

    // Term 4, per-atom part: theta sum_i sgn^{-2} C^{-1} [(u^2+u-1)e^u + 1] / (1+Q)
    let mut p1 = SignedLog::ZERO;
    for &(xt, x, sgn_inv2) in &atoms {
        let _ = x;
        p1 = p1 + SignedLog::from_f64(sgn_inv2) * p1_kernel(c * xt);
    }
    p1 = p1 * SignedLog::from_f64(theta) / (c_sl * one_plus);

    // Term 4, pair part: 2 theta sum_{i<j} x_i x_j (G(u_i)-G(u_j))/(xt_i-xt_j) / (1+Q)
    let mut p2 = SignedLog::ZERO;
    for (i, &(xt_i, x_i, _)) in atoms.iter().enumerate() {
        for &(xt_j, x_j, _) in atoms.iter().skip(i + 1) {
            let g_diff = pair_kernel(c * xt_i) - pair_kernel(c * xt_j);
            let quotient = g_diff / SignedLog::from_f64(xt_i - xt_j);
            p2 = p2 + SignedLog::from_f64(x_i * x_j) * quotient;
        }
    }
    p2 = p2 * SignedLog::from_f64(2.0 * theta) / one_plus;

    Ok(term1.to_f64() + term2.to_f64() + term3.to_f64() + p1.to_f64() + p2.to_f64())
}

/// The drift of the top coordinate in natural form:
/// `-theta + s1 - theta^{-1} s2 alpha_1 + 2 theta sum_{i != 1} x_i / (alpha_1 - xt_i)`.
pub fn nat_limit_alpha1(p: &ThomaPoint, params: &NumParams) -> Result<f64, NumError> {
    let theta = params.theta;
    let atoms = require_omega0_distinct(p, theta)?;
    let a1 = p.alpha1();
    let mut sum = 0.0;
    for &(xt, x, _) in atoms.iter().skip(1) {
        sum += x / (a1 - xt);
    }
    Ok(-theta + params.s1 - params.s2 / theta * a1 + 2.0 * theta * sum)
}
