//! Finitely supported points of the Thoma simplex, their atomic measures on
//! `[-theta, 1]`, numeric parameter sets, and seeded point generators for the
//! verification sweeps.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Slack allowed on the unit-mass constraint.
pub const MASS_EPS: f64 = 1e-12;

/// Two modified coordinates closer than this are treated as coinciding.
pub const ATOM_MERGE_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum PointError {
    NonMonotoneAlpha,
    NonMonotoneBeta,
    OutOfRange(f64),
    NotFinite,
    MassExceeded(f64),
}

impl fmt::Display for PointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointError::NonMonotoneAlpha => write!(f, "alpha coordinates are not non-increasing"),
            PointError::NonMonotoneBeta => write!(f, "beta coordinates are not non-increasing"),
            PointError::OutOfRange(v) => write!(f, "coordinate {} outside [0, 1]", v),
            PointError::NotFinite => write!(f, "coordinate is not finite"),
            PointError::MassExceeded(s) => {
                write!(f, "alpha and beta masses sum to {} > 1", s)
            }
        }
    }
}

impl std::error::Error for PointError {}

/// A finitely supported point `(alpha; beta; gamma)` of the Thoma simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThomaPoint {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(skip, default)]
    gamma: f64,
}

impl ThomaPoint {
    /// Validate and construct. Violations are reported, not repaired, except
    /// for the `MASS_EPS` clamp on the derived gamma coordinate.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self, PointError> {
        for v in alpha.iter().chain(beta.iter()) {
            if !v.is_finite() {
                return Err(PointError::NotFinite);
            }
            if *v < 0.0 || *v > 1.0 {
                return Err(PointError::OutOfRange(*v));
            }
        }
        if alpha.windows(2).any(|w| w[0] < w[1]) {
            return Err(PointError::NonMonotoneAlpha);
        }
        if beta.windows(2).any(|w| w[0] < w[1]) {
            return Err(PointError::NonMonotoneBeta);
        }
        let mass: f64 = alpha.iter().sum::<f64>() + beta.iter().sum::<f64>();
        if mass > 1.0 + MASS_EPS {
            return Err(PointError::MassExceeded(mass));
        }
        let gamma = (1.0 - mass).max(0.0);
        Ok(ThomaPoint { alpha, beta, gamma })
    }

    /// Re-validate a deserialized point (gamma is derived, not stored).
    pub fn revalidate(self) -> Result<Self, PointError> {
        ThomaPoint::new(self.alpha, self.beta)
    }

    pub fn empty() -> Self {
        ThomaPoint {
            alpha: Vec::new(),
            beta: Vec::new(),
            gamma: 1.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha.first().copied().unwrap_or(0.0)
    }

    pub fn beta1(&self) -> f64 {
        self.beta.first().copied().unwrap_or(0.0)
    }

    pub fn alpha_at(&self, i: usize) -> f64 {
        self.alpha.get(i).copied().unwrap_or(0.0)
    }

    pub fn beta_at(&self, j: usize) -> f64 {
        self.beta.get(j).copied().unwrap_or(0.0)
    }

    /// Natural coordinate `x_i` (positive index: alpha, negative: beta).
    pub fn x(&self, i: i32) -> f64 {
        if i > 0 {
            self.alpha_at((i - 1) as usize)
        } else if i < 0 {
            self.beta_at((-i - 1) as usize)
        } else {
            0.0
        }
    }

    /// Whether the point lies on the boundary face (gamma = 0 up to `tol`).
    pub fn on_omega0(&self, tol: f64) -> bool {
        self.gamma <= tol
    }

    /// Drop the first `n` alpha- and `m` beta-coordinates (the shift maps);
    /// the removed mass moves to gamma.
    pub fn shift(&self, n: usize, m: usize) -> ThomaPoint {
        let alpha: Vec<f64> = self.alpha.iter().skip(n).copied().collect();
        let beta: Vec<f64> = self.beta.iter().skip(m).copied().collect();
        let mass: f64 = alpha.iter().sum::<f64>() + beta.iter().sum::<f64>();
        ThomaPoint {
            alpha,
            beta,
            gamma: (1.0 - mass).max(0.0),
        }
    }

    /// Truncated moment coordinate
    /// `q_k = sum alpha_i^{k+1} + (-theta)^k sum beta_j^{k+1}`, with `q_0 = 1`.
    pub fn moment(&self, k: u32, theta: f64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let pa: f64 = self.alpha.iter().map(|a| a.powi(k as i32 + 1)).sum();
        let pb: f64 = self.beta.iter().map(|b| b.powi(k as i32 + 1)).sum();
        pa + (-theta).powi(k as i32) * pb
    }

    /// Mass of the Thoma measure within `ATOM_MERGE_EPS` of the top alpha
    /// location (handles multiple top coordinates; for `alpha_1 = 0` this is
    /// the mass at the origin, i.e. gamma plus any vanished coordinates).
    pub fn top_alpha_mass(&self, theta: f64) -> f64 {
        let m = self.measure(theta);
        let a1 = self.alpha1();
        m.atoms
            .iter()
            .filter(|at| (at.location - a1).abs() < ATOM_MERGE_EPS)
            .map(|at| at.weight)
            .sum()
    }

    /// Mass of the Thoma measure near the bottom location `-theta beta_1`.
    pub fn bottom_beta_mass(&self, theta: f64) -> f64 {
        let m = self.measure(theta);
        let b1 = -theta * self.beta1();
        m.atoms
            .iter()
            .filter(|at| (at.location - b1).abs() < ATOM_MERGE_EPS)
            .map(|at| at.weight)
            .sum()
    }

    /// The Thoma measure: atoms `alpha_i` with weight `alpha_i`, `-theta beta_j`
    /// with weight `beta_j`, and the origin with weight gamma.
    pub fn measure(&self, theta: f64) -> ThomaMeasure {
        let mut atoms: Vec<Atom> = Vec::with_capacity(self.alpha.len() + self.beta.len() + 1);
        for &a in &self.alpha {
            if a > 0.0 {
                atoms.push(Atom {
                    location: a,
                    weight: a,
                });
            }
        }
        for &b in &self.beta {
            if b > 0.0 {
                atoms.push(Atom {
                    location: -theta * b,
                    weight: b,
                });
            }
        }
        if self.gamma > 0.0 || atoms.is_empty() {
            atoms.push(Atom {
                location: 0.0,
                weight: self.gamma,
            });
        }
        ThomaMeasure::merged(atoms)
    }
}

/// One atom of a Thoma measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Atomic probability measure on `[-theta, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThomaMeasure {
    pub atoms: Vec<Atom>,
}

impl ThomaMeasure {
    /// Merge exactly coinciding locations; atoms keep insertion order otherwise.
    fn merged(atoms: Vec<Atom>) -> ThomaMeasure {
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match out.iter_mut().find(|b| b.location == a.location) {
                Some(b) => b.weight += a.weight,
                None => out.push(a),
            }
        }
        ThomaMeasure { atoms: out }
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Smallest gap between distinct atom locations (infinity with < 2 atoms).
    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, a) in self.atoms.iter().enumerate() {
            for b in self.atoms.iter().skip(i + 1) {
                gap = gap.min((a.location - b.location).abs());
            }
        }
        gap
    }
}

/// Numeric parameters of the generator. The admissibility check is soft:
/// the representable condition from the principal series is `s2 > 0`
/// (`z' = conj(z)` gives `z z' = |z|^2`); the full per-(z, z') conditions are
/// not expressible through `s1, s2` and are documented, not enforced.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NumParams {
    pub theta: f64,
    pub s1: f64,
    pub s2: f64,
    #[serde(default)]
    pub enforce_admissible: bool,
}

impl NumParams {
    pub fn new(theta: f64, s1: f64, s2: f64) -> Self {
        NumParams {
            theta,
            s1,
            s2,
            enforce_admissible: false,
        }
    }

    /// `Ok(warnings)` in soft mode, `Err` when enforcement is on and the
    /// representable condition fails.
    pub fn check_admissible(&self) -> Result<Vec<String>, String> {
        let mut warnings = Vec::new();
        if self.theta <= 0.0 {
            return Err(format!("theta must be positive, got {}", self.theta));
        }
        if self.s2 <= 0.0 {
            let msg = format!(
                "s2 = {} is not positive; the principal series requires s2 = |z|^2 > 0",
                self.s2
            );
            if self.enforce_admissible {
                return Err(msg);
            }
            warnings.push(msg);
        }
        Ok(warnings)
    }

    pub fn values(&self) -> crate::coeff::ParamValues {
        crate::coeff::ParamValues::new(self.theta, self.s1, self.s2)
    }
}

/// Deterministic stream of general Thoma points (sizes 0..=4 on each side,
/// masses from a normalized uniform split; gamma may be positive).
pub fn seeded_points(seed: u64, count: usize) -> Vec<ThomaPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let na = rng.gen_range(0..=4usize);
        let nb = rng.gen_range(0..=4usize);
        let mut raw: Vec<f64> = (0..na + nb + 1).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            continue;
        }
        for v in raw.iter_mut() {
            *v /= total;
        }
        let mut alpha: Vec<f64> = raw[0..na].to_vec();
        let mut beta: Vec<f64> = raw[na..na + nb].to_vec();
        alpha.sort_by(|a, b| b.partial_cmp(a).unwrap());
        beta.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if let Ok(p) = ThomaPoint::new(alpha, beta) {
            out.push(p);
        }
    }
    out
}

/// Constraints for the limit-sweep point family.
#[derive(Clone, Copy, Debug)]
pub struct SeparatedPointSpec {
    /// Number of alpha coordinates.
    pub na: usize,
    /// Number of beta coordinates.
    pub nb: usize,
    /// Lower bound on every used coordinate.
    pub min_mass: f64,
    /// Lower bound on consecutive gaps within each of the alpha and beta lists.
    pub min_gap: f64,
    /// Force gamma = 0 (renormalize masses to sum to one).
    pub on_omega0: bool,
}

/// Deterministic stream of well-separated points: every alpha/beta coordinate
/// at least `min_mass`, consecutive within-list gaps at least `min_gap`, and
/// distinct modified coordinates. Used by the limit suites, where pointwise
/// convergence needs a simple top atom.
pub fn seeded_separated_points(
    seed: u64,
    count: usize,
    spec: SeparatedPointSpec,
) -> Vec<ThomaPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(
            attempts < 200_000,
            "point sampler failed to satisfy constraints"
        );
        let mut alpha: Vec<f64> = (0..spec.na)
            .map(|_| rng.gen_range(spec.min_mass..3.0 * spec.min_mass + 0.2))
            .collect();
        let mut beta: Vec<f64> = (0..spec.nb)
            .map(|_| rng.gen_range(spec.min_mass..3.0 * spec.min_mass + 0.2))
            .collect();
        alpha.sort_by(|a, b| b.partial_cmp(a).unwrap());
        beta.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mass: f64 = alpha.iter().sum::<f64>() + beta.iter().sum::<f64>();
        if spec.on_omega0 {
            for v in alpha.iter_mut().chain(beta.iter_mut()) {
                *v /= mass;
            }
        } else if mass > 0.95 {
            continue;
        }
        let gaps_ok = |v: &[f64]| v.windows(2).all(|w| w[0] - w[1] >= spec.min_gap);
        if !gaps_ok(&alpha) || !gaps_ok(&beta) {
            continue;
        }
        if alpha.iter().chain(beta.iter()).any(|v| *v < spec.min_mass) {
            continue;
        }
        let p = match ThomaPoint::new(alpha, beta) {
            Ok(p) => p,
            Err(_) => continue,
        };
        if p.measure(1.0).min_gap() < spec.min_gap / 2.0 {
            continue;
        }
        out.push(p);
    }
    out
}
