//! Exact identity checkers over finite generator ranges. Each named identity
//! sweeps its configured range and reports per-case pass/fail with a witness
//! for any counterexample.

use crate::ext::{ExtPoly, PhiPoly};
use crate::moment::MomentPoly;
use crate::ops;
use crate::poly::{PolyError, ShiftLevel};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Stable identity names exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityName {
    #[serde(rename = "product-rule")]
    ProductRule,
    #[serde(rename = "lem111")]
    Lem111,
    #[serde(rename = "lem222")]
    Lem222,
    #[serde(rename = "consistent-shift")]
    ConsistentShift,
    #[serde(rename = "gamma-nat-vs-moment")]
    GammaNatVsMoment,
    #[serde(rename = "a-nat-vs-a")]
    ANatVsA,
    #[serde(rename = "petrov-degeneration")]
    PetrovDegeneration,
}

pub const ALL_IDENTITIES: [IdentityName; 7] = [
    IdentityName::ProductRule,
    IdentityName::Lem111,
    IdentityName::Lem222,
    IdentityName::ConsistentShift,
    IdentityName::GammaNatVsMoment,
    IdentityName::ANatVsA,
    IdentityName::PetrovDegeneration,
];

impl IdentityName {
    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityName::ProductRule => "product-rule",
            IdentityName::Lem111 => "lem111",
            IdentityName::Lem222 => "lem222",
            IdentityName::ConsistentShift => "consistent-shift",
            IdentityName::GammaNatVsMoment => "gamma-nat-vs-moment",
            IdentityName::ANatVsA => "a-nat-vs-a",
            IdentityName::PetrovDegeneration => "petrov-degeneration",
        }
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl FromStr for IdentityName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_IDENTITIES
            .iter()
            .find(|id| id.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown identity name: {}", s))
    }
}

/// Ranges for the sweeps. Defaults follow the desk-scale configuration:
/// moment indices up to 6, shift levels up to 3, truncations up to 5.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub max_k: u32,
    pub max_level: u32,
    pub max_trunc: u32,
    /// Grading cap for the product-rule monomial enumeration.
    pub max_grading: u64,
    /// Largest moment index for the Petrov degeneration sweep.
    pub max_petrov_k: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_k: 6,
            max_level: 3,
            max_trunc: 5,
            max_grading: 10,
            max_petrov_k: 8,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum CaseStatus {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseResult {
    pub identity: String,
    pub case: String,
    pub status: CaseStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub cases: Vec<CaseResult>,
    pub total: usize,
    pub failures: usize,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn from_cases(identity: IdentityName, cases: Vec<CaseResult>) -> Self {
        let failures = cases
            .iter()
            .filter(|c| c.status == CaseStatus::Fail)
            .count();
        IdentityReport {
            identity: identity.as_str().to_string(),
            total: cases.len(),
            failures,
            cases,
        }
    }
}

fn case(identity: IdentityName, name: String, eq: bool, witness: Option<String>) -> CaseResult {
    CaseResult {
        identity: identity.as_str().to_string(),
        case: name,
        status: if eq {
            CaseStatus::Pass
        } else {
            CaseStatus::Fail
        },
        witness: if eq { None } else { witness },
    }
}

/// All monomials in `q_1..q_max_k` with grading `<= cap` (including the unit).
pub fn moment_monomials(max_k: u32, cap: u64) -> Vec<MomentPoly> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; max_k as usize];
    fn rec(k: usize, budget: u64, exps: &mut Vec<u32>, max_k: u32, out: &mut Vec<MomentPoly>) {
        if k == max_k as usize {
            let pairs: Vec<(u32, u32)> = exps
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(i, e)| ((i + 1) as u32, *e))
                .collect();
            out.push(MomentPoly::q_monomial(&pairs));
            return;
        }
        let w = (k as u64) + 2; // deg q_{k+1} = k + 2
        let mut e = 0u32;
        loop {
            let cost = w * e as u64;
            if cost > budget {
                break;
            }
            exps[k] = e;
            rec(k + 1, budget - cost, exps, max_k, out);
            e += 1;
        }
        exps[k] = 0;
    }
    rec(0, cap, &mut exps, max_k, &mut out);
    out
}

/// Generators of the extended algebra at a level, for pair sweeps.
fn level_generators(lvl: ShiftLevel, max_k: u32) -> Vec<(String, ExtPoly)> {
    let mut out = Vec::new();
    for i in 1..=lvl.n {
        out.push((format!("a{}", i), ExtPoly::x(i as i32, lvl).unwrap()));
    }
    for j in 1..=lvl.m {
        out.push((format!("b{}", j), ExtPoly::x(-(j as i32), lvl).unwrap()));
    }
    for k in 1..=max_k {
        out.push((format!("qs{}", k), ExtPoly::qs(k, lvl)));
    }
    out
}

fn check_product_rule(cfg: &VerifyConfig) -> Vec<CaseResult> {
    let monos = moment_monomials(cfg.max_k, cfg.max_grading);
    let mut cases = Vec::new();
    for u in &monos {
        for v in &monos {
            let lhs = ops::apply_a(&u.mul(v))
                .sub(&ops::apply_a(u).mul(v))
                .sub(&ops::apply_a(v).mul(u));
            let rhs = ops::gamma(u, v).scale_int(2);
            let diff = lhs.sub(&rhs);
            cases.push(case(
                IdentityName::ProductRule,
                format!("u={},v={}", u, v),
                diff.is_zero(),
                Some(format!("difference = {}", diff)),
            ));
        }
    }
    cases
}

fn check_lem111(cfg: &VerifyConfig) -> Vec<CaseResult> {
    let mut cases = Vec::new();
    for n in 0..=cfg.max_level {
        for m in 0..=cfg.max_level {
            let lvl = ShiftLevel::new(n, m);
            for k in 0..=cfg.max_k {
                for l in 0..=cfg.max_k {
                    let phi = PhiPoly::t_pow(k);
                    let psi = PhiPoly::t_pow(l);
                    let lhs =
                        ops::gamma_nm(&ops::q_nm_of_phi(&phi, lvl), &ops::q_nm_of_phi(&psi, lvl))
                            .expect("same level");
                    let rhs = ops::gamma_bracket_double(&phi, &psi, lvl);
                    let diff = lhs.sub(&rhs);
                    cases.push(case(
                        IdentityName::Lem111,
                        format!("phi=t^{},psi=t^{},level=({},{})", k, l, n, m),
                        diff.is_zero(),
                        Some(format!("difference = {}", diff)),
                    ));
                }
            }
        }
    }
    cases
}

fn check_lem222(cfg: &VerifyConfig) -> Vec<CaseResult> {
    let mut cases = Vec::new();
    for n in 0..=cfg.max_level {
        for m in 0..=cfg.max_level {
            let lvl = ShiftLevel::new(n, m);
            for l in 0..=cfg.max_k {
                let phi = PhiPoly::t_pow(l);
                for (gname, u) in level_generators(lvl, cfg.max_k) {
                    let lhs = ops::gamma_nm(&ops::q_nm_of_phi(&phi, lvl), &u).expect("same level");
                    let rhs = ops::gamma_bracket_single(&phi, &u).expect("valid generator");
                    let diff = lhs.sub(&rhs);
                    cases.push(case(
                        IdentityName::Lem222,
                        format!("phi=t^{},u={},level=({},{})", l, gname, n, m),
                        diff.is_zero(),
                        Some(format!("difference = {}", diff)),
                    ));
                }
            }
        }
    }
    cases
}

fn check_consistent_shift(cfg: &VerifyConfig) -> Result<Vec<CaseResult>, PolyError> {
    let mut cases = Vec::new();
    for n in 0..=cfg.max_level {
        for m in 0..=cfg.max_level {
            let lvl = ShiftLevel::new(n, m);
            let gens = level_generators(lvl, cfg.max_k);
            for dir in ["alpha", "beta"] {
                let up = if dir == "alpha" {
                    ShiftLevel::new(n + 1, m)
                } else {
                    ShiftLevel::new(n, m + 1)
                };
                for (un, u) in &gens {
                    for (vn, v) in &gens {
                        let low = ops::shift_rewrite(&ops::gamma_nm(u, v)?, up)?;
                        let high = ops::gamma_nm(
                            &ops::shift_rewrite(u, up)?,
                            &ops::shift_rewrite(v, up)?,
                        )?;
                        let diff = low.sub(&high);
                        cases.push(case(
                            IdentityName::ConsistentShift,
                            format!("u={},v={},level=({},{}),step=+{}", un, vn, n, m, dir),
                            diff.is_zero(),
                            Some(format!("difference = {}", diff)),
                        ));
                    }
                }
            }
        }
    }
    Ok(cases)
}

fn check_gamma_nat_vs_moment(cfg: &VerifyConfig) -> Result<Vec<CaseResult>, PolyError> {
    let mut cases = Vec::new();
    let kmax = cfg.max_k.min(5);
    for n in 0..=cfg.max_trunc {
        for m in 0..=cfg.max_trunc {
            if n == 0 && m == 0 {
                continue;
            }
            for k in 1..=kmax {
                for l in 1..=kmax {
                    let su = MomentPoly::q(k).substitute_moments(n, m);
                    let sv = MomentPoly::q(l).substitute_moments(n, m);
                    let lhs = ops::gamma_alpha_beta(&su, &sv)?;
                    let rhs =
                        ops::gamma(&MomentPoly::q(k), &MomentPoly::q(l)).substitute_moments(n, m);
                    let diff = lhs.checked_sub(&rhs)?;
                    cases.push(case(
                        IdentityName::GammaNatVsMoment,
                        format!("k={},l={},n={},m={}", k, l, n, m),
                        diff.is_zero(),
                        Some(format!("difference = {}", diff)),
                    ));
                }
            }
        }
    }
    Ok(cases)
}

/// The test family for the natural-coordinate generator agreement.
pub fn a_nat_test_polys() -> Vec<(String, MomentPoly)> {
    let q = MomentPoly::q;
    let mut out: Vec<(String, MomentPoly)> =
        (1..=5u32).map(|k| (format!("q{}", k), q(k))).collect();
    out.push(("q1*q2".into(), q(1).mul(&q(2))));
    out.push(("q1^2".into(), q(1).pow(2)));
    out.push(("q1*q3".into(), q(1).mul(&q(3))));
    out
}

fn check_a_nat_vs_a(cfg: &VerifyConfig) -> Result<Vec<CaseResult>, PolyError> {
    let mut cases = Vec::new();
    for (name, u) in a_nat_test_polys() {
        for n in 1..=cfg.max_trunc {
            for m in 0..=cfg.max_trunc {
                let lhs = ops::apply_a_nat(&u, n, m)?;
                let rhs = ops::apply_a(&u).substitute_moments(n, m);
                let reduced = lhs.checked_sub(&rhs)?.reduce_mod_simplex()?;
                cases.push(case(
                    IdentityName::ANatVsA,
                    format!("u={},n={},m={}", name, n, m),
                    reduced.is_zero(),
                    Some(format!("reduced difference = {}", reduced)),
                ));
            }
        }
    }
    Ok(cases)
}

fn check_petrov_degeneration(cfg: &VerifyConfig) -> Vec<CaseResult> {
    let mut cases = Vec::new();
    for k in 1..=cfg.max_petrov_k {
        let u = MomentPoly::q(k);
        match ops::degenerate_to_petrov(&u) {
            Ok(lhs) => {
                let rhs = ops::apply_a_petrov(&u);
                let diff = lhs.sub(&rhs);
                cases.push(case(
                    IdentityName::PetrovDegeneration,
                    format!("u=q{}", k),
                    diff.is_zero(),
                    Some(format!("difference = {}", diff)),
                ));
            }
            Err(e) => cases.push(case(
                IdentityName::PetrovDegeneration,
                format!("u=q{}", k),
                false,
                Some(format!("degeneration failure: {}", e)),
            )),
        }
    }
    cases
}

/// Run one named identity over the configured ranges.
pub fn verify_identity(
    name: IdentityName,
    cfg: &VerifyConfig,
) -> Result<IdentityReport, PolyError> {
    let cases = match name {
        IdentityName::ProductRule => check_product_rule(cfg),
        IdentityName::Lem111 => check_lem111(cfg),
        IdentityName::Lem222 => check_lem222(cfg),
        IdentityName::ConsistentShift => check_consistent_shift(cfg)?,
        IdentityName::GammaNatVsMoment => check_gamma_nat_vs_moment(cfg)?,
        IdentityName::ANatVsA => check_a_nat_vs_a(cfg)?,
        IdentityName::PetrovDegeneration => check_petrov_degeneration(cfg),
    };
    Ok(IdentityReport::from_cases(name, cases))
}
