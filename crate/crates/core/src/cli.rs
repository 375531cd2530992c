//! Command-line front end: symbolic operator application, identity
//! verification, numeric evaluation, limit sweeps, and the simulator driver.
//!
//! Exit codes: 0 all requested checks passed, 1 a check failed, 2 bad input,
//! 3 runtime abort. The environment variable `THOMA_SEED` overrides any
//! configured seed.

use crate::coeff::Param;
use crate::moment::MomentPoly;
use crate::ops;
use crate::parser::{parse_poly, AlgebraHint, PolyValue};
use crate::point::{seeded_points, NumParams, ThomaPoint};
use crate::poly::ShiftLevel;
use crate::qnum;
use crate::report::{fmt_f64, write_atomic, CsvBuilder, Envelope};
use crate::sim::{
    generator_consistency, omega0_report, run_paths, SimConfig, SimState, SubstepPolicy,
};
use crate::sweep::{default_grid, limit_sweep, LimitTarget, SweepTolerance};
use crate::verify::{verify_identity, IdentityName, VerifyConfig, ALL_IDENTITIES};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "thoma",
    version,
    about = "Symbolic and numeric laboratory for Thoma-simplex diffusions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply a generator to a polynomial expression.
    Apply(ApplyArgs),
    /// Carre-du-champ of two expressions (moment, extended or natural).
    Gamma(GammaArgs),
    /// Run exact identity sweeps.
    Verify(VerifyArgs),
    /// Numeric evaluation at a point (q, chi, gamma-cd, gamma-c, a-chi,
    /// nat-limit, bounds).
    Num(NumArgs),
    /// Limit sweep along a C-grid.
    Sweep(SweepArgs),
    /// Run the truncated-diffusion simulator.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct ApplyArgs {
    /// Operator: A, a-pet, a-nat or petrov-degeneration.
    #[arg(long)]
    pub op: String,
    #[arg(long)]
    pub expr: String,
    /// Truncation for a-nat.
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// "sym" or an exact rational like 1 or 1/2.
    #[arg(long, default_value = "sym")]
    pub theta: String,
    #[arg(long, default_value = "sym")]
    pub s1: String,
    #[arg(long, default_value = "sym")]
    pub s2: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    #[arg(long)]
    pub u: String,
    #[arg(long)]
    pub v: String,
    /// Shift level "N,M" forcing the extended algebra.
    #[arg(long)]
    pub level: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Identity name or "all".
    #[arg(long, default_value = "all")]
    pub identity: String,
    #[arg(long, default_value_t = 6)]
    pub max_k: u32,
    #[arg(long, default_value_t = 3)]
    pub max_level: u32,
    #[arg(long, default_value_t = 5)]
    pub max_trunc: u32,
    #[arg(long, default_value_t = 10)]
    pub max_grading: u64,
    #[arg(long, default_value_t = 8)]
    pub max_petrov_k: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NumArgs {
    /// One of: q, chi, gamma-cd, gamma-c, a-chi, nat-limit, bounds.
    #[arg(long)]
    pub what: String,
    /// Point file {"alpha": [...], "beta": [...]}.
    #[arg(long)]
    pub point: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    /// Moment index for --what q.
    #[arg(long)]
    pub k: Option<u32>,
    /// Generator for gamma-c, e.g. q1, a1 or b2.
    #[arg(long)]
    pub gen: Option<String>,
    /// Shift level "N,M".
    #[arg(long, default_value = "0,0")]
    pub level: String,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub s1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub s2: f64,
    /// Enforce the representable admissibility condition (s2 > 0).
    #[arg(long, default_value_t = false)]
    pub enforce_admissible: bool,
    /// Number of seeded points for --what bounds.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Limit name: exasympt-pos/neg, chi-pos/neg, gammaCD-pos/neg,
    /// `gammaC-v:<gen>` (or `gammaC-v-neg:<gen>`), a-chi.
    #[arg(long)]
    pub limit: String,
    #[arg(long)]
    pub point: PathBuf,
    /// "default" or a comma list of |C| magnitudes.
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[arg(long, default_value = "0,0")]
    pub level: String,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub s1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub s2: f64,
    #[arg(long, default_value_t = 20.0)]
    pub tol_const: f64,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// TOML configuration with `[params]`, `[grid]` and `[sim]` sections.
    #[arg(long)]
    pub config: PathBuf,
    /// Write trajectories as CSV.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Write trajectories as the binary frame format (magic "THSIM1").
    #[arg(long)]
    pub out_bin: Option<PathBuf>,
    /// Write the total-mass (omega0) report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Run the generator-consistency check on a comma list of moment
    /// expressions instead of emitting trajectories.
    #[arg(long)]
    pub consistency: Option<String>,
    /// Override the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default, Deserialize)]
pub struct FileConfig {
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ParamsSection {
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default = "two")]
    pub s1: f64,
    #[serde(default = "two")]
    pub s2: f64,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection {
            theta: 1.0,
            s1: 2.0,
            s2: 2.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct GridSection {
    #[serde(default = "default_c_values")]
    pub c_values: Vec<f64>,
    #[serde(default = "default_tol_const")]
    pub tolerance_constant: f64,
}

fn default_c_values() -> Vec<f64> {
    default_grid()
}
fn default_tol_const() -> f64 {
    20.0
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            c_values: default_grid(),
            tolerance_constant: 20.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct SimSection {
    #[serde(default = "default_n")]
    pub n: u32,
    #[serde(default = "default_m")]
    pub m: u32,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_paths")]
    pub paths: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_record_every")]
    pub record_every: u32,
    #[serde(default = "default_gap")]
    pub gap_threshold: f64,
    #[serde(default = "default_halvings")]
    pub max_halvings: u32,
    #[serde(default = "default_drift_step")]
    pub max_drift_step: f64,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub beta: Vec<f64>,
}

fn default_n() -> u32 {
    3
}
fn default_m() -> u32 {
    2
}
fn default_dt() -> f64 {
    1e-3
}
fn default_t_end() -> f64 {
    1.0
}
fn default_paths() -> u64 {
    100
}
fn default_seed() -> u64 {
    42
}
fn default_record_every() -> u32 {
    10
}
fn default_gap() -> f64 {
    1e-6
}
fn default_halvings() -> u32 {
    20
}
fn default_drift_step() -> f64 {
    0.05
}

impl Default for SimSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

/// Run a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Apply(args) => cmd_apply(args),
        Command::Gamma(args) => cmd_gamma(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Num(args) => cmd_num(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn bad_input(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_BAD_INPUT,
        message: msg.into(),
    }
}

fn runtime(msg: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_RUNTIME,
        message: msg.into(),
    }
}

fn env_seed() -> Option<u64> {
    std::env::var("THOMA_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
}

fn parse_level(s: &str) -> Result<ShiftLevel, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(bad_input(format!("bad level '{}', expected N,M", s)));
    }
    let n = parts[0]
        .trim()
        .parse()
        .map_err(|_| bad_input("bad level N"))?;
    let m = parts[1]
        .trim()
        .parse()
        .map_err(|_| bad_input("bad level M"))?;
    Ok(ShiftLevel::new(n, m))
}

fn parse_rational_opt(s: &str, what: &str) -> Result<Option<BigRational>, CliError> {
    if s == "sym" {
        return Ok(None);
    }
    let parts: Vec<&str> = s.split('/').collect();
    let make = |n: &str, d: &str| -> Option<BigRational> {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        (d != BigInt::from(0)).then(|| BigRational::new(n, d))
    };
    let r = match parts.as_slice() {
        [n] => make(n, "1"),
        [n, d] => make(n, d),
        _ => None,
    };
    r.map(Some)
        .ok_or_else(|| bad_input(format!("bad rational for {}: '{}'", what, s)))
}

fn load_point(path: &Path) -> Result<ThomaPoint, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad_input(format!("cannot read {}: {}", path.display(), e)))?;
    let raw: ThomaPoint = serde_json::from_str(&text)
        .map_err(|e| bad_input(format!("bad point file {}: {}", path.display(), e)))?;
    raw.revalidate()
        .map_err(|e| bad_input(format!("invalid point in {}: {}", path.display(), e)))
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes)
        .map_err(|e| runtime(format!("cannot write {}: {}", path.display(), e)))
}

fn expect_moment(src: &str) -> Result<MomentPoly, CliError> {
    match parse_poly(src, AlgebraHint::Moment) {
        Ok(PolyValue::Moment(p)) => Ok(p),
        Ok(_) => Err(bad_input("expected a moment-coordinate expression")),
        Err(e) => Err(bad_input(e.to_string())),
    }
}

fn bind_params(p: &MomentPoly, theta: &str, s1: &str, s2: &str) -> Result<MomentPoly, CliError> {
    let mut out = p.clone();
    for (name, raw, param) in [
        ("theta", theta, Param::Theta),
        ("s1", s1, Param::S1),
        ("s2", s2, Param::S2),
    ] {
        if let Some(v) = parse_rational_opt(raw, name)? {
            out = out
                .bind(param, &v)
                .map_err(|e| bad_input(format!("cannot bind {}: {}", name, e)))?;
        }
    }
    Ok(out)
}

fn cmd_apply(args: ApplyArgs) -> Result<i32, CliError> {
    let u = expect_moment(&args.expr)?;
    let printed = match args.op.as_str() {
        "A" | "a" => bind_params(&ops::apply_a(&u), &args.theta, &args.s1, &args.s2)?.to_string(),
        "a-pet" | "A-pet" => ops::apply_a_petrov(&u).to_string(),
        "petrov-degeneration" => ops::degenerate_to_petrov(&u)
            .map_err(|e| bad_input(format!("degeneration failure: {}", e)))?
            .to_string(),
        "a-nat" | "A-nat" => {
            let img = ops::apply_a_nat(&u, args.n, args.m).map_err(|e| bad_input(e.to_string()))?;
            img.to_string()
        }
        other => return Err(bad_input(format!("unknown operator '{}'", other))),
    };
    println!("{}", printed);
    if let Some(out) = args.out {
        write_out(&out, format!("{}\n", printed).as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn cmd_gamma(args: GammaArgs) -> Result<i32, CliError> {
    let hint = match &args.level {
        Some(lvl) => AlgebraHint::Ext(parse_level(lvl)?),
        None => AlgebraHint::Auto,
    };
    let u = parse_poly(&args.u, hint).map_err(|e| bad_input(e.to_string()))?;
    let v = parse_poly(&args.v, hint).map_err(|e| bad_input(e.to_string()))?;
    let printed = match (u, v) {
        (PolyValue::Moment(u), PolyValue::Moment(v)) => ops::gamma(&u, &v).to_string(),
        (PolyValue::Ext(u), PolyValue::Ext(v)) => ops::gamma_nm(&u, &v)
            .map_err(|e| bad_input(e.to_string()))?
            .to_string(),
        (PolyValue::Nat(u), PolyValue::Nat(v)) => {
            // operands embed into the smallest common truncation
            let joint = crate::poly::Truncation::new(
                u.truncation().n.max(v.truncation().n),
                u.truncation().m.max(v.truncation().m),
            );
            let ue = u.embed(joint).map_err(|e| bad_input(e.to_string()))?;
            let ve = v.embed(joint).map_err(|e| bad_input(e.to_string()))?;
            ops::gamma_alpha_beta(&ue, &ve)
                .map_err(|e| bad_input(e.to_string()))?
                .to_string()
        }
        _ => return Err(bad_input("operands live in different algebras")),
    };
    println!("{}", printed);
    if let Some(out) = args.out {
        write_out(&out, format!("{}\n", printed).as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let cfg = VerifyConfig {
        max_k: args.max_k,
        max_level: args.max_level,
        max_trunc: args.max_trunc,
        max_grading: args.max_grading,
        max_petrov_k: args.max_petrov_k,
    };
    let names: Vec<IdentityName> = if args.identity == "all" {
        ALL_IDENTITIES.to_vec()
    } else {
        vec![IdentityName::from_str(&args.identity).map_err(bad_input)?]
    };
    let mut reports = Vec::new();
    let mut all_pass = true;
    for name in names {
        let rep = verify_identity(name, &cfg).map_err(|e| runtime(e.to_string()))?;
        println!(
            "identity {}: {} cases, {} failures -> {}",
            rep.identity,
            rep.total,
            rep.failures,
            if rep.passed() { "pass" } else { "FAIL" }
        );
        all_pass &= rep.passed();
        reports.push(rep);
    }
    if let Some(out) = args.out {
        let env = Envelope::new(
            "verify",
            0,
            serde_json::to_value(cfg).unwrap_or_default(),
            &reports,
        );
        write_out(&out, &env.to_json_bytes())?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn parse_genref(s: &str) -> Result<qnum::GenRef, CliError> {
    let bad = || {
        bad_input(format!(
            "bad generator '{}'; expected q<k>, a<i> or b<j>",
            s
        ))
    };
    if let Some(rest) = s.strip_prefix('q') {
        return rest.parse().map(qnum::GenRef::Q).map_err(|_| bad());
    }
    if let Some(rest) = s.strip_prefix('a') {
        return rest.parse().map(qnum::GenRef::X).map_err(|_| bad());
    }
    if let Some(rest) = s.strip_prefix('b') {
        return rest
            .parse::<i32>()
            .map(|j| qnum::GenRef::X(-j))
            .map_err(|_| bad());
    }
    Err(bad())
}

fn cmd_num(args: NumArgs) -> Result<i32, CliError> {
    let params = NumParams {
        theta: args.theta,
        s1: args.s1,
        s2: args.s2,
        enforce_admissible: args.enforce_admissible,
    };
    match params.check_admissible() {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {}", w);
            }
        }
        Err(e) => return Err(bad_input(e)),
    }
    let lvl = parse_level(&args.level)?;
    let need_point = || -> Result<ThomaPoint, CliError> {
        let path = args
            .point
            .as_ref()
            .ok_or_else(|| bad_input("--point is required for this evaluation"))?;
        load_point(path)
    };
    let need_c = || args.c.ok_or_else(|| bad_input("--c is required"));
    let value: f64 =
        match args.what.as_str() {
            "q" => {
                let k = args
                    .k
                    .ok_or_else(|| bad_input("--k is required for --what q"))?;
                qnum::eval_q(&need_point()?, k, params.theta)
            }
            "chi" => qnum::chi(&need_point()?, need_c()?, params.theta)
                .map_err(|e| bad_input(e.to_string()))?,
            "gamma-cd" => {
                let c = need_c()?;
                let d = args.d.unwrap_or(c);
                qnum::gamma_cd(&need_point()?, c, d, lvl, &params)
                    .map_err(|e| bad_input(e.to_string()))?
            }
            "gamma-c" => {
                let gen = parse_genref(
                    args.gen
                        .as_deref()
                        .ok_or_else(|| bad_input("--gen is required for gamma-c"))?,
                )?;
                qnum::gamma_c(&need_point()?, need_c()?, gen, lvl, &params)
                    .map_err(|e| bad_input(e.to_string()))?
            }
            "a-chi" => qnum::a_chi(&need_point()?, need_c()?, &params)
                .map_err(|e| bad_input(e.to_string()))?,
            "nat-limit" => qnum::nat_limit_alpha1(&need_point()?, &params)
                .map_err(|e| bad_input(e.to_string()))?,
            "bounds" => {
                let seed = env_seed().unwrap_or(args.seed);
                let points = seeded_points(seed, args.points);
                let cfg = crate::bounds::BoundsConfig::default();
                let report = crate::bounds::check_bounds(&points, &cfg);
                println!(
                    "bounds: {} points, {} checks, {} violations",
                    report.points, report.checks, report.violations
                );
                if let Some(out) = args.out {
                    let env = Envelope::new(
                        "bounds",
                        seed,
                        serde_json::to_value(&cfg).unwrap_or_default(),
                        &report,
                    );
                    write_out(&out, &env.to_json_bytes())?;
                }
                return Ok(if report.passed() {
                    EXIT_OK
                } else {
                    EXIT_CHECK_FAILED
                });
            }
            other => return Err(bad_input(format!("unknown evaluation '{}'", other))),
        };
    println!("{}", fmt_f64(value));
    if let Some(out) = args.out {
        write_out(&out, format!("{}\n", fmt_f64(value)).as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32, CliError> {
    let target = LimitTarget::from_str(&args.limit).map_err(|e| bad_input(e.to_string()))?;
    let point = load_point(&args.point)?;
    let lvl = parse_level(&args.level)?;
    let params = NumParams::new(args.theta, args.s1, args.s2);
    let grid: Vec<f64> = if args.grid == "default" {
        default_grid()
    } else {
        args.grid
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad_input(format!("bad grid '{}'", args.grid)))?
    };
    let report = limit_sweep(
        &point,
        target,
        &grid,
        lvl,
        &params,
        SweepTolerance {
            constant: args.tol_const,
        },
    )
    .map_err(|e| bad_input(e.to_string()))?;
    for row in &report.rows {
        println!(
            "C={:>12} value={:>22} claimed={:>22} abs_err={}",
            fmt_f64(row.c),
            fmt_f64(row.value),
            fmt_f64(row.claimed_limit),
            fmt_f64(row.abs_err)
        );
    }
    println!(
        "sweep {}: {} (final tolerance {})",
        report.target,
        if report.converged {
            "converged"
        } else {
            "NOT CONVERGED"
        },
        fmt_f64(report.final_tolerance)
    );
    let config = serde_json::json!({
        "limit": args.limit,
        "level": [lvl.n, lvl.m],
        "theta": args.theta,
        "s1": args.s1,
        "s2": args.s2,
        "grid": grid,
        "tol_const": args.tol_const,
        "point": {"alpha": point.alpha, "beta": point.beta},
    });
    if let Some(out) = &args.out_csv {
        let mut csv = CsvBuilder::new(
            "sweep",
            0,
            &config,
            &["point_id", "C", "value", "claimed_limit", "abs_err"],
        );
        for row in &report.rows {
            csv.row(&[
                "0".into(),
                fmt_f64(row.c),
                fmt_f64(row.value),
                fmt_f64(row.claimed_limit),
                fmt_f64(row.abs_err),
            ]);
        }
        write_out(out, &csv.into_bytes())?;
    }
    if let Some(out) = &args.out_json {
        let env = Envelope::new("sweep", 0, config.clone(), &report);
        write_out(out, &env.to_json_bytes())?;
    }
    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad_input(format!("cannot read {}: {}", path.display(), e)))?;
    toml::from_str(&text).map_err(|e| bad_input(format!("bad config {}: {}", path.display(), e)))
}

fn sim_config_from(file: &FileConfig, seed_override: Option<u64>) -> SimConfig {
    let seed = env_seed().or(seed_override).unwrap_or(file.sim.seed);
    SimConfig {
        n: file.sim.n,
        m: file.sim.m,
        dt: file.sim.dt,
        t_end: file.sim.t_end,
        paths: file.sim.paths,
        seed,
        theta: file.params.theta,
        s1: file.params.s1,
        s2: file.params.s2,
        substep: SubstepPolicy {
            gap_threshold: file.sim.gap_threshold,
            max_halvings: file.sim.max_halvings,
            max_drift_step: file.sim.max_drift_step,
        },
        record_every: file.sim.record_every,
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32, CliError> {
    let file = load_config(&args.config)?;
    let cfg = sim_config_from(&file, args.seed);
    let start_point = ThomaPoint::new(file.sim.alpha.clone(), file.sim.beta.clone())
        .map_err(|e| bad_input(format!("bad start point: {}", e)))?;
    let start = SimState::from_point(&start_point, cfg.n, cfg.m, cfg.theta)
        .map_err(|e| bad_input(e.to_string()))?;
    let config_json = serde_json::to_value(&cfg).unwrap_or_default();

    if let Some(exprs) = &args.consistency {
        let mut reports = Vec::new();
        let mut all_pass = true;
        for src in exprs.split(',') {
            let f = expect_moment(src.trim())?;
            let rep = generator_consistency(&f, src.trim(), &start, &cfg)
                .map_err(|e| runtime(e.to_string()))?;
            println!(
                "consistency {}: exact={} mc={} se={} z={}",
                rep.f,
                fmt_f64(rep.exact),
                fmt_f64(rep.mc_mean),
                fmt_f64(rep.std_err),
                fmt_f64(rep.z_score)
            );
            all_pass &= rep.z_score.abs() <= 3.0;
            reports.push(rep);
        }
        if let Some(out) = &args.report {
            let env = Envelope::new("sim-consistency", cfg.seed, config_json, &reports);
            write_out(out, &env.to_json_bytes())?;
        }
        return Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED });
    }

    // trajectory columns run x_{-m}..x_{-1}, x_1..x_n
    let reorder = |coords: &[f64]| -> Vec<f64> {
        let n = cfg.n as usize;
        let mut out: Vec<f64> = coords[n..].iter().rev().copied().collect();
        out.extend_from_slice(&coords[..n]);
        out
    };
    let mut csv = args.out_csv.as_ref().map(|_| {
        let mut cols: Vec<String> = vec!["path_id".into(), "t".into()];
        for j in (1..=cfg.m).rev() {
            cols.push(format!("b{}", j));
        }
        for i in 1..=cfg.n {
            cols.push(format!("a{}", i));
        }
        cols.push("sum_x".into());
        let col_refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
        CsvBuilder::new("trajectories", cfg.seed, &config_json, &col_refs)
    });
    let mut bin: Option<Vec<u8>> = args.out_bin.as_ref().map(|_| {
        let mut header = b"THSIM1".to_vec();
        header.extend_from_slice(&cfg.n.to_le_bytes());
        header.extend_from_slice(&cfg.m.to_le_bytes());
        header.extend_from_slice(&cfg.paths.to_le_bytes());
        header
    });

    let outcomes = run_paths(&cfg, &start, |frame| {
        let ordered = reorder(&frame.coords);
        if let Some(csv) = csv.as_mut() {
            let mut fields = vec![frame.path.to_string(), fmt_f64(frame.t)];
            fields.extend(ordered.iter().map(|v| fmt_f64(*v)));
            fields.push(fmt_f64(frame.sum_x));
            csv.row(&fields);
        }
        if let Some(bin) = bin.as_mut() {
            bin.extend_from_slice(&frame.path.to_le_bytes());
            bin.extend_from_slice(&frame.t.to_le_bytes());
            for v in &ordered {
                bin.extend_from_slice(&v.to_le_bytes());
            }
            bin.extend_from_slice(&frame.sum_x.to_le_bytes());
        }
    })
    .map_err(|e| runtime(e.to_string()))?;

    if let (Some(path), Some(csv)) = (&args.out_csv, csv) {
        write_out(path, &csv.into_bytes())?;
    }
    if let (Some(path), Some(bin)) = (&args.out_bin, bin) {
        write_out(path, &bin)?;
    }
    let aborted = outcomes.iter().filter(|o| o.aborted).count();
    if let Some(out) = &args.report {
        let rep = omega0_report(&cfg, &start).map_err(|e| runtime(e.to_string()))?;
        println!(
            "omega0: median sum rises: {}, face retention: {}, aborted paths: {}",
            rep.median_trend_up, rep.face_retention, rep.aborted_paths
        );
        let env = Envelope::new(
            "omega0",
            cfg.seed,
            serde_json::to_value(&cfg).unwrap_or_default(),
            &rep,
        );
        write_out(out, &env.to_json_bytes())?;
    }
    println!("simulated {} paths ({} aborted)", outcomes.len(), aborted);
    Ok(if aborted == 0 { EXIT_OK } else { EXIT_RUNTIME })
}
