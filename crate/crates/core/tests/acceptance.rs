//! Acceptance suite: one test per criterion, each printing a summary line.
//! Exact criteria compare polynomials structurally; numeric criteria pin the
//! stated tolerances; statistical criteria use the stated repetition budget.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thoma::coeff::CoeffElem;
use thoma::moment::MomentPoly;
use thoma::ops;
use thoma::parser::{parse_poly, AlgebraHint, PolyValue};
use thoma::point::{
    seeded_points, seeded_separated_points, NumParams, SeparatedPointSpec, ThomaPoint,
};
use thoma::poly::{ShiftLevel, Truncation};
use thoma::qnum::{self, GenRef};
use thoma::sim;
use thoma::verify::{verify_identity, IdentityName, VerifyConfig};

fn pass(criterion: &str, detail: String) {
    println!("[PASS] {}: {}", criterion, detail);
}

fn desk_config() -> VerifyConfig {
    VerifyConfig {
        max_k: 6,
        max_level: 3,
        max_trunc: 5,
        max_grading: 10,
        max_petrov_k: 8,
    }
}

/// Criterion 1: A(uv) - (Au)v - u(Av) = 2 Gamma(u,v) exactly for all monomial
/// pairs in q_1..q_6 of grading <= 10. Runtime target < 10 s.
#[test]
fn criterion_01_product_rule_identity() {
    let start = std::time::Instant::now();
    let report = verify_identity(IdentityName::ProductRule, &desk_config()).unwrap();
    assert!(
        report.total >= 1000,
        "expected a dense pair sweep, got {}",
        report.total
    );
    assert_eq!(
        report.failures,
        0,
        "failures: {:?}",
        report.cases.iter().find(|c| c.witness.is_some())
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "runtime {:?} exceeds 10 s",
        elapsed
    );
    pass(
        "criterion 1 (product rule)",
        format!("{} exact cases in {:?}", report.total, elapsed),
    );
}

/// Criterion 2: Petrov degeneration equals the Petrov generator for k <= 8,
/// exactly. Runtime target < 1 s.
#[test]
fn criterion_02_petrov_degeneration() {
    let start = std::time::Instant::now();
    let report = verify_identity(IdentityName::PetrovDegeneration, &desk_config()).unwrap();
    assert_eq!(report.total, 8);
    assert_eq!(report.failures, 0);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "runtime {:?} exceeds 1 s",
        elapsed
    );
    pass(
        "criterion 2 (Petrov degeneration)",
        format!("k <= 8 exact in {:?}", elapsed),
    );
}

/// Criterion 3: shift consistency for all generator pairs at N, M <= 3,
/// k, l <= 6, in both the +N and +M directions, exactly.
#[test]
fn criterion_03_shift_consistency() {
    let report = verify_identity(IdentityName::ConsistentShift, &desk_config()).unwrap();
    assert_eq!(
        report.failures,
        0,
        "failures: {:?}",
        report.cases.iter().find(|c| c.witness.is_some())
    );
    // 16 levels x 2 directions x (N+M+6)^2 pairs
    assert!(report.total > 2000);
    pass(
        "criterion 3 (shift consistency)",
        format!("{} exact cases", report.total),
    );
}

/// Criterion 4: natural-coordinate form agreement
/// Gamma_ab(subst q_k, subst q_l) = subst Gamma(q_k, q_l) for k, l <= 5 and
/// truncations n, m <= 6, theta symbolic.
#[test]
fn criterion_04_gamma_natural_vs_moment() {
    let mut cases = 0;
    for n in 0..=6u32 {
        for m in 0..=6u32 {
            if n == 0 && m == 0 {
                continue;
            }
            for k in 1..=5u32 {
                for l in 1..=5u32 {
                    let su = MomentPoly::q(k).substitute_moments(n, m);
                    let sv = MomentPoly::q(l).substitute_moments(n, m);
                    let lhs = ops::gamma_alpha_beta(&su, &sv).unwrap();
                    let rhs =
                        ops::gamma(&MomentPoly::q(k), &MomentPoly::q(l)).substitute_moments(n, m);
                    assert!(
                        lhs.checked_sub(&rhs).unwrap().is_zero(),
                        "mismatch at k={} l={} n={} m={}",
                        k,
                        l,
                        n,
                        m
                    );
                    cases += 1;
                }
            }
        }
    }
    pass(
        "criterion 4 (Gamma_ab vs Gamma)",
        format!("{} exact cases, theta symbolic", cases),
    );
}

/// Criterion 5: the natural-coordinate generator agrees with the moment form
/// modulo the simplex ideal for the stated test family, n, m <= 5, theta
/// symbolic: reduce(A_nat(u) - subst(A u)) = 0.
#[test]
fn criterion_05_generator_agreement_mod_simplex() {
    let q = MomentPoly::q;
    let family: Vec<(&str, MomentPoly)> = vec![
        ("q1", q(1)),
        ("q2", q(2)),
        ("q3", q(3)),
        ("q4", q(4)),
        ("q5", q(5)),
        ("q1*q2", q(1).mul(&q(2))),
        ("q1^2", q(1).pow(2)),
        ("q1*q3", q(1).mul(&q(3))),
    ];
    let mut cases = 0;
    for (name, u) in &family {
        for n in 1..=5u32 {
            for m in 0..=5u32 {
                let lhs = ops::apply_a_nat(u, n, m).unwrap();
                let rhs = ops::apply_a(u).substitute_moments(n, m);
                let reduced = lhs.checked_sub(&rhs).unwrap().reduce_mod_simplex().unwrap();
                assert!(
                    reduced.is_zero(),
                    "nonzero residue for u={} n={} m={}",
                    name,
                    n,
                    m
                );
                cases += 1;
            }
        }
    }
    pass(
        "criterion 5 (A_nat vs A mod simplex)",
        format!("{} exact cases", cases),
    );
}

/// Criterion 6: the bracket lemmas hold exactly for phi, psi = t^k, k <= 5,
/// u over all generators, N, M <= 2.
#[test]
fn criterion_06_bracket_lemmas() {
    let cfg = VerifyConfig {
        max_k: 5,
        max_level: 2,
        ..desk_config()
    };
    let lem111 = verify_identity(IdentityName::Lem111, &cfg).unwrap();
    assert_eq!(lem111.failures, 0);
    let lem222 = verify_identity(IdentityName::Lem222, &cfg).unwrap();
    assert_eq!(lem222.failures, 0);
    pass(
        "criterion 6 (bracket lemmas)",
        format!("{} + {} exact cases", lem111.total, lem222.total),
    );
}

/// Criterion 7: transform inequalities and the chi bound hold with zero
/// violations over 1000 seeded points x C in +-{1,...,1e5} x theta in
/// {1/2, 1, 2}, in log space (no overflow at C = +-1e5).
#[test]
fn criterion_07_bounds_suite() {
    let mut points = seeded_points(2024, 1000);
    // edge cases on top of the seeded bulk
    points.push(ThomaPoint::empty());
    points.push(ThomaPoint::new(vec![1.0], vec![]).unwrap());
    points.push(ThomaPoint::new(vec![], vec![1.0]).unwrap());
    let cfg = thoma::bounds::BoundsConfig::default();
    let report = thoma::bounds::check_bounds(&points, &cfg);
    assert_eq!(report.violations, 0, "violations: {:?}", report.messages);
    pass(
        "criterion 7 (bounds suite)",
        format!(
            "{} checks, 0 violations over {} points",
            report.checks, report.points
        ),
    );
}

fn limit_suite_points() -> Vec<ThomaPoint> {
    let spec = SeparatedPointSpec {
        na: 3,
        nb: 2,
        min_mass: 0.1,
        min_gap: 0.05,
        on_omega0: false,
    };
    let pts = seeded_separated_points(7177, 100, spec);
    for p in &pts {
        assert!(p.alpha1() >= 0.1 && p.beta1() >= 0.1);
        assert!(p.alpha[0] - p.alpha[1] >= 0.05, "top gap");
        assert!(p.beta[0] - p.beta[1] >= 0.05, "beta gap");
    }
    pts
}

/// Criterion 8: limit suite on 100 seeded points with top-atom gap >= 0.05
/// and alpha1, beta1 >= 0.1 — chi within 1e-3 at C = +-1e4, Gamma_{C,D}
/// within 1e-2 at C = D = +-1e4, Gamma_C(v) within 1e-2 for
/// v in {x_{+-1}, q_1, q_2}.
#[test]
fn criterion_08_limit_suite() {
    let points = limit_suite_points();
    let mut checks = 0;
    for theta in [0.5, 1.0, 2.0] {
        let params = NumParams::new(theta, 2.0, 2.0);
        for p in &points {
            // chi limits at C = +-1e4, tolerance 1e-3
            let cp = qnum::chi(p, 1e4, theta).unwrap();
            assert!(
                (cp - p.alpha1()).abs() <= 1e-3,
                "chi-pos: {} vs {} (theta {})",
                cp,
                p.alpha1(),
                theta
            );
            let cn = qnum::chi(p, -1e4, theta).unwrap();
            assert!(
                (cn + theta * p.beta1()).abs() <= 1e-3,
                "chi-neg: {} vs {} (theta {})",
                cn,
                -theta * p.beta1(),
                theta
            );
            // Gamma_{C,D} limits at C = D = +-1e4, tolerance 1e-2
            let lvl = ShiftLevel::new(0, 0);
            let gp = qnum::gamma_cd(p, 1e4, 1e4, lvl, &params).unwrap();
            let a1 = p.alpha1();
            assert!((gp - (a1 - a1 * a1)).abs() <= 1e-2, "gammaCD-pos {}", gp);
            let gn = qnum::gamma_cd(p, -1e4, -1e4, lvl, &params).unwrap();
            let b1 = p.beta1();
            assert!(
                (gn - theta * theta * (b1 - b1 * b1)).abs() <= 1e-2,
                "gammaCD-neg {}",
                gn
            );
            checks += 4;
        }
    }
    // Gamma_C(v) limits for v in {x_1, x_{-1}, q_1, q_2}, both directions
    let params = NumParams::new(1.0, 2.0, 2.0);
    for p in &points {
        let cases: [(GenRef, ShiftLevel); 4] = [
            (GenRef::X(1), ShiftLevel::new(1, 0)),
            (GenRef::X(-1), ShiftLevel::new(0, 1)),
            (GenRef::Q(1), ShiftLevel::new(0, 0)),
            (GenRef::Q(2), ShiftLevel::new(0, 0)),
        ];
        for (v, lvl) in cases {
            for c in [1e4, -1e4] {
                let value = qnum::gamma_c(p, c, v, lvl, &params).unwrap();
                let claimed = qnum::gamma_c_limit(p, c > 0.0, v, lvl, &params);
                assert!(
                    (value - claimed).abs() <= 1e-2,
                    "gammaC {:?} at C={}: {} vs {}",
                    v,
                    c,
                    value,
                    claimed
                );
                checks += 1;
            }
        }
    }
    pass(
        "criterion 8 (limit suite)",
        format!("{} limit checks on 100 points", checks),
    );
}

/// Well-separated boundary-face points for the asymptotic computation: a
/// dominant top coordinate and generous pairwise gaps keep the 1/C correction
/// small enough for the Cauchy-tail check.
fn omega0_asymptotic_points(seed: u64, count: usize) -> Vec<ThomaPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        assert!(tries < 100_000, "sampler exhausted");
        let a1 = rng.gen_range(0.45..0.6);
        let ka = rng.gen_range(1..=2usize);
        let kb = rng.gen_range(1..=2usize);
        let rest = 1.0 - a1;
        let mut parts: Vec<f64> = (0..ka + kb).map(|_| rng.gen_range(0.3..1.0)).collect();
        let s: f64 = parts.iter().sum();
        for v in parts.iter_mut() {
            *v *= rest / s;
        }
        let mut alpha = vec![a1];
        let mut extra_a: Vec<f64> = parts[0..ka].to_vec();
        extra_a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        alpha.extend(extra_a);
        let mut beta: Vec<f64> = parts[ka..].to_vec();
        beta.sort_by(|x, y| y.partial_cmp(x).unwrap());
        // dominance and minimum-mass constraints
        if alpha[1] > a1 - 0.2 {
            continue;
        }
        if alpha.iter().chain(beta.iter()).any(|v| *v < 0.05) {
            continue;
        }
        let p = match ThomaPoint::new(alpha, beta) {
            Ok(p) => p,
            Err(_) => continue,
        };
        if !p.on_omega0(1e-12) {
            continue;
        }
        // pairwise modified-coordinate gaps (theta = 1)
        if p.measure(1.0).min_gap() < 0.04 {
            continue;
        }
        out.push(p);
    }
    out
}

/// Criterion 9: the asymptotic computation of A chi_C — agreement with the
/// natural drift within 1e-1 at C = 1e5, the O(C) cancellation check
/// |a(2C) - a(C)| <= 10/C at C = 1e4, and the reference point value
/// 3.5714286 +- 1e-3. Runtime target < 30 s.
#[test]
fn criterion_09_a_chi_asymptotics() {
    let start = std::time::Instant::now();
    let params = NumParams::new(1.0, 2.0, 2.0);
    let points = omega0_asymptotic_points(909, 20);
    for (i, p) in points.iter().enumerate() {
        let limit = qnum::nat_limit_alpha1(p, &params).unwrap();
        let far = qnum::a_chi(p, 1e5, &params).unwrap();
        assert!(
            (far - limit).abs() <= 1e-1,
            "point {}: a_chi(1e5) = {} vs limit {}",
            i,
            far,
            limit
        );
        let v1 = qnum::a_chi(p, 1e4, &params).unwrap();
        let v2 = qnum::a_chi(p, 2e4, &params).unwrap();
        assert!(
            (v2 - v1).abs() <= 10.0 / 1e4,
            "point {}: Cauchy gap {} exceeds 1e-3",
            i,
            (v2 - v1).abs()
        );
    }
    // reference point
    let reference = ThomaPoint::new(vec![0.5, 0.3], vec![0.2]).unwrap();
    let lim = qnum::nat_limit_alpha1(&reference, &params).unwrap();
    assert!((lim - 3.5714286).abs() <= 1e-3);
    let val = qnum::a_chi(&reference, 1e5, &params).unwrap();
    assert!((val - 3.5714286).abs() <= 1e-3, "reference a_chi = {}", val);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "runtime {:?} exceeds 30 s",
        elapsed
    );
    pass(
        "criterion 9 (A chi asymptotics)",
        format!("20 points + reference in {:?}", elapsed),
    );
}

/// Criterion 10: simulator self-consistency — PSD diffusion matrices on 1e4
/// random states, simplex retention along paths, and generator z-scores
/// within +-3 for f in {q1, q2, q1^2} at n=3, m=2, dt=1e-4, 1e5 paths, with
/// at most 2 failures across 10 seeded repetitions. Runtime target < 5 min.
#[test]
fn criterion_10_simulator_self_consistency() {
    let start = std::time::Instant::now();
    // PSD on 1e4 random simplex states
    for state in sim::random_simplex_states(31, 10_000, 3, 2, 1.0) {
        let min = sim::diffusion_matrix(&state, 1.0).min_eigenvalue();
        assert!(min >= -1e-10, "diffusion matrix min eigenvalue {}", min);
    }
    // simplex retention along simulated paths
    let p0 = ThomaPoint::new(vec![0.3, 0.25, 0.15], vec![0.2, 0.1]).unwrap();
    let start_state = sim::SimState::from_point(&p0, 3, 2, 1.0).unwrap();
    let cfg = sim::SimConfig {
        n: 3,
        m: 2,
        dt: 1e-3,
        t_end: 1.0,
        paths: 50,
        seed: 17,
        theta: 1.0,
        s1: 2.0,
        s2: 2.0,
        substep: sim::SubstepPolicy::default(),
        record_every: 5,
    };
    let mut frames = 0usize;
    sim::run_paths(&cfg, &start_state, |f| {
        frames += 1;
        assert!(f.coords.iter().all(|x| *x >= 0.0), "negative coordinate");
        assert!(
            f.sum_x <= 1.0 + 1e-9,
            "mass {} escapes the simplex",
            f.sum_x
        );
    })
    .unwrap();
    assert!(frames > 1000);
    // generator consistency: 3 observables x 10 seeded repetitions
    let fs: [(&str, MomentPoly); 3] = [
        ("q1", MomentPoly::q(1)),
        ("q2", MomentPoly::q(2)),
        ("q1^2", MomentPoly::q(1).pow(2)),
    ];
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for rep in 0..10u64 {
        let cfg = sim::SimConfig {
            dt: 1e-4,
            t_end: 0.0,
            paths: 100_000,
            seed: 4000 + rep,
            record_every: 1,
            ..cfg.clone()
        };
        for (label, f) in &fs {
            let rep = sim::generator_consistency(f, label, &start_state, &cfg).unwrap();
            worst = worst.max(rep.z_score.abs());
            if rep.z_score.abs() > 3.0 {
                failures += 1;
            }
        }
    }
    assert!(failures <= 2, "{} of 30 z-scores exceeded +-3", failures);
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "runtime {:?} exceeds 5 min",
        elapsed
    );
    pass(
        "criterion 10 (simulator)",
        format!(
            "PSD x 1e4, retention x {} frames, 30 z-scores (worst |z| = {:.2}, {} failures) in {:?}",
            frames, worst, failures, elapsed
        ),
    );
}

fn random_moment_poly(rng: &mut ChaCha8Rng) -> MomentPoly {
    let mut p = MomentPoly::zero();
    for _ in 0..rng.gen_range(1..=4usize) {
        let mut mono = MomentPoly::one();
        for _ in 0..rng.gen_range(0..=3usize) {
            let k = rng.gen_range(1..=5u32);
            let e = rng.gen_range(1..=3u32);
            mono = mono.mul(&MomentPoly::q(k).pow(e));
        }
        let coeff = CoeffElem::from_ratio(rng.gen_range(-30..=30), rng.gen_range(1..=7))
            .mul(&CoeffElem::theta_pow(rng.gen_range(-2..=2)));
        p = p.add(&mono.scale(&coeff));
    }
    p
}

/// Criterion 11: print -> parse structural equality on 1000 random
/// polynomials, and byte-identical reports for a fixed seed (library and
/// binary level).
#[test]
fn criterion_11_cli_round_trip_and_determinism() {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    // 600 moment polynomials
    for i in 0..600 {
        let p = random_moment_poly(&mut rng);
        let printed = p.to_string();
        match parse_poly(&printed, AlgebraHint::Moment) {
            Ok(PolyValue::Moment(back)) => {
                assert_eq!(back, p, "round trip {} failed: {}", i, printed)
            }
            other => panic!("round trip {} failed on '{}': {:?}", i, printed, other),
        }
    }
    // 200 extended, 200 natural
    let lvl = ShiftLevel::new(2, 1);
    let trunc = Truncation::new(2, 2);
    for i in 0..200 {
        let e = random_ext_poly(&mut rng, lvl);
        match parse_poly(&e.to_string(), AlgebraHint::Ext(lvl)) {
            Ok(PolyValue::Ext(back)) => assert_eq!(back, e, "ext round trip {} failed", i),
            other => panic!("ext round trip {} failed: {:?}", i, other),
        }
        let np = random_nat_poly(&mut rng, trunc);
        match parse_poly(&np.to_string(), AlgebraHint::Nat(trunc)) {
            Ok(PolyValue::Nat(back)) => assert_eq!(back, np, "nat round trip {} failed", i),
            other => panic!("nat round trip {} failed: {:?}", i, other),
        }
    }

    // library-level determinism: identical seeds give identical report bytes
    let cfg = VerifyConfig {
        max_k: 3,
        max_level: 1,
        max_trunc: 2,
        max_grading: 6,
        max_petrov_k: 4,
    };
    let rep_a = verify_identity(IdentityName::Lem111, &cfg).unwrap();
    let rep_b = verify_identity(IdentityName::Lem111, &cfg).unwrap();
    let bytes_a =
        thoma::report::Envelope::new("verify", 5, serde_json::json!({}), &rep_a).to_json_bytes();
    let bytes_b =
        thoma::report::Envelope::new("verify", 5, serde_json::json!({}), &rep_b).to_json_bytes();
    assert_eq!(bytes_a, bytes_b);

    // binary-level determinism: the same seeded simulate run twice gives
    // byte-identical artifacts
    let dir = std::env::temp_dir().join(format!("thoma-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("sim.toml");
    std::fs::write(
        &config_path,
        "[params]\ntheta = 1.0\ns1 = 2.0\ns2 = 2.0\n\n[sim]\nn = 2\nm = 1\ndt = 1e-3\nt_end = 0.05\npaths = 6\nseed = 33\nrecord_every = 10\nalpha = [0.5, 0.3]\nbeta = [0.2]\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_thoma");
    let run = |out: &std::path::Path| {
        let status = std::process::Command::new(bin)
            .args([
                "simulate",
                "--config",
                config_path.to_str().unwrap(),
                "--out-csv",
                out.to_str().unwrap(),
            ])
            .env_remove("THOMA_SEED")
            .stdout(std::process::Stdio::null())
            .status()
            .expect("binary runs");
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let csv_a = run(&dir.join("a.csv"));
    let csv_b = run(&dir.join("b.csv"));
    assert_eq!(csv_a, csv_b, "seeded simulate runs differ");
    assert!(!csv_a.is_empty());
    std::fs::remove_dir_all(&dir).ok();
    pass(
        "criterion 11 (round trip + determinism)",
        "1000 polynomial round trips; byte-identical seeded artifacts".to_string(),
    );
}

fn random_ext_poly(rng: &mut ChaCha8Rng, lvl: ShiftLevel) -> thoma::ext::ExtPoly {
    use thoma::ext::ExtPoly;
    let mut p = ExtPoly::zero(lvl);
    for _ in 0..rng.gen_range(1..=4usize) {
        let mut mono = ExtPoly::one(lvl);
        for _ in 0..rng.gen_range(0..=2usize) {
            let pick = rng.gen_range(0..3u8);
            let factor = match pick {
                0 => ExtPoly::x(rng.gen_range(1..=lvl.n as i32), lvl).unwrap(),
                1 => ExtPoly::x(-rng.gen_range(1..=lvl.m as i32), lvl).unwrap(),
                _ => ExtPoly::qs(rng.gen_range(1..=4u32), lvl),
            };
            mono = mono
                .checked_mul(&factor.pow(rng.gen_range(1..=2u32)))
                .unwrap();
        }
        let coeff = CoeffElem::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
            .mul(&CoeffElem::theta_pow(rng.gen_range(-1..=1)));
        p = p.checked_add(&mono.scale(&coeff)).unwrap();
    }
    p
}

fn random_nat_poly(rng: &mut ChaCha8Rng, trunc: Truncation) -> thoma::nat::NatPoly {
    use thoma::nat::NatPoly;
    let mut p = NatPoly::zero(trunc);
    for _ in 0..rng.gen_range(1..=4usize) {
        let mut mono = NatPoly::one(trunc);
        for _ in 0..rng.gen_range(0..=3usize) {
            let i = if rng.gen_bool(0.5) {
                rng.gen_range(1..=trunc.n as i32)
            } else {
                -rng.gen_range(1..=trunc.m as i32)
            };
            mono = mono.checked_mul(&NatPoly::x(i, trunc).unwrap()).unwrap();
        }
        let coeff = CoeffElem::from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        p = p.checked_add(&mono.scale(&coeff)).unwrap();
    }
    p
}
