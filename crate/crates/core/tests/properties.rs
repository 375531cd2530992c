//! Property tests: ring laws and operator identities on randomly generated
//! polynomials, plus the numeric invariants of the transform layer.

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thoma::coeff::CoeffElem;
use thoma::exppoly::ExpPoly;
use thoma::moment::MomentPoly;
use thoma::nat::NatPoly;
use thoma::ops;
use thoma::parser::{parse_poly, AlgebraHint, PolyValue};
use thoma::point::{seeded_points, seeded_separated_points, SeparatedPointSpec};
use thoma::poly::Truncation;
use thoma::qnum;

fn arb_coeff() -> impl Strategy<Value = CoeffElem> {
    (-20i64..=20, 1i64..=6, -2i64..=2)
        .prop_map(|(n, d, t)| CoeffElem::from_ratio(n, d).mul(&CoeffElem::theta_pow(t)))
}

fn arb_moment() -> impl Strategy<Value = MomentPoly> {
    prop::collection::vec(
        (
            arb_coeff(),
            prop::collection::vec((1u32..=5, 1u32..=3), 0..3),
        ),
        0..4,
    )
    .prop_map(|terms| {
        let mut p = MomentPoly::zero();
        for (c, mono) in terms {
            let mut m = MomentPoly::one();
            for (k, e) in mono {
                m = m.mul(&MomentPoly::q(k).pow(e));
            }
            p = p.add(&m.scale(&c));
        }
        p
    })
}

fn arb_nat(trunc: Truncation) -> impl Strategy<Value = NatPoly> {
    let idx: Vec<i32> = trunc.indices();
    prop::collection::vec(
        (
            arb_coeff(),
            prop::collection::vec((0..idx.len(), 1u32..=2), 0..3),
        ),
        0..4,
    )
    .prop_map(move |terms| {
        let mut p = NatPoly::zero(trunc);
        for (c, mono) in terms {
            let mut m = NatPoly::one(trunc);
            for (slot, e) in mono {
                m = m
                    .checked_mul(&NatPoly::x(idx[slot], trunc).unwrap().pow(e))
                    .unwrap();
            }
            p = p.checked_add(&m.scale(&c)).unwrap();
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn ring_laws(a in arb_moment(), b in arb_moment(), c in arb_moment()) {
        // associativity of both operations, commutativity, distributivity
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&a.neg()), MomentPoly::zero());
    }

    #[test]
    fn leibniz_rule(p in arb_moment(), q in arb_moment(), k in 1u32..=5) {
        let lhs = p.mul(&q).partial(k);
        let rhs = p.partial(k).mul(&q).add(&q.partial(k).mul(&p));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_is_ring_homomorphism(p in arb_moment(), q in arb_moment()) {
        let lhs = p.mul(&q).substitute_moments(2, 1);
        let rhs = p
            .substitute_moments(2, 1)
            .checked_mul(&q.substitute_moments(2, 1))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn print_parse_round_trip(p in arb_moment()) {
        let printed = p.to_string();
        match parse_poly(&printed, AlgebraHint::Moment) {
            Ok(PolyValue::Moment(back)) => prop_assert_eq!(back, p),
            other => prop_assert!(false, "failed on '{}': {:?}", printed, other),
        }
    }

    #[test]
    fn gamma_is_symmetric_bilinear_derivation(
        u in arb_moment(),
        v in arb_moment(),
        w in arb_moment(),
    ) {
        prop_assert_eq!(ops::gamma(&u, &v), ops::gamma(&v, &u));
        prop_assert_eq!(
            ops::gamma(&u.add(&w), &v),
            ops::gamma(&u, &v).add(&ops::gamma(&w, &v))
        );
        // derivation in the second slot
        let lhs = ops::gamma(&u, &v.mul(&w));
        let rhs = v.mul(&ops::gamma(&u, &w)).add(&w.mul(&ops::gamma(&u, &v)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_rule_on_random_polynomials(u in arb_moment(), v in arb_moment()) {
        let lhs = ops::apply_a(&u.mul(&v))
            .sub(&ops::apply_a(&u).mul(&v))
            .sub(&ops::apply_a(&v).mul(&u));
        prop_assert_eq!(lhs, ops::gamma(&u, &v).scale_int(2));
    }

    #[test]
    fn generator_never_increases_grading(u in arb_moment()) {
        let image = ops::apply_a(&u);
        match (image.grading(), u.grading()) {
            (Some(gi), Some(gu)) => prop_assert!(gi <= gu, "grading rose: {} -> {}", gu, gi),
            (Some(_), None) => prop_assert!(false, "A(0) must be 0"),
            _ => {}
        }
    }

    #[test]
    fn gamma_nm_at_origin_matches_gamma(u in arb_moment(), v in arb_moment()) {
        let ue = thoma::ext::ExtPoly::from_moment(&u);
        let ve = thoma::ext::ExtPoly::from_moment(&v);
        let lhs = ops::gamma_nm(&ue, &ve).unwrap().to_moment().unwrap();
        prop_assert_eq!(lhs, ops::gamma(&u, &v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reduction_vanishes_on_ideal_and_is_idempotent(
        p in arb_nat(Truncation::new(2, 1)),
    ) {
        let t = Truncation::new(2, 1);
        let ideal_gen = NatPoly::simplex_sum(t).sub(&NatPoly::one(t));
        let in_ideal = p.checked_mul(&ideal_gen).unwrap();
        prop_assert!(in_ideal.reduce_mod_simplex().unwrap().is_zero());
        let r1 = p.reduce_mod_simplex().unwrap();
        let r2 = r1.reduce_mod_simplex().unwrap();
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn gamma_alpha_beta_symmetric_and_bilinear(
        u in arb_nat(Truncation::new(2, 2)),
        v in arb_nat(Truncation::new(2, 2)),
        w in arb_nat(Truncation::new(2, 2)),
    ) {
        let guv = ops::gamma_alpha_beta(&u, &v).unwrap();
        prop_assert_eq!(guv.clone(), ops::gamma_alpha_beta(&v, &u).unwrap());
        let lhs = ops::gamma_alpha_beta(&u.checked_add(&w).unwrap(), &v).unwrap();
        let rhs = guv.checked_add(&ops::gamma_alpha_beta(&w, &v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

// ---------------------------------------------------------------------------
// Numeric invariants (seeded sweeps rather than proptest: the quantities are
// measure-backed and the fixtures need structural constraints)
// ---------------------------------------------------------------------------

#[test]
fn thoma_measure_mass_is_one() {
    for theta in [0.5, 1.0, 2.0] {
        for p in seeded_points(88, 500) {
            let mass = p.measure(theta).mass();
            assert!(
                (mass - 1.0).abs() <= 1e-12,
                "mass {} at theta {}",
                mass,
                theta
            );
        }
    }
}

#[test]
fn q_transform_of_unit_is_exactly_one() {
    for p in seeded_points(5150, 200) {
        let v = qnum::eval_q_transform(&p, &ExpPoly::constant(1.0), 1.0);
        assert_eq!(v.sign(), 1);
        assert_eq!(v.ln_abs(), 0.0);
    }
}

#[test]
fn q_transform_has_operator_norm_one() {
    // |Q[phi]| <= sup |phi| over the support [-theta beta1, alpha1]
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let points = seeded_points(1212, 60);
    for theta in [0.5, 1.0, 2.0] {
        for p in &points {
            for _ in 0..5 {
                let mut phi = ExpPoly::zero();
                for _ in 0..rng.gen_range(1..=3usize) {
                    phi = phi.add(&ExpPoly::term(
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(0..3u32),
                        rng.gen_range(-3.0..3.0),
                    ));
                }
                let value = qnum::eval_q_transform(p, &phi, theta).to_f64().abs();
                let lo = -theta * p.beta1();
                let hi = p.alpha1();
                let sup = (0..=400)
                    .map(|i| {
                        let t = lo + (hi - lo) * i as f64 / 400.0;
                        phi.eval(t).abs()
                    })
                    .fold(0.0f64, f64::max)
                    // the support also contains the origin atom
                    .max(phi.eval(0.0).abs());
                assert!(
                    value <= sup + 1e-9,
                    "norm violated: |Q[phi]| = {} > sup {}",
                    value,
                    sup
                );
            }
        }
    }
}

#[test]
fn chi_rate_refinement() {
    // for a simple top atom, C (chi_C - alpha1) approaches ln nu({alpha1})
    let spec = SeparatedPointSpec {
        na: 2,
        nb: 1,
        min_mass: 0.12,
        min_gap: 0.06,
        on_omega0: false,
    };
    for p in seeded_separated_points(606, 40, spec) {
        let claimed = p.top_alpha_mass(1.0).ln();
        for c in [1e3, 1e4] {
            let chi = qnum::chi(&p, c, 1.0).unwrap();
            let scaled = c * (chi - p.alpha1());
            assert!(
                (scaled - claimed).abs() <= 1e-3,
                "rate: {} vs {} at C={}",
                scaled,
                claimed,
                c
            );
        }
    }
}

#[test]
fn gamma_cd_is_exactly_symmetric() {
    let params = thoma::point::NumParams::new(1.0, 2.0, 2.0);
    let lvl = thoma::poly::ShiftLevel::new(0, 0);
    for p in seeded_points(77, 30) {
        for (c, d) in [(3.0, 11.0), (-40.0, 7.5), (1e4, 2e4), (-1e3, -9e2)] {
            let a = qnum::gamma_cd(&p, c, d, lvl, &params).unwrap();
            let b = qnum::gamma_cd(&p, d, c, lvl, &params).unwrap();
            assert_eq!(a.to_bits(), b.to_bits(), "asymmetry at ({}, {})", c, d);
        }
    }
}

#[test]
fn a_chi_cauchy_tail() {
    // |a_chi(2C) - a_chi(C)| < 10/C for C >= 1e3 on separated face points
    let params = thoma::point::NumParams::new(1.0, 2.0, 2.0);
    let p = thoma::point::ThomaPoint::new(vec![0.5, 0.3], vec![0.2]).unwrap();
    for c in [1e3, 1e4, 1e5] {
        let v1 = qnum::a_chi(&p, c, &params).unwrap();
        let v2 = qnum::a_chi(&p, 2.0 * c, &params).unwrap();
        assert!(
            (v2 - v1).abs() < 10.0 / c,
            "tail at C={}: {}",
            c,
            (v2 - v1).abs()
        );
    }
}

#[test]
fn a_nat_restriction_compatibility() {
    // family member property: appending a variable and restricting it to zero
    // recovers the smaller member, for the whole test family
    for (_, u) in thoma::verify::a_nat_test_polys() {
        let big = ops::apply_a_nat(&u, 4, 2).unwrap();
        let small = ops::apply_a_nat(&u, 3, 2).unwrap();
        assert_eq!(big.set_var_zero(4).unwrap(), small);
        let big_b = ops::apply_a_nat(&u, 3, 3).unwrap();
        assert_eq!(
            big_b.set_var_zero(-3).unwrap(),
            ops::apply_a_nat(&u, 3, 2).unwrap()
        );
    }
}

#[test]
fn gamma_cd_matches_symbolic_bracket_of_taylor_exponentials() {
    // Dual route at moderate C, D: replace e^{Ct} by its degree-40 Taylor
    // polynomial, evaluate the exact symbolic bracket through the moment
    // coordinates of the point, and compare against the direct log-space
    // evaluation. The Taylor remainder is far below the comparison tolerance.
    use thoma::coeff::ParamValues;
    use thoma::ext::PhiPoly;
    use thoma::point::NumParams;
    use thoma::poly::ShiftLevel;

    let taylor_exp = |c: f64, deg: u32| -> PhiPoly {
        let mut phi = PhiPoly::zero();
        let mut num = 1.0f64;
        let mut den = 1.0f64;
        for k in 0..=deg {
            if k > 0 {
                num *= c;
                den *= k as f64;
            }
            // rational approximation of c^k / k! at 1e-15 relative accuracy
            let v = num / den;
            let scaled = (v * 1e15).round() as i64;
            phi.insert(
                k,
                CoeffElem::from_ratio(scaled, 1)
                    .mul(&CoeffElem::from_ratio(1, 1_000_000_000_000_000)),
            );
        }
        phi
    };

    let p = thoma::point::ThomaPoint::new(vec![0.5, 0.3], vec![0.2]).unwrap();
    let lvl = ShiftLevel::new(0, 0);
    for theta in [0.5, 1.0] {
        let params = NumParams::new(theta, 2.0, 2.0);
        let values = ParamValues::new(theta, 2.0, 2.0);
        for (c, d) in [(1.0, 2.0), (2.5, -1.5)] {
            let bracket = ops::gamma_bracket_double(&taylor_exp(c, 40), &taylor_exp(d, 40), lvl);
            let symbolic = bracket
                .to_moment()
                .unwrap()
                .eval_f64(&values, |k| p.moment(k, theta));
            let one_plus_c = 1.0 + qnum::eval_q_transform(&p, &ExpPoly::exp(c), theta).to_f64();
            let one_plus_d = 1.0 + qnum::eval_q_transform(&p, &ExpPoly::exp(d), theta).to_f64();
            let via_bracket = symbolic / (c * d * one_plus_c * one_plus_d);
            let direct = qnum::gamma_cd(&p, c, d, lvl, &params).unwrap();
            assert!(
                (via_bracket - direct).abs() < 1e-9 * (1.0 + direct.abs()),
                "dual route mismatch at C={}, D={}, theta={}: {} vs {}",
                c,
                d,
                theta,
                via_bracket,
                direct
            );
        }
    }
}

#[test]
fn gamma_c_limits_match_symbolic_bilinear_form() {
    // The numeric limit formulas for Gamma_C(v) must agree with the symbolic
    // bilinear form at the next level: towards +inf the limit is
    // Gamma^(N+1,M)(x_{N+1}, v), towards -inf it is
    // -theta * Gamma^(N,M+1)(x_{-(M+1)}, v), with v rewritten at the higher
    // level and everything evaluated at the point.
    use thoma::coeff::ParamValues;
    use thoma::ext::ExtPoly;
    use thoma::point::NumParams;
    use thoma::poly::ShiftLevel;

    let points = [
        thoma::point::ThomaPoint::new(vec![0.5, 0.3], vec![0.2]).unwrap(),
        thoma::point::ThomaPoint::new(vec![0.35, 0.2, 0.1], vec![0.15, 0.1]).unwrap(),
    ];
    let eval_ext = |e: &ExtPoly, p: &thoma::point::ThomaPoint, theta: f64| -> f64 {
        let lvl = e.level();
        let shifted = p.shift(lvl.n as usize, lvl.m as usize);
        e.eval_f64(
            &ParamValues::new(theta, 0.0, 0.0),
            |i| p.x(i),
            |k| shifted.moment(k, theta),
        )
    };
    for theta in [0.5, 1.0, 2.0] {
        let params = NumParams::new(theta, 2.0, 2.0);
        for p in &points {
            for lvl in [ShiftLevel::new(0, 0), ShiftLevel::new(1, 1)] {
                let mut gens: Vec<qnum::GenRef> =
                    vec![qnum::GenRef::Q(1), qnum::GenRef::Q(2), qnum::GenRef::Q(3)];
                if lvl.n >= 1 {
                    gens.push(qnum::GenRef::X(1));
                }
                if lvl.m >= 1 {
                    gens.push(qnum::GenRef::X(-1));
                }
                for v in gens {
                    let v_ext = match v {
                        qnum::GenRef::Q(k) => ExtPoly::qs(k, lvl),
                        qnum::GenRef::X(i) => ExtPoly::x(i, lvl).unwrap(),
                    };
                    // C -> +inf: Gamma^(N+1,M)(x_{N+1}, v)
                    let up = ShiftLevel::new(lvl.n + 1, lvl.m);
                    let v_up = ops::shift_rewrite(&v_ext, up).unwrap();
                    let x_new = ExtPoly::x((lvl.n + 1) as i32, up).unwrap();
                    let sym = ops::gamma_nm(&x_new, &v_up).unwrap();
                    let sym_val = eval_ext(&sym, p, theta);
                    let claimed = qnum::gamma_c_limit(p, true, v, lvl, &params);
                    assert!(
                        (sym_val - claimed).abs() < 1e-12 * (1.0 + claimed.abs()),
                        "positive limit mismatch for {:?} at {:?}, theta={}: {} vs {}",
                        v,
                        lvl,
                        theta,
                        sym_val,
                        claimed
                    );
                    // C -> -inf: -theta * Gamma^(N,M+1)(x_{-(M+1)}, v)
                    let dn = ShiftLevel::new(lvl.n, lvl.m + 1);
                    let v_dn = ops::shift_rewrite(&v_ext, dn).unwrap();
                    let b_new = ExtPoly::x(-((lvl.m + 1) as i32), dn).unwrap();
                    let sym_neg = ops::gamma_nm(&b_new, &v_dn).unwrap();
                    let sym_neg_val = -theta * eval_ext(&sym_neg, p, theta);
                    let claimed_neg = qnum::gamma_c_limit(p, false, v, lvl, &params);
                    assert!(
                        (sym_neg_val - claimed_neg).abs() < 1e-12 * (1.0 + claimed_neg.abs()),
                        "negative limit mismatch for {:?} at {:?}, theta={}: {} vs {}",
                        v,
                        lvl,
                        theta,
                        sym_neg_val,
                        claimed_neg
                    );
                }
            }
        }
    }
}

#[test]
fn gamma_c_negative_sweep_converges() {
    use thoma::point::NumParams;
    use thoma::poly::ShiftLevel;
    use thoma::sweep::{limit_sweep, LimitTarget, SweepTolerance};

    let p = thoma::point::ThomaPoint::new(vec![0.5, 0.3], vec![0.2]).unwrap();
    let params = NumParams::new(1.0, 2.0, 2.0);
    let target: LimitTarget = "gammaC-v-neg:q1".parse().unwrap();
    let report = limit_sweep(
        &p,
        target,
        &thoma::sweep::default_grid(),
        ShiftLevel::new(0, 0),
        &params,
        SweepTolerance::default(),
    )
    .unwrap();
    assert!(report.rows.iter().all(|r| r.c < 0.0));
    assert!(report.converged, "{:?}", report.rows);
}

#[test]
fn weighted_exponential_asymptotics() {
    // e^{-C alpha1} Q[p(t) e^{Ct}] -> p(alpha1) nu({alpha1}) and the mirrored
    // statement at the bottom atom, for a handful of polynomial weights.
    use thoma::signed_log::SignedLog;
    let spec = SeparatedPointSpec {
        na: 2,
        nb: 2,
        min_mass: 0.12,
        min_gap: 0.06,
        on_omega0: false,
    };
    let polys: [&[f64]; 3] = [&[1.0], &[0.0, 2.0, -1.0], &[0.5, 0.0, 0.0, 3.0]];
    for theta in [0.5, 1.0] {
        for p in seeded_separated_points(314, 25, spec) {
            for coeffs in polys {
                let poly_at = |t: f64| -> f64 {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * t.powi(k as i32))
                        .sum()
                };
                let weighted = |c: f64| -> ExpPoly {
                    let mut phi = ExpPoly::zero();
                    for (k, coeff) in coeffs.iter().enumerate() {
                        phi = phi.add(&ExpPoly::term(*coeff, k as u32, c));
                    }
                    phi
                };
                let c = 2e3;
                let top = qnum::eval_q_transform(&p, &weighted(c), theta)
                    * SignedLog::exp_of(-c * p.alpha1());
                let claimed_top = poly_at(p.alpha1()) * p.top_alpha_mass(theta);
                assert!(
                    (top.to_f64() - claimed_top).abs() < 1e-6 * (1.0 + claimed_top.abs()),
                    "top asymptotics: {} vs {}",
                    top.to_f64(),
                    claimed_top
                );
                let bottom = qnum::eval_q_transform(&p, &weighted(-c), theta)
                    * SignedLog::exp_of(-c * theta * p.beta1());
                let claimed_bottom = poly_at(-theta * p.beta1()) * p.bottom_beta_mass(theta);
                assert!(
                    (bottom.to_f64() - claimed_bottom).abs() < 1e-6 * (1.0 + claimed_bottom.abs()),
                    "bottom asymptotics: {} vs {}",
                    bottom.to_f64(),
                    claimed_bottom
                );
            }
        }
    }
}
