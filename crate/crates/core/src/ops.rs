//! Differential and bilinear operators on the moment, extended and natural
//! algebras, as exact transformations.
//!
//! In moment coordinates the generator is
//!
//! ```text
//! A = sum_{k,l>=1} (k+1)(l+1) (q_{k+l} - q_k q_l) d^2/dq_k dq_l
//!   + sum_{k>=1} (k+1) [((1-theta)k + s1) q_{k-1} - (k + s2/theta) q_k] d/dq_k
//!   + theta sum_{k,l>=0} (k+l+3) q_k q_l d/dq_{k+l+2}
//! ```
//!
//! with `q_0 = 1`, `s1 = z + z'`, `s2 = z z'`. The carre-du-champ is
//! `Gamma(u,v) = sum (k+1)(l+1)(q_{k+l} - q_k q_l) du/dq_k dv/dq_l`. The
//! natural-coordinate operator acts in modified coordinates
//! `xt_i = sgn_theta(i) x_i` and its singular drift is only ever evaluated in
//! the pairwise-symmetrised divided-difference form, which is polynomial on
//! the inputs handled here.

use crate::coeff::{CoeffElem, CoeffError, Param};
use crate::ext::{ExtPoly, PhiPoly};
use crate::moment::MomentPoly;
use crate::nat::NatPoly;
use crate::poly::{GenId, Monomial, PolyError, RawPoly, ShiftLevel, Truncation};

/// Coefficient `(1-theta)k + s1` of the first-order block.
fn drift_low_coeff(k: u32) -> CoeffElem {
    CoeffElem::from_int(k as i64)
        .sub(&CoeffElem::theta_pow(1).scale_int(k as i64))
        .add(&CoeffElem::param_pow(Param::S1, 1))
}

/// Coefficient `k + theta^{-1} s2` of the first-order block.
fn drift_high_coeff(k: u32) -> CoeffElem {
    CoeffElem::from_int(k as i64)
        .add(&CoeffElem::theta_pow(-1).mul(&CoeffElem::param_pow(Param::S2, 1)))
}

/// Image of a moment polynomial under the generator `A`.
pub fn apply_a(u: &MomentPoly) -> MomentPoly {
    let top = u.max_index();
    let mut out = MomentPoly::zero();
    // second-order block
    for k in 1..=top {
        let du_k = u.partial(k);
        if du_k.is_zero() {
            continue;
        }
        for l in 1..=top {
            let d2 = du_k.partial(l);
            if d2.is_zero() {
                continue;
            }
            let coeff = MomentPoly::q(k + l).sub(&MomentPoly::q(k).mul(&MomentPoly::q(l)));
            out = out.add(&coeff.mul(&d2).scale_int(((k + 1) * (l + 1)) as i64));
        }
        // first-order block
        let lin = MomentPoly::q(k - 1)
            .scale(&drift_low_coeff(k))
            .sub(&MomentPoly::q(k).scale(&drift_high_coeff(k)));
        out = out.add(&lin.mul(&du_k).scale_int((k + 1) as i64));
    }
    // the q_k q_l d/dq_{k+l+2} block: only indices k+l+2 present in u contribute
    for idx in 2..=top {
        let du = u.partial(idx);
        if du.is_zero() {
            continue;
        }
        let mut block = MomentPoly::zero();
        for k in 0..=(idx - 2) {
            let l = idx - 2 - k;
            block = block.add(&MomentPoly::q(k).mul(&MomentPoly::q(l)));
        }
        out = out.add(
            &block
                .mul(&du)
                .scale(&CoeffElem::theta_pow(1))
                .scale_int((idx + 1) as i64),
        );
    }
    out
}

/// Carre-du-champ `Gamma(u, v)` on moment polynomials.
pub fn gamma(u: &MomentPoly, v: &MomentPoly) -> MomentPoly {
    let mut out = MomentPoly::zero();
    for k in 1..=u.max_index() {
        let du = u.partial(k);
        if du.is_zero() {
            continue;
        }
        for l in 1..=v.max_index() {
            let dv = v.partial(l);
            if dv.is_zero() {
                continue;
            }
            let coeff = MomentPoly::q(k + l).sub(&MomentPoly::q(k).mul(&MomentPoly::q(l)));
            out = out.add(
                &coeff
                    .mul(&du)
                    .mul(&dv)
                    .scale_int(((k + 1) * (l + 1)) as i64),
            );
        }
    }
    out
}

/// Image under the Petrov generator `A^Pet_{a,tau}` in moment coordinates.
pub fn apply_a_petrov(u: &MomentPoly) -> MomentPoly {
    let top = u.max_index();
    let mut out = MomentPoly::zero();
    for k in 1..=top {
        let du_k = u.partial(k);
        if du_k.is_zero() {
            continue;
        }
        for l in 1..=top {
            let d2 = du_k.partial(l);
            if d2.is_zero() {
                continue;
            }
            let coeff = MomentPoly::q(k + l).sub(&MomentPoly::q(k).mul(&MomentPoly::q(l)));
            out = out.add(&coeff.mul(&d2).scale_int(((k + 1) * (l + 1)) as i64));
        }
        // -(k+1)(k+tau) q_k + (k+1)(k-a) q_{k-1}
        let hi = CoeffElem::from_int(k as i64).add(&CoeffElem::param_pow(Param::PetTau, 1));
        let lo = CoeffElem::from_int(k as i64).sub(&CoeffElem::param_pow(Param::PetA, 1));
        let lin = MomentPoly::q(k - 1)
            .scale(&lo)
            .sub(&MomentPoly::q(k).scale(&hi));
        out = out.add(&lin.mul(&du_k).scale_int((k + 1) as i64));
    }
    out
}

/// Degeneration of `A` onto the Kingman simplex: apply `A`, substitute
/// `s2 -> tau * theta`, `s1 -> -a`, then `theta -> 0`. A residual negative
/// theta exponent is reported as a degeneration failure.
pub fn degenerate_to_petrov(u: &MomentPoly) -> Result<MomentPoly, CoeffError> {
    apply_a(u)
        .map_coeffs(|c| c.subst_s2_tau_theta().subst_s1_neg_a())
        .try_map_coeffs(|c| c.set_theta_zero())
}

/// The carre-du-champ `Gamma^(N,M)(u, v)` on the extended algebra.
pub fn gamma_nm(u: &ExtPoly, v: &ExtPoly) -> Result<ExtPoly, PolyError> {
    if u.level() != v.level() {
        return Err(PolyError::LevelMismatch {
            left: u.level(),
            right: v.level(),
        });
    }
    let lvl = u.level();
    let mut out = ExtPoly::zero(lvl);

    let x_union: std::collections::BTreeSet<i32> =
        u.x_indices().into_iter().chain(v.x_indices()).collect();
    let top = u.max_qs_index().max(v.max_qs_index());

    // (1_{i=j} x_i - x_i x_j) du/dx_i dv/dx_j
    for &i in &x_union {
        let du = u.partial_x(i)?;
        if du.is_zero() {
            continue;
        }
        for &j in &x_union {
            let dv = v.partial_x(j)?;
            if dv.is_zero() {
                continue;
            }
            let xi = ExtPoly::x(i, lvl)?;
            let xj = ExtPoly::x(j, lvl)?;
            let mut coeff = xi.checked_mul(&xj)?.neg();
            if i == j {
                coeff = coeff.checked_add(&xi)?;
            }
            out = out.checked_add(&coeff.checked_mul(&du)?.checked_mul(&dv)?)?;
        }
    }

    // -(k+1) x_i q_k (du/dx_i dv/dq_k + dv/dx_i du/dq_k)
    for &i in &x_union {
        let du_x = u.partial_x(i)?;
        let dv_x = v.partial_x(i)?;
        if du_x.is_zero() && dv_x.is_zero() {
            continue;
        }
        for k in 1..=top {
            let dv_q = v.partial_qs(k);
            let du_q = u.partial_qs(k);
            let mut cross = ExtPoly::zero(lvl);
            if !du_x.is_zero() && !dv_q.is_zero() {
                cross = cross.checked_add(&du_x.checked_mul(&dv_q)?)?;
            }
            if !dv_x.is_zero() && !du_q.is_zero() {
                cross = cross.checked_add(&dv_x.checked_mul(&du_q)?)?;
            }
            if cross.is_zero() {
                continue;
            }
            let coeff = ExtPoly::x(i, lvl)?
                .checked_mul(&ExtPoly::qs(k, lvl))?
                .scale_int(-((k + 1) as i64));
            out = out.checked_add(&coeff.checked_mul(&cross)?)?;
        }
    }

    // (k+1)(l+1)(q_{k+l} - q_k q_l) du/dq_k dv/dq_l
    for k in 1..=top {
        let du = u.partial_qs(k);
        if du.is_zero() {
            continue;
        }
        for l in 1..=top {
            let dv = v.partial_qs(l);
            if dv.is_zero() {
                continue;
            }
            let coeff = ExtPoly::qs(k + l, lvl)
                .sub(&ExtPoly::qs(k, lvl).checked_mul(&ExtPoly::qs(l, lvl))?);
            out = out.checked_add(
                &coeff
                    .checked_mul(&du)?
                    .checked_mul(&dv)?
                    .scale_int(((k + 1) * (l + 1)) as i64),
            )?;
        }
    }
    Ok(out)
}

/// Linear extension of `t^k -> q_k^(N,M)`, `1 -> 1`.
pub fn q_nm_of_phi(phi: &PhiPoly, level: ShiftLevel) -> ExtPoly {
    let mut out = ExtPoly::zero(level);
    for (k, c) in phi.coeffs() {
        out = out
            .checked_add(&ExtPoly::qs(*k, level).scale(c))
            .expect("same level");
    }
    out
}

/// `Gamma^(N,M)[phi; psi] = Q[(t phi)'(t psi)'] - Q[(t phi)'] Q[(t psi)']`.
pub fn gamma_bracket_double(phi: &PhiPoly, psi: &PhiPoly, level: ShiftLevel) -> ExtPoly {
    let dp = phi.t_times().derivative();
    let dq = psi.t_times().derivative();
    let joint = q_nm_of_phi(&dp.mul(&dq), level);
    let sep = q_nm_of_phi(&dp, level)
        .checked_mul(&q_nm_of_phi(&dq, level))
        .expect("same level");
    joint.sub(&sep)
}

/// The first-order bracket `Gamma^(N,M)[phi](u)`:
/// `-sum_i x_i Q[(t phi)' - phi(0)] du/dx_i
///  + sum_k (k+1) (Q[(t phi)' t^k] - Q[(t phi)'] q_k) du/dq_k`.
pub fn gamma_bracket_single(phi: &PhiPoly, u: &ExtPoly) -> Result<ExtPoly, PolyError> {
    let lvl = u.level();
    let dp = phi.t_times().derivative();
    let mut dp_minus_const = dp.clone();
    dp_minus_const.insert(0, phi.at_zero().neg());
    let q_dp_adj = q_nm_of_phi(&dp_minus_const, lvl);
    let q_dp = q_nm_of_phi(&dp, lvl);

    let mut out = ExtPoly::zero(lvl);
    for i in u.x_indices() {
        let du = u.partial_x(i)?;
        if du.is_zero() {
            continue;
        }
        out = out.checked_add(
            &ExtPoly::x(i, lvl)?
                .checked_mul(&q_dp_adj)?
                .checked_mul(&du)?
                .neg(),
        )?;
    }
    for k in 1..=u.max_qs_index() {
        let du = u.partial_qs(k);
        if du.is_zero() {
            continue;
        }
        let coeff = q_nm_of_phi(&dp.mul(&PhiPoly::t_pow(k)), lvl)
            .sub(&q_dp.checked_mul(&ExtPoly::qs(k, lvl))?);
        out = out.checked_add(&coeff.checked_mul(&du)?.scale_int((k + 1) as i64))?;
    }
    Ok(out)
}

/// The bi-differential form on natural coordinates:
/// `sum_i x_i du/dx_i dv/dx_i - (sum_i x_i du/dx_i)(sum_j x_j dv/dx_j)`
/// where negative indices carry the beta-coordinates.
pub fn gamma_alpha_beta(u: &NatPoly, v: &NatPoly) -> Result<NatPoly, PolyError> {
    if u.truncation() != v.truncation() {
        return Err(PolyError::TruncationMismatch {
            left: u.truncation(),
            right: v.truncation(),
        });
    }
    let trunc = u.truncation();
    let mut diag = NatPoly::zero(trunc);
    let mut grad_u = NatPoly::zero(trunc);
    let mut grad_v = NatPoly::zero(trunc);
    for i in trunc.indices() {
        let xi = NatPoly::x(i, trunc)?;
        let du = u.partial(i)?;
        let dv = v.partial(i)?;
        if !du.is_zero() && !dv.is_zero() {
            diag = diag.checked_add(&xi.checked_mul(&du)?.checked_mul(&dv)?)?;
        }
        if !du.is_zero() {
            grad_u = grad_u.checked_add(&xi.checked_mul(&du)?)?;
        }
        if !dv.is_zero() {
            grad_v = grad_v.checked_add(&xi.checked_mul(&dv)?)?;
        }
    }
    diag.checked_sub(&grad_u.checked_mul(&grad_v)?)
}

/// Rewrite along the natural embedding into an adjacent level:
/// `q_k^(N,M) = q_k^(N+1,M) + x_{N+1}^{k+1}` or
/// `q_k^(N,M) = q_k^(N,M+1) + (-theta)^k x_{-(M+1)}^{k+1}`.
pub fn shift_rewrite(p: &ExtPoly, to: ShiftLevel) -> Result<ExtPoly, PolyError> {
    let from = p.level();
    let alpha_step = to.n == from.n + 1 && to.m == from.m;
    let beta_step = to.n == from.n && to.m == from.m + 1;
    if !alpha_step && !beta_step {
        return Err(PolyError::NonAdjacentLevels { from, to });
    }
    let new_index: i32 = if alpha_step {
        to.n as i32
    } else {
        -(to.m as i32)
    };
    let mut out = RawPoly::zero();
    for (mono, c) in p.raw().terms() {
        let mut acc = RawPoly::constant(c.clone());
        for (g, e) in mono.factors() {
            let factor = match g {
                GenId::X(i) => RawPoly::var(GenId::X(*i)),
                GenId::Qs(k) => {
                    let mut split = RawPoly::var(GenId::Qs(*k));
                    let coeff = if alpha_step {
                        CoeffElem::one()
                    } else {
                        let mut c = CoeffElem::theta_pow(*k as i64);
                        if *k % 2 == 1 {
                            c = c.neg();
                        }
                        c
                    };
                    split.insert(Monomial::var_pow(GenId::X(new_index), *k + 1), coeff);
                    split
                }
                GenId::Q(_) => unreachable!(),
            };
            acc = acc.mul(&factor.pow(*e));
        }
        out = out.add(&acc);
    }
    Ok(ExtPoly::from_raw(out, to))
}

/// `sgn_theta(i)^{-1}` as a coefficient: 1 for positive indices, `-theta^{-1}`
/// for negative ones.
fn sgn_theta_inv(i: i32) -> CoeffElem {
    if i > 0 {
        CoeffElem::one()
    } else {
        CoeffElem::theta_pow(-1).neg()
    }
}

/// The modified coordinate `xt_i = sgn_theta(i) x_i` as a polynomial.
fn x_tilde(i: i32, trunc: Truncation) -> NatPoly {
    let x = NatPoly::x(i, trunc).expect("index inside truncation");
    if i > 0 {
        x
    } else {
        x.scale(&CoeffElem::theta_pow(1).neg())
    }
}

/// Apply the natural-coordinate operator to `substitute_moments(u, n, m)`.
///
/// The second-order block and the regular first-order block act directly on
/// the substituted polynomial. The singular drift acts through the chain rule
/// on the `q_k`-derivatives of `u`, where for each `k` the double sum
/// collapses to the pairwise-symmetrised polynomial
/// `2 theta sum_{i<j} x_i x_j (xt_i^{k-1} - xt_j^{k-1}) / (xt_i - xt_j)`.
pub fn apply_a_nat(u: &MomentPoly, n: u32, m: u32) -> Result<NatPoly, PolyError> {
    if n == 0 && m == 0 {
        return Err(PolyError::EmptyTruncation);
    }
    let trunc = Truncation::new(n, m);
    let f = u.substitute_moments(n, m);
    let indices = trunc.indices();
    let mut out = NatPoly::zero(trunc);

    // sum_i x_i d^2 f / dx_i^2 - sum_{i,j} x_i x_j d^2 f / dx_i dx_j
    for &i in &indices {
        let di = f.partial(i)?;
        if di.is_zero() {
            continue;
        }
        let d2 = di.partial(i)?;
        if !d2.is_zero() {
            out = out.checked_add(&NatPoly::x(i, trunc)?.checked_mul(&d2)?)?;
        }
        for &j in &indices {
            let dij = di.partial(j)?;
            if dij.is_zero() {
                continue;
            }
            let xx = NatPoly::x(i, trunc)?.checked_mul(&NatPoly::x(j, trunc)?)?;
            out = out.checked_sub(&xx.checked_mul(&dij)?)?;
        }
    }

    // sum_i (s1 - theta sgn^{-1} - theta^{-1} s2 xt_i) sgn^{-1} df/dx_i
    for &i in &indices {
        let di = f.partial(i)?;
        if di.is_zero() {
            continue;
        }
        let sgn_inv = sgn_theta_inv(i);
        let mut coeff = NatPoly::constant(
            CoeffElem::param_pow(Param::S1, 1).sub(&CoeffElem::theta_pow(1).mul(&sgn_inv)),
            trunc,
        );
        let s2_term = x_tilde(i, trunc)
            .scale(&CoeffElem::theta_pow(-1).mul(&CoeffElem::param_pow(Param::S2, 1)));
        coeff = coeff.checked_sub(&s2_term)?;
        out = out.checked_add(&coeff.scale(&sgn_inv).checked_mul(&di)?)?;
    }

    // singular drift, via the q_k-derivatives of u
    for k in 1..=u.max_index() {
        let du = u.partial(k);
        if du.is_zero() {
            continue;
        }
        let du_sub = du.substitute_moments(n, m);
        let mut pair_sum = NatPoly::zero(trunc);
        if k >= 2 {
            for (a, &i) in indices.iter().enumerate() {
                for &j in indices.iter().skip(a + 1) {
                    // (xt_i^{k-1} - xt_j^{k-1})/(xt_i - xt_j) = sum_{l=0}^{k-2} xt_i^l xt_j^{k-2-l}
                    let ti = x_tilde(i, trunc);
                    let tj = x_tilde(j, trunc);
                    let mut dd = NatPoly::zero(trunc);
                    for l in 0..=(k - 2) {
                        dd = dd.checked_add(&ti.pow(l).checked_mul(&tj.pow(k - 2 - l))?)?;
                    }
                    let xx = NatPoly::x(i, trunc)?.checked_mul(&NatPoly::x(j, trunc)?)?;
                    pair_sum = pair_sum.checked_add(&xx.checked_mul(&dd)?)?;
                }
            }
        }
        if !pair_sum.is_zero() {
            out = out.checked_add(
                &pair_sum
                    .scale(&CoeffElem::theta_pow(1))
                    .scale_int(2 * (k as i64 + 1))
                    .checked_mul(&du_sub)?,
            )?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: u32) -> MomentPoly {
        MomentPoly::q(k)
    }

    fn theta() -> CoeffElem {
        CoeffElem::theta_pow(1)
    }

    fn s1() -> CoeffElem {
        CoeffElem::param_pow(Param::S1, 1)
    }

    fn s2_over_theta() -> CoeffElem {
        CoeffElem::theta_pow(-1).mul(&CoeffElem::param_pow(Param::S2, 1))
    }

    #[test]
    fn a_annihilates_constants() {
        assert!(apply_a(&MomentPoly::one()).is_zero());
    }

    #[test]
    fn a_of_q1() {
        // A q1 = 2(1 - theta + s1) - 2(1 + s2/theta) q1
        let expect = MomentPoly::constant(CoeffElem::one().sub(&theta()).add(&s1()).scale_int(2))
            .sub(&q(1).scale(&CoeffElem::one().add(&s2_over_theta()).scale_int(2)));
        assert_eq!(apply_a(&q(1)), expect);
    }

    #[test]
    fn a_of_q2() {
        // A q2 = 3(2(1 - theta) + s1) q1 - 3(2 + s2/theta) q2 + 3 theta
        let expect = q(1)
            .scale(
                &CoeffElem::from_int(2)
                    .sub(&theta().scale_int(2))
                    .add(&s1())
                    .scale_int(3),
            )
            .sub(&q(2).scale(&CoeffElem::from_int(2).add(&s2_over_theta()).scale_int(3)))
            .add(&MomentPoly::constant(theta().scale_int(3)));
        assert_eq!(apply_a(&q(2)), expect);
    }

    #[test]
    fn gamma_diagonal() {
        // Gamma(q1, q1) = 4 (q2 - q1^2)
        let expect = q(2).sub(&q(1).pow(2)).scale_int(4);
        assert_eq!(gamma(&q(1), &q(1)), expect);
    }

    #[test]
    fn gamma_mixed() {
        // Gamma(q1, q2) = 6 (q3 - q1 q2)
        let expect = q(3).sub(&q(1).mul(&q(2))).scale_int(6);
        assert_eq!(gamma(&q(1), &q(2)), expect);
        assert_eq!(gamma(&q(2), &q(1)), expect);
    }

    #[test]
    fn gamma_with_constant_vanishes() {
        assert!(gamma(&q(3).mul(&q(2)), &MomentPoly::one()).is_zero());
    }

    #[test]
    fn petrov_images() {
        // A^Pet q1 = -2(1+tau) q1 + 2(1-a)
        let tau = CoeffElem::param_pow(Param::PetTau, 1);
        let a = CoeffElem::param_pow(Param::PetA, 1);
        let expect1 = q(1)
            .scale(&CoeffElem::one().add(&tau).scale_int(-2))
            .add(&MomentPoly::constant(CoeffElem::one().sub(&a).scale_int(2)));
        assert_eq!(apply_a_petrov(&q(1)), expect1);
        // A^Pet q2 = -3(2+tau) q2 + 3(2-a) q1
        let expect2 = q(2)
            .scale(&CoeffElem::from_int(2).add(&tau).scale_int(-3))
            .add(&q(1).scale(&CoeffElem::from_int(2).sub(&a).scale_int(3)));
        assert_eq!(apply_a_petrov(&q(2)), expect2);
        assert!(apply_a_petrov(&MomentPoly::one()).is_zero());
    }

    #[test]
    fn petrov_degeneration_low_orders() {
        for k in 0..=4 {
            assert_eq!(
                degenerate_to_petrov(&q(k)).unwrap(),
                apply_a_petrov(&q(k)),
                "degeneration mismatch at q_{}",
                k
            );
        }
    }

    #[test]
    fn product_rule_identity_spot() {
        // A(q1^2) - 2 q1 A(q1) = 2 Gamma(q1, q1) = 8 (q2 - q1^2)
        let u = q(1);
        let lhs = apply_a(&u.pow(2)).sub(&apply_a(&u).mul(&u).scale_int(2));
        assert_eq!(lhs, gamma(&u, &u).scale_int(2));
        assert_eq!(lhs, q(2).sub(&q(1).pow(2)).scale_int(8));
    }

    #[test]
    fn gamma_nm_first_block() {
        // Gamma^(1,0)(x1, x1) = x1 - x1^2
        let lvl = ShiftLevel::new(1, 0);
        let x1 = ExtPoly::x(1, lvl).unwrap();
        let g = gamma_nm(&x1, &x1).unwrap();
        assert_eq!(g, x1.sub(&x1.pow(2)));
    }

    #[test]
    fn gamma_nm_cross_block() {
        // Gamma^(1,0)(x1, q_k) = -(k+1) x1 q_k
        let lvl = ShiftLevel::new(1, 0);
        let x1 = ExtPoly::x(1, lvl).unwrap();
        for k in 1..=4 {
            let g = gamma_nm(&x1, &ExtPoly::qs(k, lvl)).unwrap();
            let expect = x1
                .checked_mul(&ExtPoly::qs(k, lvl))
                .unwrap()
                .scale_int(-((k + 1) as i64));
            assert_eq!(g, expect);
        }
    }

    #[test]
    fn gamma_nm_moment_block() {
        // Gamma^(N,M)(q_k, q_l) = (k+1)(l+1)(q_{k+l} - q_k q_l)
        let lvl = ShiftLevel::new(2, 1);
        for k in 1..=3 {
            for l in 1..=3 {
                let g = gamma_nm(&ExtPoly::qs(k, lvl), &ExtPoly::qs(l, lvl)).unwrap();
                let expect = ExtPoly::qs(k + l, lvl)
                    .sub(
                        &ExtPoly::qs(k, lvl)
                            .checked_mul(&ExtPoly::qs(l, lvl))
                            .unwrap(),
                    )
                    .scale_int(((k + 1) * (l + 1)) as i64);
                assert_eq!(g, expect);
            }
        }
    }

    #[test]
    fn gamma_nm_at_origin_matches_gamma() {
        let lvl = ShiftLevel::new(0, 0);
        let u = q(1).mul(&q(2)).add(&q(3));
        let v = q(2).pow(2);
        let g_ext = gamma_nm(&ExtPoly::from_moment(&u), &ExtPoly::from_moment(&v)).unwrap();
        assert_eq!(g_ext.level(), lvl);
        assert_eq!(g_ext.to_moment().unwrap(), gamma(&u, &v));
    }

    #[test]
    fn q_of_phi_examples() {
        let lvl = ShiftLevel::new(2, 1);
        assert_eq!(q_nm_of_phi(&PhiPoly::t_pow(3), lvl), ExtPoly::qs(3, lvl));
        assert_eq!(q_nm_of_phi(&PhiPoly::one(), lvl), ExtPoly::one(lvl));
        let mut phi = PhiPoly::t_pow(1).scale_int(2);
        phi = phi.add(&PhiPoly::t_pow(2).scale_int(3));
        let expect = ExtPoly::qs(1, lvl)
            .scale_int(2)
            .checked_add(&ExtPoly::qs(2, lvl).scale_int(3))
            .unwrap();
        assert_eq!(q_nm_of_phi(&phi, lvl), expect);
    }

    #[test]
    fn bracket_double_examples() {
        let lvl = ShiftLevel::new(1, 1);
        // (t^k, t^l) -> (k+1)(l+1)(q_{k+l} - q_k q_l)
        for k in 1..=3u32 {
            for l in 1..=3u32 {
                let b = gamma_bracket_double(&PhiPoly::t_pow(k), &PhiPoly::t_pow(l), lvl);
                let expect = ExtPoly::qs(k + l, lvl)
                    .sub(
                        &ExtPoly::qs(k, lvl)
                            .checked_mul(&ExtPoly::qs(l, lvl))
                            .unwrap(),
                    )
                    .scale_int(((k + 1) * (l + 1)) as i64);
                assert_eq!(b, expect);
            }
        }
        // (1, t^l) -> 0
        for l in 0..=3u32 {
            assert!(gamma_bracket_double(&PhiPoly::one(), &PhiPoly::t_pow(l), lvl).is_zero());
        }
        // (t, t) -> 4 (q2 - q1^2)
        let b = gamma_bracket_double(&PhiPoly::t_pow(1), &PhiPoly::t_pow(1), lvl);
        let expect = ExtPoly::qs(2, lvl)
            .sub(&ExtPoly::qs(1, lvl).pow(2))
            .scale_int(4);
        assert_eq!(b, expect);
    }

    #[test]
    fn bracket_single_examples() {
        let lvl = ShiftLevel::new(1, 1);
        let x1 = ExtPoly::x(1, lvl).unwrap();
        // (t^l, x_i) -> -(l+1) x_i q_l
        for l in 1..=4u32 {
            let b = gamma_bracket_single(&PhiPoly::t_pow(l), &x1).unwrap();
            let expect = x1
                .checked_mul(&ExtPoly::qs(l, lvl))
                .unwrap()
                .scale_int(-((l + 1) as i64));
            assert_eq!(b, expect);
        }
        // (1, x_i) -> 0
        assert!(gamma_bracket_single(&PhiPoly::one(), &x1)
            .unwrap()
            .is_zero());
        // (t^l, q_k) -> bracket_double(t^l, t^k)
        for l in 0..=3u32 {
            for k in 1..=3u32 {
                let b = gamma_bracket_single(&PhiPoly::t_pow(l), &ExtPoly::qs(k, lvl)).unwrap();
                let expect = gamma_bracket_double(&PhiPoly::t_pow(l), &PhiPoly::t_pow(k), lvl);
                assert_eq!(b, expect);
            }
        }
    }

    #[test]
    fn bracket_matches_gamma_nm() {
        // Lemma-level agreement on a mixed element
        let lvl = ShiftLevel::new(1, 1);
        let u = ExtPoly::x(1, lvl)
            .unwrap()
            .checked_mul(&ExtPoly::qs(2, lvl))
            .unwrap()
            .checked_add(&ExtPoly::x(-1, lvl).unwrap().pow(2))
            .unwrap();
        for l in 0..=3u32 {
            let phi = PhiPoly::t_pow(l);
            let lhs = gamma_nm(&q_nm_of_phi(&phi, lvl), &u).unwrap();
            let rhs = gamma_bracket_single(&phi, &u).unwrap();
            assert_eq!(lhs, rhs, "l = {}", l);
        }
    }

    #[test]
    fn gamma_alpha_beta_examples() {
        let t = Truncation::new(1, 1);
        let x1 = NatPoly::x(1, t).unwrap();
        let xm1 = NatPoly::x(-1, t).unwrap();
        // (x1, x1) -> x1 - x1^2
        assert_eq!(gamma_alpha_beta(&x1, &x1).unwrap(), x1.sub(&x1.pow(2)));
        // (x1, x_{-1}) -> -x1 x_{-1}
        assert_eq!(
            gamma_alpha_beta(&x1, &xm1).unwrap(),
            x1.checked_mul(&xm1).unwrap().neg()
        );
    }

    #[test]
    fn gamma_alpha_beta_matches_moment_gamma() {
        // symbolic oracle: Gamma_ab(subst q_k, subst q_l) = subst Gamma(q_k, q_l)
        for (n, m) in [(1, 1), (2, 1), (2, 2)] {
            for k in 1..=3u32 {
                for l in 1..=3u32 {
                    let su = q(k).substitute_moments(n, m);
                    let sv = q(l).substitute_moments(n, m);
                    let lhs = gamma_alpha_beta(&su, &sv).unwrap();
                    let rhs = gamma(&q(k), &q(l)).substitute_moments(n, m);
                    assert_eq!(lhs, rhs, "k={} l={} n={} m={}", k, l, n, m);
                }
            }
        }
    }

    #[test]
    fn shift_rewrite_examples() {
        // q_1^(0,0) -> q_1^(1,0) + x_1^2
        let from = ShiftLevel::new(0, 0);
        let p = ExtPoly::qs(1, from);
        let to = ShiftLevel::new(1, 0);
        let r = shift_rewrite(&p, to).unwrap();
        let expect = ExtPoly::qs(1, to)
            .checked_add(&ExtPoly::x(1, to).unwrap().pow(2))
            .unwrap();
        assert_eq!(r, expect);
        // q_2^(0,0) -> q_2^(0,1) + theta^2 x_{-1}^3
        let to_b = ShiftLevel::new(0, 1);
        let r2 = shift_rewrite(&ExtPoly::qs(2, from), to_b).unwrap();
        let expect2 = ExtPoly::qs(2, to_b)
            .checked_add(
                &ExtPoly::x(-1, to_b)
                    .unwrap()
                    .pow(3)
                    .scale(&CoeffElem::theta_pow(2)),
            )
            .unwrap();
        assert_eq!(r2, expect2);
        // constants pass through
        let one = shift_rewrite(&ExtPoly::one(from), to).unwrap();
        assert_eq!(one, ExtPoly::one(to));
        // non-adjacent levels rejected
        assert!(matches!(
            shift_rewrite(&p, ShiftLevel::new(2, 0)),
            Err(PolyError::NonAdjacentLevels { .. })
        ));
    }

    #[test]
    fn shift_consistency_spot() {
        // Gamma^(N,M)(u,v) = Gamma^(N+1,M)(u,v) after rewriting to the common level
        let lvl = ShiftLevel::new(1, 1);
        let up = ShiftLevel::new(2, 1);
        for (u, v) in [
            (ExtPoly::qs(2, lvl), ExtPoly::qs(3, lvl)),
            (ExtPoly::x(1, lvl).unwrap(), ExtPoly::qs(2, lvl)),
            (ExtPoly::x(-1, lvl).unwrap(), ExtPoly::x(1, lvl).unwrap()),
        ] {
            let low = shift_rewrite(&gamma_nm(&u, &v).unwrap(), up).unwrap();
            let high = gamma_nm(
                &shift_rewrite(&u, up).unwrap(),
                &shift_rewrite(&v, up).unwrap(),
            )
            .unwrap();
            assert_eq!(low, high);
        }
    }

    #[test]
    fn a_nat_annihilates_constants() {
        assert!(apply_a_nat(&MomentPoly::one(), 2, 1).unwrap().is_zero());
    }

    #[test]
    fn a_nat_agrees_with_a_modulo_simplex() {
        // reduce(Anat(u) - subst(A u)) = 0 for the first moment coordinates
        for (u, n, m) in [
            (q(1), 2, 1),
            (q(2), 2, 1),
            (q(3), 3, 2),
            (q(1).mul(&q(2)), 2, 2),
        ] {
            let lhs = apply_a_nat(&u, n, m).unwrap();
            let rhs = apply_a(&u).substitute_moments(n, m);
            let diff = lhs.checked_sub(&rhs).unwrap();
            assert!(
                diff.reduce_mod_simplex().unwrap().is_zero(),
                "A-nat disagrees for u={} at ({},{})",
                u,
                n,
                m
            );
        }
    }

    #[test]
    fn a_nat_empty_truncation_rejected() {
        assert!(matches!(
            apply_a_nat(&q(1), 0, 0),
            Err(PolyError::EmptyTruncation)
        ));
    }

    #[test]
    fn a_nat_family_compatibility() {
        // setting the appended variable to zero restricts to the smaller member
        let u = q(2);
        let big = apply_a_nat(&u, 3, 1).unwrap();
        let small = apply_a_nat(&u, 2, 1).unwrap();
        assert_eq!(big.set_var_zero(3).unwrap(), small);
        let big_b = apply_a_nat(&u, 2, 2).unwrap();
        let small_b = apply_a_nat(&u, 2, 1).unwrap();
        assert_eq!(big_b.set_var_zero(-2).unwrap(), small_b);
    }
}
