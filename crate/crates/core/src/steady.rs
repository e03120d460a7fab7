//! Stationary states: numeric kernel extraction, time-evolution fallback
//! and the closed forms available for ideal and infinite-interaction
//! feedback.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::generators::{ErrorProbability, Generator, Liouvillian};
use crate::model::{Bath, ModelError, RateSet, XState, XVector, POSITIVITY_TOL};
use crate::ode::{DormandPrince, StepControl};

/// Relative gap below which the two smallest singular values count as a
/// degenerate kernel.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Kernel residual bound relative to the largest generator entry.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyError {
    #[error("kernel is not one-dimensional: two smallest singular values {smallest:e} and {second:e} (largest {largest:e})")]
    DegenerateKernel { smallest: f64, second: f64, largest: f64 },
    #[error("singular value decomposition did not converge")]
    NoConvergence,
    #[error("kernel vector has vanishing trace")]
    TracelessKernel,
    #[error("kernel residual {0:e} exceeds tolerance")]
    Residual(f64),
    #[error("stationary vector is not a valid state: {0}")]
    NonPhysical(#[from] ModelError),
    #[error("time evolution did not reach tolerance by t = {t_max}")]
    NotConverged { t_max: f64, last: XState },
    #[error("closed form undefined: {0}")]
    Undefined(&'static str),
}

/// Stationary state of `gen`, the trace-normalized kernel vector.
///
/// The kernel is taken as the right singular vector of the smallest
/// singular value of the entry-scaled matrix.
pub fn steady_state(gen: &Generator) -> Result<XState, SteadyError> {
    let scale = gen.scale();
    if scale == 0.0 {
        return Err(SteadyError::DegenerateKernel { smallest: 0.0, second: 0.0, largest: 0.0 });
    }
    let m = DMatrix::from_iterator(6, 6, gen.matrix.iter().map(|z| z / scale));
    let svd = m.clone().try_svd(false, true, f64::EPSILON, 10_000).ok_or(SteadyError::NoConvergence)?;
    let v_t = svd.v_t.as_ref().ok_or(SteadyError::NoConvergence)?;
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smallest = svd.singular_values[order[0]];
    let second = svd.singular_values[order[1]];
    let largest = svd.singular_values[order[5]];
    if second - smallest <= DEGENERACY_TOL * largest {
        return Err(SteadyError::DegenerateKernel { smallest, second, largest });
    }
    let mut v = XVector::from_iterator(v_t.row(order[0]).iter().map(|z| z.conj()));
    for i in structural_zeros(&gen.matrix) {
        v[i] = Complex64::new(0.0, 0.0);
    }
    let trace: Complex64 = (0..4).map(|i| v[i]).sum();
    if trace.norm() < 1e-12 {
        return Err(SteadyError::TracelessKernel);
    }
    v /= trace;
    let residual = (gen.matrix * v).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if residual > RESIDUAL_TOL * scale {
        return Err(SteadyError::Residual(residual / scale));
    }
    Ok(XState::devectorize(&v, POSITIVITY_TOL)?)
}

/// Components that vanish in any stationary state: those with a nonzero
/// decay rate fed only by components already known to vanish. Pinning them
/// removes solver noise that `sqrt(p00 p11)` would otherwise amplify.
fn structural_zeros(m: &Liouvillian) -> Vec<usize> {
    let zero = Complex64::new(0.0, 0.0);
    let mut found = [false; 6];
    loop {
        let next: Vec<usize> = (0..6)
            .filter(|&i| !found[i] && m[(i, i)] != zero)
            .filter(|&i| (0..6).all(|j| j == i || found[j] || m[(i, j)] == zero))
            .collect();
        if next.is_empty() {
            break;
        }
        for i in next {
            found[i] = true;
        }
    }
    (0..6).filter(|&i| found[i]).collect()
}

/// Integrate `d rho/dt = gen rho` from `init` until `|gen rho| <= tol`
/// (max-norm) or `t_max` is reached.
pub fn evolve_to_steady(gen: &Generator, init: &XState, t_max: f64, tol: f64) -> Result<XState, SteadyError> {
    let mut y: Vec<Complex64> = init.vectorize().iter().copied().collect();
    let m = gen.matrix;
    let mut f = |y: &[Complex64], out: &mut [Complex64]| {
        let v = m * XVector::from_column_slice(y);
        out.copy_from_slice(v.as_slice());
    };
    let deriv_norm = |y: &[Complex64]| (m * XVector::from_column_slice(y)).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let scale = gen.scale();
    // keep h |lambda| <= 1 via the row-sum bound so the step never rides
    // the stability boundary, where the residual stalls at the tolerance
    let row_bound = (0..6).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0f64, f64::max);
    let h_max = if row_bound > 0.0 { 1.0 / row_bound } else { f64::INFINITY };
    let mut dp = DormandPrince::new(6, StepControl { rtol: 1e-10, atol: 1e-13, h_max });
    let mut t = 0.0;
    let mut h = if scale > 0.0 { 0.1 / scale } else { t_max };
    while deriv_norm(&y) > tol {
        if t >= t_max {
            let last = XState::devectorize(&XVector::from_column_slice(&y), 1e-6)?;
            return Err(SteadyError::NotConverged { t_max, last });
        }
        let h_try = h.min(t_max - t);
        let (accepted, h_next) = dp.step(&mut f, &mut y, h_try);
        if accepted {
            t += h_try;
        }
        h = h_next;
    }
    Ok(XState::devectorize(&XVector::from_column_slice(&y), POSITIVITY_TOL)?)
}

/// Closed-form stationary state of the ideal feedback generator.
pub fn stationary_ideal(rates: &RateSet, g: f64) -> Result<XState, SteadyError> {
    let cm0 = rates.minus(Bath::Cold, 0);
    let hp0 = rates.plus(Bath::Hot, 0);
    let g2 = 4.0 * g * g;
    let norm = cm0 * cm0 * hp0 + g2 * (cm0 + 2.0 * hp0);
    if !(norm > 0.0) {
        return Err(SteadyError::Undefined("ideal normalization vanishes"));
    }
    Ok(XState {
        p00: g2 * cm0 / norm,
        p01: (g2 + cm0 * cm0) * hp0 / norm,
        p10: g2 * hp0 / norm,
        p11: 0.0,
        alpha: Complex64::new(0.0, 2.0 * g * cm0 * hp0 / norm),
    })
}

/// Closed-form stationary state of the infinite-interaction feedback
/// generator with error probability `eta`.
pub fn stationary_u_infinite(rates: &RateSet, g: f64, eta: ErrorProbability) -> Result<XState, SteadyError> {
    let eta = eta.value();
    let cp = rates.plus(Bath::Cold, 0);
    let cm = rates.minus(Bath::Cold, 0);
    let hp = rates.plus(Bath::Hot, 0);
    let hm = rates.minus(Bath::Hot, 0);
    let g2 = 4.0 * g * g;
    let p00 = (cm + eta * hm) * (eta * cm * hm + g2);
    let p01 = g2 * cp + (1.0 - eta) * hp * (cm * cm + eta * cm * hm + g2);
    let p10 = g2 * (1.0 - eta) * hp + cp * (eta * hm * (cm + eta * hm) + g2);
    let alpha = 2.0 * g * ((1.0 - eta) * cm * hp - eta * cp * hm);
    let norm = 2.0 * g2 * (cp + (1.0 - eta) * hp)
        + cm * (eta * hm * (cp + eta * hm + (1.0 - eta) * hp) + g2)
        + eta * eta * cp * hm * hm
        + cm * cm * (eta * hm + (1.0 - eta) * hp)
        + eta * g2 * hm;
    if !(norm > 0.0) {
        return Err(SteadyError::Undefined("u_inf normalization vanishes"));
    }
    Ok(XState {
        p00: p00 / norm,
        p01: p01 / norm,
        p10: p10 / norm,
        p11: 0.0,
        alpha: Complex64::new(0.0, alpha / norm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{build_feedback_ideal, build_feedback_u_infinite, build_free, feedback_error};
    use crate::metrics::concurrence_x;
    use crate::model::{BathStatistics, Extended, FeedbackMode, SystemParams};
    use nalgebra::{Matrix6, Vector6};
    use proptest::prelude::*;

    /// Independent route: replace the first balance equation with the trace
    /// condition and solve the square system.
    fn bordered_solve(gen: &Generator) -> XState {
        let mut a: Matrix6<Complex64> = gen.matrix;
        let mut b = Vector6::<Complex64>::zeros();
        for j in 0..6 {
            a[(0, j)] = if j < 4 { 1.0.into() } else { 0.0.into() };
        }
        b[0] = 1.0.into();
        let v = a.lu().solve(&b).unwrap();
        XState::devectorize(&v, 1e-8).unwrap()
    }

    fn max_dev(a: &XState, b: &XState) -> f64 {
        let pa = a.populations();
        let pb = b.populations();
        (0..4).map(|i| (pa[i] - pb[i]).abs()).fold((a.alpha - b.alpha).norm(), f64::max)
    }

    #[test]
    fn unreachable_doubly_excited_state_is_exactly_empty() {
        let p = SystemParams::builder()
            .g(1e-3)
            .gamma_c(1.0)
            .gamma_h(1e-3)
            .t_h(5.0)
            .statistics(BathStatistics::Bosonic)
            .feedback(FeedbackMode::Ideal)
            .build()
            .unwrap();
        let gen = build_feedback_ideal(&p).unwrap();
        assert_eq!(structural_zeros(&gen.matrix), vec![3]);
        let s = steady_state(&gen).unwrap();
        assert_eq!(s.p11, 0.0);
        assert!(structural_zeros(&build_free(&p).matrix).is_empty());
    }

    #[test]
    fn ideal_optimum_reaches_half_root_two() {
        let cm0 = 1.0;
        let p = SystemParams::builder()
            .gamma_c(cm0)
            .gamma_h(1e6)
            .t_h(f64::MAX.sqrt())
            .g(cm0 / (2.0 * 2f64.sqrt()))
            .feedback(FeedbackMode::Ideal)
            .build()
            .unwrap();
        let s = steady_state(&build_feedback_ideal(&p).unwrap()).unwrap();
        assert!(s.p11.abs() < 1e-12);
        assert!((concurrence_x(&s) - 0.5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn product_state_without_coupling() {
        let p = SystemParams::builder().gamma_c(0.5).gamma_h(0.9).t_c(0.8).t_h(0.8).build().unwrap();
        let s = steady_state(&build_free(&p)).unwrap();
        assert!(s.alpha.norm() < 1e-14);
        let x = (-1.0f64 / 0.8).exp();
        let q = 1.0 / (1.0 + x);
        assert!((s.p00 - q * q).abs() < 1e-12);
        assert!((s.p01 - q * (1.0 - q)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_kernel_is_reported() {
        // no coupling at all: every diagonal state is stationary
        let p = SystemParams::builder().g(0.3).t_h(1.0).build().unwrap();
        assert!(matches!(steady_state(&build_free(&p)), Err(SteadyError::DegenerateKernel { .. })));
        let p = SystemParams::builder().t_h(1.0).build().unwrap();
        assert!(matches!(steady_state(&build_free(&p)), Err(SteadyError::DegenerateKernel { .. })));
    }

    #[test]
    fn zero_generator_evolution_returns_init() {
        let p = SystemParams::builder().t_h(1.0).build().unwrap();
        let init = XState::new(0.1, 0.4, 0.3, 0.2, Complex64::new(0.1, 0.2)).unwrap();
        assert_eq!(evolve_to_steady(&build_free(&p), &init, 10.0, 1e-12).unwrap(), init);
    }

    #[test]
    fn evolution_reaches_ideal_closed_form() {
        let p = SystemParams::builder()
            .g(0.4)
            .gamma_c(1.0)
            .gamma_h(3.0)
            .t_h(2.0)
            .u(0.5)
            .feedback(FeedbackMode::Ideal)
            .build()
            .unwrap();
        let gen = build_feedback_ideal(&p).unwrap();
        let tol = 1e-11;
        let s = evolve_to_steady(&gen, &XState::ground(), 1e4, tol).unwrap();
        let exact = stationary_ideal(&RateSet::from_params(&p), p.g()).unwrap();
        assert!(max_dev(&s, &exact) < 1e-9, "{s:?} vs {exact:?}");
        assert!((s.trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_times_out() {
        let p = SystemParams::builder().g(0.4).gamma_c(1.0).gamma_h(3.0).t_h(2.0).build().unwrap();
        let err = evolve_to_steady(&build_free(&p), &XState::ground(), 1e-3, 1e-14).unwrap_err();
        assert!(matches!(err, SteadyError::NotConverged { .. }));
    }

    #[test]
    fn trace_is_conserved_along_trajectory() {
        let p = SystemParams::builder()
            .g(0.7)
            .gamma_c(0.3)
            .gamma_h(2.0)
            .t_c(0.2)
            .t_h(1.5)
            .u(1.0)
            .lam(0.4)
            .feedback(FeedbackMode::General)
            .build()
            .unwrap();
        let gen = Generator::for_params(&p).unwrap();
        let mut t_max = 0.5;
        while t_max < 50.0 {
            let s = match evolve_to_steady(&gen, &XState::basis(3), t_max, 1e-15) {
                Ok(s) => s,
                Err(SteadyError::NotConverged { last, .. }) => last,
                Err(e) => panic!("{e}"),
            };
            assert!((s.trace() - 1.0).abs() < 1e-10);
            t_max *= 2.0;
        }
    }

    #[test]
    fn ideal_closed_form_edge_cases() {
        let r = RateSet::from_params(&SystemParams::builder().gamma_c(1.0).gamma_h(2.0).t_h(1.0).build().unwrap());
        let s = stationary_ideal(&r, 0.0).unwrap();
        assert_eq!(s.p01, 1.0);
        let zero = RateSet::from_params(&SystemParams::builder().build().unwrap());
        assert!(stationary_ideal(&zero, 0.0).is_err());
        // fast hot bath empties |00>
        let fast = RateSet::from_params(&SystemParams::builder().gamma_c(1.0).gamma_h(1e12).t_h(1e6).build().unwrap());
        assert!(stationary_ideal(&fast, 0.3).unwrap().p00 < 1e-9);
    }

    #[test]
    fn u_infinite_reduces_to_ideal() {
        let p = SystemParams::builder().g(0.3).gamma_c(0.8).gamma_h(2.0).t_h(1.0).u(Extended::Infinite).build().unwrap();
        let r = RateSet::from_params(&p);
        let a = stationary_u_infinite(&r, 0.3, ErrorProbability::new(0.0).unwrap()).unwrap();
        let b = stationary_ideal(&r, 0.3).unwrap();
        assert!(max_dev(&a, &b) < 1e-15);
    }

    #[test]
    fn u_infinite_normalization_is_population_sum() {
        let r = RateSet::from_tables([[0.11, 0.0], [0.37, 0.0]], [[0.9, 0.9], [1.4, 1.4]]);
        let s = stationary_u_infinite(&r, 0.23, ErrorProbability::new(0.17).unwrap()).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coherence_changes_sign_at_balance_point() {
        // rate tables chosen so the balance point lies below eta = 1/2
        let r = RateSet::from_tables([[0.8, 0.0], [0.1, 0.0]], [[0.9, 0.9], [1.4, 1.4]]);
        let (cp, cm, hp, hm) = (r.plus(Bath::Cold, 0), r.minus(Bath::Cold, 0), r.plus(Bath::Hot, 0), r.minus(Bath::Hot, 0));
        let bracket = |eta: f64| (1.0 - eta) * cm * hp - eta * cp * hm;
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if bracket(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert!(root > 0.01 && root < 0.49);
        let at = |eta: f64| stationary_u_infinite(&r, 0.3, ErrorProbability::new(eta).unwrap()).unwrap().alpha;
        assert!(at(root - 1e-3).im > 0.0);
        assert!(at(root + 1e-3).im < 0.0);
        assert!(at(root).norm() < 1e-12);
        assert_eq!(at(root - 1e-3).re, 0.0);
    }

    #[test]
    fn physical_rates_keep_balance_point_above_half() {
        let p = SystemParams::builder().g(0.3).gamma_c(0.8).gamma_h(2.0).t_c(0.9).t_h(1.0).u(Extended::Infinite).build().unwrap();
        let r = RateSet::from_params(&p);
        let s = stationary_u_infinite(&r, 0.3, ErrorProbability::new(0.5).unwrap()).unwrap();
        assert!(s.alpha.im > 0.0);
    }

    fn params_strategy() -> impl Strategy<Value = SystemParams> {
        (
            (0.05..3.0f64, 0.05..3.0f64, 0.05..3.0f64),
            (0.0..3.0f64, 0.1..3.0f64, 0.0..1.0f64),
            (0.05..5.0f64, any::<bool>()),
        )
            .prop_map(|((g, gc, gh), (u, th, frac), (lam, bose))| {
                SystemParams::builder()
                    .g(g)
                    .gamma_c(gc)
                    .gamma_h(gh)
                    .u(u)
                    .t_h(th)
                    .t_c(th * frac)
                    .lam(lam)
                    .statistics(if bose { BathStatistics::Bosonic } else { BathStatistics::Fermionic })
                    .feedback(FeedbackMode::General)
                    .build()
                    .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn kernel_matches_bordered_solve(p in params_strategy()) {
            for gen in [Generator::for_params(&p).unwrap(), build_free(&p)] {
                let a = steady_state(&gen).unwrap();
                let b = bordered_solve(&gen);
                prop_assert!(max_dev(&a, &b) <= 1e-9);
                prop_assert!(a.check(POSITIVITY_TOL).is_ok());
                let res = (gen.matrix * a.vectorize()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
                prop_assert!(res <= RESIDUAL_TOL * gen.scale());
            }
        }

        #[test]
        fn ideal_kernel_matches_closed_form(p in params_strategy()) {
            let ideal = p.to_builder().t_c(0.0).lam(Extended::Infinite).feedback(FeedbackMode::Ideal).build().unwrap();
            let numeric = steady_state(&build_feedback_ideal(&ideal).unwrap()).unwrap();
            let exact = stationary_ideal(&RateSet::from_params(&ideal), ideal.g()).unwrap();
            prop_assert!(max_dev(&numeric, &exact) <= 1e-10);
        }

        #[test]
        fn u_infinite_kernel_matches_closed_form(p in params_strategy()) {
            let uinf = p.to_builder().u(Extended::Infinite).feedback(FeedbackMode::UInfinite).build().unwrap();
            let numeric = steady_state(&build_feedback_u_infinite(&uinf).unwrap()).unwrap();
            let eta = feedback_error(uinf.lam(), uinf.gamma_det()).unwrap();
            let exact = stationary_u_infinite(&RateSet::from_params(&uinf), uinf.g(), eta).unwrap();
            prop_assert!(max_dev(&numeric, &exact) <= 1e-9);
        }
    }
}
