//! Liouvillians of the two-qubit machine as 6x6 matrices acting on the
//! vectorized X-state.
//!
//! Every generator is assembled from operator-level definitions: the
//! commutator with the Hamiltonian and the local dissipators are applied to
//! the six basis operators of the X-manifold and the result is read back in
//! vectorized form. The feedback generator is the column-weighted mixture
//!
//! ```text
//! L_fb = L [(1-eta) P_even + eta P_odd] + L~ [eta P_even + (1-eta) P_odd]
//! ```
//!
//! where `P_even` selects `p00, p11` and `P_odd` selects `p01, p10, alpha,
//! alpha*` (the parity sectors of `sigma_z (x) sigma_z`).

use nalgebra::{Matrix4, Matrix6};
use num_complex::Complex64;
use thiserror::Error;

use crate::model::{Bath, Extended, FeedbackMode, ModelError, RateSet, SystemParams, XVector};

pub type Liouvillian = Matrix6<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Free,
    HotDecoupled,
    FeedbackGeneral,
    FeedbackIdeal,
    FeedbackUInfinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub matrix: Liouvillian,
    pub kind: GeneratorKind,
    pub params: SystemParams,
}

impl Generator {
    /// The generator selected by the parameters' feedback mode.
    pub fn for_params(params: &SystemParams) -> Result<Generator, GeneratorError> {
        match params.feedback() {
            FeedbackMode::Off => Ok(build_free(params)),
            FeedbackMode::General => build_feedback_general(params),
            FeedbackMode::Ideal => build_feedback_ideal(params),
            FeedbackMode::UInfinite => build_feedback_u_infinite(params),
        }
    }

    pub fn apply(&self, v: &XVector) -> XVector {
        self.matrix * v
    }

    /// Largest absolute entry.
    pub fn scale(&self) -> f64 {
        self.matrix.iter().fold(0.0, |a, z| a.max(z.norm()))
    }
}

/// Probability that the sign of the detector output misreports the parity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ErrorProbability(f64);

impl ErrorProbability {
    pub fn value(self) -> f64 {
        self.0
    }

    /// For callers that already know eta, e.g. closed-form checks.
    pub fn new(eta: f64) -> Result<ErrorProbability, GeneratorError> {
        if (0.0..=0.5).contains(&eta) {
            Ok(ErrorProbability(eta))
        } else {
            Err(GeneratorError::Precondition(format!("error probability {eta} outside [0, 1/2]")))
        }
    }
}

/// `eta = erfc(2 sqrt(lam / gamma_det)) / 2`; exactly zero for projective
/// measurement.
pub fn feedback_error(lam: Extended, gamma_det: f64) -> Result<ErrorProbability, GeneratorError> {
    if !(gamma_det.is_finite() && gamma_det > 0.0) {
        return Err(GeneratorError::Precondition(format!("detector bandwidth must be > 0, got {gamma_det}")));
    }
    match lam {
        Extended::Infinite => Ok(ErrorProbability(0.0)),
        Extended::Finite(l) if l.is_finite() && l > 0.0 => Ok(ErrorProbability(0.5 * libm::erfc(2.0 * (l / gamma_det).sqrt()))),
        Extended::Finite(l) => Err(GeneratorError::Precondition(format!("measurement strength must be > 0, got {l}"))),
    }
}

/// Position of each vectorized component in the dense 4x4 matrix.
const X_ENTRIES: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (3, 3), (1, 2), (2, 1)];

/// Parity eigenvalue of each vectorized component.
pub(crate) const PARITY: [f64; 6] = [1.0, -1.0, -1.0, 1.0, -1.0, -1.0];

fn basis_op(j: usize) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[X_ENTRIES[j]] = Complex64::new(1.0, 0.0);
    m
}

fn superop_matrix(op: impl Fn(&Matrix4<Complex64>) -> Matrix4<Complex64>) -> Liouvillian {
    let mut out = Liouvillian::zeros();
    for j in 0..6 {
        let image = op(&basis_op(j));
        for (i, &entry) in X_ENTRIES.iter().enumerate() {
            out[(i, j)] = image[entry];
        }
    }
    out
}

/// Hamiltonian in the basis `|00>, |01>, |10>, |11>`. An infinite `U` only
/// shifts the `|11>` energy, which never enters the X-manifold commutator,
/// so it is dropped there.
pub fn hamiltonian(params: &SystemParams) -> Matrix4<Complex64> {
    let eps = params.epsilon();
    let u = params.u().finite().unwrap_or(0.0);
    let mut h = Matrix4::zeros();
    h[(1, 1)] = eps.into();
    h[(2, 2)] = eps.into();
    h[(3, 3)] = (2.0 * eps + u).into();
    h[(1, 2)] = params.g().into();
    h[(2, 1)] = params.g().into();
    h
}

fn ket_bra(a: usize, b: usize) -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(a, b)] = Complex64::new(1.0, 0.0);
    m
}

/// De-excitation jump operator `J_{kl}`.
pub fn jump_operator(bath: Bath, l: usize) -> Matrix4<Complex64> {
    match (bath, l) {
        (Bath::Cold, 0) => ket_bra(0, 2),
        (Bath::Cold, _) => ket_bra(1, 3),
        (Bath::Hot, 0) => ket_bra(0, 1),
        (Bath::Hot, _) => ket_bra(2, 3),
    }
}

fn dissipate(j: &Matrix4<Complex64>, rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let jd = j.adjoint();
    let jdj = jd * j;
    j * rho * jd - (jdj * rho + rho * jdj) * Complex64::from(0.5)
}

fn coherent_part(params: &SystemParams) -> Liouvillian {
    let h = hamiltonian(params);
    let i = Complex64::new(0.0, 1.0);
    superop_matrix(|rho| (rho * h - h * rho) * i)
}

/// Dissipative part of one bath, all four of its jump channels.
pub fn bath_part(rates: &RateSet, bath: Bath) -> Liouvillian {
    superop_matrix(|rho| {
        let mut out = Matrix4::zeros();
        for l in 0..2 {
            let j = jump_operator(bath, l);
            out += dissipate(&j.adjoint(), rho) * Complex64::from(rates.plus(bath, l));
            out += dissipate(&j, rho) * Complex64::from(rates.minus(bath, l));
        }
        out
    })
}

/// `L~`: coherent evolution plus the cold bath.
pub(crate) fn decoupled_part(params: &SystemParams, rates: &RateSet) -> Liouvillian {
    coherent_part(params) + bath_part(rates, Bath::Cold)
}

/// Hot-bath columns weighted by `1 - eta` (even parity) and `eta` (odd).
fn weighted_hot(rates: &RateSet, eta: f64) -> Liouvillian {
    let mut hot = bath_part(rates, Bath::Hot);
    for (j, parity) in PARITY.iter().enumerate() {
        let w = if *parity > 0.0 { 1.0 - eta } else { eta };
        hot.column_mut(j).scale_mut(w);
    }
    hot
}

/// The local Lindblad generator with both baths coupled.
pub fn build_free(params: &SystemParams) -> Generator {
    let rates = RateSet::from_params(params);
    Generator {
        matrix: decoupled_part(params, &rates) + bath_part(&rates, Bath::Hot),
        kind: GeneratorKind::Free,
        params: params.clone(),
    }
}

/// Coherent part and cold bath only.
pub fn build_hot_decoupled(params: &SystemParams) -> Generator {
    let rates = RateSet::from_params(params);
    Generator {
        matrix: decoupled_part(params, &rates),
        kind: GeneratorKind::HotDecoupled,
        params: params.clone(),
    }
}

/// Fast-detector feedback generator with error probability from
/// `lam / gamma_det`. Valid when the detector bandwidth exceeds all system
/// rates; this is not checked.
pub fn build_feedback_general(params: &SystemParams) -> Result<Generator, GeneratorError> {
    let eta = feedback_error(params.lam(), params.gamma_det())?;
    Ok(feedback_with_eta(params, eta.value(), GeneratorKind::FeedbackGeneral))
}

pub(crate) fn feedback_with_eta(params: &SystemParams, eta: f64, kind: GeneratorKind) -> Generator {
    let rates = RateSet::from_params(params);
    Generator {
        matrix: decoupled_part(params, &rates) + weighted_hot(&rates, eta),
        kind,
        params: params.clone(),
    }
}

/// Error-free feedback with a zero-temperature cold bath.
pub fn build_feedback_ideal(params: &SystemParams) -> Result<Generator, GeneratorError> {
    if params.t_c() != 0.0 || !params.lam().is_infinite() {
        return Err(GeneratorError::Precondition(format!(
            "ideal feedback needs t_c = 0 and lam = inf (got t_c = {}, lam = {})",
            params.t_c(),
            params.lam()
        )));
    }
    Ok(feedback_with_eta(params, 0.0, GeneratorKind::FeedbackIdeal))
}

/// Feedback generator in the limit of infinite interaction, general eta.
pub fn build_feedback_u_infinite(params: &SystemParams) -> Result<Generator, GeneratorError> {
    if !params.u().is_infinite() {
        return Err(GeneratorError::Precondition(format!("u_inf feedback needs u = inf (got {})", params.u())));
    }
    let eta = feedback_error(params.lam(), params.gamma_det())?;
    Ok(feedback_with_eta(params, eta.value(), GeneratorKind::FeedbackUInfinite))
}

/// Row vector `e` with `tr{H X} = e . vec(X)` for X on the X-manifold.
/// Requires finite `U` when the `|11>` component matters.
pub fn energy_functional(params: &SystemParams) -> [Complex64; 6] {
    let eps = params.epsilon();
    let e11 = 2.0 * eps + params.u().to_f64();
    let g = params.g();
    [0.0.into(), eps.into(), eps.into(), e11.into(), g.into(), g.into()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BathStatistics, Extended};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }
    fn ci(im: f64) -> Complex64 {
        Complex64::new(0.0, im)
    }

    fn max_diff(a: &Liouvillian, b: &Liouvillian) -> f64 {
        (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    fn column_trace_residual(m: &Liouvillian) -> f64 {
        (0..6).map(|j| (0..4).map(|i| m[(i, j)]).sum::<Complex64>().norm()).fold(0.0, f64::max)
    }

    /// The displayed ideal-operation matrix, entered by hand.
    fn displayed_ideal(r: &RateSet, g: f64) -> Liouvillian {
        let (hp0, cm0, cm1, hm1) = (r.plus(Bath::Hot, 0), r.minus(Bath::Cold, 0), r.minus(Bath::Cold, 1), r.minus(Bath::Hot, 1));
        #[rustfmt::skip]
        let m = Liouvillian::from_row_slice(&[
            c(-hp0), c(0.), c(cm0), c(0.), c(0.), c(0.),
            c(hp0), c(0.), c(0.), c(cm1), ci(g), ci(-g),
            c(0.), c(0.), c(-cm0), c(hm1), ci(-g), ci(g),
            c(0.), c(0.), c(0.), c(-cm1 - hm1), c(0.), c(0.),
            c(0.), ci(g), ci(-g), c(0.), c(-cm0 / 2.), c(0.),
            c(0.), ci(-g), ci(g), c(0.), c(0.), c(-cm0 / 2.),
        ]);
        m
    }

    /// The displayed infinite-interaction matrix with general eta.
    fn displayed_u_infinite(r: &RateSet, g: f64, eta: f64) -> Liouvillian {
        let cp0 = r.plus(Bath::Cold, 0);
        let hp0 = r.plus(Bath::Hot, 0);
        let (cm0, cm1, hm0, hm1) = (r.minus(Bath::Cold, 0), r.minus(Bath::Cold, 1), r.minus(Bath::Hot, 0), r.minus(Bath::Hot, 1));
        let k = 0.5 * (eta * hm0 + cm0);
        #[rustfmt::skip]
        let m = Liouvillian::from_row_slice(&[
            c(-cp0 - hp0 * (1. - eta)), c(eta * hm0), c(cm0), c(0.), c(0.), c(0.),
            c(hp0 * (1. - eta)), c(-eta * hm0), c(0.), c(cm1), ci(g), ci(-g),
            c(cp0), c(0.), c(-cm0), c(hm1 * (1. - eta)), ci(-g), ci(g),
            c(0.), c(0.), c(0.), c(-cm1 - hm1 * (1. - eta)), c(0.), c(0.),
            c(0.), ci(g), ci(-g), c(0.), c(-k), c(0.),
            c(0.), ci(-g), ci(g), c(0.), c(0.), c(-k),
        ]);
        m
    }

    /// The general feedback matrix with the two wrong-feedback entries of
    /// the hot qubit's excitation out of |10> restored.
    fn repaired_general(r: &RateSet, g: f64, eta: f64) -> Liouvillian {
        let (cp0, cp1, hp0, hp1) = (r.plus(Bath::Cold, 0), r.plus(Bath::Cold, 1), r.plus(Bath::Hot, 0), r.plus(Bath::Hot, 1));
        let (cm0, cm1, hm0, hm1) = (r.minus(Bath::Cold, 0), r.minus(Bath::Cold, 1), r.minus(Bath::Hot, 0), r.minus(Bath::Hot, 1));
        let k = 0.5 * (cp1 + eta * (hm0 + hp1) + cm0);
        #[rustfmt::skip]
        let m = Liouvillian::from_row_slice(&[
            c(-cp0 - hp0 * (1. - eta)), c(eta * hm0), c(cm0), c(0.), c(0.), c(0.),
            c(hp0 * (1. - eta)), c(-cp1 - eta * hm0), c(0.), c(cm1), ci(g), ci(-g),
            c(cp0), c(0.), c(-cm0 - eta * hp1), c(hm1 * (1. - eta)), ci(-g), ci(g),
            c(0.), c(cp1), c(eta * hp1), c(-cm1 - hm1 * (1. - eta)), c(0.), c(0.),
            c(0.), ci(g), ci(-g), c(0.), c(-k), c(0.),
            c(0.), ci(-g), ci(g), c(0.), c(0.), c(-k),
        ]);
        m
    }

    fn base() -> crate::model::ParamsBuilder {
        SystemParams::builder().g(0.3).gamma_c(0.7).gamma_h(1.9).t_h(1.3).u(0.8)
    }

    #[test]
    fn eta_limits() {
        assert_eq!(feedback_error(Extended::Infinite, 1.0).unwrap().value(), 0.0);
        let tiny = feedback_error(Extended::Finite(1e-14), 1.0).unwrap().value();
        assert!((tiny - 0.5).abs() < 1e-6);
        assert!(feedback_error(Extended::Finite(0.0), 1.0).is_err());
        assert!(feedback_error(Extended::Finite(1.0), 0.0).is_err());
    }

    #[test]
    fn eta_at_quarter_ratio_matches_series() {
        // erf(1) from its Maclaurin series
        let mut erf1 = 0.0;
        let mut fact = 1.0;
        for n in 0..40 {
            if n > 0 {
                fact *= n as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            erf1 += sign / (fact * (2 * n + 1) as f64);
        }
        erf1 *= 2.0 / std::f64::consts::PI.sqrt();
        let expected = 0.5 * (1.0 - erf1);
        let eta = feedback_error(Extended::Finite(0.25), 1.0).unwrap().value();
        assert!((eta - expected).abs() < 1e-14, "{eta} vs {expected}");
        assert!((eta - 0.078_65).abs() < 1e-5);
    }

    #[test]
    fn eta_strictly_decreasing() {
        let mut prev = 0.5;
        for k in -20..20 {
            let eta = feedback_error(Extended::Finite(10f64.powf(k as f64 / 10.0)), 1.0).unwrap().value();
            assert!(eta < prev);
            prev = eta;
        }
    }

    #[test]
    fn free_generator_vanishes_without_couplings() {
        let p = SystemParams::builder().t_h(1.0).build().unwrap();
        assert_eq!(build_free(&p).matrix, Liouvillian::zeros());
    }

    #[test]
    fn thermal_product_is_stationary_at_equal_temperatures() {
        for stats in [BathStatistics::Fermionic, BathStatistics::Bosonic] {
            let p = SystemParams::builder()
                .gamma_c(0.4)
                .gamma_h(1.1)
                .t_c(0.7)
                .t_h(0.7)
                .statistics(stats)
                .build()
                .unwrap();
            let x = (-1.0f64 / 0.7).exp();
            let z = (1.0 + x) * (1.0 + x);
            let state = XVector::new(c(1.0 / z), c(x / z), c(x / z), c(x * x / z), c(0.), c(0.));
            let out = build_free(&p).apply(&state);
            assert!(out.norm() < 1e-10, "{out}");
        }
    }

    #[test]
    fn hot_decoupled_equals_free_without_hot_bath() {
        let p = base().build().unwrap();
        let q = base().gamma_h(0.0).build().unwrap();
        assert_eq!(build_hot_decoupled(&p).matrix, build_free(&q).matrix);
    }

    #[test]
    fn coherent_only_conserves_single_excitation() {
        let p = SystemParams::builder().g(0.5).t_h(1.0).build().unwrap();
        let m = build_hot_decoupled(&p).matrix;
        for j in 0..6 {
            assert!((m[(1, j)] + m[(2, j)]).norm() < 1e-15);
        }
    }

    #[test]
    fn general_matches_displayed_entries() {
        let p = base().t_c(0.4).lam(0.3).gamma_det(1.0).feedback(FeedbackMode::General).build().unwrap();
        let r = RateSet::from_params(&p);
        let eta = feedback_error(p.lam(), p.gamma_det()).unwrap().value();
        let built = build_feedback_general(&p).unwrap();
        assert!(max_diff(&built.matrix, &repaired_general(&r, p.g(), eta)) < 1e-14);
    }

    #[test]
    fn ideal_matches_displayed_matrix() {
        let p = base().feedback(FeedbackMode::Ideal).build().unwrap();
        let r = RateSet::from_params(&p);
        let built = build_feedback_ideal(&p).unwrap().matrix;
        assert!(max_diff(&built, &displayed_ideal(&r, p.g())) < 1e-15);
        assert_eq!(built[(0, 0)], c(-r.plus(Bath::Hot, 0)));
        assert_eq!(built[(4, 4)], c(-r.minus(Bath::Cold, 0) / 2.0));
        // general with eta = 0 at T_C = 0 is the same matrix
        let q = base().build().unwrap();
        assert!(max_diff(&feedback_with_eta(&q, 0.0, GeneratorKind::FeedbackGeneral).matrix, &built) == 0.0);
    }

    #[test]
    fn ideal_rejects_non_ideal_conditions() {
        let p = base().t_c(0.1).build().unwrap();
        assert!(build_feedback_ideal(&p).is_err());
        let p = base().lam(5.0).build().unwrap();
        assert!(build_feedback_ideal(&p).is_err());
    }

    #[test]
    fn u_infinite_matches_displayed_matrix() {
        let p = base().u(Extended::Infinite).t_c(0.5).lam(0.2).build().unwrap();
        let r = RateSet::from_params(&p);
        let eta = feedback_error(p.lam(), p.gamma_det()).unwrap().value();
        let built = build_feedback_u_infinite(&p).unwrap();
        assert!(max_diff(&built.matrix, &displayed_u_infinite(&r, p.g(), eta)) < 1e-15);
        let k = 0.5 * (eta * r.minus(Bath::Hot, 0) + r.minus(Bath::Cold, 0));
        assert!((built.matrix[(4, 4)] + k).norm() < 1e-15);
        let general = build_feedback_general(&p).unwrap();
        assert!(max_diff(&built.matrix, &general.matrix) < 1e-14);
        assert!(build_feedback_u_infinite(&base().build().unwrap()).is_err());
    }

    #[test]
    fn u_infinite_without_errors_has_no_wrong_feedback_rates() {
        let p = base().u(Extended::Infinite).t_c(0.5).build().unwrap();
        let m = build_feedback_u_infinite(&p).unwrap().matrix;
        let r = RateSet::from_params(&p);
        assert_eq!(m[(0, 1)], c(0.0));
        assert_eq!(m[(1, 1)], c(0.0));
        assert_eq!(m[(4, 4)], c(-0.5 * r.minus(Bath::Cold, 0)));
    }

    #[test]
    fn ideal_kernel_is_one_dimensional() {
        let p = base().feedback(FeedbackMode::Ideal).build().unwrap();
        let m = build_feedback_ideal(&p).unwrap().matrix;
        let sv = m.singular_values();
        let mut s: Vec<f64> = sv.iter().copied().collect();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(s[0] < 1e-12 * s[5]);
        assert!(s[1] > 1e-3 * s[5]);
    }

    fn params_strategy() -> impl Strategy<Value = SystemParams> {
        (
            (1e-2..3.0f64, 1e-2..3.0f64, 1e-2..3.0f64),
            (0.0..3.0f64, any::<bool>()),
            (0.05..3.0f64, 0.0..1.0f64),
            (1e-2..10.0f64, any::<bool>()),
        )
            .prop_map(|((g, gc, gh), (u, uinf), (th, frac), (lam, bose))| {
                SystemParams::builder()
                    .g(g)
                    .gamma_c(gc)
                    .gamma_h(gh)
                    .u(if uinf { Extended::Infinite } else { Extended::Finite(u) })
                    .t_h(th)
                    .t_c(th * frac)
                    .lam(lam)
                    .statistics(if bose { BathStatistics::Bosonic } else { BathStatistics::Fermionic })
                    .build()
                    .unwrap()
            })
    }

    fn check_structure(m: &Liouvillian) -> Result<(), TestCaseError> {
        prop_assert!(column_trace_residual(m) <= 1e-12 * (1.0 + m.norm()));
        // coherences only couple to p01, p10 and themselves
        for i in 4..6 {
            for j in [0, 3] {
                prop_assert_eq!(m[(i, j)], c(0.0));
            }
        }
        // the conjugate coherence obeys the conjugate equation
        let swap = [0, 1, 2, 3, 5, 4];
        for j in 0..6 {
            prop_assert!((m[(5, j)] - m[(4, swap[j])].conj()).norm() <= 1e-14 * (1.0 + m.norm()));
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn every_generator_preserves_trace_and_structure(p in params_strategy()) {
            check_structure(&build_free(&p).matrix)?;
            check_structure(&build_hot_decoupled(&p).matrix)?;
            check_structure(&build_feedback_general(&p).unwrap().matrix)?;
            let ideal = p.to_builder().t_c(0.0).lam(Extended::Infinite).build().unwrap();
            check_structure(&build_feedback_ideal(&ideal).unwrap().matrix)?;
            let uinf = p.to_builder().u(Extended::Infinite).build().unwrap();
            check_structure(&build_feedback_u_infinite(&uinf).unwrap().matrix)?;
        }

        #[test]
        fn repaired_display_matches_construction(p in params_strategy()) {
            let r = RateSet::from_params(&p);
            let eta = feedback_error(p.lam(), p.gamma_det()).unwrap().value();
            let built = build_feedback_general(&p).unwrap().matrix;
            prop_assert!(max_diff(&built, &repaired_general(&r, p.g(), eta)) <= 1e-12);
        }

        #[test]
        fn limit_chains_hold(p in params_strategy()) {
            // general -> ideal as eta -> 0 and T_C -> 0
            let ideal = p.to_builder().t_c(0.0).lam(Extended::Infinite).build().unwrap();
            let general = build_feedback_general(&ideal).unwrap().matrix;
            prop_assert!(max_diff(&general, &build_feedback_ideal(&ideal).unwrap().matrix) <= 1e-12);
            // general -> u_inf
            let uinf = p.to_builder().u(Extended::Infinite).build().unwrap();
            let general = build_feedback_general(&uinf).unwrap().matrix;
            prop_assert!(max_diff(&general, &build_feedback_u_infinite(&uinf).unwrap().matrix) <= 1e-12);
            // a very large finite U approaches the symbolic limit
            let big = p.to_builder().u(1e6).build().unwrap();
            let general = build_feedback_general(&big).unwrap().matrix;
            prop_assert!(max_diff(&general, &build_feedback_u_infinite(&uinf).unwrap().matrix) <= 1e-12);
            // feedback off is the free generator
            let off = p.to_builder().feedback(FeedbackMode::Off).build().unwrap();
            prop_assert_eq!(Generator::for_params(&off).unwrap().matrix, build_free(&p).matrix);
        }

        #[test]
        fn spectrum_is_stable(p in params_strategy()) {
            for m in [build_free(&p).matrix, build_feedback_general(&p).unwrap().matrix] {
                let (_, t) = m.schur().unpack();
                let eig = t.diagonal();
                let scale = m.norm();
                let mut near_zero = 0;
                for z in eig.iter() {
                    prop_assert!(z.re <= 1e-10 * scale, "eigenvalue {z}");
                    if z.norm() <= 1e-10 * scale {
                        near_zero += 1;
                    }
                }
                prop_assert!(near_zero >= 1);
            }
        }
    }
}
