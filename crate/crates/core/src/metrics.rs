//! Figures of merit for the stationary state: concurrence, CHSH value,
//! singlet fraction, teleportation fidelity and bath heat currents.
//!
//! The `_x` functions use the closed forms valid for X-states and take the
//! coherence by magnitude. The dense-matrix oracles work on any two-qubit
//! density matrix.

use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64;
use thiserror::Error;

use crate::generators::Generator;
use crate::model::{Bath, Extended, RateSet, SystemParams, XState, POSITIVITY_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("closed form undefined: {0}")]
    Undefined(&'static str),
}

/// `max{2(|alpha| - sqrt(p00 p11)), 0}`.
pub fn concurrence_x(state: &XState) -> f64 {
    let c = 2.0 * (state.alpha.norm() - (state.p00.max(0.0) * state.p11.max(0.0)).sqrt());
    c.max(0.0)
}

fn check_density(rho: &Matrix4<Complex64>) -> Result<Vec<f64>, MetricsError> {
    if (rho - rho.adjoint()).norm() > 1e-9 {
        return Err(MetricsError::NotDensityMatrix("not Hermitian".into()));
    }
    if (rho.trace().re - 1.0).abs() > 1e-9 {
        return Err(MetricsError::NotDensityMatrix(format!("trace {}", rho.trace())));
    }
    let eig: Vec<f64> = rho.symmetric_eigenvalues().iter().copied().collect();
    if let Some(e) = eig.iter().find(|&&e| e < -POSITIVITY_TOL) {
        return Err(MetricsError::NotDensityMatrix(format!("negative eigenvalue {e}")));
    }
    Ok(eig)
}

fn sigma_y_y() -> Matrix4<Complex64> {
    let mut m = Matrix4::zeros();
    m[(0, 3)] = (-1.0).into();
    m[(1, 2)] = 1.0.into();
    m[(2, 1)] = 1.0.into();
    m[(3, 0)] = (-1.0).into();
    m
}

/// Wootters concurrence `max{0, l1 - l2 - l3 - l4}` where `l_i` are the
/// decreasing square roots of the eigenvalues of `sqrt(rho) rho~ sqrt(rho)`.
pub fn concurrence_wootters(rho: &Matrix4<Complex64>) -> Result<f64, MetricsError> {
    check_density(rho)?;
    let eig = rho.symmetric_eigen();
    let sqrt_diag = Matrix4::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from(e.max(0.0).sqrt())));
    let sqrt_rho = eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
    let yy = sigma_y_y();
    let flipped = yy * rho.conjugate() * yy;
    let r = sqrt_rho * flipped * sqrt_rho;
    let r = (r + r.adjoint()) * Complex64::from(0.5);
    let mut lambdas: Vec<f64> = r.symmetric_eigenvalues().iter().map(|&e| e.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Stationary concurrence under ideal feedback as a function of the rates.
pub fn concurrence_ideal_closed_form(rates: &RateSet, g: f64) -> Result<f64, MetricsError> {
    let cm0 = rates.minus(Bath::Cold, 0);
    let hp0 = rates.plus(Bath::Hot, 0);
    let den = 4.0 * g * g * (cm0 + 2.0 * hp0) + cm0 * cm0 * hp0;
    if !(den > 0.0) {
        return Err(MetricsError::Undefined("ideal concurrence denominator vanishes"));
    }
    Ok(4.0 * g * cm0 * hp0 / den)
}

/// Maximal CHSH value of an X-state, with `Delta = p01 + p10`.
pub fn chsh_x(state: &XState) -> f64 {
    let a2 = state.alpha.norm_sqr();
    let d = (2.0 * (state.p01 + state.p10) - 1.0).powi(2);
    2.0 * (8.0 * a2 + d - (4.0 * a2).min(d)).max(0.0).sqrt()
}

fn pauli(k: usize) -> nalgebra::Matrix2<Complex64> {
    let (z, o, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
    match k {
        0 => nalgebra::Matrix2::new(z, o, o, z),
        1 => nalgebra::Matrix2::new(z, -i, i, z),
        _ => nalgebra::Matrix2::new(o, z, z, -o),
    }
}

/// Correlation matrix `T_ij = tr{rho sigma_i (x) sigma_j}`.
pub fn correlation_matrix(rho: &Matrix4<Complex64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| (rho * pauli(i).kronecker(&pauli(j))).trace().re)
}

/// Maximal CHSH value over all measurement settings,
/// `2 sqrt(m1 + m2)` with `m1 >= m2` the largest eigenvalues of `T^T T`.
pub fn chsh_horodecki(rho: &Matrix4<Complex64>) -> f64 {
    let t = correlation_matrix(rho);
    let mut m: Vec<f64> = (t.transpose() * t).symmetric_eigenvalues().iter().copied().collect();
    m.sort_by(|a, b| b.total_cmp(a));
    2.0 * (m[0] + m[1]).max(0.0).sqrt()
}

/// Singlet fraction of an X-state.
pub fn singlet_fraction_x(state: &XState) -> f64 {
    let a = state.alpha.norm();
    let delta = state.p01 + state.p10;
    if 1.0 + 2.0 * a - 2.0 * delta <= 0.0 {
        a + delta / 2.0
    } else {
        (a + delta / 2.0).max((1.0 - delta) / 2.0)
    }
}

/// `(1 + 2 F) / 3`; 2/3 is the best classical value.
pub fn teleportation_fidelity(state: &XState) -> f64 {
    (1.0 + 2.0 * singlet_fraction_x(state)) / 3.0
}

/// Heat currents, positive when flowing into the bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCurrents {
    pub q_dot_c: f64,
    pub q_dot_h: f64,
    /// Whether the state is stationary under the parameters' generator, so
    /// that `q_dot_h = -q_dot_c` holds.
    pub steady: bool,
}

/// Cold-bath current from the populations and, by stationarity, the hot
/// current. With `U = inf` the `|11>` terms vanish and are dropped.
pub fn heat_current_general(state: &XState, rates: &RateSet, params: &SystemParams) -> HeatCurrents {
    let eps = params.epsilon();
    let interacting = |rate: f64, pop: f64| match params.u() {
        Extended::Finite(u) => (eps + u) * rate * pop,
        Extended::Infinite if rate == 0.0 || pop.abs() <= POSITIVITY_TOL => 0.0,
        Extended::Infinite => f64::INFINITY,
    };
    let q_dot_c = interacting(rates.minus(Bath::Cold, 1), state.p11) + eps * rates.minus(Bath::Cold, 0) * state.p10
        - eps * rates.plus(Bath::Cold, 0) * state.p00
        - interacting(rates.plus(Bath::Cold, 1), state.p01);
    let steady = Generator::for_params(params)
        .map(|gen| {
            let res = (gen.matrix * state.vectorize()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
            res <= 1e-8 * gen.scale().max(f64::MIN_POSITIVE)
        })
        .unwrap_or(false);
    HeatCurrents { q_dot_c, q_dot_h: -q_dot_c, steady }
}

/// All scalar figures of merit of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub concurrence: f64,
    pub chsh: f64,
    pub fidelity: f64,
    pub singlet_fraction: f64,
    pub q_dot_c: f64,
    pub q_dot_h: f64,
    pub steady: bool,
}

impl MetricsRecord {
    pub fn evaluate(state: &XState, rates: &RateSet, params: &SystemParams) -> MetricsRecord {
        let heat = heat_current_general(state, rates, params);
        let singlet_fraction = singlet_fraction_x(state);
        MetricsRecord {
            concurrence: concurrence_x(state),
            chsh: chsh_x(state),
            fidelity: (1.0 + 2.0 * singlet_fraction) / 3.0,
            singlet_fraction,
            q_dot_c: heat.q_dot_c,
            q_dot_h: heat.q_dot_h,
            steady: heat.steady,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::build_feedback_ideal;
    use crate::model::FeedbackMode;
    use crate::steady::{stationary_ideal, steady_state};
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn bell() -> XState {
        XState::new(0.0, 0.5, 0.5, 0.0, Complex64::new(0.5, 0.0)).unwrap()
    }

    /// Ideal stationary state at the concurrence optimum for a given
    /// hot-to-cold rate ratio.
    fn ideal_optimum(ratio: f64) -> (XState, RateSet, f64) {
        let cm0 = 1.0;
        let r = RateSet::from_tables([[0.0, 0.0], [ratio * cm0, 0.0]], [[cm0, cm0], [1.0, 1.0]]);
        let g = cm0 / (2.0 * SQRT2);
        (stationary_ideal(&r, g).unwrap(), r, g)
    }

    #[test]
    fn concurrence_examples() {
        assert_eq!(concurrence_x(&bell()), 1.0);
        assert_eq!(concurrence_x(&XState::new(0.2, 0.3, 0.4, 0.1, Complex64::new(0.0, 0.0)).unwrap()), 0.0);
        // direct evaluation of the closed form at ratio 100
        let (s, r, g) = ideal_optimum(100.0);
        let expected = 4.0 * g * 100.0 / (4.0 * g * g * 201.0 + 100.0);
        assert!((concurrence_x(&s) - expected).abs() < 1e-14);
        assert!((expected - 0.70534).abs() < 1e-5);
        assert!((concurrence_wootters(&s.to_dense()).unwrap() - expected).abs() < 1e-12);
        assert!((concurrence_ideal_closed_form(&r, g).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn wootters_examples() {
        assert!(concurrence_wootters(&XState::basis(1).to_dense()).unwrap().abs() < 1e-12);
        assert!((concurrence_wootters(&bell().to_dense()).unwrap() - 1.0).abs() < 1e-12);
        let mut bad = XState::basis(0).to_dense();
        bad[(0, 0)] = 1.5.into();
        bad[(1, 1)] = (-0.5).into();
        assert!(concurrence_wootters(&bad).is_err());
    }

    #[test]
    fn closed_form_concurrence_optimum() {
        let (_, r, g) = ideal_optimum(1e6);
        assert!((concurrence_ideal_closed_form(&r, g).unwrap() - 1.0 / SQRT2).abs() < 1e-3);
        assert_eq!(concurrence_ideal_closed_form(&r, 0.0).unwrap(), 0.0);
        let zero = RateSet::from_tables([[0.0; 2]; 2], [[0.0; 2]; 2]);
        assert!(concurrence_ideal_closed_form(&zero, 0.0).is_err());
        // the optimum in g sits at Gamma_C0^- / (2 sqrt 2)
        let best = (1..2000)
            .map(|k| k as f64 * 1e-3)
            .max_by(|a, b| {
                concurrence_ideal_closed_form(&r, *a).unwrap().total_cmp(&concurrence_ideal_closed_form(&r, *b).unwrap())
            })
            .unwrap();
        assert!((best - g).abs() <= 1e-3);
    }

    #[test]
    fn chsh_examples() {
        assert!((chsh_x(&bell()) - 2.0 * SQRT2).abs() < 1e-14);
        assert!((chsh_x(&ideal_optimum(1e12).0) - 6f64.sqrt()).abs() < 1e-9);
        assert!((chsh_x(&XState::ground()) - 2.0).abs() < 1e-15);
        assert!((chsh_horodecki(&bell().to_dense()) - 2.0 * SQRT2).abs() < 1e-12);
        let mixed = Matrix4::<Complex64>::identity() * Complex64::from(0.25);
        assert!(chsh_horodecki(&mixed).abs() < 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        assert!((teleportation_fidelity(&bell()) - 1.0).abs() < 1e-15);
        let s = XState::basis(1);
        assert_eq!(singlet_fraction_x(&s), 0.5);
        assert!((teleportation_fidelity(&s) - 2.0 / 3.0).abs() < 1e-15);
        let f = teleportation_fidelity(&ideal_optimum(1e12).0);
        assert!((f - (4.0 + SQRT2) / 6.0).abs() < 1e-9);
    }

    #[test]
    fn heat_current_is_eps_g_concurrence_at_ideal_optimum() {
        let p = SystemParams::builder()
            .g(1.0 / (2.0 * SQRT2))
            .gamma_c(1.0)
            .gamma_h(50.0)
            .t_h(3.0)
            .u(2.0)
            .epsilon(1.5)
            .feedback(FeedbackMode::Ideal)
            .build()
            .unwrap();
        let r = RateSet::from_params(&p);
        let s = steady_state(&build_feedback_ideal(&p).unwrap()).unwrap();
        let heat = heat_current_general(&s, &r, &p);
        assert!(heat.steady);
        let expected = p.epsilon() * p.g() * concurrence_x(&s);
        assert!((heat.q_dot_c - expected).abs() <= 1e-10 * expected);
        assert_eq!(heat.q_dot_h, -heat.q_dot_c);
    }

    #[test]
    fn no_coupling_means_no_heat() {
        let p = SystemParams::builder().gamma_c(1.0).gamma_h(2.0).t_c(0.3).t_h(3.0).build().unwrap();
        let r = RateSet::from_params(&p);
        let s = steady_state(&Generator::for_params(&p).unwrap()).unwrap();
        assert!(heat_current_general(&s, &r, &p).q_dot_c.abs() < 1e-12);
    }

    #[test]
    fn non_steady_state_is_flagged() {
        let p = SystemParams::builder().g(0.2).gamma_c(1.0).gamma_h(2.0).t_h(3.0).build().unwrap();
        let r = RateSet::from_params(&p);
        assert!(!heat_current_general(&XState::basis(2), &r, &p).steady);
    }

    fn x_state() -> impl Strategy<Value = XState> {
        (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(
            |(a, b, c, d, r, phi)| {
                let s = a + b + c + d;
                if s < 1e-9 {
                    return XState::ground();
                }
                let (p00, p01, p10, p11) = (a / s, b / s, c / s, d / s);
                XState { p00, p01, p10, p11, alpha: Complex64::from_polar(r * (p01 * p10).sqrt(), phi) }
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn wootters_agrees_with_x_form(s in x_state()) {
            let w = concurrence_wootters(&s.to_dense()).unwrap();
            prop_assert!((w - concurrence_x(&s)).abs() <= 1e-9, "{} vs {}", w, concurrence_x(&s));
        }

        #[test]
        fn horodecki_agrees_with_x_form(s in x_state()) {
            let h = chsh_horodecki(&s.to_dense());
            prop_assert!((h - chsh_x(&s)).abs() <= 1e-9);
            prop_assert!(h <= 2.0 * SQRT2 + 1e-9);
        }

        #[test]
        fn operational_consistency(s in x_state()) {
            if chsh_x(&s) > 2.0 + 1e-12 {
                prop_assert!(concurrence_x(&s) > 0.0);
            }
            let f = singlet_fraction_x(&s);
            prop_assert!((f - (s.alpha.norm() + (s.p01 + s.p10) / 2.0).max((1.0 - s.p01 - s.p10) / 2.0)).abs() < 1e-15);
            if teleportation_fidelity(&s) > 2.0 / 3.0 {
                prop_assert!(f > 0.5);
            }
        }

        #[test]
        fn ideal_heat_ratio_is_one(g in 0.01..3.0f64, cm in 0.01..3.0f64, hp in 0.01..30.0f64) {
            let r = RateSet::from_tables([[0.0, 0.0], [hp, 0.0]], [[cm, cm], [1.0, 1.0]]);
            let s = stationary_ideal(&r, g).unwrap();
            let q = cm * s.p10;
            prop_assert!((q / (g * concurrence_x(&s)) - 1.0).abs() <= 1e-9);
        }
    }
}
