//! Physical parameter domain: validated system parameters, bath transition
//! rates and the X-shaped two-qubit density matrix.
//!
//! Energies are measured in units of the qubit splitting `epsilon`, with
//! `k_B = hbar = 1`. Zero temperature and infinite interaction or
//! measurement strength are represented symbolically and resolved to their
//! analytic limits, never as large floats.

use std::fmt;

use nalgebra::{Matrix4, Vector6};
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance used for X-state positivity and normalization checks.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Vectorized X-state `(p00, p01, p10, p11, alpha, conj(alpha))`.
pub type XVector = Vector6<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter `{name}` is invalid: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("inconsistent parameters: {0}")]
    Inconsistent(String),
    #[error("invalid X-state: {0}")]
    InvalidState(String),
}

/// A nonnegative quantity that may also take the symbolic value infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }

    /// Value as `f64`, with `Infinite` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            Extended::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }
}

impl From<f64> for Extended {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            Extended::Infinite
        } else {
            Extended::Finite(v)
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// Particle statistics of both reservoirs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BathStatistics {
    Fermionic,
    Bosonic,
}

/// Which generator governs the reduced dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeedbackMode {
    /// No measurement, hot bath always coupled.
    Off,
    /// Fast-detector feedback with finite error probability.
    General,
    /// Error-free feedback at zero cold temperature.
    Ideal,
    /// Fast-detector feedback with infinite on-site interaction.
    UInfinite,
}

/// The two reservoirs. The cold bath couples to the first qubit of
/// `|ab>`, the hot bath to the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bath {
    Cold = 0,
    Hot = 1,
}

/// All physical knobs of the machine. Construct through [`ParamsBuilder`].
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    epsilon: f64,
    g: f64,
    u: Extended,
    gamma_c: f64,
    gamma_h: f64,
    t_c: f64,
    t_h: f64,
    gamma_det: f64,
    lam: Extended,
    statistics: BathStatistics,
    feedback: FeedbackMode,
}

impl SystemParams {
    pub fn builder() -> ParamsBuilder {
        ParamsBuilder::default()
    }

    /// A builder preloaded with these parameters.
    pub fn to_builder(&self) -> ParamsBuilder {
        ParamsBuilder { p: self.clone() }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn u(&self) -> Extended {
        self.u
    }
    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }
    pub fn gamma_h(&self) -> f64 {
        self.gamma_h
    }
    pub fn t_c(&self) -> f64 {
        self.t_c
    }
    pub fn t_h(&self) -> f64 {
        self.t_h
    }
    pub fn gamma_det(&self) -> f64 {
        self.gamma_det
    }
    pub fn lam(&self) -> Extended {
        self.lam
    }
    pub fn statistics(&self) -> BathStatistics {
        self.statistics
    }
    pub fn feedback(&self) -> FeedbackMode {
        self.feedback
    }

    pub fn bare_rate(&self, bath: Bath) -> f64 {
        match bath {
            Bath::Cold => self.gamma_c,
            Bath::Hot => self.gamma_h,
        }
    }

    pub fn temperature(&self, bath: Bath) -> f64 {
        match bath {
            Bath::Cold => self.t_c,
            Bath::Hot => self.t_h,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), ModelError> {
            if ok {
                Ok(())
            } else {
                Err(ModelError::InvalidParameter { name, value, reason })
            }
        }
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        check("epsilon", self.epsilon, self.epsilon.is_finite() && self.epsilon > 0.0, "must be finite and > 0")?;
        check("g", self.g, nonneg(self.g), "must be finite and >= 0")?;
        if let Extended::Finite(u) = self.u {
            check("u", u, nonneg(u), "must be >= 0 or inf")?;
        }
        check("gamma_c", self.gamma_c, nonneg(self.gamma_c), "must be finite and >= 0")?;
        check("gamma_h", self.gamma_h, nonneg(self.gamma_h), "must be finite and >= 0")?;
        check("t_c", self.t_c, nonneg(self.t_c), "must be finite and >= 0")?;
        check("t_h", self.t_h, nonneg(self.t_h), "must be finite and >= 0")?;
        check(
            "gamma_det",
            self.gamma_det,
            self.gamma_det.is_finite() && self.gamma_det > 0.0,
            "must be finite and > 0",
        )?;
        if let Extended::Finite(l) = self.lam {
            check("lam", l, l.is_finite() && l > 0.0, "must be > 0 or inf")?;
        }
        if self.t_c > self.t_h {
            return Err(ModelError::Inconsistent(format!(
                "cold temperature {} exceeds hot temperature {}",
                self.t_c, self.t_h
            )));
        }
        match self.feedback {
            FeedbackMode::Ideal if self.t_c != 0.0 || !self.lam.is_infinite() => Err(ModelError::Inconsistent(
                "ideal feedback requires t_c = 0 and lam = inf".into(),
            )),
            FeedbackMode::UInfinite if !self.u.is_infinite() => {
                Err(ModelError::Inconsistent("u_inf feedback requires u = inf".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Builder for [`SystemParams`]. Defaults: `epsilon = 1`, `g = 0`, `u = 0`,
/// zero bare rates and temperatures, `gamma_det = 1`, `lam = inf`,
/// fermionic baths, feedback off.
#[derive(Debug, Clone)]
pub struct ParamsBuilder {
    p: SystemParams,
}

impl Default for ParamsBuilder {
    fn default() -> Self {
        Self {
            p: SystemParams {
                epsilon: 1.0,
                g: 0.0,
                u: Extended::Finite(0.0),
                gamma_c: 0.0,
                gamma_h: 0.0,
                t_c: 0.0,
                t_h: 0.0,
                gamma_det: 1.0,
                lam: Extended::Infinite,
                statistics: BathStatistics::Fermionic,
                feedback: FeedbackMode::Off,
            },
        }
    }
}

impl ParamsBuilder {
    pub fn epsilon(mut self, v: f64) -> Self {
        self.p.epsilon = v;
        self
    }
    pub fn g(mut self, v: f64) -> Self {
        self.p.g = v;
        self
    }
    pub fn u(mut self, v: impl Into<Extended>) -> Self {
        self.p.u = v.into();
        self
    }
    pub fn gamma_c(mut self, v: f64) -> Self {
        self.p.gamma_c = v;
        self
    }
    pub fn gamma_h(mut self, v: f64) -> Self {
        self.p.gamma_h = v;
        self
    }
    pub fn t_c(mut self, v: f64) -> Self {
        self.p.t_c = v;
        self
    }
    pub fn t_h(mut self, v: f64) -> Self {
        self.p.t_h = v;
        self
    }
    pub fn gamma_det(mut self, v: f64) -> Self {
        self.p.gamma_det = v;
        self
    }
    pub fn lam(mut self, v: impl Into<Extended>) -> Self {
        self.p.lam = v.into();
        self
    }
    pub fn statistics(mut self, v: BathStatistics) -> Self {
        self.p.statistics = v;
        self
    }
    pub fn feedback(mut self, v: FeedbackMode) -> Self {
        self.p.feedback = v;
        self
    }

    pub fn build(self) -> Result<SystemParams, ModelError> {
        self.p.validate()?;
        Ok(self.p)
    }
}

/// Excitation (`plus`) and de-excitation (`minus`) rate of a single bath
/// for a transition of energy `energy` at temperature `temperature`.
pub fn transition_rates(
    gamma: f64,
    temperature: f64,
    energy: Extended,
    statistics: BathStatistics,
) -> Result<(f64, f64), ModelError> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "bare rate must be finite and >= 0",
        });
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(ModelError::InvalidParameter {
            name: "temperature",
            value: temperature,
            reason: "must be finite and >= 0",
        });
    }
    let energy = match energy {
        Extended::Infinite => return Ok((0.0, gamma)),
        Extended::Finite(e) if e > 0.0 => e,
        Extended::Finite(e) => {
            return Err(ModelError::InvalidParameter {
                name: "energy",
                value: e,
                reason: "transition energy must be > 0",
            })
        }
    };
    if temperature == 0.0 {
        return Ok((0.0, gamma));
    }
    let x = energy / temperature;
    let rates = match statistics {
        // 1/(e^x + 1) and 1/(1 + e^-x); overflow of e^x gives the correct 0.
        BathStatistics::Fermionic => (gamma / (x.exp() + 1.0), gamma / (1.0 + (-x).exp())),
        BathStatistics::Bosonic => (gamma / x.exp_m1(), gamma / -(-x).exp_m1()),
    };
    Ok(rates)
}

/// The eight rates `Gamma_{kl}^{+/-}` for bath `k` and occupation `l` of
/// the other qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    gp: [[f64; 2]; 2],
    gm: [[f64; 2]; 2],
}

impl RateSet {
    pub fn from_params(params: &SystemParams) -> RateSet {
        let mut gp = [[0.0; 2]; 2];
        let mut gm = [[0.0; 2]; 2];
        for bath in [Bath::Cold, Bath::Hot] {
            for l in 0..2 {
                let energy = match (l, params.u) {
                    (0, _) => Extended::Finite(params.epsilon),
                    (_, Extended::Finite(u)) => Extended::Finite(params.epsilon + u),
                    (_, Extended::Infinite) => Extended::Infinite,
                };
                let (plus, minus) = transition_rates(
                    params.bare_rate(bath),
                    params.temperature(bath),
                    energy,
                    params.statistics,
                )
                .expect("validated parameters give valid rates");
                gp[bath as usize][l] = plus;
                gm[bath as usize][l] = minus;
            }
        }
        RateSet { gp, gm }
    }

    /// Build directly from rate tables indexed `[bath][l]`.
    pub fn from_tables(gp: [[f64; 2]; 2], gm: [[f64; 2]; 2]) -> RateSet {
        RateSet { gp, gm }
    }

    pub fn plus(&self, bath: Bath, l: usize) -> f64 {
        self.gp[bath as usize][l]
    }

    pub fn minus(&self, bath: Bath, l: usize) -> f64 {
        self.gm[bath as usize][l]
    }

    /// Largest of the eight rates.
    pub fn max_rate(&self) -> f64 {
        self.gp.iter().chain(self.gm.iter()).flatten().fold(0.0, |a, &b| a.max(b))
    }

    /// Copy with the cold excitation rates and/or the `l = 1` excitation
    /// rates set to zero.
    pub fn with_zeroed(&self, cold_plus: bool, interacting_plus: bool) -> RateSet {
        let mut out = *self;
        if cold_plus {
            out.gp[Bath::Cold as usize] = [0.0; 2];
        }
        if interacting_plus {
            out.gp[0][1] = 0.0;
            out.gp[1][1] = 0.0;
        }
        out
    }
}

/// Two-qubit density matrix with support only on the diagonal and the
/// `|01><10|` coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
    pub alpha: Complex64,
}

impl XState {
    /// Checked constructor using [`POSITIVITY_TOL`].
    pub fn new(p00: f64, p01: f64, p10: f64, p11: f64, alpha: Complex64) -> Result<XState, ModelError> {
        let s = XState { p00, p01, p10, p11, alpha };
        s.check(POSITIVITY_TOL)?;
        Ok(s)
    }

    pub fn ground() -> XState {
        XState { p00: 1.0, p01: 0.0, p10: 0.0, p11: 0.0, alpha: Complex64::new(0.0, 0.0) }
    }

    pub fn basis(index: usize) -> XState {
        let mut p = [0.0; 4];
        p[index] = 1.0;
        XState { p00: p[0], p01: p[1], p10: p[2], p11: p[3], alpha: Complex64::new(0.0, 0.0) }
    }

    pub fn populations(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    pub fn trace(&self) -> f64 {
        self.p00 + self.p01 + self.p10 + self.p11
    }

    /// Verify normalization, population signs and the coherence bound.
    pub fn check(&self, tol: f64) -> Result<(), ModelError> {
        let pops = self.populations();
        if pops.iter().any(|p| !p.is_finite()) || !self.alpha.re.is_finite() || !self.alpha.im.is_finite() {
            return Err(ModelError::InvalidState("non-finite entry".into()));
        }
        if (self.trace() - 1.0).abs() > tol {
            return Err(ModelError::InvalidState(format!("trace {} != 1", self.trace())));
        }
        if let Some(p) = pops.iter().find(|&&p| p < -tol) {
            return Err(ModelError::InvalidState(format!("negative population {p}")));
        }
        let bound = (self.p01.max(0.0) * self.p10.max(0.0)).sqrt();
        if self.alpha.norm() > bound + tol {
            return Err(ModelError::InvalidState(format!(
                "|alpha| = {} exceeds sqrt(p01 p10) = {bound}",
                self.alpha.norm()
            )));
        }
        Ok(())
    }

    pub fn vectorize(&self) -> XVector {
        XVector::new(
            self.p00.into(),
            self.p01.into(),
            self.p10.into(),
            self.p11.into(),
            self.alpha,
            self.alpha.conj(),
        )
    }

    /// Inverse of [`XState::vectorize`]. Rejects vectors whose last entry is
    /// not the conjugate of the fifth or whose populations are not real.
    pub fn devectorize(v: &XVector, tol: f64) -> Result<XState, ModelError> {
        if (v[5] - v[4].conj()).norm() > tol {
            return Err(ModelError::InvalidState(format!(
                "component 6 ({}) is not the conjugate of component 5 ({})",
                v[5], v[4]
            )));
        }
        if let Some(i) = (0..4).find(|&i| v[i].im.abs() > tol) {
            return Err(ModelError::InvalidState(format!("population {i} has imaginary part {}", v[i].im)));
        }
        let s = XState {
            p00: v[0].re,
            p01: v[1].re,
            p10: v[2].re,
            p11: v[3].re,
            alpha: (v[4] + v[5].conj()) * 0.5,
        };
        s.check(tol)?;
        Ok(s)
    }

    /// Dense 4x4 matrix in the basis `|00>, |01>, |10>, |11>`.
    pub fn to_dense(&self) -> Matrix4<Complex64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = self.p00.into();
        m[(1, 1)] = self.p01.into();
        m[(2, 2)] = self.p10.into();
        m[(3, 3)] = self.p11.into();
        m[(1, 2)] = self.alpha;
        m[(2, 1)] = self.alpha.conj();
        m
    }

    /// Trace distance `||rho - sigma||_1 / 2`.
    pub fn trace_distance(&self, other: &XState) -> f64 {
        let d00 = (self.p00 - other.p00).abs();
        let d11 = (self.p11 - other.p11).abs();
        // eigenvalues of the Hermitian 2x2 block [[a, c], [c*, b]]
        let a = self.p01 - other.p01;
        let b = self.p10 - other.p10;
        let c = (self.alpha - other.alpha).norm();
        let mean = 0.5 * (a + b);
        let radius = (0.25 * (a - b).powi(2) + c * c).sqrt();
        0.5 * (d00 + d11 + (mean + radius).abs() + (mean - radius).abs())
    }
}
