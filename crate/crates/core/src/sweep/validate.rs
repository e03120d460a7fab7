//! Named validation suites. Each suite runs a fixed, seeded set of checks
//! and reports measured values next to their targets.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use argmin::core::{CostFunction, Error as ArgminError, Executor};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{run_sweep, Axis, Param, Scale, SweepError, SweepSpec};
use crate::generators::{
    build_feedback_general, build_feedback_ideal, build_feedback_u_infinite, build_free, build_hot_decoupled,
    feedback_error, Generator, Liouvillian,
};
use crate::metrics::{
    chsh_horodecki, chsh_x, concurrence_wootters, concurrence_x, heat_current_general, teleportation_fidelity,
};
use crate::model::{Bath, BathStatistics, Extended, FeedbackMode, RateSet, SystemParams, XState};
use crate::qfpme::{self, DGrid};
use crate::steady::{stationary_ideal, stationary_u_infinite, steady_state};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    IdealOptimum,
    HeatCurrent,
    ClosedForm,
    Oracles,
    QfpmeConsistency,
    HeatmapRidge,
    Properties,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::IdealOptimum,
        Suite::HeatCurrent,
        Suite::ClosedForm,
        Suite::Oracles,
        Suite::QfpmeConsistency,
        Suite::HeatmapRidge,
        Suite::Properties,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::IdealOptimum => "ideal-optimum",
            Suite::HeatCurrent => "heat-current",
            Suite::ClosedForm => "closed-form",
            Suite::Oracles => "oracles",
            Suite::QfpmeConsistency => "qfpme-consistency",
            Suite::HeatmapRidge => "heatmap-ridge",
            Suite::Properties => "properties",
        }
    }

    /// Wall-clock budget.
    pub fn budget(self) -> Duration {
        Duration::from_secs(match self {
            Suite::IdealOptimum => 1,
            Suite::HeatCurrent | Suite::ClosedForm => 5,
            Suite::Oracles => 10,
            Suite::QfpmeConsistency => 300,
            Suite::HeatmapRidge => 30,
            Suite::Properties => 120,
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            SweepError::Invalid(format!("unknown suite `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Check {
        Check { name: name.to_string(), passed, detail }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        write!(f, "{} {} ({:.2?})", if self.passed() { "PASS" } else { "FAIL" }, self.suite, self.elapsed)
    }
}

pub fn run_suite(suite: Suite) -> Report {
    let start = Instant::now();
    let mut checks = match suite {
        Suite::IdealOptimum => ideal_optimum(),
        Suite::HeatCurrent => heat_current(),
        Suite::ClosedForm => closed_form(),
        Suite::Oracles => oracles(),
        Suite::QfpmeConsistency => qfpme_consistency(),
        Suite::HeatmapRidge => heatmap_ridge(),
        Suite::Properties => properties(),
    };
    let elapsed = start.elapsed();
    checks.push(Check::new(
        "runtime",
        elapsed < suite.budget(),
        format!("{elapsed:.2?} (budget {:?})", suite.budget()),
    ));
    Report { suite, checks, elapsed }
}

fn within(name: &str, value: f64, target: f64, tol: f64) -> Check {
    Check::new(name, (value - target).abs() <= tol, format!("{value:.9} vs {target:.9} (tol {tol:e})"))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (r.random_range(lo.ln()..hi.ln())).exp()
}

fn statistics(r: &mut ChaCha8Rng) -> BathStatistics {
    if r.random_bool(0.5) {
        BathStatistics::Fermionic
    } else {
        BathStatistics::Bosonic
    }
}

/// Random parameters under ideal operation.
fn draw_ideal(r: &mut ChaCha8Rng) -> SystemParams {
    SystemParams::builder()
        .epsilon(r.random_range(0.5..2.0))
        .g(log_uniform(r, 1e-3, 1.0))
        .u(r.random_range(0.0..5.0))
        .gamma_c(log_uniform(r, 1e-3, 1.0))
        .gamma_h(log_uniform(r, 1e-3, 10.0))
        .t_h(log_uniform(r, 0.1, 10.0))
        .statistics(statistics(r))
        .feedback(FeedbackMode::Ideal)
        .build()
        .expect("ideal draw")
}

/// Random parameters for the infinite-interaction generator with
/// `eta` between about 1e-5 and 0.4.
fn draw_u_infinite(r: &mut ChaCha8Rng) -> SystemParams {
    let t_h = log_uniform(r, 0.1, 10.0);
    let gamma_det = log_uniform(r, 0.1, 10.0);
    SystemParams::builder()
        .epsilon(r.random_range(0.5..2.0))
        .g(log_uniform(r, 1e-3, 1.0))
        .u(Extended::Infinite)
        .gamma_c(log_uniform(r, 1e-3, 1.0))
        .gamma_h(log_uniform(r, 1e-3, 10.0))
        .t_h(t_h)
        .t_c(r.random_range(0.0..0.5) * t_h)
        .gamma_det(gamma_det)
        .lam(gamma_det * log_uniform(r, 0.01, 1.0))
        .statistics(statistics(r))
        .feedback(FeedbackMode::UInfinite)
        .build()
        .expect("u_inf draw")
}

/// Any feedback mode, finite couplings; used by the property checks.
fn draw_general(r: &mut ChaCha8Rng) -> SystemParams {
    let t_h = log_uniform(r, 0.05, 10.0);
    let gamma_det = log_uniform(r, 0.1, 10.0);
    SystemParams::builder()
        .epsilon(r.random_range(0.5..2.0))
        .g(log_uniform(r, 1e-3, 1.0))
        .u(if r.random_bool(0.2) { Extended::Infinite } else { Extended::Finite(r.random_range(0.0..5.0)) })
        .gamma_c(log_uniform(r, 1e-3, 1.0))
        .gamma_h(log_uniform(r, 1e-3, 10.0))
        .t_h(t_h)
        .t_c(r.random_range(0.0..1.0) * t_h)
        .gamma_det(gamma_det)
        .lam(gamma_det * log_uniform(r, 1e-3, 10.0))
        .statistics(statistics(r))
        .feedback(if r.random_bool(0.5) { FeedbackMode::General } else { FeedbackMode::Off })
        .build()
        .expect("general draw")
}

fn random_x_state(r: &mut ChaCha8Rng) -> XState {
    let w: [f64; 4] = std::array::from_fn(|_| r.random::<f64>());
    let s: f64 = w.iter().sum();
    let (p00, p01, p10, p11) = (w[0] / s, w[1] / s, w[2] / s, w[3] / s);
    let alpha = Complex64::from_polar(r.random::<f64>() * (p01 * p10).sqrt(), r.random_range(0.0..std::f64::consts::TAU));
    XState { p00, p01, p10, p11, alpha }
}

fn max_dev(a: &XState, b: &XState) -> f64 {
    (a.vectorize() - b.vectorize()).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

fn ideal_optimum() -> Vec<Check> {
    // Gamma_C0^- = Gamma_C at T_C = 0; Gamma_H0^+ = Gamma_H / (e^{1/T_H} + 1)
    let gamma_c = 1.0;
    let t_h = 1.0f64;
    let gamma_h = 1e6 * gamma_c * ((1.0 / t_h).exp() + 1.0);
    let p = SystemParams::builder()
        .g(gamma_c / (2.0 * std::f64::consts::SQRT_2))
        .gamma_c(gamma_c)
        .gamma_h(gamma_h)
        .t_h(t_h)
        .feedback(FeedbackMode::Ideal)
        .build()
        .expect("ideal optimum parameters");
    let state = match build_feedback_ideal(&p).map_err(|e| e.to_string()).and_then(|g| steady_state(&g).map_err(|e| e.to_string()))
    {
        Ok(s) => s,
        Err(e) => return vec![Check::new("steady state", false, e)],
    };
    vec![
        within("concurrence", concurrence_x(&state), std::f64::consts::FRAC_1_SQRT_2, 1e-3),
        within("chsh", chsh_x(&state), 6f64.sqrt(), 2e-3),
        within("fidelity", teleportation_fidelity(&state), (4.0 + std::f64::consts::SQRT_2) / 6.0, 1e-3),
    ]
}

/// Worst relative deviation of `q_dot_c` from `eps g C` over the draws.
fn heat_ratio_worst(draws: &[SystemParams]) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for p in draws {
        let gen = Generator::for_params(p).map_err(|e| e.to_string())?;
        let s = steady_state(&gen).map_err(|e| e.to_string())?;
        let q = heat_current_general(&s, &RateSet::from_params(p), p);
        let expected = p.epsilon() * p.g() * concurrence_x(&s);
        if !q.steady {
            return Err("state flagged as non-stationary".into());
        }
        worst = worst.max((q.q_dot_c - expected).abs() / expected.abs());
    }
    Ok(worst)
}

fn heat_current() -> Vec<Check> {
    let mut r = rng(11);
    let ideal: Vec<SystemParams> = (0..100).map(|_| draw_ideal(&mut r)).collect();
    let uinf: Vec<SystemParams> = (0..100).map(|_| draw_u_infinite(&mut r)).collect();
    let mut checks = Vec::new();
    for (name, draws) in [("ideal: Q = eps g C", ideal), ("u_inf: Q = eps g C", uinf)] {
        checks.push(match heat_ratio_worst(&draws) {
            Ok(w) => Check::new(name, w <= 1e-9, format!("worst relative deviation {w:.3e} over {} draws", draws.len())),
            Err(e) => Check::new(name, false, e),
        });
    }
    let etas: Vec<f64> = {
        let mut r = rng(11);
        (0..100).for_each(|_| {
            draw_ideal(&mut r);
        });
        (0..100)
            .map(|_| {
                let p = draw_u_infinite(&mut r);
                feedback_error(p.lam(), p.gamma_det()).map(|e| e.value()).unwrap_or(f64::NAN)
            })
            .collect()
    };
    let (lo, hi) = etas.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &e| (a.min(e), b.max(e)));
    checks.push(Check::new("u_inf eta range", lo > 0.0 && hi < 0.4, format!("eta in [{lo:.3e}, {hi:.3}]")));
    checks
}

fn closed_form() -> Vec<Check> {
    let mut r = rng(23);
    let mut checks = Vec::new();
    let mut worst = (0.0f64, 0.0f64);
    let mut failure = None;
    for _ in 0..200 {
        let p = draw_ideal(&mut r);
        let rates = RateSet::from_params(&p);
        match (build_feedback_ideal(&p).map_err(|e| e.to_string()).and_then(|g| steady_state(&g).map_err(|e| e.to_string())), stationary_ideal(&rates, p.g())) {
            (Ok(a), Ok(b)) => worst.0 = worst.0.max(max_dev(&a, &b)),
            (a, b) => failure = Some(format!("{:?} / {:?}", a.err(), b.err())),
        }
        let q = draw_u_infinite(&mut r);
        let rates = RateSet::from_params(&q);
        let eta = feedback_error(q.lam(), q.gamma_det()).expect("finite lam");
        match (build_feedback_u_infinite(&q).map_err(|e| e.to_string()).and_then(|g| steady_state(&g).map_err(|e| e.to_string())), stationary_u_infinite(&rates, q.g(), eta)) {
            (Ok(a), Ok(b)) => worst.1 = worst.1.max(max_dev(&a, &b)),
            (a, b) => failure = Some(format!("{:?} / {:?}", a.err(), b.err())),
        }
    }
    checks.push(Check::new("ideal kernel vs closed form", worst.0 <= 1e-9, format!("max deviation {:.3e} over 200 draws", worst.0)));
    checks.push(Check::new("u_inf kernel vs closed form", worst.1 <= 1e-9, format!("max deviation {:.3e} over 200 draws", worst.1)));
    if let Some(f) = failure {
        checks.push(Check::new("all draws solvable", false, f));
    }
    checks
}

fn oracles() -> Vec<Check> {
    let mut r = rng(37);
    let (mut wc, mut wb) = (0.0f64, 0.0f64);
    let mut err = None;
    for _ in 0..500 {
        let s = random_x_state(&mut r);
        let rho = s.to_dense();
        match concurrence_wootters(&rho) {
            Ok(c) => wc = wc.max((c - concurrence_x(&s)).abs()),
            Err(e) => err = Some(e.to_string()),
        }
        wb = wb.max((chsh_horodecki(&rho) - chsh_x(&s)).abs());
    }
    let mut checks = vec![
        Check::new("concurrence vs Wootters", wc <= 1e-9, format!("max difference {wc:.3e} over 500 states")),
        Check::new("CHSH vs Horodecki", wb <= 1e-9, format!("max difference {wb:.3e} over 500 states")),
    ];
    if let Some(e) = err {
        checks.push(Check::new("oracle inputs valid", false, e));
    }
    checks
}

/// Trace distance between the joint-equation marginal and the reduced
/// steady state, with the detector lobes, at `ratio` times the fastest
/// system rate.
pub fn qfpme_point(base: &SystemParams, ratio: f64, points: usize) -> Result<(f64, qfpme::DetectorLobes, XState, f64), String> {
    let rates = RateSet::from_params(base);
    let gamma = ratio * rates.max_rate().max(base.g());
    let p = base.to_builder().gamma_det(gamma).lam(100.0 * gamma).build().map_err(|e| e.to_string())?;
    let grid = DGrid::for_params(&p, points).map_err(|e| e.to_string())?;
    let js = qfpme::steady_joint(&p, &grid).map_err(|e| e.to_string())?;
    let reduced = qfpme::reduced_steady(&p).map_err(|e| e.to_string())?;
    let marginal = qfpme::marginal_system(&js);
    Ok((marginal.trace_distance(&reduced), qfpme::detector_lobes(&js), marginal, grid.spacing()))
}

/// Parameters of the lambda / T_C panels at a given hot rate.
pub fn panel_params(gamma_h: f64, t_c: f64, lam: Extended) -> SystemParams {
    let gamma_c = 1e-3;
    SystemParams::builder()
        .g(gamma_c / (2.0 * std::f64::consts::SQRT_2))
        .gamma_c(gamma_c)
        .gamma_h(gamma_h)
        .t_c(t_c)
        .t_h(1.0)
        .gamma_det(1.0)
        .lam(lam)
        .feedback(FeedbackMode::General)
        .build()
        .expect("panel parameters")
}

fn qfpme_consistency() -> Vec<Check> {
    let base = panel_params(0.1, 0.05, Extended::Finite(100.0));
    let (near, far) = match (qfpme_point(&base, 100.0, qfpme::DEFAULT_POINTS), qfpme_point(&base, 10.0, qfpme::DEFAULT_POINTS)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => return vec![Check::new("joint steady state", false, format!("{:?} / {:?}", a.err(), b.err()))],
    };
    let (dist, lobes, marginal, h) = near;
    let odd = marginal.p01 + marginal.p10;
    let even = marginal.p00 + marginal.p11;
    vec![
        Check::new("trace distance at 100x", dist <= 1e-2, format!("{dist:.3e} (limit 1e-2)")),
        Check::new(
            "peaks at -1 and +1",
            (lobes.negative_peak + 1.0).abs() <= h && (lobes.positive_peak - 1.0).abs() <= h,
            format!("{:.4} and {:.4}, cell {h:.4}", lobes.negative_peak, lobes.positive_peak),
        ),
        Check::new(
            "lobe weights",
            (lobes.negative_weight - odd).abs() <= 2e-2 && (lobes.positive_weight - even).abs() <= 2e-2,
            format!("{:.5}/{:.5} vs {odd:.5}/{even:.5}", lobes.negative_weight, lobes.positive_weight),
        ),
        Check::new(
            "slower detector is worse",
            far.0 > dist,
            format!("{:.3e} at 10x vs {dist:.3e} at 100x", far.0),
        ),
    ]
}

/// Parameters of the g / T_H heatmap.
pub fn heatmap_spec(count: usize) -> SweepSpec {
    let base = SystemParams::builder()
        .g(1e-3)
        .u(100.0)
        .gamma_c(1e-3)
        .gamma_h(0.1)
        .t_c(0.01)
        .t_h(1.0)
        .gamma_det(1.0)
        .lam(100.0)
        .feedback(FeedbackMode::General)
        .build()
        .expect("heatmap parameters");
    SweepSpec::new(
        base,
        Axis { param: Param::G, scale: Scale::Log, min: 1e-5, max: 1e-2, count },
        Axis { param: Param::TH, scale: Scale::Log, min: 0.1, max: 10.0, count },
    )
}

fn heatmap_ridge() -> Vec<Check> {
    let spec = heatmap_spec(super::DEFAULT_COUNT);
    let result = match run_sweep(&spec) {
        Ok(r) => r,
        Err(e) => return vec![Check::new("sweep", false, e.to_string())],
    };
    let failures = result.cells.iter().filter(|c| c.outcome.is_err()).count();
    let Some((c_max, ix, _)) = result.max_concurrence() else {
        return vec![Check::new("sweep", false, "no successful cells".into())];
    };
    let g_best = spec.axis_x.values()[ix];
    let cm0 = RateSet::from_params(&spec.base).minus(Bath::Cold, 0);
    let g_star = cm0 / (2.0 * std::f64::consts::SQRT_2);
    let cell = (spec.axis_x.max / spec.axis_x.min).ln() / (spec.axis_x.count - 1) as f64;
    let offset = (g_best / g_star).ln().abs() / cell;
    vec![
        Check::new("all cells solved", failures == 0, format!("{failures} failed cells")),
        Check::new("maximum concurrence", c_max >= 0.68, format!("{c_max:.6} (bound 0.68)")),
        Check::new(
            "maximum on the optimal-g line",
            offset <= 1.0,
            format!("g = {g_best:.4e} vs {g_star:.4e}, {offset:.2} cells"),
        ),
    ]
}

fn column_trace_residual(m: &Liouvillian) -> f64 {
    (0..6).map(|j| (0..4).map(|i| m[(i, j)]).sum::<Complex64>().norm()).fold(0.0, f64::max)
}

fn spectrum_bound(m: &Liouvillian) -> f64 {
    let (_, t) = m.schur().unpack();
    t.diagonal().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

struct NoFeedback {
    statistics: BathStatistics,
    u: Option<Extended>,
}

impl NoFeedback {
    fn concurrence(&self, x: &[f64]) -> f64 {
        let v: Vec<f64> = x.iter().map(|t| t.clamp(-14.0, 14.0).exp()).collect();
        let u = self.u.unwrap_or(Extended::Finite(v.get(5).copied().unwrap_or(0.0)));
        let p = SystemParams::builder()
            .g(v[0])
            .gamma_c(v[1])
            .gamma_h(v[2])
            .t_c(v[3])
            .t_h(v[4])
            .u(u)
            .statistics(self.statistics)
            .build();
        p.ok()
            .and_then(|p| steady_state(&build_free(&p)).ok())
            .map(|s| concurrence_x(&s))
            .unwrap_or(0.0)
    }
}

impl CostFunction for NoFeedback {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, x: &Self::Param) -> Result<f64, ArgminError> {
        Ok(-self.concurrence(x))
    }
}

/// Best free-machine concurrence from Nelder-Mead restarts over log
/// parameters `(g, Gamma_C, Gamma_H, T_C, T_H[, U])`.
pub fn no_feedback_optimum(statistics: BathStatistics, u: Option<Extended>, restarts: usize, seed: u64) -> f64 {
    let dim = if u.is_some() { 5 } else { 6 };
    let mut r = rng(seed);
    let starts: Vec<Vec<f64>> = (0..restarts).map(|_| (0..dim).map(|_| r.random_range(-5.0..3.0)).collect()).collect();
    starts
        .par_iter()
        .map(|x0| {
            let problem = NoFeedback { statistics, u };
            let mut simplex = vec![x0.clone()];
            for i in 0..dim {
                let mut v = x0.clone();
                v[i] += 1.0;
                simplex.push(v);
            }
            let solver = NelderMead::new(simplex).with_sd_tolerance(1e-12).expect("tolerance");
            Executor::new(problem, solver)
                .configure(|s| s.max_iters(3000))
                .run()
                .ok()
                .and_then(|res| res.state().get_best_cost().is_finite().then(|| -res.state().get_best_cost()))
                .unwrap_or(0.0)
        })
        .reduce(|| 0.0, f64::max)
}

fn properties() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut r = rng(53);
    let draws: Vec<SystemParams> = (0..200).map(|_| draw_general(&mut r)).collect();

    let (mut trace, mut spectrum, mut rates_err) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    let mut steady_bad = Vec::new();
    for p in &draws {
        let mut gens = vec![build_free(p).matrix, build_hot_decoupled(p).matrix];
        gens.push(build_feedback_general(p).expect("finite lam").matrix);
        if p.u().is_infinite() {
            gens.push(build_feedback_u_infinite(p).expect("u inf").matrix);
        }
        let ideal = p.to_builder().t_c(0.0).lam(Extended::Infinite).feedback(FeedbackMode::Ideal).build().expect("ideal");
        gens.push(build_feedback_ideal(&ideal).expect("ideal").matrix);
        for m in &gens {
            let scale = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            trace = trace.max(column_trace_residual(m) / scale);
            spectrum = spectrum.max(spectrum_bound(m) / scale);
        }
        let rates = RateSet::from_params(p);
        for bath in [Bath::Cold, Bath::Hot] {
            let gamma = p.bare_rate(bath);
            let t = p.temperature(bath);
            for l in 0..2 {
                let (plus, minus) = (rates.plus(bath, l), rates.minus(bath, l));
                let e = match (l, p.u()) {
                    (0, _) => p.epsilon(),
                    (_, Extended::Finite(u)) => p.epsilon() + u,
                    (_, Extended::Infinite) => f64::INFINITY,
                };
                let rule = match p.statistics() {
                    BathStatistics::Fermionic => (plus + minus - gamma).abs() / gamma,
                    BathStatistics::Bosonic if e.is_finite() => (minus - plus - gamma).abs() / gamma,
                    BathStatistics::Bosonic => (minus - gamma).abs() / gamma,
                };
                let balance = if t > 0.0 && e.is_finite() {
                    let b = (-e / t).exp();
                    if b > 1e-250 {
                        (plus / minus - b).abs() / b
                    } else {
                        0.0
                    }
                } else {
                    plus
                };
                rates_err = rates_err.max(rule).max(balance);
            }
        }
        match Generator::for_params(p).map_err(|e| e.to_string()).and_then(|g| steady_state(&g).map_err(|e| e.to_string())) {
            Ok(s) => {
                if let Err(e) = s.check(1e-9) {
                    steady_bad.push(e.to_string());
                }
            }
            Err(e) => steady_bad.push(e),
        }
    }
    checks.push(Check::new("trace preservation", trace <= 1e-12, format!("max column residual {trace:.2e} (relative)")));
    checks.push(Check::new("rate rules", rates_err <= 1e-12, format!("max relative violation {rates_err:.2e}")));
    checks.push(Check::new("spectrum nonpositive", spectrum <= 1e-10, format!("max real part {spectrum:.2e} (relative)")));
    checks.push(Check::new(
        "steady states are density matrices",
        steady_bad.is_empty(),
        if steady_bad.is_empty() { format!("{} draws", draws.len()) } else { steady_bad.join("; ") },
    ));

    // determinism of the CSV output
    let mut spec = heatmap_spec(12);
    let mut bytes = Vec::new();
    for workers in [1, 4] {
        spec.workers = Some(workers);
        let mut buf = Vec::new();
        let ok = run_sweep(&spec).and_then(|res| res.write_csv(&mut buf)).is_ok();
        bytes.push((ok, buf));
    }
    checks.push(Check::new(
        "CSV determinism",
        bytes.iter().all(|b| b.0) && bytes[0].1 == bytes[1].1,
        format!("{} bytes, 1 vs 4 workers", bytes[0].1.len()),
    ));

    checks.extend(trend_audit());

    let boson = no_feedback_optimum(BathStatistics::Bosonic, Some(Extended::Finite(0.0)), 48, 7);
    let fermion_inf = no_feedback_optimum(BathStatistics::Fermionic, Some(Extended::Infinite), 48, 8);
    let fermion_free = no_feedback_optimum(BathStatistics::Fermionic, None, 48, 9);
    let fermion = fermion_inf.max(fermion_free);
    checks.push(within("no-feedback optimum, bosonic", boson, 0.09, 0.03));
    checks.push(within("no-feedback optimum, fermionic", fermion, 0.25, 0.03));
    checks
}

/// Monotonicity over the lambda / T_C panels and dominance over the
/// feedback-free machine.
fn trend_audit() -> Vec<Check> {
    const SLACK: f64 = 1e-7;
    let lams: Vec<f64> = Axis { param: Param::Lam, scale: Scale::Log, min: 1e-3, max: 1e2, count: 24 }.values();
    let t_cs: Vec<f64> = Axis { param: Param::TC, scale: Scale::Linear, min: 0.0, max: 0.5, count: 24 }.values();
    let conc = |p: &SystemParams| {
        Generator::for_params(p).ok().and_then(|g| steady_state(&g).ok()).map(|s| concurrence_x(&s)).unwrap_or(f64::NAN)
    };
    let mut checks = Vec::new();
    for ratio in [1.0, 3.0, 100.0] {
        let gamma_h = ratio * 1e-3;
        let grid: Vec<Vec<f64>> = t_cs
            .par_iter()
            .map(|&t_c| lams.iter().map(|&l| conc(&panel_params(gamma_h, t_c, Extended::Finite(l)))).collect())
            .collect();
        let nan = grid.iter().flatten().any(|c| c.is_nan());
        let worst_tc = (1..t_cs.len())
            .flat_map(|i| (0..lams.len()).map(move |j| (i, j)))
            .map(|(i, j)| grid[i][j] - grid[i - 1][j])
            .fold(f64::NEG_INFINITY, f64::max);
        let worst_lam = (0..t_cs.len())
            .flat_map(|i| (1..lams.len()).map(move |j| (i, j)))
            .map(|(i, j)| grid[i][j - 1] - grid[i][j])
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::new(
            &format!("Gamma_H = {ratio} Gamma_C: non-increasing in T_C"),
            !nan && worst_tc <= SLACK,
            format!("largest increase {worst_tc:.2e}"),
        ));
        checks.push(Check::new(
            &format!("Gamma_H = {ratio} Gamma_C: non-decreasing in lambda"),
            !nan && worst_lam <= SLACK,
            format!("largest decrease {worst_lam:.2e}"),
        ));
    }
    let mut margin = f64::INFINITY;
    for &t_c in t_cs.iter().filter(|&&t| t <= 0.1) {
        let fb = conc(&panel_params(0.1, t_c, Extended::Finite(100.0)));
        let off = conc(&panel_params(0.1, t_c, Extended::Finite(100.0)).to_builder().feedback(FeedbackMode::Off).build().expect("off"));
        margin = margin.min(fb - off);
    }
    checks.push(Check::new("feedback beats no feedback for T_C <= 0.1", margin > 0.0, format!("smallest gain {margin:.4}")));
    checks
}
