//! Two-dimensional parameter sweeps producing metric grids, plus the
//! configuration format and the named validation suites.

pub mod config;
#[cfg(feature = "validate")]
pub mod validate;

use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::generators::Generator;
use crate::metrics::MetricsRecord;
use crate::model::{RateSet, SystemParams, XState};
use crate::qfpme::{self, DGrid};
use crate::steady::steady_state;

/// Default heatmap resolution per axis.
pub const DEFAULT_COUNT: usize = 64;
/// Largest axis count accepted for the joint-equation engine unless raised.
pub const QFPME_CAP: usize = 16;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A sweepable scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Epsilon,
    G,
    U,
    GammaC,
    GammaH,
    TC,
    TH,
    GammaDet,
    Lam,
}

impl Param {
    pub const ALL: [Param; 9] =
        [Param::Epsilon, Param::G, Param::U, Param::GammaC, Param::GammaH, Param::TC, Param::TH, Param::GammaDet, Param::Lam];

    pub fn key(self) -> &'static str {
        match self {
            Param::Epsilon => "epsilon",
            Param::G => "g",
            Param::U => "u",
            Param::GammaC => "gamma_c",
            Param::GammaH => "gamma_h",
            Param::TC => "t_c",
            Param::TH => "t_h",
            Param::GammaDet => "gamma_det",
            Param::Lam => "lam",
        }
    }

    /// Copy of `base` with this parameter replaced, validated.
    pub fn apply(self, base: &SystemParams, value: f64) -> Result<SystemParams, crate::model::ModelError> {
        let b = base.to_builder();
        let b = match self {
            Param::Epsilon => b.epsilon(value),
            Param::G => b.g(value),
            Param::U => b.u(value),
            Param::GammaC => b.gamma_c(value),
            Param::GammaH => b.gamma_h(value),
            Param::TC => b.t_c(value),
            Param::TH => b.t_h(value),
            Param::GammaDet => b.gamma_det(value),
            Param::Lam => b.lam(value),
        };
        b.build()
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Param {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Param::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| SweepError::Invalid(format!("unknown parameter `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub scale: Scale,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// Grid values; log axes are evenly spaced in `ln`.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + t * (self.max - self.min),
                    Scale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: String| Err(SweepError::Invalid(format!("axis {}: {msg}", self.param)));
        if self.count == 0 {
            return bad("count must be positive".into());
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if self.count > 1 && !(self.min < self.max) {
            return bad(format!("min {} must be below max {}", self.min, self.max));
        }
        if self.scale == Scale::Log && !(self.min > 0.0) {
            return bad("log axis needs positive bounds".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Concurrence,
    Chsh,
    Fidelity,
    QDot,
}

impl FromStr for Metric {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "concurrence" => Ok(Metric::Concurrence),
            "chsh" => Ok(Metric::Chsh),
            "fidelity" => Ok(Metric::Fidelity),
            "q_dot" => Ok(Metric::QDot),
            _ => Err(SweepError::Invalid(format!("unknown metric `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Reduced,
    Qfpme,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub axis_x: Axis,
    pub axis_y: Axis,
    pub metrics: Vec<Metric>,
    pub engine: Engine,
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
    /// Detector grid nodes for the joint-equation engine.
    pub grid_points: usize,
    /// Largest axis count accepted for the joint-equation engine.
    pub qfpme_cap: usize,
}

impl SweepSpec {
    pub fn new(base: SystemParams, axis_x: Axis, axis_y: Axis) -> SweepSpec {
        SweepSpec {
            base,
            axis_x,
            axis_y,
            metrics: vec![Metric::Concurrence, Metric::Chsh, Metric::Fidelity, Metric::QDot],
            engine: Engine::Reduced,
            workers: None,
            grid_points: qfpme::DEFAULT_POINTS,
            qfpme_cap: QFPME_CAP,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.axis_x.validate()?;
        self.axis_y.validate()?;
        if self.axis_x.param == self.axis_y.param {
            return Err(SweepError::Invalid(format!("both axes sweep `{}`", self.axis_x.param)));
        }
        if self.metrics.is_empty() {
            return Err(SweepError::Invalid("no metrics requested".into()));
        }
        if self.workers == Some(0) {
            return Err(SweepError::Invalid("workers must be positive".into()));
        }
        if self.engine == Engine::Qfpme && self.axis_x.count.max(self.axis_y.count) > self.qfpme_cap {
            return Err(SweepError::Invalid(format!(
                "qfpme sweeps are capped at {0}x{0}; raise qfpme_cap to override",
                self.qfpme_cap
            )));
        }
        Ok(())
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub outcome: Result<MetricsRecord, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Row-major, `x` fastest.
    pub cells: Vec<Cell>,
}

impl SweepResult {
    pub fn cell(&self, ix: usize, iy: usize) -> &Cell {
        &self.cells[iy * self.spec.axis_x.count + ix]
    }

    /// Largest concurrence and its grid indices, ignoring failed cells.
    pub fn max_concurrence(&self) -> Option<(f64, usize, usize)> {
        let nx = self.spec.axis_x.count;
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(k, c)| c.outcome.as_ref().ok().map(|r| (r.concurrence, k % nx, k / nx)))
            .max_by(|a, b| a.0.total_cmp(&b.0))
    }

    /// CSV with columns `x_value, y_value, concurrence, chsh, fidelity,
    /// q_dot_c, error`. Unrequested metrics are left empty, failed points are
    /// `NaN` with the message in `error`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), SweepError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x_value", "y_value", "concurrence", "chsh", "fidelity", "q_dot_c", "error"])?;
        let wants = |m: Metric| self.spec.metrics.contains(&m);
        for c in &self.cells {
            let mut row = vec![fmt_num(c.x), fmt_num(c.y)];
            let (values, error) = match &c.outcome {
                Ok(r) => ([r.concurrence, r.chsh, r.fidelity, r.q_dot_c], String::new()),
                Err(e) => ([f64::NAN; 4], e.clone()),
            };
            for (m, v) in [Metric::Concurrence, Metric::Chsh, Metric::Fidelity, Metric::QDot].into_iter().zip(values) {
                row.push(if wants(m) { fmt_num(v) } else { String::new() });
            }
            row.push(error);
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Twelve significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.11e}")
    }
}

/// Steady state and metrics of a single parameter point.
pub fn evaluate_point(params: &SystemParams, engine: Engine, grid_points: usize) -> Result<(XState, MetricsRecord), String> {
    let state = match engine {
        Engine::Reduced => {
            let gen = Generator::for_params(params).map_err(|e| e.to_string())?;
            steady_state(&gen).map_err(|e| e.to_string())?
        }
        Engine::Qfpme => {
            let grid = DGrid::for_params(params, grid_points).map_err(|e| e.to_string())?;
            let js = qfpme::steady_joint(params, &grid).map_err(|e| e.to_string())?;
            qfpme::marginal_system(&js)
        }
    };
    let record = MetricsRecord::evaluate(&state, &RateSet::from_params(params), params);
    if !record.concurrence.is_finite() || !record.q_dot_c.is_finite() {
        return Err("non-finite metric".into());
    }
    Ok((state, record))
}

/// Evaluate every grid point in parallel. Point failures become error cells.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let xs = spec.axis_x.values();
    let ys = spec.axis_y.values();
    let points: Vec<(f64, f64)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let eval = |&(x, y): &(f64, f64)| {
        let outcome = spec
            .axis_x
            .param
            .apply(&spec.base, x)
            .and_then(|p| spec.axis_y.param.apply(&p, y))
            .map_err(|e| e.to_string())
            .and_then(|p| evaluate_point(&p, spec.engine, spec.grid_points).map(|(_, r)| r));
        Cell { x, y, outcome }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = spec.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| SweepError::Pool(e.to_string()))?;
    let cells = pool.install(|| points.par_iter().map(eval).collect());
    Ok(SweepResult { spec: spec.clone(), cells })
}
