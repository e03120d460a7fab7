//! TOML run configuration.
//!
//! ```toml
//! epsilon = 1.0
//! g = 3.5e-4
//! u = "inf"            # or a number, or the bare TOML float inf
//! gamma_c = 1e-3
//! gamma_h = 0.1
//! t_c = 0.01
//! t_h = 1.0
//! gamma_det = 1.0
//! lam = 100.0
//! statistics = "fermion"  # fermion | boson
//! feedback = "general"    # off | general | ideal | u_inf
//! metrics = ["concurrence", "chsh"]
//!
//! [axis_x]
//! param = "g"
//! scale = "log"
//! min = 1e-5
//! max = 1e-2
//! count = 64
//! ```
//!
//! Optional extras: `engine` (`reduced` | `qfpme`), `workers`,
//! `grid_points` and `qfpme_cap`.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::{Axis, Engine, Metric, Scale, SweepError, SweepSpec, DEFAULT_COUNT, QFPME_CAP};
use crate::model::{BathStatistics, Extended, FeedbackMode, ModelError, SystemParams};
use crate::qfpme::DEFAULT_POINTS;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
enum Number {
    Value(f64),
    Word(Word),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Word {
    Inf,
}

impl From<Number> for Extended {
    fn from(n: Number) -> Extended {
        match n {
            Number::Value(v) if v == f64::INFINITY => Extended::Infinite,
            Number::Value(v) => Extended::Finite(v),
            Number::Word(Word::Inf) => Extended::Infinite,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Statistics {
    Fermion,
    Boson,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Feedback {
    Off,
    General,
    Ideal,
    UInf,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ScaleKey {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum EngineKey {
    Reduced,
    Qfpme,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisConfig {
    param: String,
    scale: Option<ScaleKey>,
    min: f64,
    max: f64,
    count: Option<usize>,
}

/// Parsed configuration file. Missing physical keys take the builder
/// defaults of [`SystemParams`].
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    epsilon: Option<f64>,
    g: Option<f64>,
    u: Option<Number>,
    gamma_c: Option<f64>,
    gamma_h: Option<f64>,
    t_c: Option<f64>,
    t_h: Option<f64>,
    gamma_det: Option<f64>,
    lam: Option<Number>,
    statistics: Option<Statistics>,
    feedback: Option<Feedback>,
    axis_x: Option<AxisConfig>,
    axis_y: Option<AxisConfig>,
    metrics: Option<Vec<String>>,
    engine: Option<EngineKey>,
    workers: Option<usize>,
    grid_points: Option<usize>,
    qfpme_cap: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Config::parse(&text)
    }

    pub fn params(&self) -> Result<SystemParams, ConfigError> {
        let mut b = SystemParams::builder();
        if let Some(v) = self.epsilon {
            b = b.epsilon(v);
        }
        if let Some(v) = self.g {
            b = b.g(v);
        }
        if let Some(v) = self.u {
            b = b.u(Extended::from(v));
        }
        if let Some(v) = self.gamma_c {
            b = b.gamma_c(v);
        }
        if let Some(v) = self.gamma_h {
            b = b.gamma_h(v);
        }
        if let Some(v) = self.t_c {
            b = b.t_c(v);
        }
        if let Some(v) = self.t_h {
            b = b.t_h(v);
        }
        if let Some(v) = self.gamma_det {
            b = b.gamma_det(v);
        }
        if let Some(v) = self.lam {
            b = b.lam(Extended::from(v));
        }
        if let Some(s) = self.statistics {
            b = b.statistics(match s {
                Statistics::Fermion => BathStatistics::Fermionic,
                Statistics::Boson => BathStatistics::Bosonic,
            });
        }
        if let Some(f) = self.feedback {
            b = b.feedback(match f {
                Feedback::Off => FeedbackMode::Off,
                Feedback::General => FeedbackMode::General,
                Feedback::Ideal => FeedbackMode::Ideal,
                Feedback::UInf => FeedbackMode::UInfinite,
            });
        }
        Ok(b.build()?)
    }

    pub fn engine(&self) -> Engine {
        match self.engine {
            Some(EngineKey::Qfpme) => Engine::Qfpme,
            _ => Engine::Reduced,
        }
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points.unwrap_or(DEFAULT_POINTS)
    }

    pub fn workers(&self) -> Option<usize> {
        self.workers
    }

    /// Sweep specification; both axes must be present.
    pub fn sweep_spec(&self) -> Result<SweepSpec, ConfigError> {
        let axis = |a: &Option<AxisConfig>, name: &str| -> Result<Axis, ConfigError> {
            let a = a.as_ref().ok_or_else(|| ConfigError::Invalid(format!("missing [{name}] block")))?;
            Ok(Axis {
                param: a.param.parse()?,
                scale: match a.scale {
                    Some(ScaleKey::Log) => Scale::Log,
                    _ => Scale::Linear,
                },
                min: a.min,
                max: a.max,
                count: a.count.unwrap_or(DEFAULT_COUNT),
            })
        };
        let mut spec = SweepSpec::new(self.params()?, axis(&self.axis_x, "axis_x")?, axis(&self.axis_y, "axis_y")?);
        if let Some(m) = &self.metrics {
            spec.metrics = m.iter().map(|s| s.parse::<Metric>()).collect::<Result<_, _>>()?;
        }
        spec.engine = self.engine();
        spec.workers = self.workers;
        spec.grid_points = self.grid_points();
        spec.qfpme_cap = self.qfpme_cap.unwrap_or(QFPME_CAP);
        spec.validate()?;
        Ok(spec)
    }
}

/// Parse `key=value` overrides in the config syntax, e.g. `g=0.1` or
/// `feedback="ideal"`; bare words are quoted automatically.
pub fn apply_overrides(config_text: &str, overrides: &[String]) -> Result<Config, ConfigError> {
    let mut table: toml::Table = toml::from_str(config_text)?;
    for o in overrides {
        let (key, value) =
            o.split_once('=').ok_or_else(|| ConfigError::Invalid(format!("override `{o}` is not key=value")))?;
        let key = key.trim();
        let value = value.trim();
        let parsed: toml::Table = toml::from_str(&format!("v = {value}"))
            .or_else(|_| toml::from_str(&format!("v = \"{value}\"")))?;
        table.insert(key.to_string(), parsed["v"].clone());
    }
    Ok(table.try_into()?)
}
