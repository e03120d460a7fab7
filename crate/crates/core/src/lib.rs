//! Steady-state entanglement in a two-qubit quantum thermal machine with
//! parity feedback.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod generators;
pub mod metrics;
pub mod model;
mod ode;
pub mod qfpme;
pub mod steady;
pub mod sweep;

pub use generators::{feedback_error, ErrorProbability, Generator, GeneratorError, GeneratorKind};
pub use metrics::{MetricsError, MetricsRecord};
pub use model::{Bath, BathStatistics, Extended, FeedbackMode, ModelError, RateSet, SystemParams, XState};
pub use steady::{steady_state, SteadyError};
