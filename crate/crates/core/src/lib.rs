//! Pool-based active learning simulator.
//!
//! Three query strategies are compared on synthetic binary datasets:
//! passive (uniform random), uncertainty (closest to `p = 0.5`) and
//! bell-curve sampling, which draws instances with probability proportional
//! to a `Beta(α, β)` density evaluated at their predicted probability.

pub mod cli;
pub mod datasets;
pub mod error;
pub mod math_stats;
pub mod models;
pub mod plot;
pub mod simulation;
pub mod strategies;

pub use error::{Error, Result};
