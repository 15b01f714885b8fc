//! Numerical kernels: special functions, a seedable RNG and weighted sampling.

mod rng;
mod sampling;
mod special;

pub use rng::RngState;
pub use sampling::{weighted_sample_from_log_weights, weighted_sample_without_replacement};
pub use special::{
    beta_central_interval, beta_pdf, beta_quantile, log_beta_fn, log_beta_pdf, log_gamma,
    regularized_incomplete_beta, BetaShape, Interval,
};
