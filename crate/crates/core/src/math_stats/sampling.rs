//! Weighted sampling without replacement by exponentiated keys.
//!
//! Every index with weight `w > 0` draws `u ~ U[0, 1)` and receives the key
//! `u^(1/w)`; the `n` largest keys win. Keys are compared in the equivalent
//! form `ln(-ln u) - ln w` (smaller wins), which stays finite for weights
//! that would under- or overflow as plain floats.

use rand::seq::index;

use super::rng::RngState;
use crate::error::{Error, Result};

/// Draws `n` distinct indices with probability driven by `weights`.
///
/// If fewer than `n` weights are positive, the remaining slots are filled
/// uniformly at random from the zero-weight indices. Output order is
/// descending key, then fill order.
pub fn weighted_sample_without_replacement(
    weights: &[f64],
    n: usize,
    rng: &mut RngState,
) -> Result<Vec<usize>> {
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "weight {i} must be finite and nonnegative, got {w}"
            )));
        }
    }
    let log_weights: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    sample_by_log_weight(&log_weights, n, rng)
}

/// Same selection rule as [`weighted_sample_without_replacement`], taking
/// natural-log weights. `-inf` marks a zero weight.
pub fn weighted_sample_from_log_weights(
    log_weights: &[f64],
    n: usize,
    rng: &mut RngState,
) -> Result<Vec<usize>> {
    for (i, &lw) in log_weights.iter().enumerate() {
        if lw.is_nan() || lw == f64::INFINITY {
            return Err(Error::InvalidArgument(format!(
                "log weight {i} must be a number below +inf, got {lw}"
            )));
        }
    }
    sample_by_log_weight(log_weights, n, rng)
}

fn sample_by_log_weight(log_weights: &[f64], n: usize, rng: &mut RngState) -> Result<Vec<usize>> {
    if n > log_weights.len() {
        return Err(Error::SampleTooLarge {
            requested: n,
            available: log_weights.len(),
        });
    }

    let mut keyed = Vec::with_capacity(log_weights.len());
    let mut zero_weight = Vec::new();
    for (i, &lw) in log_weights.iter().enumerate() {
        if lw == f64::NEG_INFINITY {
            zero_weight.push(i);
        } else {
            let u = rng.next_uniform();
            keyed.push(((-u.ln()).ln() - lw, i));
        }
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut chosen: Vec<usize> = keyed.iter().take(n).map(|&(_, i)| i).collect();
    let deficit = n - chosen.len();
    if deficit > 0 {
        let picks = index::sample(rng, zero_weight.len(), deficit);
        chosen.extend(picks.iter().map(|j| zero_weight[j]));
    }
    Ok(chosen)
}
