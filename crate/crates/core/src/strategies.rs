//! Query strategies choosing which unknown instances to annotate next.

use std::fmt;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::datasets::{DataPool, PoolRole};
use crate::error::{Error, Result};
use crate::math_stats::{log_beta_pdf, weighted_sample_from_log_weights, BetaShape, RngState};

/// Shape used by bell-curve sampling unless configured otherwise.
pub const DEFAULT_BELL_SHAPE: f64 = 10.0;

/// An unknown-pool instance annotated with its predicted probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredInstance {
    pub pool_index: usize,
    pub p_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QueryStrategy {
    Passive,
    Uncertainty,
    BellCurve(BetaShape),
}

impl QueryStrategy {
    pub fn bell_curve(alpha: f64, beta: f64) -> Result<Self> {
        let shape = BetaShape::new(alpha, beta)?;
        shape.ensure_acquisition_shape()?;
        Ok(QueryStrategy::BellCurve(shape))
    }

    pub fn name(&self) -> &'static str {
        match self {
            QueryStrategy::Passive => "passive",
            QueryStrategy::Uncertainty => "uncertainty",
            QueryStrategy::BellCurve(_) => "bellcurve",
        }
    }

    pub fn shape(&self) -> Option<BetaShape> {
        match self {
            QueryStrategy::BellCurve(shape) => Some(*shape),
            _ => None,
        }
    }

    pub fn select(
        &self,
        pool: &[ScoredInstance],
        n: usize,
        rng: &mut RngState,
    ) -> Result<Vec<usize>> {
        match self {
            QueryStrategy::Passive => passive_select(pool, n, rng),
            QueryStrategy::Uncertainty => uncertainty_select(pool, n),
            QueryStrategy::BellCurve(shape) => bellcurve_select(pool, n, *shape, rng),
        }
    }
}

impl fmt::Display for QueryStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryStrategy::BellCurve(s) => write!(f, "bellcurve({}, {})", s.alpha(), s.beta()),
            other => f.write_str(other.name()),
        }
    }
}

fn check_size(pool: &[ScoredInstance], n: usize) -> Result<()> {
    if n > pool.len() {
        return Err(Error::SampleTooLarge {
            requested: n,
            available: pool.len(),
        });
    }
    Ok(())
}

/// Uniform sample without replacement; predicted probabilities are ignored.
pub fn passive_select(pool: &[ScoredInstance], n: usize, rng: &mut RngState) -> Result<Vec<usize>> {
    check_size(pool, n)?;
    Ok(index::sample(rng, pool.len(), n)
        .into_iter()
        .map(|i| pool[i].pool_index)
        .collect())
}

/// The `n` instances closest to `p = 0.5`, ties broken by lower pool index.
pub fn uncertainty_select(pool: &[ScoredInstance], n: usize) -> Result<Vec<usize>> {
    check_size(pool, n)?;
    let mut ranked: Vec<(f64, usize)> = pool
        .iter()
        .map(|s| ((s.p_hat - 0.5).abs(), s.pool_index))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(ranked.into_iter().take(n).map(|(_, i)| i).collect())
}

/// Weighted sample without replacement with weights `Beta(p_hat; α, β)`.
///
/// Weights are handled in log space, so very peaked shapes do not underflow
/// away from 0.5.
pub fn bellcurve_select(
    pool: &[ScoredInstance],
    n: usize,
    shape: BetaShape,
    rng: &mut RngState,
) -> Result<Vec<usize>> {
    check_size(pool, n)?;
    shape.ensure_acquisition_shape()?;
    let log_weights = pool
        .iter()
        .map(|s| log_beta_pdf(s.p_hat, shape))
        .collect::<Result<Vec<_>>>()?;
    Ok(weighted_sample_from_log_weights(&log_weights, n, rng)?
        .into_iter()
        .map(|i| pool[i].pool_index)
        .collect())
}

/// Reveals the labels of `selected` unknown instances and removes them from
/// the pool. Returns `(query_batch, remaining_unknown)`; the batch follows
/// selection order and the remainder keeps its original order.
pub fn annotate(unknown: DataPool, selected: &[usize]) -> Result<(DataPool, DataPool)> {
    let len = unknown.len();
    let mut picked = vec![false; len];
    for &i in selected {
        if i >= len {
            return Err(Error::InvalidIndex { index: i, len });
        }
        if std::mem::replace(&mut picked[i], true) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    let role = unknown.role();
    let mut slots: Vec<Option<_>> = unknown.into_instances().into_iter().map(Some).collect();
    let batch: Vec<_> = selected
        .iter()
        .map(|&i| slots[i].take().expect("validated distinct index"))
        .collect();
    let rest: Vec<_> = slots.into_iter().flatten().collect();
    Ok((
        DataPool::new(PoolRole::Known, batch),
        DataPool::new(role, rest),
    ))
}
