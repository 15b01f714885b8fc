//! The pool-based query loop and multi-seed experiment aggregation.
//!
//! One run: generate a population, split it into known / unknown / test
//! pools, fit a prior model, then repeat `num_queries` times:
//! score the unknown pool, select a batch, reveal its labels, merge it into
//! the known pool, refit and evaluate on the test pool.
//!
//! All randomness of a run comes from its seed through fixed sub-streams:
//! population generation, pool splitting and each query's selection read
//! separate streams. Runs that differ only in strategy therefore see the
//! same pools.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{split_pools, DataPool, Family, GeneratorConfig, DEFAULT_CIRCLES_NOISE};
use crate::error::{Error, Result};
use crate::math_stats::RngState;
use crate::models::{ModelSpec, ProbabilisticClassifier};
use crate::strategies::{annotate, QueryStrategy, ScoredInstance};

const STREAM_GENERATE: u64 = 1;
const STREAM_SPLIT: u64 = 2;
const STREAM_QUERY_BASE: u64 = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub family: Family,
    pub aur_param: f64,
    pub noise_std: f64,
    pub strategy: QueryStrategy,
    pub model: ModelSpec,
    pub known_size: usize,
    pub unknown_size: usize,
    pub test_size: usize,
    pub batch_n: usize,
    pub num_queries: usize,
    pub seed: u64,
}

impl SimulationConfig {
    /// 10 / 1000 / 1000 pools, batches of 5, 20 queries, knn (k = 5).
    pub fn new(family: Family, aur_param: f64, strategy: QueryStrategy) -> Self {
        Self {
            family,
            aur_param,
            noise_std: DEFAULT_CIRCLES_NOISE,
            strategy,
            model: ModelSpec::default(),
            known_size: 10,
            unknown_size: 1000,
            test_size: 1000,
            batch_n: 5,
            num_queries: 20,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.known_size == 0 || self.unknown_size == 0 || self.test_size == 0 {
            return Err(Error::Config("pool sizes must be positive".into()));
        }
        if self.batch_n == 0 {
            return Err(Error::Config("batch_n must be positive".into()));
        }
        let budget = self
            .batch_n
            .checked_mul(self.num_queries)
            .ok_or_else(|| Error::Config("query budget overflows".into()))?;
        if budget > self.unknown_size {
            return Err(Error::Config(format!(
                "batch_n * num_queries = {budget} exceeds unknown_size = {}",
                self.unknown_size
            )));
        }
        if let Some(shape) = self.strategy.shape() {
            shape.ensure_acquisition_shape()?;
        }
        self.model.validate()
    }

    /// Population size: the three pools, rounded up to an even count.
    pub fn population_size(&self) -> usize {
        let total = self.known_size + self.unknown_size + self.test_size;
        total + total % 2
    }

    pub fn generator(&self) -> GeneratorConfig {
        GeneratorConfig {
            family: self.family,
            population_size: self.population_size(),
            aur_param: self.aur_param,
            noise_std: self.noise_std,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub query_index: usize,
    pub known_size: usize,
    pub test_accuracy: f64,
    /// Predicted probabilities of the batch at selection time.
    pub selected_p_hats: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: SimulationConfig,
    /// Index 0 is the prior model, before any query.
    pub records: Vec<QueryRecord>,
}

impl RunResult {
    pub fn final_accuracy(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.test_accuracy)
    }
}

/// State visible to an observer after each query (and once for the prior).
pub struct QueryEvent<'a> {
    pub query_index: usize,
    pub known: &'a DataPool,
    pub unknown: &'a DataPool,
    pub test: &'a DataPool,
    /// Unknown pool as scored before selection; empty at query 0.
    pub scored: &'a [ScoredInstance],
    /// Pool indices picked from `scored`.
    pub selected: &'a [usize],
    /// Instance ids of the annotated batch.
    pub selected_ids: &'a [usize],
}

pub fn evaluate_accuracy(classifier: &ProbabilisticClassifier, test: &DataPool) -> Result<f64> {
    let instances = test.instances()?;
    if instances.is_empty() {
        return Err(Error::EmptyPool("test pool"));
    }
    let mut correct = 0usize;
    for inst in instances {
        if classifier.predict_label(&inst.features)? == inst.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / instances.len() as f64)
}

pub fn run_query_loop(config: &SimulationConfig) -> Result<RunResult> {
    run_query_loop_observed(config, |_| {})
}

/// Runs the query loop, calling `observe` with the pool state after each query.
pub fn run_query_loop_observed<F>(config: &SimulationConfig, mut observe: F) -> Result<RunResult>
where
    F: FnMut(&QueryEvent<'_>),
{
    config.validate()?;
    let population = config
        .generator()
        .generate(&mut RngState::derive(config.seed, STREAM_GENERATE))?;
    let (mut known, mut unknown, test) = split_pools(
        population,
        (config.known_size, config.unknown_size, config.test_size),
        &mut RngState::derive(config.seed, STREAM_SPLIT),
    )?;

    let mut model = ProbabilisticClassifier::new(config.model)?;
    model.fit(&known)?;
    let mut records = Vec::with_capacity(config.num_queries + 1);
    records.push(QueryRecord {
        query_index: 0,
        known_size: known.len(),
        test_accuracy: evaluate_accuracy(&model, &test)?,
        selected_p_hats: Vec::new(),
    });
    observe(&QueryEvent {
        query_index: 0,
        known: &known,
        unknown: &unknown,
        test: &test,
        scored: &[],
        selected: &[],
        selected_ids: &[],
    });

    for q in 1..=config.num_queries {
        let scored = unknown
            .features_iter()
            .enumerate()
            .map(|(pool_index, x)| {
                Ok(ScoredInstance {
                    pool_index,
                    p_hat: model.predict_proba(x)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rng = RngState::derive(config.seed, STREAM_QUERY_BASE + q as u64);
        let selected = config.strategy.select(&scored, config.batch_n, &mut rng)?;
        let selected_p_hats = selected.iter().map(|&i| scored[i].p_hat).collect();

        let (batch, rest) = annotate(unknown, &selected)?;
        let selected_ids = batch.ids();
        unknown = rest;
        known.merge(batch)?;
        model.fit(&known)?;

        records.push(QueryRecord {
            query_index: q,
            known_size: known.len(),
            test_accuracy: evaluate_accuracy(&model, &test)?,
            selected_p_hats,
        });
        observe(&QueryEvent {
            query_index: q,
            known: &known,
            unknown: &unknown,
            test: &test,
            scored: &scored,
            selected: &selected,
            selected_ids: &selected_ids,
        });
    }

    Ok(RunResult {
        config: config.clone(),
        records,
    })
}

/// Per-query mean and sample standard deviation of test accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyCurve {
    pub strategy: QueryStrategy,
    pub seeds: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    /// Seed-major, strategy-minor.
    pub runs: Vec<RunResult>,
    /// One curve per strategy, in input order.
    pub curves: Vec<StrategyCurve>,
}

/// Runs every (seed, strategy) cell of `base`. Cells execute in parallel;
/// results are ordered seed-major, strategy-minor.
pub fn run_experiment(
    base: &SimulationConfig,
    seeds: &[u64],
    strategies: &[QueryStrategy],
) -> Result<ExperimentResult> {
    if seeds.is_empty() || strategies.is_empty() {
        return Err(Error::Config(
            "need at least one seed and one strategy".into(),
        ));
    }
    let cells: Vec<SimulationConfig> = seeds
        .iter()
        .flat_map(|&seed| {
            strategies.iter().map(move |&strategy| SimulationConfig {
                seed,
                strategy,
                ..base.clone()
            })
        })
        .collect();
    let runs = cells
        .par_iter()
        .map(run_query_loop)
        .collect::<Result<Vec<_>>>()?;

    let curves = strategies
        .iter()
        .enumerate()
        .map(|(s, &strategy)| {
            let traces: Vec<&RunResult> = runs.iter().skip(s).step_by(strategies.len()).collect();
            let len = base.num_queries + 1;
            let (mean, std) = (0..len)
                .map(|q| mean_and_sd(traces.iter().map(|r| r.records[q].test_accuracy)))
                .unzip();
            StrategyCurve {
                strategy,
                seeds: traces.len(),
                mean,
                std,
            }
        })
        .collect();
    Ok(ExperimentResult { runs, curves })
}

/// Mean and sample (n - 1) standard deviation; the deviation is 0 for a
/// single value.
pub fn mean_and_sd(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let values: Vec<f64> = values.into_iter().collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
