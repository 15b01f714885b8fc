//! Command-line front end: `simulate`, `sweep`, `table1` and `plot`.
//!
//! Configuration is a flat JSON object. Values are resolved in three
//! layers: built-in defaults, then the `--config` file, then command-line
//! flags (`--set key=value` reaches any key). Unknown keys are rejected.
//! The fully resolved configuration is written to `metadata.json`, and that
//! file is itself accepted by `--config`, so any run can be replayed.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::datasets::Family;
use crate::error::Error;
use crate::math_stats::{beta_central_interval, BetaShape, Interval};
use crate::models::{LogisticParams, ModelSpec};
use crate::plot::{learning_curve_svg, Series};
use crate::simulation::{
    mean_and_sd, run_experiment, ExperimentResult, RunResult, SimulationConfig,
};
use crate::strategies::QueryStrategy;

pub const RESULTS_HEADER: &str =
    "family,aur_param,strategy,alpha,beta,seed,query_index,known_size,test_accuracy";
pub const SUMMARY_HEADER: &str =
    "family,aur_param,strategy,alpha,beta,seeds,final_mean_accuracy,final_std_accuracy";

/// Published interval bounds for symmetric beta shapes: (α = β, lower, upper).
/// They are labelled as 95% intervals but coincide with the quartiles.
pub const REFERENCE_INTERVALS: [(f64, f64, f64); 6] = [
    (2.0, 0.3264, 0.6736),
    (5.0, 0.3920, 0.6080),
    (10.0, 0.4241, 0.5759),
    (20.0, 0.4465, 0.5535),
    (50.0, 0.4662, 0.5338),
    (100.0, 0.4761, 0.5239),
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for configuration or input errors, 2 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bellcurve",
    version,
    about = "Pool-based active learning simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every strategy over a range of seeds on one dataset setting.
    Simulate(RunArgs),
    /// Run the cross product of dataset families, overlap levels and strategies.
    Sweep(RunArgs),
    /// Print central 95% and 50% intervals of symmetric beta distributions.
    Table1,
    /// Render a results CSV as an SVG learning-curve chart.
    Plot {
        results: PathBuf,
        output: PathBuf,
        #[arg(long)]
        title: Option<String>,
    },
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON configuration file (or a metadata.json from an earlier run).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// First seed; runs use seed, seed+1, ...
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of seeds.
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub family: Option<String>,
    /// Overlap parameter of the family.
    #[arg(long)]
    pub aur: Option<f64>,
    /// Comma-separated list of passive, uncertainty, bellcurve.
    #[arg(long, value_delimiter = ',')]
    pub strategy: Vec<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// knn or logistic.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv, json, svg.
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<String>,
    /// Override any configuration key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    Passive,
    Uncertainty,
    Bellcurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Knn,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Defaults to blobs for `simulate`; unset means every family for `sweep`.
    pub family: Option<Family>,
    /// Defaults to the family's median overlap setting.
    pub aur: Option<f64>,
    pub noise_std: f64,
    pub strategies: Vec<StrategyName>,
    pub alpha: f64,
    pub beta: f64,
    pub model: ModelKind,
    pub k: usize,
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2_lambda: f64,
    /// Degree-2 features for logistic; defaults to on for 2-d families.
    pub poly2: Option<bool>,
    pub known_size: usize,
    pub unknown_size: usize,
    pub test_size: usize,
    pub batch_n: usize,
    pub num_queries: usize,
    pub seed: u64,
    pub seeds: usize,
    pub formats: Vec<OutputFormat>,
    pub out: PathBuf,
    /// Sweep only: overlap values per family.
    pub grid: Option<BTreeMap<Family, Vec<f64>>>,
    /// Sweep only: (alpha, beta) pairs for bell-curve sampling.
    pub shapes: Option<Vec<(f64, f64)>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let logistic = LogisticParams::default();
        Self {
            family: None,
            aur: None,
            noise_std: crate::datasets::DEFAULT_CIRCLES_NOISE,
            strategies: vec![
                StrategyName::Passive,
                StrategyName::Uncertainty,
                StrategyName::Bellcurve,
            ],
            alpha: crate::strategies::DEFAULT_BELL_SHAPE,
            beta: crate::strategies::DEFAULT_BELL_SHAPE,
            model: ModelKind::Knn,
            k: crate::models::DEFAULT_K,
            learning_rate: logistic.learning_rate,
            iterations: logistic.iterations,
            l2_lambda: logistic.l2_lambda,
            poly2: None,
            known_size: 10,
            unknown_size: 1000,
            test_size: 1000,
            batch_n: 5,
            num_queries: 20,
            seed: 0,
            seeds: 30,
            formats: vec![OutputFormat::Csv],
            out: PathBuf::from("results"),
            grid: None,
            shapes: None,
        }
    }
}

impl RunConfig {
    /// Layers `file` and `overrides` over the defaults.
    pub fn resolve(file: Option<&Path>, overrides: Map<String, Value>) -> Result<Self, CliError> {
        let mut merged = Map::new();
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let value = match value {
                Value::Object(mut obj) if obj.contains_key("resolved_config") => {
                    obj.remove("resolved_config").unwrap_or(Value::Null)
                }
                other => other,
            };
            match value {
                Value::Object(obj) => merged.extend(obj),
                _ => {
                    return Err(CliError::Config(format!(
                        "{}: configuration must be a JSON object",
                        path.display()
                    )))
                }
            }
        }
        merged.extend(overrides);
        serde_json::from_value(Value::Object(merged))
            .map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64)
            .map(|i| self.seed.wrapping_add(i))
            .collect()
    }

    pub fn model_spec(&self, family: Family) -> ModelSpec {
        match self.model {
            ModelKind::Knn => ModelSpec::Knn { k: self.k },
            ModelKind::Logistic => ModelSpec::Logistic(LogisticParams {
                learning_rate: self.learning_rate,
                iterations: self.iterations,
                l2_lambda: self.l2_lambda,
                poly2: self.poly2.unwrap_or(family.dim() == 2),
            }),
        }
    }

    /// Strategy list with bell-curve expanded over `shapes` (or the single
    /// `alpha`/`beta` pair).
    pub fn query_strategies(&self) -> Result<Vec<QueryStrategy>, CliError> {
        if self.strategies.is_empty() {
            return Err(CliError::Config("at least one strategy is required".into()));
        }
        let shapes = self
            .shapes
            .clone()
            .unwrap_or_else(|| vec![(self.alpha, self.beta)]);
        let mut out = Vec::new();
        for name in &self.strategies {
            match name {
                StrategyName::Passive => out.push(QueryStrategy::Passive),
                StrategyName::Uncertainty => out.push(QueryStrategy::Uncertainty),
                StrategyName::Bellcurve => {
                    for &(a, b) in &shapes {
                        out.push(QueryStrategy::bell_curve(a, b)?);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn simulation(&self, family: Family, aur: f64) -> SimulationConfig {
        SimulationConfig {
            family,
            aur_param: aur,
            noise_std: self.noise_std,
            strategy: QueryStrategy::Passive,
            model: self.model_spec(family),
            known_size: self.known_size,
            unknown_size: self.unknown_size,
            test_size: self.test_size,
            batch_n: self.batch_n,
            num_queries: self.num_queries,
            seed: self.seed,
        }
    }

    fn check(&self) -> Result<(), CliError> {
        if self.seeds == 0 {
            return Err(CliError::Config("seeds must be at least 1".into()));
        }
        self.query_strategies()?;
        Ok(())
    }

    /// Simulate-mode defaults made explicit, so the echo replays exactly.
    fn resolved_for_simulate(&self) -> Self {
        let family = self.family.unwrap_or(Family::Blobs);
        let mut out = self.clone();
        out.family = Some(family);
        out.aur = Some(self.aur.unwrap_or(family.default_aur_grid()[1]));
        if self.model == ModelKind::Logistic {
            out.poly2 = Some(self.poly2.unwrap_or(family.dim() == 2));
        }
        out
    }

    /// Dataset cells of a sweep, in a fixed order.
    pub fn sweep_grid(&self) -> Vec<(Family, f64)> {
        if let Some(grid) = &self.grid {
            return grid
                .iter()
                .flat_map(|(&f, values)| values.iter().map(move |&v| (f, v)))
                .collect();
        }
        let families: Vec<Family> = match self.family {
            Some(f) => vec![f],
            None => Family::ALL.to_vec(),
        };
        families
            .into_iter()
            .flat_map(|f| match (self.family, self.aur) {
                (Some(_), Some(aur)) => vec![(f, aur)],
                _ => f.default_aur_grid().iter().map(|&v| (f, v)).collect(),
            })
            .collect()
    }
}

impl RunArgs {
    /// Flag values as configuration keys.
    pub fn overrides(&self) -> Result<Map<String, Value>, CliError> {
        let mut map = Map::new();
        if let Some(v) = self.seed {
            map.insert("seed".into(), v.into());
        }
        if let Some(v) = self.seeds {
            map.insert("seeds".into(), v.into());
        }
        if let Some(v) = &self.family {
            map.insert("family".into(), v.clone().into());
        }
        if let Some(v) = self.aur {
            map.insert("aur".into(), v.into());
        }
        if !self.strategy.is_empty() {
            map.insert("strategies".into(), self.strategy.clone().into());
        }
        if let Some(v) = self.alpha {
            map.insert("alpha".into(), v.into());
        }
        if let Some(v) = self.beta {
            map.insert("beta".into(), v.into());
        }
        if let Some(v) = &self.model {
            map.insert("model".into(), v.clone().into());
        }
        if let Some(v) = &self.out {
            map.insert("out".into(), v.to_string_lossy().into_owned().into());
        }
        if !self.format.is_empty() {
            map.insert("formats".into(), self.format.clone().into());
        }
        for item in &self.set {
            let (key, raw) = item.split_once('=').ok_or_else(|| {
                CliError::Config(format!("--set expects KEY=VALUE, got `{item}`"))
            })?;
            let value =
                serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            map.insert(key.trim().to_string(), value);
        }
        Ok(map)
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        RunConfig::resolve(self.config.as_deref(), self.overrides()?)
    }
}

/// Entry point shared by the binary and tests. Human-readable output goes
/// to `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args.resolve()?, stdout),
        Command::Sweep(args) => cmd_sweep(&args.resolve()?, stdout),
        Command::Table1 => cmd_table1(stdout),
        Command::Plot {
            results,
            output,
            title,
        } => cmd_plot(&results, &output, title.as_deref()),
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn result_rows(run: &RunResult, out: &mut String) {
    let c = &run.config;
    let shape = c.strategy.shape();
    for r in &run.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.4}\n",
            c.family,
            c.aur_param,
            c.strategy.name(),
            opt_num(shape.map(|s| s.alpha())),
            opt_num(shape.map(|s| s.beta())),
            c.seed,
            r.query_index,
            r.known_size,
            r.test_accuracy
        ));
    }
}

/// Results CSV body for a set of runs, in the given order.
pub fn results_csv<'a>(runs: impl IntoIterator<Item = &'a RunResult>) -> String {
    let mut text = String::from(RESULTS_HEADER);
    text.push('\n');
    for run in runs {
        result_rows(run, &mut text);
    }
    text
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable value");
    bytes.push(b'\n');
    bytes
}

fn curve_series(exp: &ExperimentResult) -> Vec<Series> {
    exp.curves
        .iter()
        .map(|c| Series {
            name: c.strategy.to_string(),
            mean: c.mean.clone(),
            std: c.std.clone(),
        })
        .collect()
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    aggregation: &'static str,
    seeds: Vec<u64>,
    resolved_config: &'a RunConfig,
}

fn metadata<'a>(command: &'static str, config: &'a RunConfig) -> Metadata<'a> {
    Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        aggregation: "per-query mean and sample standard deviation of test accuracy over seeds",
        seeds: config.seed_list(),
        resolved_config: config,
    }
}

pub fn cmd_simulate(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.check()?;
    let config = config.resolved_for_simulate();
    let family = config.family.expect("resolved");
    let aur = config.aur.expect("resolved");
    let strategies = config.query_strategies()?;
    let base = config.simulation(family, aur);
    base.validate()?;
    let exp = run_experiment(&base, &config.seed_list(), &strategies)?;

    create_dir(&config.out)?;
    if config.formats.contains(&OutputFormat::Csv) || config.formats.is_empty() {
        write_file(
            &config.out.join("results.csv"),
            results_csv(&exp.runs).as_bytes(),
        )?;
    }
    if config.formats.contains(&OutputFormat::Json) {
        write_file(&config.out.join("results.json"), &to_json(&exp))?;
    }
    if config.formats.contains(&OutputFormat::Svg) {
        let title = format!("{family} (aur = {aur})");
        let svg = learning_curve_svg(&title, &curve_series(&exp));
        write_file(&config.out.join("plot.svg"), svg.as_bytes())?;
    }
    write_file(
        &config.out.join("metadata.json"),
        &to_json(&metadata("simulate", &config)),
    )?;

    let _ = writeln!(stdout, "{family} aur={aur}, {} seeds", config.seeds);
    for c in &exp.curves {
        let last = c.mean.len() - 1;
        let _ = writeln!(
            stdout,
            "  {:<20} final accuracy {:.4} ± {:.4}",
            c.strategy.to_string(),
            c.mean[last],
            c.std[last]
        );
    }
    let _ = writeln!(stdout, "wrote {}", config.out.display());
    Ok(())
}

fn cell_stem(family: Family, aur: f64) -> String {
    format!("{family}_aur{aur}")
}

fn strategy_tag(s: &QueryStrategy) -> String {
    match s.shape() {
        Some(shape) => format!("bellcurve_a{}_b{}", shape.alpha(), shape.beta()),
        None => s.name().to_string(),
    }
}

/// One summary row per (dataset cell, strategy).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub family: Family,
    pub aur_param: f64,
    pub strategy: QueryStrategy,
    pub seeds: usize,
    pub final_mean_accuracy: f64,
    pub final_std_accuracy: f64,
}

pub fn cmd_sweep(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    config.check()?;
    let strategies = config.query_strategies()?;
    let grid = config.sweep_grid();
    if grid.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    let seeds = config.seed_list();
    for &(family, aur) in &grid {
        config.simulation(family, aur).validate()?;
    }

    let cells_dir = config.out.join("cells");
    create_dir(&cells_dir)?;

    let results: Vec<(Family, f64, ExperimentResult)> = grid
        .par_iter()
        .map(|&(family, aur)| {
            let exp = run_experiment(&config.simulation(family, aur), &seeds, &strategies)?;
            let stem = cell_stem(family, aur);
            for (s, strategy) in strategies.iter().enumerate() {
                let runs = exp.runs.iter().skip(s).step_by(strategies.len());
                let path = cells_dir.join(format!("{stem}_{}.csv", strategy_tag(strategy)));
                write_file(&path, results_csv(runs).as_bytes())?;
            }
            if config.formats.contains(&OutputFormat::Svg) {
                let svg =
                    learning_curve_svg(&format!("{family} (aur = {aur})"), &curve_series(&exp));
                write_file(&cells_dir.join(format!("{stem}.svg")), svg.as_bytes())?;
            }
            Ok((family, aur, exp))
        })
        .collect::<Result<_, CliError>>()?;

    let mut summary = Vec::new();
    for (family, aur, exp) in &results {
        for c in &exp.curves {
            summary.push(SummaryRow {
                family: *family,
                aur_param: *aur,
                strategy: c.strategy,
                seeds: c.seeds,
                final_mean_accuracy: *c.mean.last().expect("non-empty curve"),
                final_std_accuracy: *c.std.last().expect("non-empty curve"),
            });
        }
    }

    let mut text = String::from(SUMMARY_HEADER);
    text.push('\n');
    for row in &summary {
        let shape = row.strategy.shape();
        text.push_str(&format!(
            "{},{},{},{},{},{},{:.4},{:.4}\n",
            row.family,
            row.aur_param,
            row.strategy.name(),
            opt_num(shape.map(|s| s.alpha())),
            opt_num(shape.map(|s| s.beta())),
            row.seeds,
            row.final_mean_accuracy,
            row.final_std_accuracy
        ));
    }
    write_file(&config.out.join("summary.csv"), text.as_bytes())?;
    if config.formats.contains(&OutputFormat::Json) {
        write_file(&config.out.join("summary.json"), &to_json(&summary))?;
    }
    write_file(
        &config.out.join("metadata.json"),
        &to_json(&metadata("sweep", config)),
    )?;

    let _ = writeln!(
        stdout,
        "{} dataset cells x {} strategies, {} seeds",
        grid.len(),
        strategies.len(),
        seeds.len()
    );
    for row in &summary {
        let _ = writeln!(
            stdout,
            "  {:<15} {:>5} {:<20} {:.4} ± {:.4}",
            row.family.as_str(),
            row.aur_param,
            row.strategy.to_string(),
            row.final_mean_accuracy,
            row.final_std_accuracy
        );
    }
    let _ = writeln!(stdout, "wrote {}", config.out.display());
    Ok(())
}

/// Central intervals of `Beta(α, α)` next to the published reference bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub alpha: f64,
    /// Central interval holding 95% of the mass.
    pub central95: Interval,
    /// Central interval holding 50% of the mass (the quartiles).
    pub central50: Interval,
    pub reference: Interval,
}

fn max_abs_dev(a: &Interval, b: &Interval) -> f64 {
    (a.lower - b.lower).abs().max((a.upper - b.upper).abs())
}

impl Table1Row {
    pub fn deviation95(&self) -> f64 {
        max_abs_dev(&self.central95, &self.reference)
    }

    pub fn deviation50(&self) -> f64 {
        max_abs_dev(&self.central50, &self.reference)
    }
}

pub fn table1_rows() -> Result<Vec<Table1Row>, Error> {
    REFERENCE_INTERVALS
        .iter()
        .map(|&(alpha, lower, upper)| {
            let shape = BetaShape::symmetric(alpha)?;
            Ok(Table1Row {
                alpha,
                central95: beta_central_interval(shape, 0.95)?,
                central50: beta_central_interval(shape, 0.50)?,
                reference: Interval { lower, upper },
            })
        })
        .collect()
}

pub fn cmd_table1(stdout: &mut dyn Write) -> Result<(), CliError> {
    let rows = table1_rows()?;
    let _ = writeln!(
        stdout,
        "central intervals of Beta(alpha, beta), alpha = beta"
    );
    let _ = writeln!(
        stdout,
        "{:>6} {:>6} {:>8} {:>8} {:>8} {:>8} {:>9} {:>9} {:>9} {:>9}",
        "alpha", "beta", "lo95", "hi95", "lo50", "hi50", "ref_lo", "ref_hi", "dev95", "dev50"
    );
    for r in &rows {
        let _ = writeln!(
            stdout,
            "{:>6} {:>6} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>9.4} {:>9.4} {:>9.6} {:>9.6}",
            r.alpha,
            r.alpha,
            r.central95.lower,
            r.central95.upper,
            r.central50.lower,
            r.central50.upper,
            r.reference.lower,
            r.reference.upper,
            r.deviation95(),
            r.deviation50()
        );
    }
    Ok(())
}

/// Parses a results CSV into mean ± std curves, one per strategy setting,
/// in order of first appearance.
pub fn curves_from_results(text: &str) -> Result<Vec<Series>, CliError> {
    let malformed = |msg: String| CliError::Config(format!("malformed results CSV: {msg}"));
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if headers != RESULTS_HEADER {
        return Err(malformed(format!("expected header `{RESULTS_HEADER}`")));
    }

    // key -> query index -> accuracies
    let mut groups: Vec<(String, String, BTreeMap<usize, Vec<f64>>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        let cell = format!("{} {}", &record[0], &record[1]);
        let label = if record[3].is_empty() {
            record[2].to_string()
        } else {
            format!("{}({}, {})", &record[2], &record[3], &record[4])
        };
        let q: usize = record[6]
            .parse()
            .map_err(|_| malformed(format!("bad query_index `{}`", &record[6])))?;
        let acc: f64 = record[8]
            .parse()
            .map_err(|_| malformed(format!("bad test_accuracy `{}`", &record[8])))?;
        if !(0.0..=1.0).contains(&acc) {
            return Err(malformed(format!("accuracy {acc} outside [0, 1]")));
        }
        let pos = match groups
            .iter()
            .position(|(c, l, _)| *c == cell && *l == label)
        {
            Some(p) => p,
            None => {
                groups.push((cell, label, BTreeMap::new()));
                groups.len() - 1
            }
        };
        groups[pos].2.entry(q).or_default().push(acc);
    }
    if groups.is_empty() {
        return Err(malformed("no result rows".into()));
    }
    let multiple_cells = groups.iter().any(|(c, _, _)| *c != groups[0].0);
    Ok(groups
        .into_iter()
        .map(|(cell, label, by_query)| {
            let (mean, std) = by_query.into_values().map(mean_and_sd).unzip();
            Series {
                name: if multiple_cells {
                    format!("{cell} {label}")
                } else {
                    label
                },
                mean,
                std,
            }
        })
        .collect())
}

pub fn cmd_plot(results: &Path, output: &Path, title: Option<&str>) -> Result<(), CliError> {
    let text = fs::read_to_string(results).map_err(io_err(results))?;
    let series = curves_from_results(&text)?;
    let svg = learning_curve_svg(title.unwrap_or("learning curves"), &series);
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(output, svg.as_bytes())
}
