//! Synthetic binary datasets with tunable class overlap, and pool splitting.
//!
//! Four families are available. Each has a single overlap knob (`aur_param`):
//!
//! | family           | dims | knob           | more overlap when |
//! |------------------|------|----------------|-------------------|
//! | `classification` | 4    | class_sep      | knob decreases    |
//! | `blobs`          | 4    | cluster_std    | knob increases    |
//! | `circles`        | 2    | circle factor  | knob increases    |
//! | `moons`          | 2    | noise std      | knob increases    |
//!
//! Every generator emits exactly `n / 2` instances of each label, class 0
//! first, with `id` equal to the generation order.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math_stats::RngState;

/// Noise level used by the circles family unless configured otherwise.
pub const DEFAULT_CIRCLES_NOISE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    /// Position in the generated population; stable identity across pools.
    pub id: usize,
    pub features: Vec<f64>,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Classification,
    Blobs,
    Circles,
    Moons,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Classification,
        Family::Blobs,
        Family::Circles,
        Family::Moons,
    ];

    pub fn dim(self) -> usize {
        match self {
            Family::Classification | Family::Blobs => 4,
            Family::Circles | Family::Moons => 2,
        }
    }

    /// Low, median and high overlap settings.
    pub fn default_aur_grid(self) -> [f64; 3] {
        match self {
            Family::Classification => [2.0, 0.8, 0.3],
            Family::Blobs => [1.0, 3.0, 5.0],
            Family::Circles => [0.5, 0.8, 0.9],
            Family::Moons => [0.1, 0.2, 0.3],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Classification => "classification",
            Family::Blobs => "blobs",
            Family::Circles => "circles",
            Family::Moons => "moons",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown dataset family `{s}` (expected classification, blobs, circles or moons)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub family: Family,
    pub population_size: usize,
    pub aur_param: f64,
    /// Only read by the circles family.
    pub noise_std: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn generate(&self, rng: &mut RngState) -> Result<Vec<LabeledInstance>> {
        let n = self.population_size;
        match self.family {
            Family::Classification => gen_classification(n, self.aur_param, rng),
            Family::Blobs => gen_blobs(n, self.aur_param, rng),
            Family::Circles => gen_circles(n, self.aur_param, self.noise_std, rng),
            Family::Moons => gen_moons(n, self.aur_param, rng),
        }
    }
}

fn check_even(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "population size must be a positive even number, got {n}"
        )));
    }
    Ok(())
}

fn check_nonnegative(value: f64, name: &str) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be finite and nonnegative, got {value}"
        )));
    }
    Ok(())
}

fn build(n: usize, mut point: impl FnMut(u8) -> Vec<f64>) -> Vec<LabeledInstance> {
    (0..n)
        .map(|id| {
            let label = u8::from(id >= n / 2);
            LabeledInstance {
                id,
                features: point(label),
                label,
            }
        })
        .collect()
}

/// Two unit-variance Gaussian classes in 4-d with centroids
/// `±class_sep * (1/2, 1/2, 1/2, 1/2)`.
pub fn gen_classification(
    n: usize,
    class_sep: f64,
    rng: &mut RngState,
) -> Result<Vec<LabeledInstance>> {
    check_even(n)?;
    check_nonnegative(class_sep, "class_sep")?;
    Ok(build(n, |label| {
        let centre = (2.0 * f64::from(label) - 1.0) * class_sep * 0.5;
        (0..4).map(|_| centre + rng.next_normal()).collect()
    }))
}

/// One isotropic Gaussian blob per class, centres uniform in `[-10, 10]^4`.
pub fn gen_blobs(n: usize, cluster_std: f64, rng: &mut RngState) -> Result<Vec<LabeledInstance>> {
    check_even(n)?;
    if !cluster_std.is_finite() || cluster_std <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "cluster_std must be positive, got {cluster_std}"
        )));
    }
    let centres: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..4).map(|_| rng.uniform_in(-10.0, 10.0)).collect())
        .collect();
    Ok(build(n, |label| {
        centres[usize::from(label)]
            .iter()
            .map(|c| c + cluster_std * rng.next_normal())
            .collect()
    }))
}

/// Concentric circles: class 0 on radius 1, class 1 on radius `factor`.
pub fn gen_circles(
    n: usize,
    factor: f64,
    noise_std: f64,
    rng: &mut RngState,
) -> Result<Vec<LabeledInstance>> {
    check_even(n)?;
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "circle factor must lie in (0, 1), got {factor}"
        )));
    }
    check_nonnegative(noise_std, "noise_std")?;
    Ok(build(n, |label| {
        let radius = if label == 0 { 1.0 } else { factor };
        let angle = rng.uniform_in(0.0, 2.0 * PI);
        let mut p = vec![radius * angle.cos(), radius * angle.sin()];
        if noise_std > 0.0 {
            for v in &mut p {
                *v += noise_std * rng.next_normal();
            }
        }
        p
    }))
}

/// Two interleaving half circles.
pub fn gen_moons(n: usize, noise_std: f64, rng: &mut RngState) -> Result<Vec<LabeledInstance>> {
    check_even(n)?;
    check_nonnegative(noise_std, "noise_std")?;
    Ok(build(n, |label| {
        let t = rng.uniform_in(0.0, PI);
        let mut p = if label == 0 {
            vec![t.cos(), t.sin()]
        } else {
            vec![1.0 - t.cos(), 0.5 - t.sin()]
        };
        if noise_std > 0.0 {
            for v in &mut p {
                *v += noise_std * rng.next_normal();
            }
        }
        p
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolRole {
    Known,
    Unknown,
    Test,
}

/// Ordered instances playing one pool role. Labels of the unknown pool are
/// masked: they can only be read back through annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPool {
    role: PoolRole,
    instances: Vec<LabeledInstance>,
}

impl DataPool {
    pub fn new(role: PoolRole, instances: Vec<LabeledInstance>) -> Self {
        Self { role, instances }
    }

    pub fn role(&self) -> PoolRole {
        self.role
    }

    pub fn is_masked(&self) -> bool {
        self.role == PoolRole::Unknown
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Feature dimension, or `None` for an empty pool.
    pub fn dim(&self) -> Option<usize> {
        self.instances.first().map(|i| i.features.len())
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.instances[i].features
    }

    pub fn features_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.instances.iter().map(|i| i.features.as_slice())
    }

    pub fn ids(&self) -> Vec<usize> {
        self.instances.iter().map(|i| i.id).collect()
    }

    pub fn label(&self, i: usize) -> Result<u8> {
        if self.is_masked() {
            return Err(Error::MaskedLabels);
        }
        Ok(self.instances[i].label)
    }

    /// Full instances, labels included. Fails on a masked pool.
    pub fn instances(&self) -> Result<&[LabeledInstance]> {
        if self.is_masked() {
            return Err(Error::MaskedLabels);
        }
        Ok(&self.instances)
    }

    /// Appends another pool's instances. Both pools must have visible labels.
    pub fn merge(&mut self, other: DataPool) -> Result<()> {
        if self.is_masked() || other.is_masked() {
            return Err(Error::MaskedLabels);
        }
        self.instances.extend(other.instances);
        Ok(())
    }

    pub(crate) fn into_instances(self) -> Vec<LabeledInstance> {
        self.instances
    }
}

/// Shuffles the population and cuts it into known, unknown and test pools.
pub fn split_pools(
    population: Vec<LabeledInstance>,
    sizes: (usize, usize, usize),
    rng: &mut RngState,
) -> Result<(DataPool, DataPool, DataPool)> {
    let (known, unknown, test) = sizes;
    let requested = known
        .checked_add(unknown)
        .and_then(|s| s.checked_add(test))
        .ok_or_else(|| Error::InvalidArgument("pool sizes overflow".into()))?;
    if requested > population.len() {
        return Err(Error::SampleTooLarge {
            requested,
            available: population.len(),
        });
    }
    let mut shuffled = population;
    shuffled.shuffle(rng);
    let mut rest = shuffled.into_iter();
    let known_pool: Vec<_> = rest.by_ref().take(known).collect();
    let unknown_pool: Vec<_> = rest.by_ref().take(unknown).collect();
    let test_pool: Vec<_> = rest.take(test).collect();
    Ok((
        DataPool::new(PoolRole::Known, known_pool),
        DataPool::new(PoolRole::Unknown, unknown_pool),
        DataPool::new(PoolRole::Test, test_pool),
    ))
}

/// Formats `x` with nine significant digits.
pub(crate) fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..=15).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.8e}")
    }
}

/// Writes instances as CSV with header `f0,f1[,f2,f3],label`.
pub fn write_csv<W: Write>(instances: &[LabeledInstance], mut out: W) -> std::io::Result<()> {
    let dim = instances.first().map_or(0, |i| i.features.len());
    let mut header: Vec<String> = (0..dim).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    writeln!(out, "{}", header.join(","))?;
    for inst in instances {
        let mut row: Vec<String> = inst.features.iter().map(|&v| format_sig9(v)).collect();
        row.push(inst.label.to_string());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
