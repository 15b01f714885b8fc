//! Probabilistic binary classifiers trained from scratch on the known pool.
//!
//! Two model kinds are provided:
//! - `knn`: Laplace-smoothed k-nearest-neighbour vote, `(ones + 1) / (k + 2)`.
//! - `logistic`: L2-regularized logistic regression fitted by full-batch
//!   gradient descent, optionally on a degree-2 polynomial expansion.
//!
//! Every call to `fit` discards the previous state.

use serde::{Deserialize, Serialize};

use crate::datasets::DataPool;
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2_lambda: f64,
    pub poly2: bool,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            iterations: 500,
            l2_lambda: 1e-4,
            poly2: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpec {
    Knn { k: usize },
    Logistic(LogisticParams),
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Knn { k: DEFAULT_K }
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::Knn { k: 0 } => Err(Error::Config("knn requires k >= 1".into())),
            ModelSpec::Logistic(p) if !p.learning_rate.is_finite() || p.learning_rate <= 0.0 => {
                Err(Error::Config(
                    "logistic learning rate must be positive".into(),
                ))
            }
            ModelSpec::Logistic(p) if p.l2_lambda.is_nan() || p.l2_lambda < 0.0 => Err(
                Error::Config("logistic l2_lambda must be nonnegative".into()),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FittedState {
    Knn {
        points: Vec<Vec<f64>>,
        labels: Vec<u8>,
    },
    Logistic {
        dim: usize,
        poly2: bool,
        /// Per expanded column: (mean, scale) used for standardization.
        standardize: Vec<(f64, f64)>,
        /// Bias first, then one weight per expanded column.
        params: Vec<f64>,
        loss_trace: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticClassifier {
    spec: ModelSpec,
    state: Option<FittedState>,
}

impl ProbabilisticClassifier {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec, state: None })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn is_fitted(&self) -> bool {
        self.state.is_some()
    }

    pub fn fit(&mut self, training: &DataPool) -> Result<()> {
        let instances = training.instances()?;
        if instances.is_empty() {
            return Err(Error::EmptyPool("training pool"));
        }
        let dim = instances[0].features.len();
        if let Some(bad) = instances.iter().find(|i| i.features.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.features.len(),
            });
        }
        let labels: Vec<u8> = instances.iter().map(|i| i.label).collect();
        self.state = Some(match self.spec {
            ModelSpec::Knn { .. } => FittedState::Knn {
                points: instances.iter().map(|i| i.features.clone()).collect(),
                labels,
            },
            ModelSpec::Logistic(params) => {
                let expanded: Vec<Vec<f64>> = instances
                    .iter()
                    .map(|i| expand(&i.features, params.poly2))
                    .collect();
                let standardize = column_moments(&expanded);
                let design: Vec<Vec<f64>> = expanded
                    .iter()
                    .map(|row| apply_standardize(row, &standardize))
                    .collect();
                let (params_vec, loss_trace) = gradient_descent(&design, &labels, &params);
                FittedState::Logistic {
                    dim,
                    poly2: params.poly2,
                    standardize,
                    params: params_vec,
                    loss_trace,
                }
            }
        });
        Ok(())
    }

    /// Predicted probability of label 1.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        match self.state.as_ref().ok_or(Error::Unfitted)? {
            FittedState::Knn { points, labels } => {
                let k = match self.spec {
                    ModelSpec::Knn { k } => k,
                    ModelSpec::Logistic(_) => unreachable!("knn state under logistic spec"),
                };
                knn_proba(points, labels, k, x)
            }
            FittedState::Logistic {
                dim,
                poly2,
                standardize,
                params,
                ..
            } => {
                if x.len() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        got: x.len(),
                    });
                }
                let row = apply_standardize(&expand(x, *poly2), standardize);
                Ok(sigmoid(affine(params, &row)))
            }
        }
    }

    /// 1 iff the predicted probability is at least 0.5.
    pub fn predict_label(&self, x: &[f64]) -> Result<u8> {
        Ok(label_from_proba(self.predict_proba(x)?))
    }

    /// Logistic training loss per iteration, recorded before each update,
    /// plus the final loss. Empty for knn or before fitting.
    pub fn training_loss_trace(&self) -> &[f64] {
        match &self.state {
            Some(FittedState::Logistic { loss_trace, .. }) => loss_trace,
            _ => &[],
        }
    }

    /// Number of stored training points (knn only).
    pub fn stored_points(&self) -> Option<usize> {
        match &self.state {
            Some(FittedState::Knn { points, .. }) => Some(points.len()),
            _ => None,
        }
    }
}

pub fn label_from_proba(p: f64) -> u8 {
    u8::from(p >= 0.5)
}

fn knn_proba(points: &[Vec<f64>], labels: &[u8], k: usize, x: &[f64]) -> Result<f64> {
    let dim = points[0].len();
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    let mut dists: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    let k = k.min(dists.len());
    let by_distance_then_index =
        |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dists.len() {
        dists.select_nth_unstable_by(k - 1, by_distance_then_index);
    }
    let ones = dists[..k].iter().filter(|&&(_, i)| labels[i] == 1).count();
    Ok((ones as f64 + 1.0) / (k as f64 + 2.0))
}

fn expand(x: &[f64], poly2: bool) -> Vec<f64> {
    let mut out = x.to_vec();
    if poly2 {
        for i in 0..x.len() {
            for j in i..x.len() {
                out.push(x[i] * x[j]);
            }
        }
    }
    out
}

fn column_moments(rows: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = rows.len() as f64;
    (0..rows[0].len())
        .map(|j| {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            (mean, if sd > 1e-12 { sd } else { 1.0 })
        })
        .collect()
}

fn apply_standardize(row: &[f64], moments: &[(f64, f64)]) -> Vec<f64> {
    row.iter()
        .zip(moments)
        .map(|(v, (mean, sd))| (v - mean) / sd)
        .collect()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn affine(params: &[f64], row: &[f64]) -> f64 {
    params[0] + params[1..].iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
}

/// Mean log-loss plus `l2/2 * |w|^2` (bias excluded) and its gradient.
/// `params` holds the bias first.
pub fn logistic_loss_and_gradient(
    params: &[f64],
    rows: &[Vec<f64>],
    labels: &[u8],
    l2: f64,
) -> (f64, Vec<f64>) {
    let n = rows.len() as f64;
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    for (row, &y) in rows.iter().zip(labels) {
        let z = affine(params, row);
        let y = f64::from(y);
        loss += softplus(z) - y * z;
        let residual = sigmoid(z) - y;
        grad[0] += residual;
        for (g, x) in grad[1..].iter_mut().zip(row) {
            *g += residual * x;
        }
    }
    loss /= n;
    for g in &mut grad {
        *g /= n;
    }
    for (g, w) in grad[1..].iter_mut().zip(&params[1..]) {
        *g += l2 * w;
    }
    loss += 0.5 * l2 * params[1..].iter().map(|w| w * w).sum::<f64>();
    (loss, grad)
}

fn gradient_descent(rows: &[Vec<f64>], labels: &[u8], p: &LogisticParams) -> (Vec<f64>, Vec<f64>) {
    let mut params = vec![0.0; rows[0].len() + 1];
    let mut trace = Vec::with_capacity(p.iterations + 1);
    for _ in 0..p.iterations {
        let (loss, grad) = logistic_loss_and_gradient(&params, rows, labels, p.l2_lambda);
        trace.push(loss);
        for (w, g) in params.iter_mut().zip(&grad) {
            *w -= p.learning_rate * g;
        }
    }
    trace.push(logistic_loss_and_gradient(&params, rows, labels, p.l2_lambda).0);
    (params, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{gen_blobs, LabeledInstance, PoolRole};
    use crate::math_stats::RngState;

    fn pool(points: &[(&[f64], u8)]) -> DataPool {
        DataPool::new(
            PoolRole::Known,
            points
                .iter()
                .enumerate()
                .map(|(id, (f, l))| LabeledInstance {
                    id,
                    features: f.to_vec(),
                    label: *l,
                })
                .collect(),
        )
    }

    fn logistic(iterations: usize) -> ProbabilisticClassifier {
        ProbabilisticClassifier::new(ModelSpec::Logistic(LogisticParams {
            iterations,
            ..LogisticParams::default()
        }))
        .unwrap()
    }

    #[test]
    fn knn_stores_training_set() {
        let data = gen_blobs(10, 1.0, &mut RngState::from_seed(1)).unwrap();
        let mut clf = ProbabilisticClassifier::new(ModelSpec::Knn { k: 5 }).unwrap();
        clf.fit(&DataPool::new(PoolRole::Known, data)).unwrap();
        assert_eq!(clf.stored_points(), Some(10));
    }

    #[test]
    fn knn_smoothing_values() {
        let mut clf = ProbabilisticClassifier::new(ModelSpec::Knn { k: 3 }).unwrap();
        clf.fit(&pool(&[
            (&[0.0], 1),
            (&[0.1], 1),
            (&[0.2], 1),
            (&[5.0], 0),
            (&[6.0], 0),
            (&[7.0], 0),
        ]))
        .unwrap();
        assert!((clf.predict_proba(&[0.05]).unwrap() - 0.8).abs() < 1e-15);
        assert!((clf.predict_proba(&[6.5]).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn knn_distance_ties_prefer_lower_index() {
        // both candidates at distance 1; index 1 (label 0) must beat index 2 (label 1)
        let mut clf = ProbabilisticClassifier::new(ModelSpec::Knn { k: 2 }).unwrap();
        clf.fit(&pool(&[(&[0.0], 1), (&[1.0], 0), (&[-1.0], 1)]))
            .unwrap();
        // neighbours: index 0 (d=0) + index 1 -> one positive -> 2/4
        assert_eq!(clf.predict_proba(&[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn knn_own_point_with_k1_recovers_label() {
        let data = gen_blobs(40, 2.0, &mut RngState::from_seed(3)).unwrap();
        let mut clf = ProbabilisticClassifier::new(ModelSpec::Knn { k: 1 }).unwrap();
        let p = DataPool::new(PoolRole::Known, data.clone());
        clf.fit(&p).unwrap();
        for inst in &data {
            assert_eq!(clf.predict_label(&inst.features).unwrap(), inst.label);
        }
    }

    #[test]
    fn logistic_zero_iterations_is_half() {
        let mut clf = logistic(0);
        clf.fit(&pool(&[(&[1.0, 2.0], 1), (&[3.0, -1.0], 0)]))
            .unwrap();
        assert_eq!(clf.predict_proba(&[10.0, -3.0]).unwrap(), 0.5);
        assert_eq!(clf.predict_label(&[10.0, -3.0]).unwrap(), 1);
    }

    #[test]
    fn logistic_separable_blobs_train_accuracy() {
        let data = gen_blobs(200, 0.5, &mut RngState::from_seed(4)).unwrap();
        let mut clf =
            ProbabilisticClassifier::new(ModelSpec::Logistic(LogisticParams::default())).unwrap();
        clf.fit(&DataPool::new(PoolRole::Known, data.clone()))
            .unwrap();
        let correct = data
            .iter()
            .filter(|i| clf.predict_label(&i.features).unwrap() == i.label)
            .count();
        assert!(correct as f64 / data.len() as f64 >= 0.95);
    }

    #[test]
    fn logistic_single_class_pool_gives_biased_constant() {
        let mut clf = logistic(500);
        clf.fit(&pool(&[(&[1.0], 1), (&[2.0], 1), (&[3.0], 1)]))
            .unwrap();
        let p = clf.predict_proba(&[-50.0]).unwrap();
        assert!(p > 0.5 && p < 1.0);
        let q = clf.predict_proba(&[50.0]).unwrap();
        assert!(q > 0.5 && q <= 1.0);
    }

    #[test]
    fn predict_label_threshold() {
        assert_eq!(label_from_proba(0.5), 1);
        assert_eq!(label_from_proba(0.49999), 0);
    }

    #[test]
    fn errors() {
        let clf = ProbabilisticClassifier::new(ModelSpec::Knn { k: 3 }).unwrap();
        assert_eq!(clf.predict_proba(&[0.0]), Err(Error::Unfitted));
        let mut clf = ProbabilisticClassifier::new(ModelSpec::Knn { k: 3 }).unwrap();
        assert_eq!(
            clf.fit(&DataPool::new(PoolRole::Known, vec![])),
            Err(Error::EmptyPool("training pool"))
        );
        clf.fit(&pool(&[(&[0.0, 1.0], 1)])).unwrap();
        assert!(matches!(
            clf.predict_proba(&[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(ProbabilisticClassifier::new(ModelSpec::Knn { k: 0 }).is_err());
        let masked = DataPool::new(PoolRole::Unknown, vec![]);
        assert_eq!(clf.fit(&masked), Err(Error::MaskedLabels));
    }

    #[test]
    fn refit_replaces_state() {
        let mut clf = ProbabilisticClassifier::new(ModelSpec::Knn { k: 1 }).unwrap();
        clf.fit(&pool(&[(&[0.0], 1)])).unwrap();
        clf.fit(&pool(&[(&[0.0], 0), (&[1.0], 0)])).unwrap();
        assert_eq!(clf.stored_points(), Some(2));
        assert_eq!(clf.predict_label(&[0.0]).unwrap(), 0);
    }
}
