//! Learned linear map from paragraph features to a membership probability.
//!
//! Features are z-scored with pooled training statistics, then a logistic
//! model is fit by full-batch gradient descent on mean binary cross-entropy
//! plus an L2 penalty on the weights. Members are labelled 1, so a higher
//! output always means "more member-like".

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FeatureVector};
use crate::json;
use crate::stats::auroc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    /// Recorded for provenance. Zero initialization and full-batch updates
    /// leave nothing to randomize.
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            learning_rate: 0.1,
            epochs: 500,
            l2: 1e-4,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "l2 must be non-negative, got {}",
                self.l2
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregatorModel {
    /// Schema of the feature vectors the model accepts.
    pub input_schema: FeatureSchema,
    /// Names of the features the model actually uses, in input order.
    pub feature_schema: Vec<String>,
    /// Input features dropped at fit time for having zero variance.
    pub dropped_features: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub train_auroc: f64,
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Standardized design matrix (row-major) with 0/1 labels.
#[derive(Clone, Debug)]
pub struct TrainingSet {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

/// Penalized mean cross-entropy and its gradient at `(weights, bias)`.
///
/// The gradient is returned as `(d/dweights, d/dbias)`.
pub fn objective(data: &TrainingSet, weights: &[f64], bias: f64, l2: f64) -> (f64, Vec<f64>, f64) {
    let n = data.rows.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, &y) in data.rows.iter().zip(&data.labels) {
        let logit = bias + dot(weights, row);
        // -y·log σ(x) - (1-y)·log(1-σ(x)) = softplus(x) - y·x
        loss += softplus(logit) - y * logit;
        let residual = sigmoid(logit) - y;
        for (g, &z) in grad_w.iter_mut().zip(row) {
            *g += residual * z;
        }
        grad_b += residual;
    }
    loss /= n;
    grad_b /= n;
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    loss += 0.5 * l2 * dot(weights, weights);
    (loss, grad_w, grad_b)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient descent from zero. Returns the weights, bias and the objective
/// value before each update.
pub fn gradient_descent(data: &TrainingSet, config: &FitConfig) -> (Vec<f64>, f64, Vec<f64>) {
    let dim = data.rows.first().map_or(0, Vec::len);
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut trace = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let (loss, grad_w, grad_b) = objective(data, &weights, bias, config.l2);
        trace.push(loss);
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad_b;
    }
    (weights, bias, trace)
}

fn common_schema(members: &[FeatureVector], nonmembers: &[FeatureVector]) -> Result<FeatureSchema> {
    let schema = members
        .first()
        .or(nonmembers.first())
        .map(FeatureVector::schema)
        .ok_or_else(|| Error::Unfittable("no training data".into()))?;
    if let Some(other) = members
        .iter()
        .chain(nonmembers)
        .map(FeatureVector::schema)
        .find(|&s| s != schema)
    {
        return Err(Error::SchemaMismatch {
            expected: format!("{schema:?}"),
            found: format!("{other:?}"),
        });
    }
    Ok(schema)
}

/// Fits the aggregator on known members (label 1) and known non-members (label 0).
pub fn fit(
    members: &[FeatureVector],
    nonmembers: &[FeatureVector],
    config: &FitConfig,
) -> Result<AggregatorModel> {
    config.validate()?;
    if members.is_empty() || nonmembers.is_empty() {
        return Err(Error::Unfittable(format!(
            "need both classes, got {} members and {} non-members",
            members.len(),
            nonmembers.len()
        )));
    }
    let input_schema = common_schema(members, nonmembers)?;
    let names = input_schema.names();
    let raw: Vec<Vec<f64>> = members
        .iter()
        .chain(nonmembers)
        .map(FeatureVector::values)
        .collect();
    let n = raw.len() as f64;

    let mut kept = Vec::new();
    let mut dropped_features = Vec::new();
    let mut means = Vec::new();
    let mut stds = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let mean = raw.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = raw.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        if std > 0.0 && std.is_finite() {
            kept.push(j);
            means.push(mean);
            stds.push(std);
        } else {
            dropped_features.push(name.to_string());
        }
    }
    if kept.is_empty() {
        return Err(Error::Unfittable(
            "every feature has zero variance over the training data".into(),
        ));
    }

    let rows = raw
        .iter()
        .map(|r| standardize(r, &kept, &means, &stds))
        .collect();
    let labels = std::iter::repeat_n(1.0, members.len())
        .chain(std::iter::repeat_n(0.0, nonmembers.len()))
        .collect();
    let data = TrainingSet { rows, labels };
    let (weights, bias, _) = gradient_descent(&data, config);
    if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
        return Err(Error::Unfittable(
            "gradient descent diverged; lower the learning rate".into(),
        ));
    }

    let scores: Vec<f64> = data.rows.iter().map(|z| bias + dot(&weights, z)).collect();
    let labels: Vec<bool> = data.labels.iter().map(|&y| y == 1.0).collect();
    let train_auroc = auroc(&scores, &labels)?;

    Ok(AggregatorModel {
        input_schema,
        feature_schema: kept.iter().map(|&j| names[j].to_string()).collect(),
        dropped_features,
        means,
        stds,
        weights,
        bias,
        train_auroc,
    })
}

fn standardize(values: &[f64], kept: &[usize], means: &[f64], stds: &[f64]) -> Vec<f64> {
    kept.iter()
        .zip(means.iter().zip(stds))
        .map(|(&j, (m, s))| (values[j] - m) / s)
        .collect()
}

impl AggregatorModel {
    fn kept_indices(&self) -> Result<Vec<usize>> {
        let names = self.input_schema.names();
        self.feature_schema
            .iter()
            .map(|f| {
                names
                    .iter()
                    .position(|n| n == f)
                    .ok_or_else(|| Error::SchemaMismatch {
                        expected: format!("{:?}", self.input_schema),
                        found: format!("feature '{f}'"),
                    })
            })
            .collect()
    }

    /// Logit `w·z + b` for one feature vector.
    pub fn logit(&self, fv: &FeatureVector) -> Result<f64> {
        if fv.schema() != self.input_schema {
            return Err(Error::SchemaMismatch {
                expected: format!("{:?}", self.input_schema),
                found: format!("{:?}", fv.schema()),
            });
        }
        let kept = self.kept_indices()?;
        let z = standardize(&fv.values(), &kept, &self.means, &self.stds);
        Ok(self.bias + dot(&self.weights, &z))
    }

    pub fn check(&self) -> Result<()> {
        let l = self.feature_schema.len();
        let consistent =
            l > 0 && self.means.len() == l && self.stds.len() == l && self.weights.len() == l;
        if !consistent {
            return Err(Error::InvalidParameter(
                "model vectors disagree with its feature schema".into(),
            ));
        }
        if self.stds.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter(
                "model stds must be positive".into(),
            ));
        }
        if self
            .weights
            .iter()
            .chain(&self.means)
            .any(|w| !w.is_finite())
            || !self.bias.is_finite()
        {
            return Err(Error::InvalidParameter(
                "model parameters must be finite".into(),
            ));
        }
        self.kept_indices().map(|_| ())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = json::to_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: AggregatorModel = serde_json::from_str(&text)?;
        model.check()?;
        Ok(model)
    }
}

/// Membership probability of one paragraph.
pub fn apply(model: &AggregatorModel, fv: &FeatureVector) -> Result<f64> {
    model.logit(fv).map(sigmoid)
}
