//! Paragraph-level membership features.
//!
//! All features are computed in log space from the per-token log-probabilities
//! of a [`ParagraphRecord`]. Aggregation happens over a sorted copy of the
//! values, so every feature is bit-identical under any permutation of tokens.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::records::{DocumentRecord, ParagraphRecord};

/// Min-K% thresholds, in feature order.
pub const MIN_K_FRACTIONS: [f64; 7] = [0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60];

/// Guards denominators that may legitimately reach zero on degenerate input.
pub const DENOMINATOR_EPS: f64 = 1e-12;

const FULL_NAMES: [&str; 10] = [
    "loss",
    "lowercase_ratio",
    "zlib_ratio",
    "min_k_0.05",
    "min_k_0.10",
    "min_k_0.20",
    "min_k_0.30",
    "min_k_0.40",
    "min_k_0.50",
    "min_k_0.60",
];

/// Which features a corpus supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSchema {
    /// All ten features.
    Full,
    /// No lowercase stream anywhere in the corpus; nine features.
    WithoutLowercase,
}

impl FeatureSchema {
    pub fn names(self) -> Vec<&'static str> {
        match self {
            FeatureSchema::Full => FULL_NAMES.to_vec(),
            FeatureSchema::WithoutLowercase => FULL_NAMES
                .iter()
                .copied()
                .filter(|&n| n != "lowercase_ratio")
                .collect(),
        }
    }

    pub fn len(self) -> usize {
        match self {
            FeatureSchema::Full => 10,
            FeatureSchema::WithoutLowercase => 9,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// Determines the schema shared by every record of a corpus.
    ///
    /// Errors when some records carry a lowercase stream and others do not.
    pub fn detect<'a>(documents: impl IntoIterator<Item = &'a DocumentRecord>) -> Result<Self> {
        let mut with = 0usize;
        let mut without = 0usize;
        let mut example_without = None;
        for doc in documents {
            let records = doc.paragraphs.iter().chain(doc.sentences.iter().flatten());
            for rec in records {
                if rec.lowercase_logprobs.is_some() {
                    with += 1;
                } else {
                    without += 1;
                    example_without.get_or_insert_with(|| doc.doc_id.clone());
                }
            }
        }
        match (with, without) {
            (_, 0) => Ok(FeatureSchema::Full),
            (0, _) => Ok(FeatureSchema::WithoutLowercase),
            _ => Err(Error::InconsistentFeatures(format!(
                "{with} records have a lowercase stream and {without} do not (e.g. document '{}')",
                example_without.unwrap_or_default()
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Mean negative log-likelihood, nats per token.
    pub loss: f64,
    pub lowercase_ratio: Option<f64>,
    /// Total nats per compressed byte.
    pub zlib_ratio: f64,
    /// Mean of the lowest log-probabilities at each of [`MIN_K_FRACTIONS`].
    pub min_k: [f64; 7],
}

impl FeatureVector {
    pub fn schema(&self) -> FeatureSchema {
        if self.lowercase_ratio.is_some() {
            FeatureSchema::Full
        } else {
            FeatureSchema::WithoutLowercase
        }
    }

    /// Values in schema order.
    pub fn values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(10);
        v.push(self.loss);
        v.extend(self.lowercase_ratio);
        v.push(self.zlib_ratio);
        v.extend_from_slice(&self.min_k);
        v
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

fn sorted_sum(sorted: &[f64]) -> f64 {
    sorted.iter().sum()
}

fn loss_of_sorted(sorted: &[f64]) -> f64 {
    -(sorted_sum(sorted) / sorted.len() as f64)
}

fn check_fraction(k: f64) -> Result<()> {
    if k > 0.0 && k <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "min-k fraction must lie in (0, 1], got {k}"
        )))
    }
}

/// Number of tokens averaged by Min-K at fraction `k`: ⌈k·n⌉, at least one.
pub fn min_k_count(k: f64, n: usize) -> usize {
    // The slack keeps products like 0.1 * 30 = 3.0000000000000004 from rounding up.
    let raw = k * n as f64;
    ((raw - 1e-9).ceil() as usize).clamp(1, n)
}

fn min_k_of_sorted(sorted: &[f64], k: f64) -> f64 {
    let m = min_k_count(k, sorted.len());
    sorted_sum(&sorted[..m]) / m as f64
}

pub fn compute_loss(p: &ParagraphRecord) -> f64 {
    loss_of_sorted(&sorted(&p.token_logprobs))
}

pub fn compute_lowercase_ratio(p: &ParagraphRecord) -> Result<f64> {
    let lower = p
        .lowercase_logprobs
        .as_deref()
        .filter(|l| !l.is_empty())
        .ok_or(Error::FeatureUnavailable("lowercase stream missing"))?;
    Ok(lowercase_ratio(
        compute_loss(p),
        loss_of_sorted(&sorted(lower)),
    ))
}

fn lowercase_ratio(loss: f64, lower_loss: f64) -> f64 {
    loss / lower_loss.max(DENOMINATOR_EPS)
}

pub fn compute_zlib_ratio(p: &ParagraphRecord) -> f64 {
    zlib_ratio(&sorted(&p.token_logprobs), p.zlib_bytes)
}

fn zlib_ratio(sorted: &[f64], zlib_bytes: u64) -> f64 {
    -sorted_sum(sorted) / zlib_bytes as f64
}

pub fn compute_min_k(p: &ParagraphRecord, k: f64) -> Result<f64> {
    check_fraction(k)?;
    Ok(min_k_of_sorted(&sorted(&p.token_logprobs), k))
}

/// All features of one record, in schema order.
pub fn feature_vector(p: &ParagraphRecord) -> FeatureVector {
    let s = sorted(&p.token_logprobs);
    let loss = loss_of_sorted(&s);
    let lowercase_ratio = p
        .lowercase_logprobs
        .as_deref()
        .filter(|l| !l.is_empty())
        .map(|l| lowercase_ratio(loss, loss_of_sorted(&sorted(l))));
    let mut min_k = [0.0; 7];
    for (slot, &k) in min_k.iter_mut().zip(&MIN_K_FRACTIONS) {
        *slot = min_k_of_sorted(&s, k);
    }
    FeatureVector {
        loss,
        lowercase_ratio,
        zlib_ratio: zlib_ratio(&s, p.zlib_bytes),
        min_k,
    }
}

/// Feature vectors for a batch of records that must share `schema`.
pub fn feature_vectors<'a>(
    records: impl IntoIterator<Item = &'a ParagraphRecord>,
    schema: FeatureSchema,
) -> Result<Vec<FeatureVector>> {
    records
        .into_iter()
        .map(|r| {
            let fv = feature_vector(r);
            if fv.schema() == schema {
                Ok(fv)
            } else {
                Err(Error::SchemaMismatch {
                    expected: format!("{schema:?}"),
                    found: format!("{:?}", fv.schema()),
                })
            }
        })
        .collect()
}
