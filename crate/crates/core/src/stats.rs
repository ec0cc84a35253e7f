//! Two-sample statistics and rank-based AUROC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::DENOMINATOR_EPS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Query,
    Baseline,
}

/// A non-empty set of finite paragraph scores.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreSample {
    values: Vec<f64>,
    origin: Origin,
}

impl ScoreSample {
    pub fn new(values: Vec<f64>, origin: Origin) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{origin:?} sample is empty"
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{origin:?} sample contains non-finite value {bad}"
            )));
        }
        Ok(ScoreSample { values, origin })
    }

    pub fn query(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Origin::Query)
    }

    pub fn baseline(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Origin::Baseline)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Arithmetic mean and sample (n − 1) standard deviation; std is 0 for one value.
pub fn mean_std(values: &[f64]) -> Result<MeanStd> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "mean_std of an empty sequence".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok(MeanStd { mean, std: 0.0 });
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(MeanStd {
        mean,
        std: (ss / (n - 1.0)).sqrt(),
    })
}

/// Difference of means over the root of summed sample variances.
///
/// With `welch` the variances are divided by their sample sizes, giving
/// Welch's t statistic instead. Higher is more member-like.
pub fn t_score_with(query: &ScoreSample, baseline: &ScoreSample, welch: bool) -> Result<f64> {
    for s in [query, baseline] {
        if s.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "t-score needs at least 2 {:?} values, got {}",
                s.origin(),
                s.len()
            )));
        }
    }
    let q = mean_std(query.values())?;
    let b = mean_std(baseline.values())?;
    let (mut vq, mut vb) = (q.std * q.std, b.std * b.std);
    if welch {
        vq /= query.len() as f64;
        vb /= baseline.len() as f64;
    }
    Ok((q.mean - b.mean) / (vq + vb).sqrt().max(DENOMINATOR_EPS))
}

pub fn t_score(query: &ScoreSample, baseline: &ScoreSample) -> Result<f64> {
    t_score_with(query, baseline, false)
}

/// Midranks (1-based, ties averaged) of `values`, doubled so they stay integral.
fn doubled_midranks(values: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end; their mean doubled is start+1+end
        let doubled = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = doubled;
        }
        start = end;
    }
    ranks
}

/// Midranks (ties averaged) of `values` within the sequence, starting at 1.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    doubled_midranks(values)
        .into_iter()
        .map(|r| r as f64 / 2.0)
        .collect()
}

/// Sum of the query values' midranks in the combined query + baseline sample.
pub fn query_rank_sum(query: &ScoreSample, baseline: &ScoreSample) -> f64 {
    let mut combined = Vec::with_capacity(query.len() + baseline.len());
    combined.extend_from_slice(query.values());
    combined.extend_from_slice(baseline.values());
    let doubled: u64 = doubled_midranks(&combined)[..query.len()].iter().sum();
    doubled as f64 / 2.0
}

/// Negated query rank sum. Lower is more member-like.
pub fn u_score(query: &ScoreSample, baseline: &ScoreSample) -> f64 {
    -query_rank_sum(query, baseline)
}

/// Exact Mann-Whitney counts behind an AUROC, doubled so ties stay integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AurocCounts {
    /// Twice the number of positive-negative pairs won by the positive, ties counting half.
    pub doubled_wins: u64,
    /// Twice the number of positive-negative pairs.
    pub doubled_pairs: u64,
}

impl AurocCounts {
    /// The correctly rounded ratio.
    pub fn value(self) -> f64 {
        self.doubled_wins as f64 / self.doubled_pairs as f64
    }

    /// Counts with the positive and negative classes exchanged.
    pub fn complement(self) -> AurocCounts {
        AurocCounts {
            doubled_wins: self.doubled_pairs - self.doubled_wins,
            doubled_pairs: self.doubled_pairs,
        }
    }
}

/// Integer counts of [`auroc`], from midrank sums.
pub fn auroc_counts(scores: &[f64], labels: &[bool]) -> Result<AurocCounts> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidParameter(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(bad) = scores.iter().find(|v| v.is_nan()) {
        return Err(Error::InvalidParameter(format!("score {bad} is NaN")));
    }
    let positives = labels.iter().filter(|&&l| l).count() as u64;
    let negatives = labels.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidParameter(
            "AUROC needs both positive and negative labels".into(),
        ));
    }
    let rank_sum: u64 = doubled_midranks(scores)
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(r, _)| r)
        .sum();
    Ok(AurocCounts {
        doubled_wins: rank_sum - positives * (positives + 1),
        doubled_pairs: 2 * positives * negatives,
    })
}

/// Area under the ROC curve: P(s⁺ > s⁻) + ½·P(s⁺ = s⁻).
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    auroc_counts(scores, labels).map(AurocCounts::value)
}
