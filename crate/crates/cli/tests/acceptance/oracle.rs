//! Independent reference implementations used to judge the library.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ContinuousCDF, Normal as StatNormal};

pub fn mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s / v.len() as f64
}

/// Unbiased variance by the two-pass formula.
pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

pub fn t_score(q: &[f64], b: &[f64]) -> f64 {
    (mean(q) - mean(b)) / (variance(q) + variance(b)).sqrt()
}

/// Pairwise wins over pairs, ties counting half.
pub fn auroc_pairs(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

/// Negated sum of query midranks, by sorting the pooled sample and scanning tie runs.
pub fn u_score(q: &[f64], b: &[f64]) -> f64 {
    let mut pooled: Vec<(f64, bool)> = q
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut sum = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let midrank = (i + 1 + j) as f64 / 2.0;
        sum += midrank * pooled[i..j].iter().filter(|p| p.1).count() as f64;
        i = j;
    }
    -sum
}

/// Mean of the ⌈p·n/100⌉ smallest values, at least one.
pub fn min_k(v: &[f64], percent: usize) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = (percent * v.len()).div_ceil(100).max(1);
    mean(&s[..m])
}

/// Protocol of a collection-scale evaluation, with Gaussian paragraph scores.
#[derive(Clone, Copy)]
pub struct CollectionProtocol {
    pub paragraph_auroc: f64,
    pub eval_docs_per_class: usize,
    pub paragraphs_per_doc: usize,
    pub baseline_pool: usize,
    pub collection_size: usize,
    pub n_collections: usize,
    pub contamination: f64,
}

pub struct OracleEstimate {
    pub mean: f64,
    pub std: f64,
}

/// Expected collection AUROC of the pooled t-statistic.
///
/// Each replicate draws fresh evaluation pools and a fresh non-member baseline
/// pool; member paragraphs score N(δ, 1) and non-members N(0, 1) with δ the
/// binormal shift of the paragraph AUROC. Collections bootstrap documents from
/// their pools, mixing ⌊c·size⌋ from the opposite class, and are tested against
/// an equal-size baseline drawn without replacement.
pub fn collection_auroc(p: CollectionProtocol, replicates: usize, seed: u64) -> OracleEstimate {
    let delta = 2f64.sqrt() * StatNormal::standard().inverse_cdf(p.paragraph_auroc);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = p.paragraphs_per_doc;
    let mut aurocs = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        // per document: (sum, sum of squares) of its paragraph scores
        let docs = |shift: f64, rng: &mut ChaCha8Rng| -> Vec<(f64, f64)> {
            (0..p.eval_docs_per_class)
                .map(|_| {
                    (0..k).fold((0.0, 0.0), |(s, ss), _| {
                        let x = normal.sample(rng) + shift;
                        (s + x, ss + x * x)
                    })
                })
                .collect()
        };
        let members = docs(delta, &mut rng);
        let nonmembers = docs(0.0, &mut rng);
        let pool: Vec<f64> = (0..p.baseline_pool)
            .map(|_| normal.sample(&mut rng))
            .collect();
        let n_other = (p.contamination * p.collection_size as f64).floor() as usize;
        let n_query = p.collection_size * k;
        let statistic = |own: &[(f64, f64)], other: &[(f64, f64)], rng: &mut ChaCha8Rng| -> f64 {
            let (mut s, mut ss) = (0.0, 0.0);
            for i in 0..p.collection_size {
                let src = if i < p.collection_size - n_other {
                    own
                } else {
                    other
                };
                let d = src[rng.random_range(0..src.len())];
                s += d.0;
                ss += d.1;
            }
            let nq = n_query as f64;
            let mq = s / nq;
            let vq = (ss - nq * mq * mq) / (nq - 1.0);
            let base: Vec<f64> = if n_query <= pool.len() {
                index::sample(rng, pool.len(), n_query)
                    .into_iter()
                    .map(|i| pool[i])
                    .collect()
            } else {
                (0..n_query)
                    .map(|_| pool[rng.random_range(0..pool.len())])
                    .collect()
            };
            (mq - mean(&base)) / (vq + variance(&base)).sqrt()
        };
        let mut scores = Vec::with_capacity(2 * p.n_collections);
        for _ in 0..p.n_collections {
            scores.push(statistic(&members, &nonmembers, &mut rng));
        }
        for _ in 0..p.n_collections {
            scores.push(statistic(&nonmembers, &members, &mut rng));
        }
        let labels: Vec<bool> = (0..scores.len()).map(|i| i < p.n_collections).collect();
        aurocs.push(auroc_by_sorting(&scores, &labels));
    }
    let m = mean(&aurocs);
    OracleEstimate {
        mean: m,
        std: if aurocs.len() > 1 {
            variance(&aurocs).sqrt()
        } else {
            0.0
        },
    }
}

/// Wins counted by merging sorted classes; ties have probability zero here.
fn auroc_by_sorting(scores: &[f64], labels: &[bool]) -> f64 {
    let mut neg: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|p| !p.1)
        .map(|p| *p.0)
        .collect();
    neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut wins = 0.0;
    let mut pos = 0.0;
    for (s, _) in scores.iter().zip(labels).filter(|p| *p.1) {
        wins += neg.partition_point(|n| n < s) as f64;
        pos += 1.0;
    }
    wins / (pos * neg.len() as f64)
}
