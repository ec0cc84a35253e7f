#![allow(dead_code)]

use miascale::ParagraphRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random valid record with `n` tokens and a lowercase stream.
pub fn random_record(rng: &mut ChaCha8Rng, n: usize) -> ParagraphRecord {
    let lp = |rng: &mut ChaCha8Rng| -> f64 { -rng.random_range(0.0..12.0_f64) };
    let token_logprobs: Vec<f64> = (0..n).map(|_| lp(rng)).collect();
    let lower_n = rng.random_range(1..=n + 3);
    ParagraphRecord {
        index: 0,
        n_tokens: n,
        token_logprobs,
        lowercase_logprobs: Some((0..lower_n).map(|_| lp(rng)).collect()),
        zlib_bytes: rng.random_range(1..=4 * n as u64),
        text: None,
    }
}

/// Mean in input order, one pass.
pub fn naive_mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s / v.len() as f64
}

/// Min-K oracle with the threshold given in whole percent.
pub fn min_k_oracle(v: &[f64], percent: usize) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = ((percent * v.len()).div_ceil(100)).max(1);
    naive_mean(&sorted[..m])
}

/// P(s+ > s-) + 0.5 P(s+ = s-) by counting every pair.
pub fn auroc_pairs(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Midrank of `v` within `all`: one plus the number below plus half the other ties.
pub fn midrank_by_counting(v: f64, all: &[f64]) -> f64 {
    let below = all.iter().filter(|&&x| x < v).count() as f64;
    let equal = all.iter().filter(|&&x| x == v).count() as f64;
    1.0 + below + (equal - 1.0) / 2.0
}

pub fn two_pass_mean_var(v: &[f64]) -> (f64, f64) {
    let mean = naive_mean(v);
    let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, ss / (v.len() as f64 - 1.0))
}
