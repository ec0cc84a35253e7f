//! Synthetic corpora with a controlled paragraph-level membership signal.
//!
//! Token log-probabilities are Gaussian, truncated at zero. Members and
//! non-members differ only in the token mean, chosen so that the paragraph
//! loss separates the classes with a prescribed AUROC. Lowercase streams and
//! compressed sizes carry noise only.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::records::{Corpus, CorpusManifest, DocumentRecord, ParagraphRecord, Split};
use crate::seed::{self, DOMAIN_SYNTH_DOC, DOMAIN_SYNTH_LAYOUT};

/// Standard deviations kept between the highest class mean and zero
/// (upper tail mass 4.8e-7).
const TRUNCATION_MARGIN_SIGMAS: f64 = 4.9;
const LOWERCASE_NOISE_STD: f64 = 0.05;
const BYTES_PER_TOKEN: (f64, f64) = (1.5, 1.9);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthMode {
    /// Every document has exactly `paragraphs_per_doc` paragraphs.
    Fixed,
    /// Paragraph counts are geometric with mean `paragraphs_per_doc`.
    Geometric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub target_paragraph_auroc: f64,
    pub n_docs_per_class: usize,
    pub paragraphs_per_doc: usize,
    pub tokens_per_paragraph: usize,
    pub token_logprob_std: f64,
    pub seed: u64,
    /// Token mean of non-member text, in nats.
    pub nonmember_mean: f64,
    pub length_mode: LengthMode,
    /// Sentence records per document; zero omits them.
    pub sentences_per_doc: usize,
    pub tokens_per_sentence: usize,
    /// Documents per class tagged `known`; the rest are tagged `eval`.
    pub known_per_class: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            target_paragraph_auroc: 0.55,
            n_docs_per_class: 1000,
            paragraphs_per_doc: 7,
            tokens_per_paragraph: 512,
            token_logprob_std: 0.6,
            seed: 0,
            nonmember_mean: -3.0,
            length_mode: LengthMode::Fixed,
            sentences_per_doc: 0,
            tokens_per_sentence: 43,
            known_per_class: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let a = self.target_paragraph_auroc;
        if !(0.5..1.0).contains(&a) {
            return bad(format!(
                "target_paragraph_auroc must lie in [0.5, 1), got {a}"
            ));
        }
        if self.n_docs_per_class == 0
            || self.paragraphs_per_doc == 0
            || self.tokens_per_paragraph == 0
        {
            return bad("document, paragraph and token counts must be >= 1".into());
        }
        if !(self.token_logprob_std.is_finite() && self.token_logprob_std > 0.0) {
            return bad(format!(
                "token_logprob_std must be positive, got {}",
                self.token_logprob_std
            ));
        }
        if !(self.nonmember_mean.is_finite() && self.nonmember_mean < 0.0) {
            return bad(format!(
                "nonmember_mean must be negative, got {}",
                self.nonmember_mean
            ));
        }
        if self.sentences_per_doc > 0 && self.tokens_per_sentence == 0 {
            return bad("tokens_per_sentence must be >= 1".into());
        }
        if self.known_per_class > self.n_docs_per_class {
            return bad(format!(
                "known_per_class {} exceeds n_docs_per_class {}",
                self.known_per_class, self.n_docs_per_class
            ));
        }
        Ok(())
    }

    /// Token means `(member, nonmember)` realizing the target paragraph AUROC.
    pub fn class_means(&self) -> Result<(f64, f64)> {
        let loss_std = self.token_logprob_std / (self.tokens_per_paragraph as f64).sqrt();
        let shift = auroc_to_mean_shift(self.target_paragraph_auroc, loss_std)?;
        let member = self.nonmember_mean + shift;
        let offset = (-(member + TRUNCATION_MARGIN_SIGMAS * self.token_logprob_std)).min(0.0);
        Ok((member + offset, self.nonmember_mean + offset))
    }
}

/// Inverse standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9 over the open unit interval).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_cdf(1.0 - p)
    }
}

/// Mean separation of two equal-variance Gaussians whose AUROC is `a`.
pub fn auroc_to_mean_shift(a: f64, sigma: f64) -> Result<f64> {
    if !(0.5..1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!(
            "AUROC must lie in [0.5, 1), got {a}"
        )));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(std::f64::consts::SQRT_2 * sigma * inverse_normal_cdf(a))
}

struct Sampler {
    tokens: Normal<f64>,
    noise: Normal<f64>,
}

impl Sampler {
    fn logprob(&self, rng: &mut ChaCha8Rng) -> f64 {
        loop {
            let x = self.tokens.sample(rng);
            if x <= 0.0 {
                return x;
            }
        }
    }

    fn record(&self, index: usize, n_tokens: usize, rng: &mut ChaCha8Rng) -> ParagraphRecord {
        let token_logprobs: Vec<f64> = (0..n_tokens).map(|_| self.logprob(rng)).collect();
        let lowercase_logprobs = token_logprobs
            .iter()
            .map(|lp| (lp + self.noise.sample(rng)).min(0.0))
            .collect();
        let bytes_per_token = rng.random_range(BYTES_PER_TOKEN.0..BYTES_PER_TOKEN.1);
        let zlib_bytes = ((n_tokens as f64 * bytes_per_token).round() as u64).max(1);
        ParagraphRecord {
            index,
            n_tokens,
            token_logprobs,
            lowercase_logprobs: Some(lowercase_logprobs),
            zlib_bytes,
            text: None,
        }
    }
}

/// Generates a corpus; identical configs give identical corpora.
pub fn generate(config: &SynthConfig) -> Result<Corpus> {
    config.validate()?;
    let (member_mean, nonmember_mean) = config.class_means()?;
    let sampler = |mean: f64| Sampler {
        tokens: Normal::new(mean, config.token_logprob_std).expect("validated std"),
        noise: Normal::new(0.0, LOWERCASE_NOISE_STD).expect("constant std"),
    };
    let samplers = [sampler(nonmember_mean), sampler(member_mean)];

    let n = config.n_docs_per_class;
    let mut layout = seed::stream(config.seed, DOMAIN_SYNTH_LAYOUT, 0);
    let mut labels: Vec<bool> = (0..2 * n).map(|i| i < n).collect();
    labels.shuffle(&mut layout);
    let mut known = vec![false; 2 * n];
    for class in [true, false] {
        let mut slots: Vec<usize> = (0..2 * n).filter(|&i| labels[i] == class).collect();
        slots.shuffle(&mut layout);
        for &i in &slots[..config.known_per_class] {
            known[i] = true;
        }
    }

    let lengths = match config.length_mode {
        LengthMode::Fixed => None,
        LengthMode::Geometric => Some(
            Geometric::new(1.0 / config.paragraphs_per_doc as f64)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?,
        ),
    };

    let documents = (0..2 * n)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream(config.seed, DOMAIN_SYNTH_DOC, i as u64);
            let sampler = &samplers[usize::from(labels[i])];
            let k = match &lengths {
                None => config.paragraphs_per_doc,
                Some(geo) => 1 + geo.sample(&mut rng) as usize,
            };
            let paragraphs = (0..k)
                .map(|j| sampler.record(j, config.tokens_per_paragraph, &mut rng))
                .collect();
            let sentences = (config.sentences_per_doc > 0).then(|| {
                (0..config.sentences_per_doc)
                    .map(|j| sampler.record(j, config.tokens_per_sentence, &mut rng))
                    .collect()
            });
            DocumentRecord {
                doc_id: format!("synth-{i:06}"),
                source: "synthetic".into(),
                split: if known[i] { Split::Known } else { Split::Eval },
                membership: labels[i],
                paragraphs,
                sentences,
            }
        })
        .collect::<Vec<_>>();

    let mut manifest = CorpusManifest::new(
        format!("synthetic-seed{}", config.seed),
        config.tokens_per_paragraph as u64,
        "synthetic-gaussian",
        &documents,
    );
    manifest
        .extra
        .insert("synth".into(), serde_json::to_value(config)?);
    Ok(Corpus {
        manifest,
        documents,
    })
}
