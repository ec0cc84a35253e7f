//! Membership inference for language models at sentence, paragraph,
//! document and collection scale.
//!
//! Paragraph likelihoods ([`records`]) are turned into per-paragraph features
//! ([`features`]), fused into one score by a learned linear map
//! ([`aggregator`]), and compared against known non-members with rank or t
//! statistics ([`stats`]). [`bench`] runs the multi-seed bootstrapped AUROC
//! evaluation and [`synth`] produces corpora with a controlled signal.

pub mod aggregator;
pub mod bench;
pub mod error;
pub mod features;
mod json;
pub mod records;
mod seed;
pub mod stats;
pub mod synth;

pub use aggregator::{apply, fit, AggregatorModel, FitConfig};
pub use bench::{evaluate, evaluate_with_model, EvalConfig, EvalReport, Scale, TestKind};
pub use error::{Error, Result};
pub use features::{feature_vector, FeatureSchema, FeatureVector};
pub use records::{
    read_corpus, write_corpus, Corpus, CorpusManifest, DocumentRecord, ParagraphRecord, Split,
};
pub use synth::{generate, SynthConfig};
