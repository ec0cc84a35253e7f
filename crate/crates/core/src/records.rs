//! Corpus data model and the line-delimited corpus file.
//!
//! A corpus file is UTF-8 text with one JSON object per line: the manifest
//! first, then one object per document. Floats are written with 17
//! significant digits, so reading a written corpus reproduces it bit for bit.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;

/// Model likelihoods for one chunk of text (a paragraph or a sentence).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParagraphRecord {
    pub index: usize,
    pub n_tokens: usize,
    /// Natural-log probability of each token under the audited model.
    pub token_logprobs: Vec<f64>,
    /// Log-probabilities of the lowercased text, tokenized independently.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lowercase_logprobs: Option<Vec<f64>>,
    /// zlib-compressed length of the chunk's UTF-8 text.
    pub zlib_bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Eval,
    Known,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub source: String,
    pub split: Split,
    /// Ground truth: true when the document was in the training data.
    pub membership: bool,
    pub paragraphs: Vec<ParagraphRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentences: Option<Vec<ParagraphRecord>>,
}

/// A bag of documents evaluated as one membership unit. Duplicates allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collection {
    pub collection_id: String,
    pub doc_ids: Vec<String>,
    pub membership: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitCounts {
    pub eval_member: usize,
    pub eval_nonmember: usize,
    pub known_member: usize,
    pub known_nonmember: usize,
}

impl SplitCounts {
    pub fn tally<'a>(documents: impl IntoIterator<Item = &'a DocumentRecord>) -> Self {
        let mut counts = SplitCounts::default();
        for doc in documents {
            let cell = match (doc.split, doc.membership) {
                (Split::Eval, true) => &mut counts.eval_member,
                (Split::Eval, false) => &mut counts.eval_nonmember,
                (Split::Known, true) => &mut counts.known_member,
                (Split::Known, false) => &mut counts.known_nonmember,
            };
            *cell += 1;
        }
        counts
    }

    pub fn total(&self) -> usize {
        self.eval_member + self.eval_nonmember + self.known_member + self.known_nonmember
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub corpus_id: String,
    /// Tokens per paragraph.
    pub context_window: u64,
    pub model_id: String,
    pub counts: SplitCounts,
    /// Producer-specific annotations, preserved verbatim.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl CorpusManifest {
    pub fn new(
        corpus_id: impl Into<String>,
        context_window: u64,
        model_id: impl Into<String>,
        documents: &[DocumentRecord],
    ) -> Self {
        CorpusManifest {
            corpus_id: corpus_id.into(),
            context_window,
            model_id: model_id.into(),
            counts: SplitCounts::tally(documents),
            extra: serde_json::Map::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub manifest: CorpusManifest,
    pub documents: Vec<DocumentRecord>,
}

impl ParagraphRecord {
    /// Checks the record invariants, returning a description of the first violation.
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.n_tokens == 0 {
            return Err(format!("record {}: n_tokens must be >= 1", self.index));
        }
        if self.token_logprobs.len() != self.n_tokens {
            return Err(format!(
                "record {}: token_logprobs has {} entries but n_tokens is {}",
                self.index,
                self.token_logprobs.len(),
                self.n_tokens
            ));
        }
        check_logprobs(self.index, "token_logprobs", &self.token_logprobs)?;
        if let Some(lower) = &self.lowercase_logprobs {
            if lower.is_empty() {
                return Err(format!(
                    "record {}: lowercase_logprobs present but empty",
                    self.index
                ));
            }
            check_logprobs(self.index, "lowercase_logprobs", lower)?;
        }
        if self.zlib_bytes == 0 {
            return Err(format!("record {}: zlib_bytes must be >= 1", self.index));
        }
        Ok(())
    }
}

fn check_logprobs(index: usize, field: &str, values: &[f64]) -> std::result::Result<(), String> {
    for (pos, &lp) in values.iter().enumerate() {
        if !lp.is_finite() {
            return Err(format!(
                "record {index}: {field}[{pos}]: log-probability is not finite"
            ));
        }
        if lp > 0.0 {
            return Err(format!(
                "record {index}: {field}[{pos}]: log-probability > 0 ({lp})"
            ));
        }
    }
    Ok(())
}

fn check_indices(kind: &str, records: &[ParagraphRecord]) -> std::result::Result<(), String> {
    for (expected, rec) in records.iter().enumerate() {
        if rec.index != expected {
            return Err(format!(
                "{kind} indices must be 0..{} in order; found {} at position {expected}",
                records.len(),
                rec.index
            ));
        }
        rec.check().map_err(|e| format!("{kind} {e}"))?;
    }
    Ok(())
}

impl DocumentRecord {
    pub fn check(&self) -> std::result::Result<(), String> {
        if self.doc_id.is_empty() {
            return Err("doc_id must not be empty".into());
        }
        if self.paragraphs.is_empty() {
            return Err("document has no paragraphs".into());
        }
        check_indices("paragraph", &self.paragraphs)?;
        if let Some(sentences) = &self.sentences {
            check_indices("sentence", sentences)?;
        }
        Ok(())
    }
}

fn validate_documents<'a>(
    docs: impl IntoIterator<Item = (usize, &'a DocumentRecord)>,
) -> Result<()> {
    let mut seen = HashSet::new();
    for (line, doc) in docs {
        doc.check().map_err(|invariant| Error::Invariant {
            line,
            doc_id: doc.doc_id.clone(),
            invariant,
        })?;
        if !seen.insert(doc.doc_id.as_str()) {
            return Err(Error::DuplicateDocId {
                line,
                doc_id: doc.doc_id.clone(),
            });
        }
    }
    Ok(())
}

fn check_manifest(manifest: &CorpusManifest, documents: &[DocumentRecord]) -> Result<()> {
    if manifest.context_window == 0 {
        return Err(Error::Manifest("context_window must be > 0".into()));
    }
    let actual = SplitCounts::tally(documents);
    if actual != manifest.counts {
        return Err(Error::Manifest(format!(
            "counts {:?} do not match the {} document records {:?}",
            manifest.counts,
            documents.len(),
            actual
        )));
    }
    Ok(())
}

/// Parses and validates a corpus from any line source.
pub fn read_corpus_from(reader: impl BufRead) -> Result<Corpus> {
    let mut manifest: Option<CorpusManifest> = None;
    let mut documents = Vec::new();
    let mut lines = Vec::new();
    let mut seen = HashSet::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        if manifest.is_none() {
            let m: CorpusManifest = serde_json::from_str(&line).map_err(|e| Error::Malformed {
                line: line_no,
                message: format!("manifest: {e}"),
            })?;
            manifest = Some(m);
            continue;
        }
        let doc: DocumentRecord = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        doc.check().map_err(|invariant| Error::Invariant {
            line: line_no,
            doc_id: doc.doc_id.clone(),
            invariant,
        })?;
        if !seen.insert(doc.doc_id.clone()) {
            return Err(Error::DuplicateDocId {
                line: line_no,
                doc_id: doc.doc_id,
            });
        }
        lines.push(line_no);
        documents.push(doc);
    }

    let manifest = manifest.ok_or(Error::Malformed {
        line: 1,
        message: "missing manifest line".into(),
    })?;
    check_manifest(&manifest, &documents)?;
    Ok(Corpus {
        manifest,
        documents,
    })
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus_from(BufReader::new(file))
}

/// Serializes a corpus to its file form. Inputs are validated first.
pub fn write_corpus_to(
    manifest: &CorpusManifest,
    documents: &[DocumentRecord],
    mut out: impl Write,
) -> Result<()> {
    check_manifest(manifest, documents)?;
    validate_documents(documents.iter().enumerate().map(|(i, d)| (i + 2, d)))?;

    let io_err = |e| Error::io("<corpus stream>", e);
    writeln!(out, "{}", json::to_line(manifest)?).map_err(io_err)?;
    for doc in documents {
        writeln!(out, "{}", json::to_line(doc)?).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_corpus(
    manifest: &CorpusManifest,
    documents: &[DocumentRecord],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_corpus_to(manifest, documents, BufWriter::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}
