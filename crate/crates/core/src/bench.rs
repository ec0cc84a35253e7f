//! Multi-scale membership evaluation.
//!
//! For every seed: choose known members and known non-members, fit the
//! aggregator on them, score every paragraph, turn the evaluation documents
//! into units at the requested scale, compute one membership statistic per
//! unit and measure AUROC against the true labels.
//!
//! Labels are read in exactly three places: choosing the known partitions,
//! grouping evaluation documents into per-class bootstrap pools, and the
//! final AUROC. Unit scoring sees only paragraph records and score slices.
//! Random draws are keyed by unit slot, never by class, so flipping every
//! evaluation label permutes the units without changing any statistic.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregator::{self, AggregatorModel, FitConfig};
use crate::error::{Error, Result};
use crate::features::{feature_vector, FeatureSchema, FeatureVector};
use crate::records::{Collection, Corpus, DocumentRecord, ParagraphRecord, Split, SplitCounts};
use crate::seed::{self, DOMAIN_BASELINE, DOMAIN_COLLECTION, DOMAIN_SPLIT};
use crate::stats::{self, auroc_counts, mean_std, AurocCounts, ScoreSample};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Sentence,
    Paragraph,
    Document,
    Collection,
}

impl Scale {
    /// t-test for collections (many paragraphs), U-test otherwise.
    pub fn default_test(self) -> TestKind {
        match self {
            Scale::Collection => TestKind::T,
            _ => TestKind::U,
        }
    }

    fn uses_test(self) -> bool {
        matches!(self, Scale::Document | Scale::Collection)
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Sentence => "sentence",
            Scale::Paragraph => "paragraph",
            Scale::Document => "document",
            Scale::Collection => "collection",
        })
    }
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sentence" => Ok(Scale::Sentence),
            "paragraph" => Ok(Scale::Paragraph),
            "document" => Ok(Scale::Document),
            "collection" => Ok(Scale::Collection),
            other => Err(format!("unknown scale '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    T,
    U,
}

impl FromStr for TestKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "t" => Ok(TestKind::T),
            "u" => Ok(TestKind::U),
            other => Err(format!("unknown test '{other}', expected t or u")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub scale: Scale,
    pub collection_size: usize,
    pub n_collections: usize,
    /// Baseline sample size. `None` matches each unit's paragraph count.
    pub baseline_k: Option<usize>,
    pub test: TestKind,
    /// Use Welch's size-normalized denominator in the t-test.
    pub welch: bool,
    pub seeds: Vec<u64>,
    /// Fraction of each collection drawn from the opposite class.
    pub contamination: f64,
    pub n_known_members: usize,
    pub n_known_nonmembers: usize,
    pub aggregator: FitConfig,
}

impl EvalConfig {
    pub fn new(scale: Scale) -> Self {
        EvalConfig {
            scale,
            collection_size: 500,
            n_collections: 1000,
            baseline_k: None,
            test: scale.default_test(),
            welch: false,
            seeds: Self::seeds_from(0, 5),
            contamination: 0.0,
            n_known_members: 1000,
            n_known_nonmembers: 1000,
            aggregator: FitConfig::default(),
        }
    }

    /// `count` consecutive seeds starting at `master`.
    pub fn seeds_from(master: u64, count: usize) -> Vec<u64> {
        (0..count as u64).map(|i| master.wrapping_add(i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.collection_size == 0 || self.n_collections == 0 {
            return bad("collection_size and n_collections must be >= 1".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if !(0.0..=1.0).contains(&self.contamination) {
            return bad(format!(
                "contamination must lie in [0, 1], got {}",
                self.contamination
            ));
        }
        if self.test == TestKind::T && self.baseline_k.is_some_and(|k| k < 2) {
            return bad("baseline_k must be >= 2 for the t-test".into());
        }
        if self.baseline_k == Some(0) {
            return bad("baseline_k must be >= 1".into());
        }
        if self.scale.uses_test() && self.n_known_nonmembers == 0 {
            return bad(
                "document and collection scales need known non-members for the baseline".into(),
            );
        }
        self.aggregator.validate()
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig::new(Scale::Collection)
    }
}

#[derive(Debug)]
pub struct KnownEvalSplit<'a> {
    pub known_members: Vec<&'a DocumentRecord>,
    pub known_nonmembers: Vec<&'a DocumentRecord>,
    pub eval_documents: Vec<&'a DocumentRecord>,
}

/// Positions `(known members, known non-members, rest)` for a labelled sequence.
fn split_positions(
    labels: &[bool],
    n_known_members: usize,
    n_known_nonmembers: usize,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let mut rng = seed::stream(seed, DOMAIN_SPLIT, 0);
    let mut chosen = vec![false; labels.len()];
    let mut pick = |class: bool, count: usize| -> Result<Vec<usize>> {
        let pool: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if count > pool.len() {
            return Err(Error::Insufficient(format!(
                "requested {count} known {} but only {} are available",
                if class { "members" } else { "non-members" },
                pool.len()
            )));
        }
        let mut picked: Vec<usize> = index::sample(&mut rng, pool.len(), count)
            .into_iter()
            .map(|i| pool[i])
            .collect();
        picked.sort_unstable();
        for &i in &picked {
            chosen[i] = true;
        }
        Ok(picked)
    };
    let members = pick(true, n_known_members)?;
    let nonmembers = pick(false, n_known_nonmembers)?;
    let rest = (0..labels.len()).filter(|&i| !chosen[i]).collect();
    Ok((members, nonmembers, rest))
}

/// Samples known members and known non-members without replacement;
/// everything else becomes evaluation data, in input order.
pub fn split_known_eval<'a>(
    documents: &[&'a DocumentRecord],
    n_known_members: usize,
    n_known_nonmembers: usize,
    seed: u64,
) -> Result<KnownEvalSplit<'a>> {
    let labels: Vec<bool> = documents.iter().map(|d| d.membership).collect();
    let (members, nonmembers, rest) =
        split_positions(&labels, n_known_members, n_known_nonmembers, seed)?;
    let take = |pos: Vec<usize>| pos.into_iter().map(|i| documents[i]).collect();
    Ok(KnownEvalSplit {
        known_members: take(members),
        known_nonmembers: take(nonmembers),
        eval_documents: take(rest),
    })
}

/// Documents of one bootstrap collection, as indices into the two class pools.
struct CollectionDraw {
    own: Vec<usize>,
    other: Vec<usize>,
}

fn contaminated_count(size: usize, contamination: f64) -> usize {
    (contamination * size as f64).floor() as usize
}

/// Draws collection `slot`. Both classes use the same stream for a slot, each
/// against its own pool, which keeps the draw independent of the labels.
fn draw_collection(
    seed: u64,
    slot: usize,
    own_len: usize,
    other_len: usize,
    size: usize,
    contamination: f64,
) -> CollectionDraw {
    let n_other = contaminated_count(size, contamination);
    let mut rng = seed::stream(seed, DOMAIN_COLLECTION, slot as u64);
    let own = (0..size - n_other)
        .map(|_| rng.random_range(0..own_len))
        .collect();
    let other = (0..n_other)
        .map(|_| rng.random_range(0..other_len))
        .collect();
    CollectionDraw { own, other }
}

struct CollectionPlan<'a, T> {
    members: Vec<&'a T>,
    nonmembers: Vec<&'a T>,
}

impl<'a, T> CollectionPlan<'a, T> {
    fn new(items: &[&'a T], labels: impl Fn(&T) -> bool) -> Result<Self> {
        let (members, nonmembers): (Vec<&T>, Vec<&T>) = items.iter().partition(|d| labels(d));
        if members.is_empty() || nonmembers.is_empty() {
            return Err(Error::Insufficient(format!(
                "collections need evaluation documents of both classes ({} members, {} non-members)",
                members.len(),
                nonmembers.len()
            )));
        }
        Ok(CollectionPlan {
            members,
            nonmembers,
        })
    }

    /// Documents of collection `slot` of class `membership`.
    fn documents(
        &self,
        seed: u64,
        slot: usize,
        membership: bool,
        size: usize,
        contamination: f64,
    ) -> Vec<&'a T> {
        let (own, other) = if membership {
            (&self.members, &self.nonmembers)
        } else {
            (&self.nonmembers, &self.members)
        };
        let draw = draw_collection(seed, slot, own.len(), other.len(), size, contamination);
        draw.own
            .iter()
            .map(|&i| own[i])
            .chain(draw.other.iter().map(|&i| other[i]))
            .collect()
    }
}

/// Bootstraps `n_collections` member and `n_collections` non-member collections.
///
/// Each collection holds `collection_size` documents drawn with replacement
/// from its class's pool. With contamination `c`, ⌊c·size⌋ of them are drawn
/// from the opposite class instead; this applies to both classes, so the
/// collection label is wrong for that fraction of documents either way.
pub fn make_collections(
    eval_documents: &[&DocumentRecord],
    collection_size: usize,
    n_collections: usize,
    seed: u64,
    contamination: f64,
) -> Result<Vec<Collection>> {
    if collection_size == 0 || !(0.0..=1.0).contains(&contamination) {
        return Err(Error::InvalidParameter(format!(
            "bad collection parameters: size {collection_size}, contamination {contamination}"
        )));
    }
    let plan = CollectionPlan::new(eval_documents, |d| d.membership)?;
    let mut out = Vec::with_capacity(2 * n_collections);
    for membership in [true, false] {
        for slot in 0..n_collections {
            let docs = plan.documents(seed, slot, membership, collection_size, contamination);
            out.push(Collection {
                collection_id: format!(
                    "{}-{slot:05}",
                    if membership { "member" } else { "nonmember" }
                ),
                doc_ids: docs.iter().map(|d| d.doc_id.clone()).collect(),
                membership,
            });
        }
    }
    Ok(out)
}

/// A label-free evaluation unit: the records whose scores form its statistic.
#[derive(Clone, Debug)]
pub struct Unit<'a> {
    pub records: Vec<&'a ParagraphRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatOptions {
    pub test: TestKind,
    pub welch: bool,
    pub baseline_k: Option<usize>,
    /// Sample the baseline with replacement when the pool is too small
    /// instead of failing.
    pub resample_short_baseline: bool,
}

impl StatOptions {
    fn from_config(config: &EvalConfig) -> Self {
        StatOptions {
            test: config.test,
            welch: config.welch,
            baseline_k: config.baseline_k,
            resample_short_baseline: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitScore {
    /// Oriented so that higher means more member-like.
    pub statistic: f64,
    /// The baseline had to be sampled with replacement.
    pub resampled: bool,
}

/// Compares query paragraph scores against a baseline sample from `pool`.
pub fn statistic_from_scores(
    query: Vec<f64>,
    pool: &[f64],
    options: &StatOptions,
    rng: &mut impl Rng,
) -> Result<UnitScore> {
    if pool.is_empty() {
        return Err(Error::Insufficient("baseline pool is empty".into()));
    }
    let k = options.baseline_k.unwrap_or(query.len());
    let resampled = pool.len() < k;
    let baseline: Vec<f64> = if resampled {
        if !options.resample_short_baseline {
            return Err(Error::Insufficient(format!(
                "baseline pool has {} scores but {k} are required",
                pool.len()
            )));
        }
        (0..k)
            .map(|_| pool[rng.random_range(0..pool.len())])
            .collect()
    } else {
        index::sample(rng, pool.len(), k)
            .into_iter()
            .map(|i| pool[i])
            .collect()
    };
    let query = ScoreSample::query(query)?;
    let baseline = ScoreSample::baseline(baseline)?;
    let statistic = match options.test {
        TestKind::T => stats::t_score_with(&query, &baseline, options.welch)?,
        TestKind::U => stats::query_rank_sum(&query, &baseline),
    };
    Ok(UnitScore {
        statistic,
        resampled,
    })
}

/// Membership statistic of one unit.
///
/// Sentence and paragraph units hold one record whose aggregator output is the
/// statistic. Document and collection units compare all their paragraph
/// scores with a baseline drawn from `baseline_pool`.
pub fn unit_statistic(
    unit: &Unit<'_>,
    scale: Scale,
    model: &AggregatorModel,
    baseline_pool: &[f64],
    options: &StatOptions,
    rng: &mut impl Rng,
) -> Result<UnitScore> {
    let scores = unit
        .records
        .iter()
        .map(|r| aggregator::apply(model, &feature_vector(r)))
        .collect::<Result<Vec<f64>>>()?;
    if scores.is_empty() {
        return Err(Error::InvalidParameter("unit has no records".into()));
    }
    if scale.uses_test() {
        statistic_from_scores(scores, baseline_pool, options, rng)
    } else if scores.len() == 1 {
        Ok(UnitScore {
            statistic: scores[0],
            resampled: false,
        })
    } else {
        Err(Error::InvalidParameter(format!(
            "{scale} units hold exactly one record, got {}",
            scores.len()
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusReference {
    pub corpus_id: String,
    pub model_id: String,
    pub context_window: u64,
    pub counts: SplitCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub auroc: f64,
    /// Exact counts behind `auroc`.
    pub auroc_counts: AurocCounts,
    pub train_auroc: f64,
    pub n_member_units: usize,
    pub n_nonmember_units: usize,
    pub baseline_pool_size: usize,
    /// Units whose baseline was sampled with replacement.
    pub resampled_baselines: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    /// Known partitions drawn from documents tagged `known`; all `eval` documents evaluated.
    Designated,
    /// No document tagged `known`; known partitions resampled from the whole corpus per seed.
    Resampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    FitPerSeed,
    Fixed,
}

pub const ORIENTATION_NOTE: &str = "higher statistic = member; t-test reports the t-score, \
U-test reports the query rank sum (the negated U-score)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub corpus: CorpusReference,
    pub feature_schema: FeatureSchema,
    pub partition: Partition,
    pub model_source: ModelSource,
    pub orientation: String,
    pub per_seed: Vec<SeedResult>,
    pub auroc_mean: f64,
    pub auroc_std: f64,
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn csv_header() -> &'static str {
        "scale,seed,auroc,train_auroc,n_member_units,n_nonmember_units,resampled_baselines"
    }

    /// One row per seed, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for r in &self.per_seed {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.config.scale,
                r.seed,
                r.auroc,
                r.train_auroc,
                r.n_member_units,
                r.n_nonmember_units,
                r.resampled_baselines
            ));
        }
        out
    }
}

fn scale_records(doc: &DocumentRecord, scale: Scale) -> &[ParagraphRecord] {
    match scale {
        Scale::Sentence => doc.sentences.as_deref().unwrap_or(&[]),
        _ => &doc.paragraphs,
    }
}

/// Feature vectors of every record used at `scale`, per document.
fn corpus_features(corpus: &Corpus, scale: Scale) -> Vec<Vec<FeatureVector>> {
    corpus
        .documents
        .par_iter()
        .map(|d| scale_records(d, scale).iter().map(feature_vector).collect())
        .collect()
}

struct Prepared<'a> {
    corpus: &'a Corpus,
    schema: FeatureSchema,
    partition: Partition,
    candidates: Vec<usize>,
    designated_eval: Vec<usize>,
    features: Vec<Vec<FeatureVector>>,
}

impl<'a> Prepared<'a> {
    fn new(corpus: &'a Corpus, config: &EvalConfig) -> Result<Self> {
        config.validate()?;
        let schema = FeatureSchema::detect(&corpus.documents)?;
        let docs = &corpus.documents;
        let known: Vec<usize> = (0..docs.len())
            .filter(|&i| docs[i].split == Split::Known)
            .collect();
        let (partition, candidates, designated_eval) = if known.is_empty() {
            (Partition::Resampled, (0..docs.len()).collect(), Vec::new())
        } else {
            let eval = (0..docs.len())
                .filter(|&i| docs[i].split == Split::Eval)
                .collect();
            (Partition::Designated, known, eval)
        };
        if config.scale == Scale::Sentence && !docs.iter().any(|d| d.sentences.is_some()) {
            return Err(Error::FeatureUnavailable(
                "sentence scale requires sentence records, and the corpus has none",
            ));
        }
        Ok(Prepared {
            corpus,
            schema,
            partition,
            candidates,
            designated_eval,
            features: corpus_features(corpus, config.scale),
        })
    }

    /// Known partitions and evaluation documents for one seed, as corpus indices.
    fn split(
        &self,
        config: &EvalConfig,
        seed: u64,
    ) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
        let docs = &self.corpus.documents;
        let labels: Vec<bool> = self
            .candidates
            .iter()
            .map(|&i| docs[i].membership)
            .collect();
        let (members, nonmembers, rest) = split_positions(
            &labels,
            config.n_known_members,
            config.n_known_nonmembers,
            seed,
        )?;
        let to_corpus = |pos: Vec<usize>| {
            pos.into_iter()
                .map(|p| self.candidates[p])
                .collect::<Vec<_>>()
        };
        let eval = match self.partition {
            Partition::Designated => self.designated_eval.clone(),
            Partition::Resampled => to_corpus(rest),
        };
        Ok((to_corpus(members), to_corpus(nonmembers), eval))
    }

    fn fit(
        &self,
        config: &EvalConfig,
        members: &[usize],
        nonmembers: &[usize],
    ) -> Result<AggregatorModel> {
        let gather = |ids: &[usize]| -> Vec<FeatureVector> {
            ids.iter()
                .flat_map(|&i| self.features[i].iter().cloned())
                .collect()
        };
        aggregator::fit(&gather(members), &gather(nonmembers), &config.aggregator)
    }
}

/// Fits the aggregator on the known partitions `evaluate` would use for `seed`.
pub fn fit_on_known(corpus: &Corpus, config: &EvalConfig, seed: u64) -> Result<AggregatorModel> {
    let prepared = Prepared::new(corpus, config)?;
    let (members, nonmembers, _) = prepared.split(config, seed)?;
    prepared.fit(config, &members, &nonmembers)
}

pub fn evaluate(corpus: &Corpus, config: &EvalConfig) -> Result<EvalReport> {
    run(corpus, config, None)
}

/// Evaluates with a pre-fitted aggregator instead of fitting one per seed.
pub fn evaluate_with_model(
    corpus: &Corpus,
    config: &EvalConfig,
    model: &AggregatorModel,
) -> Result<EvalReport> {
    model.check()?;
    run(corpus, config, Some(model))
}

fn run(
    corpus: &Corpus,
    config: &EvalConfig,
    fixed: Option<&AggregatorModel>,
) -> Result<EvalReport> {
    let prepared = Prepared::new(corpus, config)?;
    if let Some(model) = fixed {
        if model.input_schema != prepared.schema {
            return Err(Error::SchemaMismatch {
                expected: format!("{:?}", prepared.schema),
                found: format!("{:?}", model.input_schema),
            });
        }
    }
    let per_seed = config
        .seeds
        .iter()
        .map(|&seed| evaluate_seed(&prepared, config, fixed, seed))
        .collect::<Result<Vec<_>>>()?;
    let aurocs: Vec<f64> = per_seed.iter().map(|r| r.auroc).collect();
    let summary = mean_std(&aurocs)?;
    let m = &corpus.manifest;
    Ok(EvalReport {
        config: config.clone(),
        corpus: CorpusReference {
            corpus_id: m.corpus_id.clone(),
            model_id: m.model_id.clone(),
            context_window: m.context_window,
            counts: m.counts,
        },
        feature_schema: prepared.schema,
        partition: prepared.partition,
        model_source: if fixed.is_some() {
            ModelSource::Fixed
        } else {
            ModelSource::FitPerSeed
        },
        orientation: ORIENTATION_NOTE.into(),
        per_seed,
        auroc_mean: summary.mean,
        auroc_std: summary.std,
    })
}

fn evaluate_seed(
    prepared: &Prepared<'_>,
    config: &EvalConfig,
    fixed: Option<&AggregatorModel>,
    seed: u64,
) -> Result<SeedResult> {
    let docs = &prepared.corpus.documents;
    let (known_members, known_nonmembers, eval) = prepared.split(config, seed)?;
    let fitted;
    let model = match fixed {
        Some(m) => m,
        None => {
            fitted = prepared.fit(config, &known_members, &known_nonmembers)?;
            &fitted
        }
    };

    let scores: Vec<Vec<f64>> = prepared
        .features
        .par_iter()
        .map(|fvs| fvs.iter().map(|fv| aggregator::apply(model, fv)).collect())
        .collect::<Result<_>>()?;
    let pool: Vec<f64> = known_nonmembers
        .iter()
        .flat_map(|&i| scores[i].iter().copied())
        .collect();
    let options = StatOptions::from_config(config);

    let (statistics, labels): (Vec<UnitScore>, Vec<bool>) = match config.scale {
        Scale::Sentence | Scale::Paragraph => eval
            .iter()
            .flat_map(|&i| {
                scores[i].iter().map(move |&s| {
                    (
                        UnitScore {
                            statistic: s,
                            resampled: false,
                        },
                        docs[i].membership,
                    )
                })
            })
            .unzip(),
        Scale::Document => {
            let stats = eval
                .par_iter()
                .enumerate()
                .map(|(slot, &i)| {
                    let mut rng = seed::stream(seed, DOMAIN_BASELINE, slot as u64);
                    statistic_from_scores(scores[i].clone(), &pool, &options, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            (stats, eval.iter().map(|&i| docs[i].membership).collect())
        }
        Scale::Collection => {
            let plan =
                CollectionPlan::new(&eval.iter().collect::<Vec<_>>(), |&i| docs[i].membership)?;
            let units: Vec<(usize, bool)> = [true, false]
                .into_iter()
                .flat_map(|m| (0..config.n_collections).map(move |slot| (slot, m)))
                .collect();
            let stats = units
                .par_iter()
                .map(|&(slot, membership)| {
                    let members = plan.documents(
                        seed,
                        slot,
                        membership,
                        config.collection_size,
                        config.contamination,
                    );
                    let query: Vec<f64> = members
                        .iter()
                        .flat_map(|&&i| scores[i].iter().copied())
                        .collect();
                    let mut rng = seed::stream(seed, DOMAIN_BASELINE, slot as u64);
                    statistic_from_scores(query, &pool, &options, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            (stats, units.iter().map(|&(_, m)| m).collect())
        }
    };

    let values: Vec<f64> = statistics.iter().map(|s| s.statistic).collect();
    let n_member_units = labels.iter().filter(|&&l| l).count();
    if n_member_units == 0 || n_member_units == labels.len() {
        return Err(Error::Insufficient(format!(
            "evaluation set for seed {seed} has a single class ({n_member_units} of {} units are members)",
            labels.len()
        )));
    }
    let counts = auroc_counts(&values, &labels)?;
    Ok(SeedResult {
        seed,
        auroc: counts.value(),
        auroc_counts: counts,
        train_auroc: model.train_auroc,
        n_member_units,
        n_nonmember_units: labels.len() - n_member_units,
        baseline_pool_size: pool.len(),
        resampled_baselines: statistics.iter().filter(|s| s.resampled).count(),
    })
}
