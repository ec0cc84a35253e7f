//! `miascale` command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use miascale::bench::fit_on_known;
use miascale::features::{feature_vector, FeatureSchema};
use miascale::synth::LengthMode;
use miascale::{
    evaluate, evaluate_with_model, read_corpus, write_corpus, AggregatorModel, Corpus, Error,
    EvalConfig, EvalReport, FitConfig, Scale, SynthConfig, TestKind,
};

#[derive(Parser)]
#[command(
    name = "miascale",
    version,
    about = "Membership inference at sentence, paragraph, document and collection scale"
)]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with a controlled paragraph-level signal.
    Synth(SynthArgs),
    /// Dump per-record feature vectors as CSV.
    Features(FeaturesArgs),
    /// Fit the aggregator on known documents and save it.
    Fit(FitArgs),
    /// Run the multi-seed AUROC evaluation.
    Eval(EvalArgs),
    /// Validate a corpus and print its statistics.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Sentence,
    Paragraph,
    Document,
    Collection,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Scale {
        match s {
            ScaleArg::Sentence => Scale::Sentence,
            ScaleArg::Paragraph => Scale::Paragraph,
            ScaleArg::Document => Scale::Document,
            ScaleArg::Collection => Scale::Collection,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TestArg {
    T,
    U,
}

impl From<TestArg> for TestKind {
    fn from(t: TestArg) -> TestKind {
        match t {
            TestArg::T => TestKind::T,
            TestArg::U => TestKind::U,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LengthArg {
    Fixed,
    Geometric,
}

#[derive(Args)]
struct SynthArgs {
    /// Output corpus file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.55)]
    target_paragraph_auroc: f64,
    #[arg(long, default_value_t = 1000)]
    n_docs_per_class: usize,
    #[arg(long, default_value_t = 7)]
    paragraphs_per_doc: usize,
    #[arg(long, default_value_t = 512)]
    tokens_per_paragraph: usize,
    #[arg(long, default_value_t = 0.6)]
    token_logprob_std: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    nonmember_mean: f64,
    #[arg(long, value_enum, default_value_t = LengthArg::Fixed)]
    length_mode: LengthArg,
    #[arg(long, default_value_t = 0)]
    sentences_per_doc: usize,
    #[arg(long, default_value_t = 43)]
    tokens_per_sentence: usize,
    /// Documents per class tagged `known`.
    #[arg(long, default_value_t = 0)]
    known_per_class: usize,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
    /// Use sentence records instead of paragraphs.
    #[arg(long)]
    sentences: bool,
}

#[derive(Args)]
struct AggregatorArgs {
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
}

impl AggregatorArgs {
    fn config(&self, seed: u64) -> FitConfig {
        FitConfig {
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            l2: self.l2,
            seed,
        }
    }
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
    /// Seed of the known-document split.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fit on sentence records instead of paragraphs.
    #[arg(long, value_enum, default_value_t = ScaleArg::Paragraph)]
    scale: ScaleArg,
    #[arg(long, default_value_t = 1000)]
    n_known_members: usize,
    #[arg(long, default_value_t = 1000)]
    n_known_nonmembers: usize,
    #[command(flatten)]
    aggregator: AggregatorArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, required_unless_present = "replay")]
    scale: Option<ScaleArg>,
    #[arg(long, default_value_t = 500)]
    collection_size: usize,
    #[arg(long, default_value_t = 1000)]
    n_collections: usize,
    /// Baseline sample size; defaults to the unit's paragraph count.
    #[arg(long)]
    baseline_k: Option<usize>,
    /// Defaults to t at collection scale and u elsewhere.
    #[arg(long, value_enum)]
    test: Option<TestArg>,
    #[arg(long)]
    welch: bool,
    /// Master seed; seed i of the run is master + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeds.
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value_t = 0.0)]
    contamination: f64,
    #[arg(long, default_value_t = 1000)]
    n_known_members: usize,
    #[arg(long, default_value_t = 1000)]
    n_known_nonmembers: usize,
    #[command(flatten)]
    aggregator: AggregatorArgs,
    /// Score with this saved model instead of fitting one per seed.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Take the configuration from an earlier report, ignoring other config flags.
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

impl EvalArgs {
    fn config(&self) -> Result<EvalConfig, Error> {
        if let Some(path) = &self.replay {
            let text = read_text(path)?;
            let report: EvalReport = serde_json::from_str(&text)?;
            return Ok(report.config);
        }
        let scale: Scale = self.scale.expect("required by clap").into();
        Ok(EvalConfig {
            scale,
            collection_size: self.collection_size,
            n_collections: self.n_collections,
            baseline_k: self.baseline_k,
            test: self.test.map_or(scale.default_test(), Into::into),
            welch: self.welch,
            seeds: EvalConfig::seeds_from(self.seed, self.seeds),
            contamination: self.contamination,
            n_known_members: self.n_known_members,
            n_known_nonmembers: self.n_known_nonmembers,
            aggregator: self.aggregator.config(self.seed),
        })
    }
}

#[derive(Args)]
struct InspectArgs {
    corpus: PathBuf,
}

fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    let config = SynthConfig {
        target_paragraph_auroc: args.target_paragraph_auroc,
        n_docs_per_class: args.n_docs_per_class,
        paragraphs_per_doc: args.paragraphs_per_doc,
        tokens_per_paragraph: args.tokens_per_paragraph,
        token_logprob_std: args.token_logprob_std,
        seed: args.seed,
        nonmember_mean: args.nonmember_mean,
        length_mode: match args.length_mode {
            LengthArg::Fixed => LengthMode::Fixed,
            LengthArg::Geometric => LengthMode::Geometric,
        },
        sentences_per_doc: args.sentences_per_doc,
        tokens_per_sentence: args.tokens_per_sentence,
        known_per_class: args.known_per_class,
    };
    let corpus = miascale::generate(&config)?;
    write_corpus(&corpus.manifest, &corpus.documents, &args.out)?;
    eprintln!(
        "wrote {} documents to {}",
        corpus.documents.len(),
        args.out.display()
    );
    Ok(())
}

fn features(args: FeaturesArgs) -> Result<(), Error> {
    let corpus = read_corpus(&args.corpus)?;
    let schema = FeatureSchema::detect(&corpus.documents)?;
    let mut out = String::from("doc_id,split,membership,index,n_tokens");
    for name in schema.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for doc in &corpus.documents {
        let records = if args.sentences {
            doc.sentences.as_deref().unwrap_or(&[])
        } else {
            &doc.paragraphs
        };
        let split = serde_json::to_value(doc.split)?;
        for rec in records {
            write!(
                out,
                "{},{},{},{},{}",
                csv_field(&doc.doc_id),
                split.as_str().unwrap_or_default(),
                doc.membership,
                rec.index,
                rec.n_tokens
            )
            .expect("writing to a String");
            for v in feature_vector(rec).values() {
                write!(out, ",{v}").expect("writing to a String");
            }
            out.push('\n');
        }
    }
    write_text(&args.out, &out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fit(args: FitArgs) -> Result<(), Error> {
    let corpus = read_corpus(&args.corpus)?;
    let config = EvalConfig {
        n_known_members: args.n_known_members,
        n_known_nonmembers: args.n_known_nonmembers,
        seeds: vec![args.seed],
        aggregator: args.aggregator.config(args.seed),
        ..EvalConfig::new(args.scale.into())
    };
    let model = fit_on_known(&corpus, &config, args.seed)?;
    model.save(&args.out)?;
    eprintln!(
        "fitted {} features, train AUROC {:.4}, saved to {}",
        model.feature_schema.len(),
        model.train_auroc,
        args.out.display()
    );
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), Error> {
    let corpus = read_corpus(&args.corpus)?;
    let config = args.config()?;
    let report = match &args.model {
        Some(path) => evaluate_with_model(&corpus, &config, &AggregatorModel::load(path)?)?,
        None => evaluate(&corpus, &config)?,
    };
    if let Some(path) = &args.out_json {
        write_text(path, &report.to_json()?)?;
    }
    if let Some(path) = &args.out_csv {
        write_text(path, &report.to_csv())?;
    }
    println!(
        "{} scale, {} test: AUROC {:.4} ± {:.4} over {} seeds",
        config.scale,
        match config.test {
            TestKind::T => "t",
            TestKind::U => "u",
        },
        report.auroc_mean,
        report.auroc_std,
        report.per_seed.len()
    );
    for r in &report.per_seed {
        println!(
            "  seed {}: AUROC {:.4} (train {:.4}, {}+{} units)",
            r.seed, r.auroc, r.train_auroc, r.n_member_units, r.n_nonmember_units
        );
    }
    Ok(())
}

fn inspect(args: InspectArgs) -> Result<(), Error> {
    let corpus = read_corpus(&args.corpus)?;
    print!("{}", describe(&corpus)?);
    Ok(())
}

fn describe(corpus: &Corpus) -> Result<String, Error> {
    let m = &corpus.manifest;
    let schema = FeatureSchema::detect(&corpus.documents)?;
    let paragraphs: usize = corpus.documents.iter().map(|d| d.paragraphs.len()).sum();
    let sentences: usize = corpus
        .documents
        .iter()
        .filter_map(|d| d.sentences.as_ref().map(Vec::len))
        .sum();
    let tokens: usize = corpus
        .documents
        .iter()
        .flat_map(|d| &d.paragraphs)
        .map(|p| p.n_tokens)
        .sum();
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("corpus_id: {}", m.corpus_id));
    line(format!("model_id: {}", m.model_id));
    line(format!("context_window: {}", m.context_window));
    line(format!("documents: {}", corpus.documents.len()));
    line(format!(
        "eval: {} members, {} non-members",
        m.counts.eval_member, m.counts.eval_nonmember
    ));
    line(format!(
        "known: {} members, {} non-members",
        m.counts.known_member, m.counts.known_nonmember
    ));
    line(format!("paragraphs: {paragraphs} ({tokens} tokens)"));
    line(format!("sentences: {sentences}"));
    line(format!("features: {}", schema.names().join(", ")));
    for (label, membership) in [("members", true), ("non-members", false)] {
        let losses: Vec<f64> = corpus
            .documents
            .iter()
            .filter(|d| d.membership == membership)
            .flat_map(|d| &d.paragraphs)
            .map(|p| feature_vector(p).loss)
            .collect();
        if !losses.is_empty() {
            let ms = miascale::stats::mean_std(&losses)?;
            line(format!(
                "paragraph loss, {label}: {:.4} ± {:.4}",
                ms.mean, ms.std
            ));
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Features(a) => features(a),
        Command::Fit(a) => fit(a),
        Command::Eval(a) => eval(a),
        Command::Inspect(a) => inspect(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
