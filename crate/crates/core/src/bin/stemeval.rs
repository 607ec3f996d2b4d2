use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use stemeval::corpus::{ColumnRef, CorpusFormat};
use stemeval::downstream::ClassifierSpec;
use stemeval::embeddings::EmbeddingProviderSpec;
use stemeval::intrinsic::AnldWeighting;
use stemeval::normalizer::NormalizerSpec;
use stemeval::report::{self, IntrinsicEntry, ReportEntry, RunConfig};

#[derive(Parser)]
#[command(name = "stemeval", version, about = "Evaluate stemmers and lemmatizers on a labeled corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full evaluation: compression, retention, SES, distortion and downstream deltas.
    Evaluate(EvaluateArgs),
    /// Compression ratio and ANLD only.
    Metrics(MetricsArgs),
    /// Print the most distorted original/stem pairs for one normalizer.
    AnldPairs(PairsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Delimiter {
    Tab,
    Comma,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weighting {
    Occurrence,
    Type,
}

impl From<Weighting> for AnldWeighting {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::Occurrence => AnldWeighting::ByOccurrence,
            Weighting::Type => AnldWeighting::ByType,
        }
    }
}

#[derive(Args)]
struct CorpusArgs {
    /// Delimited file with one document per row.
    #[arg(long)]
    corpus: PathBuf,
    /// Text column: 0-based index or header name.
    #[arg(long, default_value = "0")]
    text_col: String,
    #[arg(long, default_value = "1")]
    label_col: String,
    #[arg(long)]
    id_col: Option<String>,
    #[arg(long, value_enum, default_value = "tab")]
    delimiter: Delimiter,
    /// First row is a header.
    #[arg(long)]
    header: bool,
    /// Keep case when tokenizing.
    #[arg(long)]
    keep_case: bool,
    /// Keep leading/trailing punctuation on tokens.
    #[arg(long)]
    keep_punct: bool,
}

impl CorpusArgs {
    fn format(&self) -> CorpusFormat {
        CorpusFormat {
            text_col: ColumnRef::parse(&self.text_col),
            label_col: ColumnRef::parse(&self.label_col),
            id_col: self.id_col.as_deref().map(ColumnRef::parse),
            delimiter: match self.delimiter {
                Delimiter::Tab => b'\t',
                Delimiter::Comma => b',',
            },
            has_header: self.header,
        }
    }
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// identity | snowball-en | truncate:<n> | map:<path> | ext:<command>
    #[arg(long = "normalizer", required = true)]
    normalizers: Vec<String>,
    #[arg(long, value_enum, default_value = "occurrence")]
    anld_weighting: Weighting,
    /// Number of worst pairs kept per normalizer.
    #[arg(long, default_value_t = 20)]
    worst_pairs: usize,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    metrics: MetricsArgs,
    /// hash:<dim>:<seed> | vecfile:<path> | http:<url>
    #[arg(long, default_value = "hash:256:0")]
    embedder: String,
    /// Comma-separated subset of nb, lr, svm.
    #[arg(long, default_value = "nb,lr,svm", value_delimiter = ',')]
    classifiers: Vec<String>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = stemeval::ses::DEFAULT_SAFETY_THRESHOLD)]
    safety_threshold: f64,
    #[arg(long)]
    out_md: Option<PathBuf>,
}

#[derive(Args)]
struct PairsArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    normalizer: String,
    #[arg(long, default_value_t = 20)]
    top: usize,
    #[arg(long, value_enum, default_value = "occurrence")]
    anld_weighting: Weighting,
}

fn base_config(corpus: &CorpusArgs, normalizers: &[String]) -> Result<RunConfig> {
    let specs = normalizers
        .iter()
        .map(|s| NormalizerSpec::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut config = RunConfig::new(&corpus.corpus, corpus.format(), specs);
    config.tokenizer.lowercase = !corpus.keep_case;
    config.tokenizer.strip_punct = !corpus.keep_punct;
    Ok(config)
}

fn evaluate(args: EvaluateArgs) -> Result<ExitCode> {
    let m = &args.metrics;
    let mut config = base_config(&m.corpus, &m.normalizers)?;
    config.embedder = EmbeddingProviderSpec::parse(&args.embedder)?;
    config.classifiers = args
        .classifiers
        .iter()
        .map(|c| ClassifierSpec::parse(c))
        .collect::<Result<Vec<_>, _>>()?;
    config.k = args.k;
    config.seed = args.seed;
    config.safety_threshold = args.safety_threshold;
    config.anld_weighting = m.anld_weighting.into();
    config.worst_pairs = m.worst_pairs;
    config.out_json = m.out_json.clone();
    config.out_md = args.out_md.clone();

    let evaluation = report::run_evaluation(&config)?;
    if !evaluation.skipped_lines.is_empty() {
        eprintln!(
            "warning: skipped {} rows with empty text (lines {:?})",
            evaluation.skipped_lines.len(),
            evaluation.skipped_lines
        );
    }
    for entry in &evaluation.reports {
        if let ReportEntry::Failed(f) = entry {
            eprintln!("error: normalizer {}: {}", f.name, f.error);
        }
    }
    match &config.out_json {
        Some(path) => report::emit_json(&evaluation.reports, path)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", report::to_json(&evaluation.reports)?),
    }
    if let Some(path) = &config.out_md {
        report::emit_markdown(&evaluation.reports, path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if evaluation.all_failed() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn metrics(args: MetricsArgs) -> Result<ExitCode> {
    let mut config = base_config(&args.corpus, &args.normalizers)?;
    config.anld_weighting = args.anld_weighting.into();
    config.worst_pairs = args.worst_pairs;
    let entries = report::run_intrinsic(&config)?;
    match &args.out_json {
        Some(path) => report::emit_json(&entries, path)?,
        None => println!("{}", report::to_json(&entries)?),
    }
    let mut any_ok = false;
    for entry in &entries {
        match entry {
            IntrinsicEntry::Ok(r) => {
                any_ok = true;
                eprintln!(
                    "{}\tCR {:.3}\tANLD {:.3}",
                    r.name, r.compression.cr, r.distortion.anld
                );
            }
            IntrinsicEntry::Failed(f) => eprintln!("error: normalizer {}: {}", f.name, f.error),
        }
    }
    Ok(if any_ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn anld_pairs(args: PairsArgs) -> Result<ExitCode> {
    let mut config = base_config(&args.corpus, std::slice::from_ref(&args.normalizer))?;
    config.anld_weighting = args.anld_weighting.into();
    config.worst_pairs = args.top;
    let entries = report::run_intrinsic(&config)?;
    let Some(entry) = entries.into_iter().next() else {
        bail!("no normalizer given");
    };
    match entry {
        IntrinsicEntry::Ok(r) => {
            println!("original\tstem\tdistance");
            for p in r.distortion.worst_pairs {
                println!("{}\t{}\t{:.4}", p.original, p.stem, p.distance);
            }
            Ok(ExitCode::SUCCESS)
        }
        IntrinsicEntry::Failed(f) => {
            eprintln!("error: normalizer {}: {}", f.name, f.error);
            Ok(ExitCode::from(2))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evaluate(a) => evaluate(a),
        Command::Metrics(a) => metrics(a),
        Command::AnldPairs(a) => anld_pairs(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
