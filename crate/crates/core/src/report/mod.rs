//! End-to-end evaluation runs and their JSON / Markdown reports.

mod markdown;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{self, Corpus, CorpusFormat, FoldPlan, TokenizedDocument, TokenizerConfig};
use crate::downstream::{
    self, ClassifierSpec, Condition, EvalRun, FoldScore, McNemarResult, Metric, MpdResult,
};
use crate::embeddings::{self, EmbeddingProvider, EmbeddingProviderSpec};
use crate::error::{Error, Result};
use crate::intrinsic::{self, AnldWeighting, CompressionResult, WorstPair, DEFAULT_WORST_PAIRS};
use crate::normalizer::{NormalizedCorpus, Normalizer, NormalizerSpec};
use crate::ses::{self, SesResult};

pub use markdown::render_markdown;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus_path: PathBuf,
    pub format: CorpusFormat,
    pub tokenizer: TokenizerConfig,
    pub normalizers: Vec<NormalizerSpec>,
    pub embedder: EmbeddingProviderSpec,
    pub classifiers: Vec<ClassifierSpec>,
    pub k: usize,
    pub seed: u64,
    pub anld_weighting: AnldWeighting,
    pub safety_threshold: f64,
    pub worst_pairs: usize,
    pub out_json: Option<PathBuf>,
    pub out_md: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults: k = 5, seed 42, all three classifiers, hashed n-gram
    /// embeddings (dim 256), occurrence-weighted distortion, threshold 0.20.
    pub fn new(corpus_path: impl Into<PathBuf>, format: CorpusFormat, normalizers: Vec<NormalizerSpec>) -> Self {
        Self {
            corpus_path: corpus_path.into(),
            format,
            tokenizer: TokenizerConfig::default(),
            normalizers,
            embedder: EmbeddingProviderSpec::hashed(256, 0),
            classifiers: vec![
                ClassifierSpec::multinomial_nb(),
                ClassifierSpec::logistic_regression(),
                ClassifierSpec::linear_svm(),
            ],
            k: 5,
            seed: 42,
            anld_weighting: AnldWeighting::ByOccurrence,
            safety_threshold: ses::DEFAULT_SAFETY_THRESHOLD,
            worst_pairs: DEFAULT_WORST_PAIRS,
            out_json: None,
            out_md: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.normalizers.is_empty() {
            return Err(Error::Config("at least one normalizer is required".into()));
        }
        if self.safety_threshold.is_nan() || self.safety_threshold <= 0.0 {
            return Err(Error::Config(format!(
                "safety threshold must be positive, got {}",
                self.safety_threshold
            )));
        }
        if self.k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {}", self.k)));
        }
        for c in &self.classifiers {
            c.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrsSummary {
    pub irs: f64,
    pub doc_count: usize,
    pub zero_vector_docs: usize,
    pub missing_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnldSummary {
    /// Value under the configured weighting.
    pub anld: f64,
    pub weighting: AnldWeighting,
    pub by_occurrence: f64,
    pub by_type: f64,
    pub pair_count: usize,
    pub over_unit_pairs: usize,
    pub empty_stems: usize,
    pub worst_pairs: Vec<WorstPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mean_accuracy: f64,
    pub mean_macro_f1: f64,
    pub fold_scores: Vec<FoldScore>,
}

impl From<&EvalRun> for RunSummary {
    fn from(run: &EvalRun) -> Self {
        Self {
            mean_accuracy: run.mean_accuracy,
            mean_macro_f1: run.mean_macro_f1,
            fold_scores: run.fold_scores.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub classifier: String,
    pub original: RunSummary,
    pub normalized: RunSummary,
    pub mpd_accuracy: MpdResult,
    pub mpd_macro_f1: MpdResult,
    /// Original (A) vs normalized (B) out-of-fold predictions.
    pub mcnemar: McNemarResult,
}

/// One row group of the effectiveness table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizerReport {
    pub name: String,
    pub seed: u64,
    pub k: usize,
    pub compression: CompressionResult,
    pub retention: IrsSummary,
    pub ses: SesResult,
    pub ses_consistency_flag: bool,
    pub distortion: AnldSummary,
    pub downstream: Vec<ClassifierReport>,
    pub warnings: Vec<String>,
}

impl NormalizerReport {
    pub fn check_consistency(&self) -> bool {
        ses::consistency_flag(self.ses.cr, self.ses.irs, self.ses.ses)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedReport {
    pub name: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ReportEntry {
    Ok(NormalizerReport),
    Failed(FailedReport),
}

impl ReportEntry {
    pub fn name(&self) -> &str {
        match self {
            ReportEntry::Ok(r) => &r.name,
            ReportEntry::Failed(f) => &f.name,
        }
    }

    pub fn as_report(&self) -> Option<&NormalizerReport> {
        match self {
            ReportEntry::Ok(r) => Some(r),
            ReportEntry::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub reports: Vec<ReportEntry>,
    /// Corpus lines skipped for empty text.
    pub skipped_lines: Vec<usize>,
}

impl Evaluation {
    pub fn all_failed(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(|r| r.as_report().is_none())
    }
}

struct Prepared {
    corpus: Corpus,
    docs: Vec<TokenizedDocument>,
    skipped_lines: Vec<usize>,
}

fn prepare(config: &RunConfig) -> Result<Prepared> {
    config.validate()?;
    let load = corpus::load_corpus(&config.corpus_path, &config.format)?;
    let docs = load.corpus.tokenize(&config.tokenizer);
    Ok(Prepared {
        corpus: load.corpus,
        docs,
        skipped_lines: load.skipped_lines,
    })
}

/// Intrinsic measurements shared by `evaluate` and `metrics`.
struct Intrinsic {
    normalized: NormalizedCorpus,
    compression: CompressionResult,
    distortion: AnldSummary,
    load_warnings: usize,
}

fn measure_intrinsic(config: &RunConfig, normalizer: &Normalizer, docs: &[TokenizedDocument]) -> Result<Intrinsic> {
    let normalized = normalizer.normalize_corpus(docs)?;
    let compression = intrinsic::compression_ratio(
        &corpus::build_vocabulary(docs),
        &corpus::build_vocabulary(&normalized.docs),
    )?;
    let chosen = intrinsic::anld(&normalized.mapping, config.anld_weighting, config.worst_pairs)?;
    let other_weighting = match config.anld_weighting {
        AnldWeighting::ByOccurrence => AnldWeighting::ByType,
        AnldWeighting::ByType => AnldWeighting::ByOccurrence,
    };
    let other = intrinsic::anld(&normalized.mapping, other_weighting, 0)?.anld;
    let (by_occurrence, by_type) = match config.anld_weighting {
        AnldWeighting::ByOccurrence => (chosen.anld, other),
        AnldWeighting::ByType => (other, chosen.anld),
    };
    let distortion = AnldSummary {
        anld: chosen.anld,
        weighting: chosen.weighting,
        by_occurrence,
        by_type,
        pair_count: chosen.pair_count,
        over_unit_pairs: chosen.over_unit_pairs,
        empty_stems: normalized.mapping.empty_stems(),
        worst_pairs: chosen.worst_pairs,
    };
    Ok(Intrinsic {
        normalized,
        compression,
        distortion,
        load_warnings: normalizer.load_warnings(),
    })
}

fn intrinsic_warnings(m: &Intrinsic) -> Vec<String> {
    let mut warnings = Vec::new();
    if m.load_warnings > 0 {
        warnings.push(format!("{} duplicate mapping entries (last one kept)", m.load_warnings));
    }
    if m.distortion.empty_stems > 0 {
        warnings.push(format!("{} tokens normalized to an empty stem", m.distortion.empty_stems));
    }
    if m.distortion.over_unit_pairs > 0 {
        warnings.push(format!(
            "{} pairs with normalized edit distance above 1",
            m.distortion.over_unit_pairs
        ));
    }
    warnings
}

struct Baseline<'a> {
    spec: &'a ClassifierSpec,
    run: EvalRun,
}

fn evaluate_normalizer(
    config: &RunConfig,
    spec: &NormalizerSpec,
    prepared: &Prepared,
    folds: &FoldPlan,
    provider: &EmbeddingProvider,
    baselines: &[Baseline<'_>],
    gold: &BTreeMap<String, String>,
) -> Result<NormalizerReport> {
    let normalizer = Normalizer::new(spec)?;
    let measured = measure_intrinsic(config, &normalizer, &prepared.docs)?;
    let retention = embeddings::irs(provider, &prepared.docs, &measured.normalized.docs)?;
    let ses = ses::assess(
        retention.irs,
        measured.compression.cr,
        measured.distortion.anld,
        config.safety_threshold,
    )?;

    let mut downstream = Vec::with_capacity(baselines.len());
    for baseline in baselines {
        let run = downstream::cross_validate_prepared(
            &prepared.corpus,
            &measured.normalized.docs,
            folds,
            baseline.spec,
            Condition::Normalized,
        )?;
        downstream.push(ClassifierReport {
            classifier: run.classifier.clone(),
            original: RunSummary::from(&baseline.run),
            normalized: RunSummary::from(&run),
            mpd_accuracy: downstream::mpd(&run, &baseline.run, Metric::Accuracy)?,
            mpd_macro_f1: downstream::mpd(&run, &baseline.run, Metric::MacroF1)?,
            mcnemar: downstream::mcnemar(&baseline.run.per_doc_predictions, &run.per_doc_predictions, gold)?,
        });
    }

    let mut warnings = intrinsic_warnings(&measured);
    if retention.zero_vector_docs > 0 {
        warnings.push(format!("{} documents embedded as zero vectors", retention.zero_vector_docs));
    }
    if retention.missing_tokens > 0 {
        warnings.push(format!("{} token occurrences had no embedding", retention.missing_tokens));
    }
    let ses_consistency_flag = ses::consistency_flag(ses.cr, ses.irs, ses.ses);
    if ses_consistency_flag {
        warnings.push("SES-consistency flag".into());
    }

    Ok(NormalizerReport {
        name: spec.name.clone(),
        seed: config.seed,
        k: config.k,
        compression: measured.compression,
        retention: IrsSummary {
            irs: retention.irs,
            doc_count: retention.per_doc.len(),
            zero_vector_docs: retention.zero_vector_docs,
            missing_tokens: retention.missing_tokens,
        },
        ses,
        ses_consistency_flag,
        distortion: measured.distortion,
        downstream,
        warnings,
    })
}

/// Runs the full pipeline for every configured normalizer.
///
/// Corpus, fold, embedder and baseline failures abort the run. A failure
/// inside one normalizer is recorded as a failed entry and the rest continue.
pub fn run_evaluation(config: &RunConfig) -> Result<Evaluation> {
    let prepared = prepare(config)?;
    let folds = corpus::make_folds(&prepared.corpus, config.k, config.seed)?;
    let provider = EmbeddingProvider::new(&config.embedder)?;
    let seeded: Vec<ClassifierSpec> = config.classifiers.iter().map(|s| s.with_seed(config.seed)).collect();
    let baselines = seeded
        .iter()
        .map(|spec| {
            downstream::cross_validate(&prepared.corpus, &prepared.docs, &folds, None, spec)
                .map(|run| Baseline { spec, run })
        })
        .collect::<Result<Vec<_>>>()?;
    let gold: BTreeMap<String, String> = prepared
        .corpus
        .documents()
        .iter()
        .map(|d| (d.id.clone(), d.label.clone()))
        .collect();

    let reports = config
        .normalizers
        .iter()
        .map(|spec| {
            match evaluate_normalizer(config, spec, &prepared, &folds, &provider, &baselines, &gold) {
                Ok(r) => ReportEntry::Ok(r),
                Err(e) => ReportEntry::Failed(FailedReport {
                    name: spec.name.clone(),
                    error: e.to_string(),
                }),
            }
        })
        .collect();
    Ok(Evaluation {
        reports,
        skipped_lines: prepared.skipped_lines,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicReport {
    pub name: String,
    pub compression: CompressionResult,
    pub distortion: AnldSummary,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IntrinsicEntry {
    Ok(IntrinsicReport),
    Failed(FailedReport),
}

/// Compression and distortion only: no embeddings, no classifiers.
pub fn run_intrinsic(config: &RunConfig) -> Result<Vec<IntrinsicEntry>> {
    let prepared = prepare(config)?;
    Ok(config
        .normalizers
        .iter()
        .map(|spec| {
            let measured = Normalizer::new(spec).and_then(|n| measure_intrinsic(config, &n, &prepared.docs));
            match measured {
                Ok(m) => IntrinsicEntry::Ok(IntrinsicReport {
                    name: spec.name.clone(),
                    warnings: intrinsic_warnings(&m),
                    compression: m.compression,
                    distortion: m.distortion,
                }),
                Err(e) => IntrinsicEntry::Failed(FailedReport {
                    name: spec.name.clone(),
                    error: e.to_string(),
                }),
            }
        })
        .collect())
}

#[derive(Serialize)]
struct JsonDocument<'a, T> {
    schema: &'static str,
    reports: &'a [T],
}

#[derive(Deserialize)]
struct OwnedJsonDocument<T> {
    schema: String,
    reports: Vec<T>,
}

/// Compact JSON with fixed key order and round-trippable floats.
pub fn to_json<T: Serialize>(reports: &[T]) -> Result<String> {
    Ok(serde_json::to_string(&JsonDocument {
        schema: SCHEMA_VERSION,
        reports,
    })?)
}

pub fn from_json(text: &str) -> Result<Vec<ReportEntry>> {
    let doc: OwnedJsonDocument<ReportEntry> = serde_json::from_str(text)?;
    if doc.schema != SCHEMA_VERSION {
        return Err(Error::Config(format!("unsupported report schema {:?}", doc.schema)));
    }
    Ok(doc.reports)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn emit_json<T: Serialize>(reports: &[T], path: impl AsRef<Path>) -> Result<()> {
    let mut text = to_json(reports)?;
    text.push('\n');
    write_file(path.as_ref(), &text)
}

pub fn emit_markdown(reports: &[ReportEntry], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &render_markdown(reports))
}
