//! Labeled corpora: delimited-file ingestion, tokenization, vocabularies and
//! stratified fold plans.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
    labels: BTreeSet<String>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids and blank texts.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::Config(format!("duplicate document id {:?}", doc.id)));
            }
            if doc.text.trim().is_empty() {
                return Err(Error::Config(format!("document {:?} has empty text", doc.id)));
            }
        }
        let labels = documents.iter().map(|d| d.label.clone()).collect();
        Ok(Self { documents, labels })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn labels(&self) -> &BTreeSet<String> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn tokenize(&self, config: &TokenizerConfig) -> Vec<TokenizedDocument> {
        self.documents
            .iter()
            .map(|d| TokenizedDocument {
                doc_id: d.id.clone(),
                tokens: tokenize(&d.text, config),
            })
            .collect()
    }
}

/// Selects a column either by header name or by 0-based index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl ColumnRef {
    /// Digits-only strings are indices, anything else is a header name.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        }
    }

    fn resolve(&self, header: Option<&csv::StringRecord>, path: &Path) -> Result<usize> {
        match (self, header) {
            (ColumnRef::Index(i), _) => Ok(*i),
            (ColumnRef::Name(name), Some(h)) => h.iter().position(|c| c == name).ok_or_else(|| {
                Error::Config(format!("{}: no column named {name:?}", path.display()))
            }),
            (ColumnRef::Name(name), None) => Err(Error::Config(format!(
                "column {name:?} selected by name but the file has no header"
            ))),
        }
    }
}

impl std::fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFormat {
    pub text_col: ColumnRef,
    pub label_col: ColumnRef,
    /// Ids default to `line<N>` when no id column is given.
    #[serde(default)]
    pub id_col: Option<ColumnRef>,
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CorpusFormat {
    fn default() -> Self {
        Self {
            text_col: ColumnRef::Index(0),
            label_col: ColumnRef::Index(1),
            id_col: None,
            delimiter: b'\t',
            has_header: false,
        }
    }
}

/// A loaded corpus plus the 1-based line numbers of rows skipped for blank text.
#[derive(Debug, Clone)]
pub struct CorpusLoad {
    pub corpus: Corpus,
    pub skipped_lines: Vec<usize>,
}

pub fn load_corpus(path: impl AsRef<Path>, format: &CorpusFormat) -> Result<CorpusLoad> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(false)
        .flexible(true)
        // TSV corpora carry raw quotes inside sentences.
        .quoting(format.delimiter != b'\t')
        .from_reader(file);

    let mut records = reader.records();
    let mut header = None;
    let mut expected_width = None;
    if format.has_header {
        match records.next() {
            Some(rec) => {
                let rec = rec.map_err(|e| csv_error(path, e))?;
                expected_width = Some(rec.len());
                header = Some(rec);
            }
            None => return Err(Error::EmptyCorpus { path: path.to_path_buf() }),
        }
    }
    let text_idx = format.text_col.resolve(header.as_ref(), path)?;
    let label_idx = format.label_col.resolve(header.as_ref(), path)?;
    let id_idx = match &format.id_col {
        Some(c) => Some(c.resolve(header.as_ref(), path)?),
        None => None,
    };

    let mut documents = Vec::new();
    let mut skipped_lines = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        // Blank lines never reach us: the csv reader drops them.
        let width = *expected_width.get_or_insert(rec.len());
        if rec.len() != width {
            return Err(Error::parse(path, line, format!("expected {width} fields")));
        }
        let field = |idx: usize| {
            rec.get(idx).ok_or_else(|| {
                Error::parse(path, line, format!("column {idx} out of range ({width} fields)"))
            })
        };
        let text = field(text_idx)?;
        let label = field(label_idx)?;
        if text.trim().is_empty() {
            skipped_lines.push(line);
            continue;
        }
        let id = match id_idx {
            Some(i) => field(i)?.to_string(),
            None => format!("line{line}"),
        };
        documents.push(Document {
            id,
            text: text.to_string(),
            label: label.trim().to_string(),
        });
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus { path: path.to_path_buf() });
    }
    Ok(CorpusLoad {
        corpus: Corpus::new(documents)?,
        skipped_lines,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        csv::ErrorKind::Utf8 { err, .. } => Error::parse(path, line, format!("invalid UTF-8: {err}")),
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    pub strip_punct: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_punct: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

pub fn is_punctuation(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
    )
}

/// Simple (single scalar) lowercase mapping.
fn simple_lowercase(c: char) -> char {
    // Only U+0130 has a multi-scalar full mapping; its simple mapping is the
    // first scalar of the full one.
    c.to_lowercase().next().unwrap_or(c)
}

/// Whitespace split, then optional lowercasing and edge punctuation stripping.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let stripped = if config.strip_punct {
                raw.trim_matches(is_punctuation)
            } else {
                raw
            };
            if stripped.is_empty() {
                return None;
            }
            Some(if config.lowercase {
                stripped.chars().map(simple_lowercase).collect()
            } else {
                stripped.to_string()
            })
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    counts: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn counts(&self) -> &BTreeMap<String, usize> {
        &self.counts
    }

    pub fn size(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, token: &str) -> usize {
        self.counts.get(token).copied().unwrap_or(0)
    }
}

pub fn build_vocabulary(docs: &[TokenizedDocument]) -> Vocabulary {
    let mut counts = BTreeMap::new();
    for token in docs.iter().flat_map(|d| &d.tokens) {
        *counts.entry(token.clone()).or_insert(0) += 1;
    }
    Vocabulary { counts }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, doc_id: &str) -> Option<usize> {
        self.assignments.get(doc_id).copied()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.assignments.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified k-fold assignment.
///
/// Each label's documents (in corpus order) are shuffled with a ChaCha8 stream
/// seeded by `seed`, then dealt round-robin. The deal continues where the
/// previous label (in sorted label order) stopped, so total fold sizes also
/// differ by at most one.
pub fn make_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    let mut by_label: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for doc in corpus.documents() {
        by_label.entry(&doc.label).or_default().push(&doc.id);
    }
    if let Some((label, ids)) = by_label.iter().find(|(_, ids)| ids.len() < k) {
        return Err(Error::LabelTooSmall {
            label: label.to_string(),
            count: ids.len(),
            k,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = BTreeMap::new();
    let mut offset = 0;
    for ids in by_label.values_mut() {
        ids.shuffle(&mut rng);
        for (j, id) in ids.iter().enumerate() {
            assignments.insert(id.to_string(), (offset + j) % k);
        }
        offset = (offset + ids.len()) % k;
    }
    Ok(FoldPlan { k, seed, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn tsv() -> CorpusFormat {
        CorpusFormat {
            text_col: ColumnRef::Name("text".into()),
            label_col: ColumnRef::Name("label".into()),
            has_header: true,
            ..Default::default()
        }
    }

    fn corpus_with(labels: &[(&str, usize)]) -> Corpus {
        let mut docs = Vec::new();
        for (label, n) in labels {
            for i in 0..*n {
                docs.push(Document {
                    id: format!("{label}{i}"),
                    text: format!("text {i}"),
                    label: label.to_string(),
                });
            }
        }
        Corpus::new(docs).unwrap()
    }

    #[test]
    fn loads_three_row_tsv() {
        let f = write_tmp("text\tlabel\nthe cat sat\tpos\ndogs bark\tneg\nআমি ভাত খাই\tpos\n");
        let load = load_corpus(f.path(), &tsv()).unwrap();
        assert_eq!(load.corpus.len(), 3);
        assert!(load.skipped_lines.is_empty());
        let labels: Vec<_> = load.corpus.documents().iter().map(|d| d.label.as_str()).collect();
        assert_eq!(labels, ["pos", "neg", "pos"]);
        assert_eq!(load.corpus.labels().len(), 2);
    }

    #[test]
    fn skips_empty_text_rows() {
        let f = write_tmp("text\tlabel\na b\tx\n  \ty\nc d\ty\ne f\tx\n");
        let load = load_corpus(f.path(), &tsv()).unwrap();
        assert_eq!(load.corpus.len(), 3);
        assert_eq!(load.skipped_lines, vec![3]);
    }

    #[test]
    fn wrong_arity_names_the_line() {
        let f = write_tmp("text\tlabel\na\tx\nb\ty\nc\tx\nd\ty\textra\n");
        let err = load_corpus(f.path(), &tsv()).unwrap_err();
        assert!(err.to_string().contains("line 5: expected 2 fields"), "{err}");
    }

    #[test]
    fn missing_file_and_zero_rows_are_errors() {
        assert!(matches!(
            load_corpus("/nonexistent/corpus.tsv", &tsv()),
            Err(Error::Io { .. })
        ));
        let f = write_tmp("text\tlabel\n \tx\n");
        assert!(matches!(load_corpus(f.path(), &tsv()), Err(Error::EmptyCorpus { .. })));
    }

    #[test]
    fn index_columns_and_comma_delimiter() {
        let f = write_tmp("pos,\"hello, world\"\nneg,bye\n");
        let format = CorpusFormat {
            text_col: ColumnRef::Index(1),
            label_col: ColumnRef::Index(0),
            delimiter: b',',
            ..Default::default()
        };
        let load = load_corpus(f.path(), &format).unwrap();
        assert_eq!(load.corpus.documents()[0].text, "hello, world");
        assert_eq!(load.corpus.documents()[1].id, "line2");
    }

    #[test]
    fn tokenize_examples() {
        let cfg = TokenizerConfig::default();
        assert_eq!(tokenize("The cat, the cat.", &cfg), ["the", "cat", "the", "cat"]);
        assert!(tokenize("", &cfg).is_empty());
        let bangla = TokenizerConfig {
            lowercase: false,
            strip_punct: true,
        };
        assert_eq!(tokenize("আমি ভাত খাই।", &bangla), ["আমি", "ভাত", "খাই"]);
        assert!(tokenize("-- ... !!", &cfg).is_empty());
        assert_eq!(tokenize("don't", &cfg), ["don't"]);
    }

    #[test]
    fn vocabulary_examples() {
        let doc = |t: &[&str]| TokenizedDocument {
            doc_id: "d".into(),
            tokens: t.iter().map(|s| s.to_string()).collect(),
        };
        let v = build_vocabulary(&[doc(&["a", "b", "a"])]);
        assert_eq!(v.size(), 2);
        assert_eq!((v.count("a"), v.count("b")), (2, 1));
        assert_eq!(build_vocabulary(&[]).size(), 0);
        let v = build_vocabulary(&[doc(&["x"]), doc(&["x"])]);
        assert_eq!((v.size(), v.count("x")), (1, 2));
    }

    #[test]
    fn folds_balance_and_determinism() {
        let corpus = corpus_with(&[("a", 5), ("b", 5)]);
        let plan = make_folds(&corpus, 5, 7).unwrap();
        for fold in 0..5 {
            for label in ["a", "b"] {
                let n = corpus
                    .documents()
                    .iter()
                    .filter(|d| d.label == label && plan.fold_of(&d.id) == Some(fold))
                    .count();
                assert_eq!(n, 1);
            }
        }
        assert_eq!(plan, make_folds(&corpus, 5, 7).unwrap());
    }

    #[test]
    fn folds_reject_small_label() {
        let corpus = corpus_with(&[("big", 10), ("tiny", 3)]);
        match make_folds(&corpus, 5, 1) {
            Err(Error::LabelTooSmall { label, count, .. }) => {
                assert_eq!((label.as_str(), count), ("tiny", 3))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(make_folds(&corpus, 1, 1).is_err());
    }

    #[test]
    fn imbalanced_folds_differ_by_at_most_one() {
        let corpus = corpus_with(&[("a", 13), ("b", 7), ("c", 22)]);
        let plan = make_folds(&corpus, 5, 99).unwrap();
        let sizes = plan.fold_sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert_eq!(sizes.iter().sum::<usize>(), 42);
    }
}
