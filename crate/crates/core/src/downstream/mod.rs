//! Downstream impact of normalization: TF-IDF classification under stratified
//! cross-validation, the performance delta between normalized and original
//! text, and paired significance tests.

pub mod classifier;
pub mod stats;
pub mod tfidf;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, FoldPlan, TokenizedDocument};
use crate::error::{Error, Result};
use crate::normalizer::Normalizer;

pub use classifier::{train, ClassifierKind, ClassifierSpec, LogisticParams, Model};
pub use stats::{mcnemar_from_counts, paired_t_test, McNemarResult};
pub use tfidf::{SparseVector, TfidfModel};

pub const SIGNIFICANCE_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Original,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    MacroF1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub fold: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
}

impl FoldScore {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::MacroF1 => self.macro_f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRun {
    pub classifier: String,
    pub condition: Condition,
    pub fold_scores: Vec<FoldScore>,
    pub mean_accuracy: f64,
    pub mean_macro_f1: f64,
    /// Out-of-fold prediction for every document.
    pub per_doc_predictions: BTreeMap<String, String>,
}

impl EvalRun {
    pub fn mean(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Accuracy => self.mean_accuracy,
            Metric::MacroF1 => self.mean_macro_f1,
        }
    }

    /// Same scores and predictions, regardless of condition label.
    pub fn same_outcome(&self, other: &EvalRun) -> bool {
        self.classifier == other.classifier
            && self.fold_scores == other.fold_scores
            && self.per_doc_predictions == other.per_doc_predictions
    }
}

pub fn accuracy(gold: &[&str], predicted: &[&str]) -> f64 {
    if gold.is_empty() {
        return 0.0;
    }
    let hits = gold.iter().zip(predicted).filter(|(g, p)| g == p).count();
    hits as f64 / gold.len() as f64
}

/// Unweighted mean F1 over the classes present in `gold`. A gold class that
/// is never predicted correctly contributes 0.
pub fn macro_f1(gold: &[&str], predicted: &[&str]) -> f64 {
    let classes: BTreeSet<&str> = gold.iter().copied().collect();
    if classes.is_empty() {
        return 0.0;
    }
    let total: f64 = classes
        .iter()
        .map(|&c| {
            let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
            for (&g, &p) in gold.iter().zip(predicted) {
                match (g == c, p == c) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    (true, false) => fn_ += 1,
                    _ => {}
                }
            }
            if tp == 0 {
                0.0
            } else {
                let precision = tp as f64 / (tp + fp) as f64;
                let recall = tp as f64 / (tp + fn_) as f64;
                2.0 * precision * recall / (precision + recall)
            }
        })
        .sum();
    total / classes.len() as f64
}

/// Training and held-out document indices for one fold, in corpus order.
pub fn fold_split(docs: &[TokenizedDocument], folds: &FoldPlan, fold: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, d) in docs.iter().enumerate() {
        match folds.fold_of(&d.doc_id) {
            Some(f) if f == fold => test.push(i),
            Some(_) => train.push(i),
            None => {
                return Err(Error::Misaligned(format!("document {:?} has no fold", d.doc_id)));
            }
        }
    }
    Ok((train, test))
}

/// k-fold evaluation of one classifier on original or normalized text.
///
/// `docs` must follow the corpus document order. When a normalizer is given
/// it is applied to every document before featurization; normalizers are
/// token-level and stateless, so this matches per-fold application. TF-IDF
/// statistics are always fitted on the training folds only.
pub fn cross_validate(
    corpus: &Corpus,
    docs: &[TokenizedDocument],
    folds: &FoldPlan,
    normalizer: Option<&Normalizer>,
    spec: &ClassifierSpec,
) -> Result<EvalRun> {
    let normalized;
    let (docs, condition) = match normalizer {
        Some(n) => {
            normalized = n.normalize_corpus(docs)?.docs;
            (normalized.as_slice(), Condition::Normalized)
        }
        None => (docs, Condition::Original),
    };
    cross_validate_prepared(corpus, docs, folds, spec, condition)
}

/// Like [`cross_validate`] on documents that are already in their final form.
pub fn cross_validate_prepared(
    corpus: &Corpus,
    docs: &[TokenizedDocument],
    folds: &FoldPlan,
    spec: &ClassifierSpec,
    condition: Condition,
) -> Result<EvalRun> {
    if docs.len() != corpus.len()
        || docs.iter().zip(corpus.documents()).any(|(t, d)| t.doc_id != d.id)
    {
        return Err(Error::Misaligned("tokenized documents do not follow corpus order".into()));
    }
    if folds.assignments.len() != corpus.len() {
        return Err(Error::Misaligned(format!(
            "fold plan covers {} documents, corpus has {}",
            folds.assignments.len(),
            corpus.len()
        )));
    }
    let labels: Vec<&str> = corpus.labels().iter().map(String::as_str).collect();
    let class_of: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let gold: Vec<usize> = corpus.documents().iter().map(|d| class_of[d.label.as_str()]).collect();

    let mut fold_scores = Vec::with_capacity(folds.k);
    let mut per_doc_predictions = BTreeMap::new();
    for fold in 0..folds.k {
        let (train_idx, test_idx) = fold_split(docs, folds, fold)?;
        if test_idx.is_empty() {
            return Err(Error::Misaligned(format!("fold {fold} is empty")));
        }
        let train_docs: Vec<&TokenizedDocument> = train_idx.iter().map(|&i| &docs[i]).collect();
        let tfidf = TfidfModel::fit(&train_docs)?;
        let x_train: Vec<SparseVector> = train_docs.iter().map(|d| tfidf.transform(&d.tokens)).collect();
        let y_train: Vec<usize> = train_idx.iter().map(|&i| gold[i]).collect();
        let model = train(spec, &x_train, &y_train, labels.len(), tfidf.dim())?;

        let mut fold_gold = Vec::with_capacity(test_idx.len());
        let mut fold_pred = Vec::with_capacity(test_idx.len());
        for &i in &test_idx {
            let predicted = labels[model.predict(&tfidf.transform(&docs[i].tokens))];
            fold_gold.push(labels[gold[i]]);
            fold_pred.push(predicted);
            per_doc_predictions.insert(docs[i].doc_id.clone(), predicted.to_string());
        }
        fold_scores.push(FoldScore {
            fold,
            accuracy: accuracy(&fold_gold, &fold_pred),
            macro_f1: macro_f1(&fold_gold, &fold_pred),
        });
    }
    let k = fold_scores.len() as f64;
    Ok(EvalRun {
        classifier: spec.name().to_string(),
        condition,
        mean_accuracy: fold_scores.iter().map(|s| s.accuracy).sum::<f64>() / k,
        mean_macro_f1: fold_scores.iter().map(|s| s.macro_f1).sum::<f64>() / k,
        fold_scores,
        per_doc_predictions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignificanceTest {
    PairedT,
    Mcnemar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpdResult {
    pub metric: Metric,
    pub mpd: f64,
    pub p_value: f64,
    pub test: SignificanceTest,
    pub significant: bool,
}

/// Metric after normalization minus metric before.
pub fn performance_delta(normalized: f64, original: f64) -> f64 {
    normalized - original
}

/// Performance delta over matched folds with a paired two-sided t-test.
pub fn mpd(normalized: &EvalRun, original: &EvalRun, metric: Metric) -> Result<MpdResult> {
    if normalized.classifier != original.classifier {
        return Err(Error::Misaligned(format!(
            "classifier {} vs {}",
            normalized.classifier, original.classifier
        )));
    }
    let folds_a: Vec<usize> = normalized.fold_scores.iter().map(|s| s.fold).collect();
    let folds_b: Vec<usize> = original.fold_scores.iter().map(|s| s.fold).collect();
    if folds_a != folds_b {
        return Err(Error::Misaligned(format!("folds {folds_a:?} vs {folds_b:?}")));
    }
    let differences: Vec<f64> = normalized
        .fold_scores
        .iter()
        .zip(&original.fold_scores)
        .map(|(a, b)| a.get(metric) - b.get(metric))
        .collect();
    let p_value = paired_t_test(&differences);
    Ok(MpdResult {
        metric,
        mpd: performance_delta(normalized.mean(metric), original.mean(metric)),
        p_value,
        test: SignificanceTest::PairedT,
        significant: p_value < SIGNIFICANCE_ALPHA,
    })
}

/// McNemar's test between two sets of predictions over the same documents.
pub fn mcnemar(
    preds_a: &BTreeMap<String, String>,
    preds_b: &BTreeMap<String, String>,
    gold: &BTreeMap<String, String>,
) -> Result<McNemarResult> {
    if preds_a.len() != gold.len() || preds_b.len() != gold.len() {
        return Err(Error::Misaligned(format!(
            "{} / {} predictions for {} documents",
            preds_a.len(),
            preds_b.len(),
            gold.len()
        )));
    }
    let (mut n01, mut n10) = (0, 0);
    for (id, truth) in gold {
        let (Some(a), Some(b)) = (preds_a.get(id), preds_b.get(id)) else {
            return Err(Error::Misaligned(format!("document {id:?} missing a prediction")));
        };
        match (a == truth, b == truth) {
            (true, false) => n01 += 1,
            (false, true) => n10 += 1,
            _ => {}
        }
    }
    Ok(mcnemar_from_counts(n01, n10))
}
