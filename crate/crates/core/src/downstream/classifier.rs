//! Linear and probabilistic text classifiers over sparse TF-IDF rows.
//!
//! Classes are dense indices `0..n_classes`; callers map labels in sorted
//! order, so "lowest index" means "first label in sort order" and all ties
//! resolve that way.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tfidf::SparseVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClassifierKind {
    MultinomialNb {
        alpha: f64,
    },
    LogisticRegression {
        l2_lambda: f64,
        learning_rate: f64,
        epochs: usize,
    },
    LinearSvm {
        l2_lambda: f64,
        learning_rate: f64,
        epochs: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn multinomial_nb() -> Self {
        Self {
            kind: ClassifierKind::MultinomialNb { alpha: 1.0 },
            seed: 0,
        }
    }

    pub fn logistic_regression() -> Self {
        Self {
            kind: ClassifierKind::LogisticRegression {
                l2_lambda: 1e-4,
                learning_rate: 0.5,
                epochs: 200,
            },
            seed: 0,
        }
    }

    pub fn linear_svm() -> Self {
        Self {
            kind: ClassifierKind::LinearSvm {
                l2_lambda: 1e-4,
                learning_rate: 0.1,
                epochs: 200,
            },
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Short names `nb`, `lr`, `svm` with default hyperparameters.
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "nb" | "mnb" => Ok(Self::multinomial_nb()),
            "lr" => Ok(Self::logistic_regression()),
            "svm" => Ok(Self::linear_svm()),
            other => Err(Error::Config(format!("unknown classifier {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ClassifierKind::MultinomialNb { .. } => "nb",
            ClassifierKind::LogisticRegression { .. } => "lr",
            ClassifierKind::LinearSvm { .. } => "svm",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match self.kind {
            ClassifierKind::MultinomialNb { alpha } if alpha.is_nan() || alpha <= 0.0 => {
                bad(format!("alpha must be positive, got {alpha}"))
            }
            ClassifierKind::LogisticRegression {
                l2_lambda, epochs, ..
            }
            | ClassifierKind::LinearSvm {
                l2_lambda, epochs, ..
            } if l2_lambda.is_nan() || l2_lambda < 0.0 || epochs == 0 => {
                bad(format!("need l2_lambda >= 0 and epochs >= 1, got {l2_lambda}, {epochs}"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    MultinomialNb(NaiveBayes),
    LogisticRegression(LogisticParams),
    LinearSvm(LinearSvm),
}

impl Model {
    pub fn predict(&self, x: &SparseVector) -> usize {
        let scores = match self {
            Model::MultinomialNb(m) => m.joint_log_likelihood(x),
            Model::LogisticRegression(m) => m.scores(x),
            Model::LinearSvm(m) => m.scores(x),
        };
        argmax(&scores)
    }
}

/// First index of the maximum; NaN scores never win.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] || scores[best].is_nan() {
            best = i;
        }
    }
    best
}

pub fn train(
    spec: &ClassifierSpec,
    features: &[SparseVector],
    labels: &[usize],
    n_classes: usize,
    n_features: usize,
) -> Result<Model> {
    spec.validate()?;
    if features.len() != labels.len() {
        return Err(Error::Misaligned(format!(
            "{} feature rows vs {} labels",
            features.len(),
            labels.len()
        )));
    }
    let mut present = vec![false; n_classes];
    for &y in labels {
        present[y] = true;
    }
    let distinct = present.iter().filter(|p| **p).count();
    if distinct < 2 {
        return Err(Error::SingleClass(distinct));
    }
    Ok(match spec.kind {
        ClassifierKind::MultinomialNb { alpha } => {
            Model::MultinomialNb(NaiveBayes::fit(features, labels, n_classes, n_features, alpha))
        }
        ClassifierKind::LogisticRegression {
            l2_lambda,
            learning_rate,
            epochs,
        } => {
            let mut params = LogisticParams::zeros(n_classes, n_features);
            for _ in 0..epochs {
                let (_, grad) = params.loss_and_gradient(features, labels, l2_lambda);
                params.step(&grad, learning_rate);
            }
            Model::LogisticRegression(params)
        }
        ClassifierKind::LinearSvm {
            l2_lambda,
            learning_rate,
            epochs,
        } => Model::LinearSvm(LinearSvm::fit(
            features,
            labels,
            n_classes,
            n_features,
            l2_lambda,
            learning_rate,
            epochs,
            spec.seed,
        )),
    })
}

/// Multinomial naive Bayes over summed (fractional) feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    class_log_prior: Vec<f64>,
    /// `feature_log_prob[c][j]`, Laplace-smoothed.
    feature_log_prob: Vec<Vec<f64>>,
}

impl NaiveBayes {
    fn fit(
        features: &[SparseVector],
        labels: &[usize],
        n_classes: usize,
        n_features: usize,
        alpha: f64,
    ) -> Self {
        let mut class_count = vec![0usize; n_classes];
        let mut feature_count = vec![vec![0.0; n_features]; n_classes];
        for (x, &y) in features.iter().zip(labels) {
            class_count[y] += 1;
            for &(j, v) in &x.entries {
                feature_count[y][j] += v;
            }
        }
        let n = labels.len() as f64;
        let class_log_prior = class_count
            .iter()
            .map(|&c| if c == 0 { f64::NEG_INFINITY } else { (c as f64 / n).ln() })
            .collect();
        let feature_log_prob = feature_count
            .into_iter()
            .map(|row| {
                let denom = (row.iter().sum::<f64>() + alpha * n_features as f64).ln();
                row.into_iter().map(|c| (c + alpha).ln() - denom).collect()
            })
            .collect();
        Self {
            class_log_prior,
            feature_log_prob,
        }
    }

    pub fn joint_log_likelihood(&self, x: &SparseVector) -> Vec<f64> {
        self.class_log_prior
            .iter()
            .zip(&self.feature_log_prob)
            .map(|(prior, logp)| prior + x.dot(logp))
            .collect()
    }

    pub fn posterior(&self, x: &SparseVector) -> Vec<f64> {
        softmax(&self.joint_log_likelihood(x))
    }
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / z).collect()
}

/// Multinomial softmax regression parameters; the bias is not penalized.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticParams {
    /// Row-major `n_classes × n_features`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LogisticParams {
    pub fn zeros(n_classes: usize, n_features: usize) -> Self {
        Self {
            weights: vec![vec![0.0; n_features]; n_classes],
            bias: vec![0.0; n_classes],
        }
    }

    pub fn scores(&self, x: &SparseVector) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| x.dot(w) + b)
            .collect()
    }

    /// Mean cross-entropy plus `l2/2 · ‖W‖²`, and its gradient.
    pub fn loss_and_gradient(
        &self,
        features: &[SparseVector],
        labels: &[usize],
        l2: f64,
    ) -> (f64, LogisticParams) {
        let n = features.len() as f64;
        let mut grad = LogisticParams::zeros(self.bias.len(), self.weights.first().map_or(0, Vec::len));
        let mut loss = 0.0;
        for (x, &y) in features.iter().zip(labels) {
            let p = softmax(&self.scores(x));
            loss -= p[y].max(f64::MIN_POSITIVE).ln();
            for (c, pc) in p.iter().enumerate() {
                let r = (pc - f64::from(u8::from(c == y))) / n;
                grad.bias[c] += r;
                for &(j, v) in &x.entries {
                    grad.weights[c][j] += r * v;
                }
            }
        }
        loss /= n;
        let mut penalty = 0.0;
        for (w, g) in self.weights.iter().zip(&mut grad.weights) {
            for (wj, gj) in w.iter().zip(g.iter_mut()) {
                penalty += wj * wj;
                *gj += l2 * wj;
            }
        }
        (loss + 0.5 * l2 * penalty, grad)
    }

    fn step(&mut self, grad: &LogisticParams, learning_rate: f64) {
        for (w, g) in self.weights.iter_mut().zip(&grad.weights) {
            w.iter_mut().zip(g).for_each(|(wj, gj)| *wj -= learning_rate * gj);
        }
        self.bias
            .iter_mut()
            .zip(&grad.bias)
            .for_each(|(b, g)| *b -= learning_rate * g);
    }
}

/// One-vs-rest hinge-loss SVM trained by epoch-ordered subgradient descent.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl LinearSvm {
    #[allow(clippy::too_many_arguments)]
    fn fit(
        features: &[SparseVector],
        labels: &[usize],
        n_classes: usize,
        n_features: usize,
        l2: f64,
        learning_rate: f64,
        epochs: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..features.len()).collect();
        let orders: Vec<Vec<usize>> = (0..epochs)
            .map(|_| {
                order.shuffle(&mut rng);
                order.clone()
            })
            .collect();

        let mut weights = Vec::with_capacity(n_classes);
        let mut bias = Vec::with_capacity(n_classes);
        for class in 0..n_classes {
            // w = scale · v, so the shrink step is O(1).
            let mut v = vec![0.0; n_features];
            let mut scale = 1.0;
            let mut b = 0.0;
            let mut t = 0usize;
            for order in &orders {
                for &i in order {
                    let eta = learning_rate / (1.0 + learning_rate * l2 * t as f64);
                    t += 1;
                    let x = &features[i];
                    let y = if labels[i] == class { 1.0 } else { -1.0 };
                    let margin = y * (scale * x.dot(&v) + b);
                    scale *= 1.0 - eta * l2;
                    if margin < 1.0 {
                        for &(j, xj) in &x.entries {
                            v[j] += eta * y * xj / scale;
                        }
                        b += eta * y;
                    }
                    if scale < 1e-9 {
                        v.iter_mut().for_each(|vj| *vj *= scale);
                        scale = 1.0;
                    }
                }
            }
            v.iter_mut().for_each(|vj| *vj *= scale);
            weights.push(v);
            bias.push(b);
        }
        Self { weights, bias }
    }

    pub fn scores(&self, x: &SparseVector) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| x.dot(w) + b)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(i: usize) -> SparseVector {
        SparseVector::from_entries(vec![(i, 1.0)])
    }

    fn all_specs() -> [ClassifierSpec; 3] {
        [
            ClassifierSpec::multinomial_nb(),
            ClassifierSpec::logistic_regression(),
            ClassifierSpec::linear_svm(),
        ]
    }

    #[test]
    fn separable_singletons() {
        let x = vec![unit(0), unit(1)];
        let y = vec![0, 1];
        for spec in all_specs() {
            let m = train(&spec, &x, &y, 2, 2).unwrap();
            assert_eq!(m.predict(&x[0]), 0, "{}", spec.name());
            assert_eq!(m.predict(&x[1]), 1, "{}", spec.name());
        }
    }

    #[test]
    fn naive_bayes_tie_goes_to_first_label() {
        let row = SparseVector::from_entries(vec![(0, 0.6), (1, 0.8)]);
        let x = vec![row.clone(), row.clone()];
        let m = train(&ClassifierSpec::multinomial_nb(), &x, &[0, 1], 2, 2).unwrap();
        assert_eq!(m.predict(&row), 0);
        let m = train(&ClassifierSpec::multinomial_nb(), &x, &[1, 0], 2, 2).unwrap();
        assert_eq!(m.predict(&row), 0);
    }

    #[test]
    fn single_class_is_rejected() {
        let x = vec![unit(0), unit(1)];
        for spec in all_specs() {
            assert!(matches!(train(&spec, &x, &[1, 1], 2, 2), Err(Error::SingleClass(1))));
        }
    }

    #[test]
    fn invalid_hyperparameters() {
        let mut nb = ClassifierSpec::multinomial_nb();
        nb.kind = ClassifierKind::MultinomialNb { alpha: 0.0 };
        assert!(nb.validate().is_err());
        let mut lr = ClassifierSpec::logistic_regression();
        lr.kind = ClassifierKind::LogisticRegression {
            l2_lambda: 0.0,
            learning_rate: 0.1,
            epochs: 0,
        };
        assert!(lr.validate().is_err());
        assert!(ClassifierSpec::parse("rf").is_err());
    }

    #[test]
    fn posterior_sums_to_one() {
        let x = vec![
            SparseVector::from_entries(vec![(0, 0.3), (2, 0.9)]),
            SparseVector::from_entries(vec![(1, 1.0)]),
            SparseVector::from_entries(vec![(0, 0.7), (1, 0.7)]),
        ];
        let nb = NaiveBayes::fit(&x, &[0, 1, 2], 3, 3, 1.0);
        for row in &x {
            let s: f64 = nb.posterior(row).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn svm_training_is_seed_deterministic() {
        let x: Vec<_> = (0..6).map(|i| unit(i % 3)).collect();
        let y: Vec<_> = (0..6).map(|i| i % 3).collect();
        let spec = ClassifierSpec::linear_svm().with_seed(11);
        assert_eq!(train(&spec, &x, &y, 3, 3).unwrap(), train(&spec, &x, &y, 3, 3).unwrap());
    }
}
