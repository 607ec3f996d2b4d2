use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::TokenizedDocument;
use crate::error::{Error, Result};

/// Sparse feature vector, entries sorted by feature index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn from_entries(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_by_key(|(i, _)| *i);
        Self { entries }
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, x)| x * dense[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, x)| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, x)| *x == 0.0)
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(i, x) in &self.entries {
            out[i] = x;
        }
        out
    }
}

/// Smoothed TF-IDF: `idf(t) = ln((1 + N) / (1 + df(t))) + 1`, raw counts for
/// term frequency, L2-normalized rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    pub vocabulary: BTreeMap<String, usize>,
    pub idf: Vec<f64>,
    pub doc_count: usize,
}

impl TfidfModel {
    /// Feature indices follow token sort order.
    pub fn fit(train: &[&TokenizedDocument]) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyInput("training set"));
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in train {
            let distinct: BTreeSet<&str> = doc.tokens.iter().map(String::as_str).collect();
            for t in distinct {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let n = train.len() as f64;
        let mut vocabulary = BTreeMap::new();
        let mut idf = Vec::with_capacity(df.len());
        for (i, (token, count)) in df.into_iter().enumerate() {
            vocabulary.insert(token.to_string(), i);
            idf.push(((1.0 + n) / (1.0 + count as f64)).ln() + 1.0);
        }
        Ok(Self {
            vocabulary,
            idf,
            doc_count: train.len(),
        })
    }

    pub fn dim(&self) -> usize {
        self.idf.len()
    }

    /// Tokens unseen at fit time are ignored.
    pub fn transform(&self, tokens: &[String]) -> SparseVector {
        let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
        for t in tokens {
            if let Some(&i) = self.vocabulary.get(t) {
                *tf.entry(i).or_insert(0) += 1;
            }
        }
        let mut entries: Vec<(usize, f64)> = tf
            .into_iter()
            .map(|(i, count)| (i, count as f64 * self.idf[i]))
            .collect();
        let norm = entries.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            entries.iter_mut().for_each(|(_, x)| *x /= norm);
        }
        SparseVector { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(tokens: &[&str]) -> TokenizedDocument {
        TokenizedDocument {
            doc_id: String::new(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn toks(tokens: &[&str]) -> Vec<String> {
        tokens.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn idf_values() {
        let (a, b) = (doc(&["x", "y"]), doc(&["x"]));
        let m = TfidfModel::fit(&[&a, &b]).unwrap();
        assert_eq!(m.idf[m.vocabulary["x"]], 1.0);
        let y = m.idf[m.vocabulary["y"]];
        assert!((y - (1.5f64.ln() + 1.0)).abs() < 1e-15);
        assert!((y - 1.405).abs() < 1e-3);
        assert!(TfidfModel::fit(&[]).is_err());
    }

    #[test]
    fn transform_rules() {
        let train = doc(&["x"]);
        let m = TfidfModel::fit(&[&train]).unwrap();
        assert_eq!(m.transform(&toks(&["x"])).entries, vec![(0, 1.0)]);
        assert!(m.transform(&toks(&["never", "seen"])).entries.is_empty());
        assert_eq!(m.transform(&toks(&["x", "x", "x"])), m.transform(&toks(&["x"])));
        assert!(m.transform(&[]).is_zero());
    }

    #[test]
    fn rows_are_unit_length() {
        let (a, b, c) = (doc(&["p", "q", "q"]), doc(&["q", "r"]), doc(&["s"]));
        let m = TfidfModel::fit(&[&a, &b, &c]).unwrap();
        let v = m.transform(&toks(&["p", "q", "r", "r"]));
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
}
