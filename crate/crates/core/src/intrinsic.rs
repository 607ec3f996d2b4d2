//! Vocabulary-level compression and word-level edit distortion.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::normalizer::TokenMapping;

pub const DEFAULT_WORST_PAIRS: usize = 20;

/// Plain Levenshtein distance over Unicode scalar values (unit costs, no
/// transpositions).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

pub fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            cur[j + 1] = substitution.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionResult {
    pub vocab_before: usize,
    pub vocab_after: usize,
    pub cr: f64,
}

impl CompressionResult {
    pub fn from_counts(vocab_before: usize, vocab_after: usize) -> Result<Self> {
        if vocab_after == 0 {
            return Err(if vocab_before == 0 {
                Error::EmptyInput("vocabulary")
            } else {
                Error::DegenerateNormalizer {
                    before: vocab_before,
                }
            });
        }
        Ok(Self {
            vocab_before,
            vocab_after,
            cr: vocab_before as f64 / vocab_after as f64,
        })
    }
}

/// Unique tokens before over unique tokens after normalization.
pub fn compression_ratio(before: &Vocabulary, after: &Vocabulary) -> Result<CompressionResult> {
    CompressionResult::from_counts(before.size(), after.size())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnldWeighting {
    /// Each pair weighted by how often the original occurred.
    #[default]
    ByOccurrence,
    /// Each distinct original counts once.
    ByType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstPair {
    pub original: String,
    pub stem: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnldResult {
    pub anld: f64,
    pub weighting: AnldWeighting,
    pub pair_count: usize,
    /// Pairs whose normalized distance exceeds 1 (stem much longer than the original).
    pub over_unit_pairs: usize,
    pub worst_pairs: Vec<WorstPair>,
}

/// Levenshtein distance divided by the original's scalar length.
pub fn normalized_distance(original: &str, stem: &str) -> Result<f64> {
    let len = original.chars().count();
    if len == 0 {
        return Err(Error::Precondition(
            "cannot normalize distance by a zero-length original".into(),
        ));
    }
    Ok(levenshtein(original, stem) as f64 / len as f64)
}

pub fn anld(mapping: &TokenMapping, weighting: AnldWeighting, worst: usize) -> Result<AnldResult> {
    if mapping.is_empty() {
        return Err(Error::EmptyInput("token mapping"));
    }
    let mut scored = Vec::with_capacity(mapping.len());
    let mut weighted_sum = 0.0;
    let mut total_weight = 0.0;
    let mut over_unit_pairs = 0;
    for (original, stem) in &mapping.pairs {
        let d = normalized_distance(original, stem)?;
        let w = match weighting {
            AnldWeighting::ByType => 1.0,
            AnldWeighting::ByOccurrence => {
                mapping.occurrence_counts.get(original).copied().unwrap_or(1) as f64
            }
        };
        weighted_sum += w * d;
        total_weight += w;
        if d > 1.0 {
            over_unit_pairs += 1;
        }
        scored.push((original, stem, d));
    }
    // BTreeMap iteration already orders originals by codepoint, and the sort
    // is stable, so ties keep that order.
    scored.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(Ordering::Equal));
    let worst_pairs = scored
        .into_iter()
        .take(worst)
        .map(|(o, s, d)| WorstPair {
            original: o.clone(),
            stem: s.clone(),
            distance: d,
        })
        .collect();
    Ok(AnldResult {
        anld: weighted_sum / total_weight,
        weighting,
        pair_count: mapping.len(),
        over_unit_pairs,
        worst_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive recursion over the three edit choices at the front of each string.
    fn naive(a: &[char], b: &[char]) -> usize {
        match (a, b) {
            ([], _) => b.len(),
            (_, []) => a.len(),
            ([x, ra @ ..], [y, rb @ ..]) => {
                let sub = naive(ra, rb) + usize::from(x != y);
                sub.min(naive(ra, b) + 1).min(naive(a, rb) + 1)
            }
        }
    }

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn mapping(pairs: &[(&str, &str, usize)]) -> TokenMapping {
        let mut m = TokenMapping::default();
        for (o, s, c) in pairs {
            m.pairs.insert(o.to_string(), s.to_string());
            m.occurrence_counts.insert(o.to_string(), *c);
        }
        m
    }

    #[test]
    fn distance_examples_match_recursion_oracle() {
        for (a, b) in [("abc", "abc"), ("kitten", "sitting"), ("গানগুলো", "গান"), ("", "ab")] {
            assert_eq!(levenshtein(a, b), naive(&chars(a), &chars(b)), "{a} / {b}");
        }
        assert_eq!(naive(&chars("kitten"), &chars("sitting")), 3);
        assert_eq!(naive(&chars("গানগুলো"), &chars("গান")), 4);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("গানগুলো", "গান"), 4);
        // Transposition costs two edits.
        assert_eq!(levenshtein("ab", "ba"), 2);
    }

    #[test]
    fn compression_examples() {
        let snowball = CompressionResult::from_counts(2175, 1555).unwrap();
        assert_eq!(format!("{:.2}", snowball.cr), "1.40");
        assert!((snowball.cr - 1.399).abs() < 5e-4);
        let bnltk = CompressionResult::from_counts(2956, 2227).unwrap();
        assert_eq!(format!("{:.2}", bnltk.cr), "1.33");
        assert_eq!(CompressionResult::from_counts(10, 10).unwrap().cr, 1.0);
        assert!(matches!(
            CompressionResult::from_counts(5, 0),
            Err(Error::DegenerateNormalizer { before: 5 })
        ));
    }

    #[test]
    fn anld_examples() {
        let identity = mapping(&[("cat", "cat", 3), ("dog", "dog", 1)]);
        let r = anld(&identity, AnldWeighting::ByOccurrence, 20).unwrap();
        assert_eq!((r.anld, r.over_unit_pairs), (0.0, 0));

        let r = anld(&mapping(&[("running", "run", 1)]), AnldWeighting::ByOccurrence, 20).unwrap();
        assert!((r.anld - 4.0 / 7.0).abs() < 1e-15);

        let m = mapping(&[("ab", "a", 1), ("cd", "cd", 3)]);
        assert_eq!(anld(&m, AnldWeighting::ByOccurrence, 20).unwrap().anld, 0.125);
        assert_eq!(anld(&m, AnldWeighting::ByType, 20).unwrap().anld, 0.25);
    }

    #[test]
    fn anld_edge_cases() {
        assert!(anld(&TokenMapping::default(), AnldWeighting::ByType, 5).is_err());
        let m = mapping(&[("ab", "abcdef", 1), ("xy", "", 1)]);
        let r = anld(&m, AnldWeighting::ByType, 5).unwrap();
        assert_eq!(r.over_unit_pairs, 1);
        assert_eq!(r.worst_pairs[0].distance, 2.0);
        // Empty stem costs the whole original length.
        assert_eq!(r.worst_pairs[1].distance, 1.0);
        assert!(normalized_distance("", "a").is_err());
    }

    #[test]
    fn worst_pairs_tie_break_by_original() {
        let m = mapping(&[("zz", "z", 1), ("aa", "a", 1), ("mm", "m", 1), ("q", "q", 1)]);
        let r = anld(&m, AnldWeighting::ByType, 3).unwrap();
        let order: Vec<_> = r.worst_pairs.iter().map(|p| p.original.as_str()).collect();
        assert_eq!(order, ["aa", "mm", "zz"]);
    }
}
