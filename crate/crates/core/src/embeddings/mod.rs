//! Document embeddings and the information retention score.
//!
//! Documents are mean-pooled token vectors (or service-pooled for the HTTP
//! provider). Retention compares each original document with its normalized
//! counterpart by cosine similarity and averages over documents.

mod hashed;
mod http;
mod vectors;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenizedDocument;
use crate::error::{Error, Result};

pub use hashed::HashedNgram;
pub use http::{EmbeddingRequest, EmbeddingResponse, HttpEmbedder};
pub use vectors::{load_word2vec_text, VectorTable};

pub const MIN_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EmbeddingKind {
    HashedNgram {
        dim: usize,
        n_min: usize,
        n_max: usize,
        seed: u64,
    },
    VectorFile {
        path: PathBuf,
        /// Checked against the file header when given.
        #[serde(default)]
        dim: Option<usize>,
    },
    HttpService {
        url: String,
        batch_size: usize,
        timeout_ms: u64,
        max_in_flight: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingProviderSpec {
    pub name: String,
    pub kind: EmbeddingKind,
}

impl EmbeddingProviderSpec {
    pub fn hashed(dim: usize, seed: u64) -> Self {
        Self {
            name: format!("hash:{dim}:{seed}"),
            kind: EmbeddingKind::HashedNgram {
                dim,
                n_min: 3,
                n_max: 5,
                seed,
            },
        }
    }

    pub fn vector_file(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        Self {
            name: format!("vecfile:{}", path.display()),
            kind: EmbeddingKind::VectorFile { path, dim: None },
        }
    }

    pub fn http(url: impl Into<String>) -> Self {
        let url = url.into();
        Self {
            name: format!("http:{url}"),
            kind: EmbeddingKind::HttpService {
                url,
                batch_size: 32,
                timeout_ms: 30_000,
                max_in_flight: 4,
            },
        }
    }

    /// Parses `hash:<dim>:<seed>`, `vecfile:<path>` or `http:<url>`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown embedder spec {s:?}"));
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        match head {
            "hash" => {
                let (dim, seed) = rest.split_once(':').ok_or_else(bad)?;
                let dim = dim.parse().map_err(|_| bad())?;
                let seed = seed.parse().map_err(|_| bad())?;
                Ok(Self::hashed(dim, seed))
            }
            "vecfile" if !rest.is_empty() => Ok(Self::vector_file(rest)),
            "http" if !rest.is_empty() => Ok(Self::http(rest)),
            _ => Err(bad()),
        }
    }

    fn validate(&self) -> Result<()> {
        match &self.kind {
            EmbeddingKind::HashedNgram {
                dim, n_min, n_max, ..
            } => {
                if *dim < MIN_DIM {
                    return Err(Error::Config(format!("embedding dim {dim} is below {MIN_DIM}")));
                }
                if *n_min < 1 || n_min > n_max {
                    return Err(Error::Config(format!("invalid n-gram range ({n_min}, {n_max})")));
                }
            }
            EmbeddingKind::VectorFile { dim: Some(dim), .. } if *dim < MIN_DIM => {
                return Err(Error::Config(format!("embedding dim {dim} is below {MIN_DIM}")));
            }
            EmbeddingKind::HttpService {
                batch_size,
                max_in_flight,
                ..
            } if *batch_size == 0 || *max_in_flight == 0 => {
                return Err(Error::Config(
                    "batch_size and max_in_flight must be positive".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentEmbedding {
    pub vector: Vec<f64>,
    /// Tokens that contributed to the pooled vector.
    pub token_count: usize,
    /// Tokens with no vector (vector files only).
    pub missing_tokens: usize,
}

impl DocumentEmbedding {
    pub(crate) fn zero(dim: usize, missing_tokens: usize) -> Self {
        Self {
            vector: vec![0.0; dim],
            token_count: 0,
            missing_tokens,
        }
    }

    pub(crate) fn mean_of(mut sum: Vec<f64>, token_count: usize, missing_tokens: usize) -> Self {
        if token_count > 0 {
            let n = token_count as f64;
            sum.iter_mut().for_each(|x| *x /= n);
        }
        Self {
            vector: sum,
            token_count,
            missing_tokens,
        }
    }
}

pub enum EmbeddingProvider {
    Hashed(HashedNgram),
    Vectors(VectorTable),
    Http(HttpEmbedder),
}

impl EmbeddingProvider {
    pub fn new(spec: &EmbeddingProviderSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match &spec.kind {
            EmbeddingKind::HashedNgram {
                dim,
                n_min,
                n_max,
                seed,
            } => EmbeddingProvider::Hashed(HashedNgram::new(*dim, (*n_min, *n_max), *seed)),
            EmbeddingKind::VectorFile { path, dim } => {
                let table = load_word2vec_text(path)?;
                if let Some(dim) = dim {
                    if *dim != table.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: *dim,
                            actual: table.dim(),
                        });
                    }
                }
                EmbeddingProvider::Vectors(table)
            }
            EmbeddingKind::HttpService {
                url,
                batch_size,
                timeout_ms,
                max_in_flight,
            } => EmbeddingProvider::Http(HttpEmbedder::new(
                url.clone(),
                *batch_size,
                std::time::Duration::from_millis(*timeout_ms),
                *max_in_flight,
            )),
        })
    }

    pub fn embed_document(&self, tokens: &[String]) -> Result<DocumentEmbedding> {
        match self {
            EmbeddingProvider::Hashed(h) => Ok(h.embed(tokens)),
            EmbeddingProvider::Vectors(v) => Ok(v.embed(tokens)),
            EmbeddingProvider::Http(h) => {
                let doc = TokenizedDocument {
                    doc_id: String::new(),
                    tokens: tokens.to_vec(),
                };
                Ok(h.embed_all(std::slice::from_ref(&doc))?.remove(0))
            }
        }
    }

    /// Embeds documents in order; the HTTP provider batches requests.
    pub fn embed_corpus(&self, docs: &[TokenizedDocument]) -> Result<Vec<DocumentEmbedding>> {
        match self {
            EmbeddingProvider::Http(h) => h.embed_all(docs),
            _ => docs.iter().map(|d| self.embed_document(&d.tokens)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine {
    pub value: f64,
    /// Either input had zero norm; `value` is then 0.
    pub zero_vector: bool,
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<Cosine> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(Cosine {
            value: 0.0,
            zero_vector: true,
        });
    }
    // sqrt of the product keeps cos(u, u) at exactly 1.
    let value = (dot / (nu * nv).sqrt()).clamp(-1.0, 1.0);
    Ok(Cosine {
        value,
        zero_vector: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrsResult {
    pub irs: f64,
    pub per_doc: Vec<(String, f64)>,
    pub zero_vector_docs: usize,
    pub missing_tokens: usize,
}

/// Mean per-document cosine between original and normalized embeddings.
pub fn irs(
    provider: &EmbeddingProvider,
    original: &[TokenizedDocument],
    normalized: &[TokenizedDocument],
) -> Result<IrsResult> {
    if original.len() != normalized.len() {
        return Err(Error::Misaligned(format!(
            "{} original vs {} normalized documents",
            original.len(),
            normalized.len()
        )));
    }
    if let Some((a, b)) = original
        .iter()
        .zip(normalized)
        .find(|(a, b)| a.doc_id != b.doc_id)
    {
        return Err(Error::Misaligned(format!("document {:?} paired with {:?}", a.doc_id, b.doc_id)));
    }
    if original.is_empty() {
        return Err(Error::EmptyInput("corpus"));
    }
    let before = provider.embed_corpus(original)?;
    let after = provider.embed_corpus(normalized)?;

    let mut per_doc = Vec::with_capacity(original.len());
    let mut zero_vector_docs = 0;
    let mut missing_tokens = 0;
    for ((doc, u), v) in original.iter().zip(&before).zip(&after) {
        let c = cosine(&u.vector, &v.vector)?;
        zero_vector_docs += usize::from(c.zero_vector);
        missing_tokens += u.missing_tokens + v.missing_tokens;
        per_doc.push((doc.doc_id.clone(), c.value));
    }
    let irs = per_doc.iter().map(|(_, c)| c).sum::<f64>() / per_doc.len() as f64;
    Ok(IrsResult {
        irs,
        per_doc,
        zero_vector_docs,
        missing_tokens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&[1.0, 0.0], &[1.0, 0.0]).unwrap().value, 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap().value, 0.0);
        let z = cosine(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!((z.value, z.zero_vector), (0.0, true));
        assert!(cosine(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn self_cosine_is_exactly_one() {
        for v in [vec![0.1, 0.2, 0.3], vec![1e-3, 7.0, -2.5, 3.3], vec![2.0f64.sqrt(); 9]] {
            assert_eq!(cosine(&v, &v).unwrap().value, 1.0);
        }
    }

    #[test]
    fn spec_grammar() {
        let h = EmbeddingProviderSpec::parse("hash:256:7").unwrap();
        assert!(matches!(h.kind, EmbeddingKind::HashedNgram { dim: 256, seed: 7, n_min: 3, n_max: 5 }));
        let u = EmbeddingProviderSpec::parse("http:http://127.0.0.1:9000/embed").unwrap();
        assert!(matches!(u.kind, EmbeddingKind::HttpService { ref url, batch_size: 32, .. } if url == "http://127.0.0.1:9000/embed"));
        assert!(EmbeddingProviderSpec::parse("hash:4:1").and_then(|s| EmbeddingProvider::new(&s)).is_err());
        assert!(EmbeddingProviderSpec::parse("bert").is_err());
    }

    #[test]
    fn irs_rejects_misaligned_corpora() {
        let p = EmbeddingProvider::new(&EmbeddingProviderSpec::hashed(16, 0)).unwrap();
        let doc = |id: &str| TokenizedDocument {
            doc_id: id.into(),
            tokens: vec!["x".into()],
        };
        assert!(matches!(irs(&p, &[doc("a")], &[doc("b")]), Err(Error::Misaligned(_))));
        assert!(matches!(irs(&p, &[doc("a")], &[]), Err(Error::Misaligned(_))));
    }
}
