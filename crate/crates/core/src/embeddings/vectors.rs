use std::collections::HashMap;
use std::path::Path;

use super::{DocumentEmbedding, MIN_DIM};
use crate::error::{Error, Result};

/// Word vectors keyed by token.
#[derive(Debug, Clone)]
pub struct VectorTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl VectorTable {
    pub fn from_vectors(dim: usize, vectors: HashMap<String, Vec<f64>>) -> Result<Self> {
        if let Some(v) = vectors.values().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: v.len(),
            });
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    /// Mean of the vectors that exist; unknown tokens are skipped and counted.
    pub fn embed(&self, tokens: &[String]) -> DocumentEmbedding {
        let mut sum = vec![0.0; self.dim];
        let mut found = 0;
        for t in tokens {
            if let Some(v) = self.vectors.get(t) {
                sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
                found += 1;
            }
        }
        let missing = tokens.len() - found;
        if found == 0 {
            return DocumentEmbedding::zero(self.dim, missing);
        }
        DocumentEmbedding::mean_of(sum, found, missing)
    }
}

/// Reads the word2vec text format: a `<count> <dim>` header, then one
/// `<token> <dim floats>` line per word.
pub fn load_word2vec_text(path: impl AsRef<Path>) -> Result<VectorTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing `<count> <dim>` header"))?;
    let mut fields = header.split_whitespace();
    let (count, dim) = match (
        fields.next().map(str::parse::<usize>),
        fields.next().map(str::parse::<usize>),
        fields.next(),
    ) {
        (Some(Ok(c)), Some(Ok(d)), None) => (c, d),
        _ => return Err(Error::parse(path, 1, "expected `<count> <dim>` header")),
    };
    if dim < MIN_DIM {
        return Err(Error::parse(path, 1, format!("dimension {dim} is below {MIN_DIM}")));
    }

    let mut vectors = HashMap::with_capacity(count);
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().unwrap_or_default().to_string();
        let values = parts
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(path, line_no, format!("bad number: {e}")))?;
        if values.len() != dim {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {dim} components, got {}", values.len()),
            ));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::parse(path, line_no, "non-finite component"));
        }
        vectors.insert(token, values);
    }
    if vectors.len() != count {
        return Err(Error::parse(
            path,
            1,
            format!("header announces {count} vectors, file has {}", vectors.len()),
        ));
    }
    Ok(VectorTable { dim, vectors })
}
