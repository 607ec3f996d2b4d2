use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::DocumentEmbedding;
use crate::corpus::TokenizedDocument;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRequest {
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingResponse {
    pub vectors: Vec<Vec<f64>>,
}

/// Client for a pooled-embedding service: `POST {"texts": [...]}` answered by
/// `{"vectors": [[...], ...]}` with status 200.
#[derive(Debug, Clone)]
pub struct HttpEmbedder {
    agent: ureq::Agent,
    url: String,
    batch_size: usize,
    max_in_flight: usize,
}

impl HttpEmbedder {
    pub fn new(url: String, batch_size: usize, timeout: Duration, max_in_flight: usize) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            agent,
            url,
            batch_size,
            max_in_flight,
        }
    }

    pub fn embed_batch(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        let request = EmbeddingRequest {
            texts: texts.to_vec(),
        };
        let mut response = self
            .agent
            .post(&self.url)
            .send_json(&request)
            .map_err(|e| Error::Service(format!("{}: {e}", self.url)))?;
        let status = response.status().as_u16();
        if status != 200 {
            return Err(Error::Service(format!("{} answered status {status}", self.url)));
        }
        let body: EmbeddingResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| Error::Service(format!("{}: unreadable response: {e}", self.url)))?;
        if body.vectors.len() != texts.len() {
            return Err(Error::Service(format!(
                "sent {} texts, received {} vectors",
                texts.len(),
                body.vectors.len()
            )));
        }
        if let Some(first) = body.vectors.first() {
            if body.vectors.iter().any(|v| v.len() != first.len()) {
                return Err(Error::Service("vectors of unequal length in one response".into()));
            }
            if first.is_empty() {
                return Err(Error::Service("service returned empty vectors".into()));
            }
        }
        if body.vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Service("non-finite vector component".into()));
        }
        Ok(body.vectors)
    }

    /// Embeds documents as space-joined token text. Empty documents are not
    /// sent and get a zero vector.
    pub fn embed_all(&self, docs: &[TokenizedDocument]) -> Result<Vec<DocumentEmbedding>> {
        let pending: Vec<(usize, String)> = docs
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.tokens.is_empty())
            .map(|(i, d)| (i, d.tokens.join(" ")))
            .collect();
        let batches: Vec<&[(usize, String)]> = pending.chunks(self.batch_size).collect();

        let mut results: Vec<Vec<Vec<f64>>> = Vec::with_capacity(batches.len());
        for wave in batches.chunks(self.max_in_flight) {
            let replies: Vec<Result<Vec<Vec<f64>>>> = thread::scope(|s| {
                let handles: Vec<_> = wave
                    .iter()
                    .map(|batch| {
                        let texts: Vec<String> = batch.iter().map(|(_, t)| t.clone()).collect();
                        s.spawn(move || self.embed_batch(&texts))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().unwrap_or_else(|_| Err(Error::Service("worker panicked".into()))))
                    .collect()
            });
            for r in replies {
                results.push(r?);
            }
        }

        let dim = results.iter().flatten().map(Vec::len).next();
        if let Some(dim) = dim {
            if let Some(v) = results.iter().flatten().find(|v| v.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
        }
        let dim = dim.unwrap_or(0);
        let mut out: Vec<DocumentEmbedding> = docs.iter().map(|_| DocumentEmbedding::zero(dim, 0)).collect();
        for ((idx, _), vector) in pending.iter().zip(results.into_iter().flatten()) {
            out[*idx] = DocumentEmbedding {
                vector,
                token_count: docs[*idx].tokens.len(),
                missing_tokens: 0,
            };
        }
        Ok(out)
    }
}
