//! Token normalizers (stemmers, lemmatizers, truncation) behind one interface.
//!
//! Normalization works on token types: each distinct token is normalized once
//! and the result reused, and every (original, stem) pair is recorded in a
//! [`TokenMapping`] for the intrinsic metrics.

pub mod external;
pub mod snowball;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenizedDocument;
use crate::error::{Error, Result};

pub use external::ExternalSession;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NormalizerKind {
    Identity,
    SnowballEn,
    Truncate { n: usize },
    Mapping { path: PathBuf },
    External {
        command: Vec<String>,
        #[serde(default = "default_timeout_ms")]
        timeout_ms: u64,
    },
}

fn default_timeout_ms() -> u64 {
    external::DEFAULT_TIMEOUT.as_millis() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizerSpec {
    pub name: String,
    pub kind: NormalizerKind,
}

impl NormalizerSpec {
    pub fn new(kind: NormalizerKind) -> Self {
        let name = match &kind {
            NormalizerKind::Identity => "identity".to_string(),
            NormalizerKind::SnowballEn => "snowball-en".to_string(),
            NormalizerKind::Truncate { n } => format!("truncate:{n}"),
            NormalizerKind::Mapping { path } => format!("map:{}", path.display()),
            NormalizerKind::External { command, .. } => format!("ext:{}", command.join(" ")),
        };
        Self { name, kind }
    }

    /// Parses `identity`, `snowball-en`, `truncate:<n>`, `map:<path>` or
    /// `ext:<command...>` (whitespace-separated arguments).
    pub fn parse(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let kind = match (head, rest) {
            ("identity", None) => NormalizerKind::Identity,
            ("snowball-en" | "snowball_en", None) => NormalizerKind::SnowballEn,
            ("truncate", Some(n)) => NormalizerKind::Truncate {
                n: n.parse()
                    .map_err(|_| Error::Config(format!("truncate length {n:?} is not an integer")))?,
            },
            ("map", Some(path)) if !path.is_empty() => NormalizerKind::Mapping { path: path.into() },
            ("ext", Some(cmd)) => NormalizerKind::External {
                command: cmd.split_whitespace().map(str::to_string).collect(),
                timeout_ms: default_timeout_ms(),
            },
            _ => return Err(Error::Config(format!("unknown normalizer spec {s:?}"))),
        };
        Ok(Self::new(kind))
    }
}

/// An original→stem table loaded from a mapping file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappingTable {
    pub entries: HashMap<String, String>,
    /// Lines whose original had already appeared (the later line wins).
    pub duplicates: usize,
}

/// Reads `original<TAB>stem` lines; `#` lines and blank lines are ignored.
pub fn load_mapping(path: impl AsRef<Path>) -> Result<MappingTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut table = MappingTable::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [original, stem] = fields[..] else {
            return Err(Error::parse(path, i + 1, "expected 2 fields"));
        };
        if original.is_empty() {
            return Err(Error::parse(path, i + 1, "empty original token"));
        }
        if table.entries.insert(original.to_string(), stem.to_string()).is_some() {
            table.duplicates += 1;
        }
    }
    Ok(table)
}

enum Backend {
    Identity,
    SnowballEn,
    Truncate(usize),
    Mapping(MappingTable),
    External(Mutex<ExternalSession>),
}

/// A constructed, ready-to-use normalizer.
pub struct Normalizer {
    spec: NormalizerSpec,
    backend: Backend,
}

impl std::fmt::Debug for Normalizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Normalizer").field("spec", &self.spec).finish()
    }
}

impl Normalizer {
    pub fn new(spec: &NormalizerSpec) -> Result<Self> {
        let backend = match &spec.kind {
            NormalizerKind::Identity => Backend::Identity,
            NormalizerKind::SnowballEn => Backend::SnowballEn,
            NormalizerKind::Truncate { n: 0 } => {
                return Err(Error::Config("truncate length must be at least 1".into()))
            }
            NormalizerKind::Truncate { n } => Backend::Truncate(*n),
            NormalizerKind::Mapping { path } => Backend::Mapping(load_mapping(path)?),
            NormalizerKind::External { command, timeout_ms } => Backend::External(Mutex::new(
                ExternalSession::spawn(command, Duration::from_millis(*timeout_ms))?,
            )),
        };
        Ok(Self {
            spec: spec.clone(),
            backend,
        })
    }

    pub fn spec(&self) -> &NormalizerSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// Duplicate-key warnings from a mapping file, zero for other kinds.
    pub fn load_warnings(&self) -> usize {
        match &self.backend {
            Backend::Mapping(t) => t.duplicates,
            _ => 0,
        }
    }

    pub fn normalize_token(&self, token: &str) -> Result<String> {
        if token.is_empty() {
            return Err(Error::Precondition("cannot normalize an empty token".into()));
        }
        Ok(match &self.backend {
            Backend::Identity => token.to_string(),
            Backend::SnowballEn => snowball::stem(token),
            Backend::Truncate(n) => token.chars().take(*n).collect(),
            Backend::Mapping(t) => t.entries.get(token).cloned().unwrap_or_else(|| token.to_string()),
            Backend::External(session) => session
                .lock()
                .unwrap_or_else(|p| p.into_inner())
                .normalize(token)?,
        })
    }

    /// Normalizes every document, memoizing per distinct token.
    ///
    /// Empty stems are dropped from the output documents but kept in the
    /// mapping, where they count as defects.
    pub fn normalize_corpus(&self, docs: &[TokenizedDocument]) -> Result<NormalizedCorpus> {
        let mut mapping = TokenMapping::default();
        let mut out = Vec::with_capacity(docs.len());
        for doc in docs {
            let mut tokens = Vec::with_capacity(doc.tokens.len());
            for token in &doc.tokens {
                let stem = match mapping.pairs.get(token) {
                    Some(stem) => stem.clone(),
                    None => {
                        let stem = self.normalize_token(token)?;
                        mapping.pairs.insert(token.clone(), stem.clone());
                        stem
                    }
                };
                *mapping.occurrence_counts.entry(token.clone()).or_insert(0) += 1;
                if !stem.is_empty() {
                    tokens.push(stem);
                }
            }
            out.push(TokenizedDocument {
                doc_id: doc.doc_id.clone(),
                tokens,
            });
        }
        Ok(NormalizedCorpus { docs: out, mapping })
    }
}

/// Every observed (original, stem) pair with occurrence counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenMapping {
    pub pairs: BTreeMap<String, String>,
    pub occurrence_counts: BTreeMap<String, usize>,
}

impl TokenMapping {
    /// Originals whose stem came back empty.
    pub fn empty_stems(&self) -> usize {
        self.pairs.values().filter(|s| s.is_empty()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedCorpus {
    pub docs: Vec<TokenizedDocument>,
    pub mapping: TokenMapping,
}
