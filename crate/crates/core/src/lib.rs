//! Task-oriented evaluation of text normalizers.
//!
//! A normalizer (stemmer, lemmatizer, or any token → stem function) is scored on
//! vocabulary compression, document-level meaning retention, their product,
//! word-level edit distortion, and the change it causes in downstream
//! classification accuracy, with paired significance tests.

pub mod corpus;
pub mod downstream;
pub mod embeddings;
pub mod error;
pub mod intrinsic;
pub mod normalizer;
pub mod report;
pub mod ses;

pub use error::{Error, Result};
