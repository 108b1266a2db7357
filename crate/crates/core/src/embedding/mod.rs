//! Pre-trained word embeddings and document vectors composed from them.

mod registry;
mod text_format;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use registry::{ModelRegistry, ModelSummary};
pub use text_format::{load_text_model, read_text_model, save_text_model, write_text_model};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {0}: component count differs from the model dimension")]
    DimensionMismatch(usize),
    #[error("line {0}: malformed or non-finite number")]
    MalformedNumber(usize),
    #[error("model file has no data lines")]
    EmptyModel,
    #[error("no n-gram of `{0}` has an embedding")]
    NoCoverage(String),
    #[error("model `{0}` is already registered")]
    DuplicateModel(String),
}

/// Immutable token → vector table of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub name: String,
    pub dimension: usize,
    pub vocabulary: HashMap<String, Vec<f64>>,
    pub source_path: String,
    /// Tokens that appeared more than once in the source file.
    pub duplicate_tokens: usize,
}

impl EmbeddingModel {
    /// Builds a model from in-memory vectors, checking that every vector
    /// has the same non-zero length and only finite components.
    pub fn from_vectors(
        name: &str,
        vectors: impl IntoIterator<Item = (String, Vec<f64>)>,
    ) -> Result<Self, EmbeddingError> {
        let vocabulary: HashMap<String, Vec<f64>> = vectors.into_iter().collect();
        let dimension = vocabulary
            .values()
            .next()
            .map(Vec::len)
            .ok_or(EmbeddingError::EmptyModel)?;
        for (i, v) in vocabulary.values().enumerate() {
            if v.len() != dimension || dimension == 0 {
                return Err(EmbeddingError::DimensionMismatch(i + 1));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(EmbeddingError::MalformedNumber(i + 1));
            }
        }
        Ok(Self {
            name: name.to_string(),
            dimension,
            vocabulary,
            source_path: String::new(),
            duplicate_tokens: 0,
        })
    }

    /// Case-sensitive exact match.
    pub fn lookup(&self, token: &str) -> Option<&[f64]> {
        self.vocabulary.get(token).map(Vec::as_slice)
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    /// Same vocabulary with every component multiplied by `factor`.
    pub fn scaled(&self, name: &str, factor: f64) -> Self {
        Self {
            name: name.to_string(),
            vocabulary: self
                .vocabulary
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentVector {
    pub source_id: String,
    pub model_name: String,
    pub vector: Vec<f64>,
    pub matched_ngrams: usize,
    pub total_ngrams: usize,
    pub coverage: f64,
}

fn mean_into(acc: &mut [f64], count: usize) {
    let n = count as f64;
    acc.iter_mut().for_each(|x| *x /= n);
}

/// Vector for one n-gram: the underscore-joined phrase if the model has it,
/// otherwise the mean of whichever constituent words it has.
fn ngram_vector(model: &EmbeddingModel, ngram: &str) -> Option<Vec<f64>> {
    let phrase = ngram.replace(' ', "_");
    if let Some(v) = model.lookup(&phrase) {
        return Some(v.to_vec());
    }
    let mut acc = vec![0.0; model.dimension];
    let mut found = 0usize;
    for word in ngram.split(' ') {
        if let Some(v) = model.lookup(word) {
            acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
            found += 1;
        }
    }
    (found > 0).then(|| {
        mean_into(&mut acc, found);
        acc
    })
}

/// Mean of the per-n-gram vectors. N-grams with no vector are counted as
/// misses and skipped; a document with no hits is an error rather than a
/// zero vector.
pub fn vectorize_document(
    model: &EmbeddingModel,
    source_id: &str,
    ngrams: &[String],
) -> Result<DocumentVector, EmbeddingError> {
    let mut acc = vec![0.0; model.dimension];
    let mut matched = 0usize;
    for ngram in ngrams {
        if let Some(v) = ngram_vector(model, ngram) {
            acc.iter_mut().zip(&v).for_each(|(a, x)| *a += x);
            matched += 1;
        }
    }
    if matched == 0 {
        return Err(EmbeddingError::NoCoverage(source_id.to_string()));
    }
    mean_into(&mut acc, matched);
    Ok(DocumentVector {
        source_id: source_id.to_string(),
        model_name: model.name.clone(),
        vector: acc,
        matched_ngrams: matched,
        total_ngrams: ngrams.len(),
        coverage: matched as f64 / ngrams.len() as f64,
    })
}
