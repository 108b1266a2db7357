//! Cosine distance and corpus ranking.
//!
//! Distance is `1 - cos(a, b)` with the cosine clamped to `[-1, 1]`, so
//! distances always fall in `[0, 2]`. Rankings sort by `(distance, doc_id)`
//! ascending, which makes every ordering a deterministic total order.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::embedding::{vectorize_document, DocumentVector, EmbeddingError, EmbeddingModel};
use crate::text::Pipeline;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("vector has zero norm")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cosine is not finite")]
    NonFinite,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("query is empty")]
    EmptyQuery,
    #[error("query has no in-vocabulary terms")]
    NoCoverage,
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, SimilarityError> {
    if a.len() != b.len() {
        return Err(SimilarityError::DimensionMismatch(a.len(), b.len()));
    }
    let (mut dot, mut norm_a, mut norm_b) = (0.0f64, 0.0f64, 0.0f64);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(SimilarityError::ZeroVector);
    }
    let product = norm_a * norm_b;
    let denominator = if product.is_finite() && product > 0.0 {
        product.sqrt()
    } else {
        norm_a.sqrt() * norm_b.sqrt()
    };
    let sim = dot / denominator;
    if !sim.is_finite() {
        return Err(SimilarityError::NonFinite);
    }
    Ok(sim.clamp(-1.0, 1.0))
}

pub fn distance(a: &[f64], b: &[f64]) -> Result<f64, SimilarityError> {
    cosine(a, b).map(|s| 1.0 - s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMode {
    ResearchQuestions,
    SeedAbstract,
    /// Ranking against an already vectorized query.
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Concat,
    MaxPerQuestion,
}

impl std::str::FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "concat" => Ok(Self::Concat),
            "max_per_question" => Ok(Self::MaxPerQuestion),
            other => Err(format!("unknown aggregation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryDescriptor {
    pub mode: RankMode,
    pub model_name: String,
    /// Hex SHA-256 of the query text.
    pub query_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregation: Option<Aggregation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResult {
    pub doc_id: String,
    pub similarity: f64,
    pub distance: f64,
    pub rank: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedDoc {
    pub doc_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query: QueryDescriptor,
    pub results: Vec<SimilarityResult>,
    pub skipped: Vec<SkippedDoc>,
}

impl RankedList {
    pub fn doc_ids(&self) -> Vec<&str> {
        self.results.iter().map(|r| r.doc_id.as_str()).collect()
    }

    /// Keeps the top `k` results; skipped documents are untouched.
    pub fn truncate(&mut self, k: usize) {
        self.results.truncate(k);
    }
}

/// Document vectors for one model, plus the documents that could not be
/// vectorized and why.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedCorpus {
    pub model_name: String,
    pub vectors: Vec<DocumentVector>,
    pub skipped: Vec<SkippedDoc>,
}

impl VectorizedCorpus {
    pub fn build<'a, I>(model: &EmbeddingModel, documents: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a [String])>,
    {
        let mut vectors = Vec::new();
        let mut skipped = Vec::new();
        for (doc_id, ngrams) in documents {
            match vectorize_document(model, doc_id, ngrams) {
                Ok(v) => vectors.push(v),
                Err(err) => skipped.push(SkippedDoc {
                    doc_id: doc_id.to_string(),
                    reason: err.to_string(),
                }),
            }
        }
        Self {
            model_name: model.name.clone(),
            vectors,
            skipped,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len() + self.skipped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn by_distance_then_id(a: &SimilarityResult, b: &SimilarityResult) -> Ordering {
    a.distance.total_cmp(&b.distance).then_with(|| a.doc_id.cmp(&b.doc_id))
}

/// Scores every corpus vector by its best similarity over `queries`.
fn score(queries: &[&[f64]], corpus: &VectorizedCorpus, query: QueryDescriptor) -> Result<RankedList, SimilarityError> {
    if corpus.is_empty() {
        return Err(SimilarityError::EmptyCorpus);
    }
    let scored: Vec<Result<Result<SimilarityResult, SkippedDoc>, SimilarityError>> = corpus
        .vectors
        .par_iter()
        .map(|doc| {
            let mut best: Option<f64> = None;
            for q in queries {
                match cosine(q, &doc.vector) {
                    Ok(s) => best = Some(best.map_or(s, |b: f64| b.max(s))),
                    Err(SimilarityError::ZeroVector | SimilarityError::NonFinite) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(match best {
                Some(similarity) => Ok(SimilarityResult {
                    doc_id: doc.source_id.clone(),
                    similarity,
                    distance: 1.0 - similarity,
                    rank: 0,
                    coverage: doc.coverage,
                }),
                None => Err(SkippedDoc {
                    doc_id: doc.source_id.clone(),
                    reason: "document vector has zero norm".into(),
                }),
            })
        })
        .collect();

    let mut results = Vec::with_capacity(scored.len());
    let mut skipped = corpus.skipped.clone();
    for item in scored {
        match item? {
            Ok(r) => results.push(r),
            Err(s) => skipped.push(s),
        }
    }
    results.sort_by(by_distance_then_id);
    for (i, r) in results.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    skipped.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    Ok(RankedList {
        query,
        results,
        skipped,
    })
}

fn check_query(v: &[f64]) -> Result<(), SimilarityError> {
    if v.iter().all(|x| *x == 0.0) {
        Err(SimilarityError::ZeroVector)
    } else {
        Ok(())
    }
}

pub fn rank_by_query(query: &DocumentVector, corpus: &VectorizedCorpus) -> Result<RankedList, SimilarityError> {
    check_query(&query.vector)?;
    let descriptor = QueryDescriptor {
        mode: RankMode::Vector,
        model_name: query.model_name.clone(),
        query_digest: digest(&query.source_id),
        aggregation: None,
    };
    score(&[&query.vector], corpus, descriptor)
}

fn query_vector(
    model: &EmbeddingModel,
    pipeline: &Pipeline,
    text: &str,
    id: &str,
) -> Result<DocumentVector, SimilarityError> {
    let doc = pipeline.preprocess(text, id);
    vectorize_document(model, id, &doc.ngrams).map_err(|e| match e {
        EmbeddingError::NoCoverage(_) => SimilarityError::NoCoverage,
        other => unreachable!("vectorize_document only fails with NoCoverage: {other}"),
    })
}

/// Ranks the corpus against a list of research questions.
///
/// `Concat` joins the questions into one query document. `MaxPerQuestion`
/// vectorizes each question separately and scores a document by its best
/// similarity; questions with no in-vocabulary terms are ignored as long as
/// at least one question has coverage.
pub fn rank_by_research_questions(
    questions: &[String],
    corpus: &VectorizedCorpus,
    model: &EmbeddingModel,
    pipeline: &Pipeline,
    aggregation: Aggregation,
) -> Result<RankedList, SimilarityError> {
    let questions: Vec<&str> = questions.iter().map(|q| q.trim()).filter(|q| !q.is_empty()).collect();
    if questions.is_empty() {
        return Err(SimilarityError::EmptyQuery);
    }
    let descriptor = QueryDescriptor {
        mode: RankMode::ResearchQuestions,
        model_name: model.name.clone(),
        query_digest: digest(&questions.join("\n")),
        aggregation: Some(aggregation),
    };
    match aggregation {
        Aggregation::Concat => {
            let q = query_vector(model, pipeline, &questions.join(" "), "query")?;
            check_query(&q.vector)?;
            score(&[&q.vector], corpus, descriptor)
        }
        Aggregation::MaxPerQuestion => {
            let mut vectors = Vec::new();
            for (i, text) in questions.iter().enumerate() {
                match query_vector(model, pipeline, text, &format!("q{}", i + 1)) {
                    Ok(v) if check_query(&v.vector).is_ok() => vectors.push(v.vector),
                    Ok(_) | Err(SimilarityError::NoCoverage) => {}
                    Err(e) => return Err(e),
                }
            }
            if vectors.is_empty() {
                return Err(SimilarityError::NoCoverage);
            }
            let refs: Vec<&[f64]> = vectors.iter().map(Vec::as_slice).collect();
            score(&refs, corpus, descriptor)
        }
    }
}

pub fn rank_by_seed_abstract(
    seed: &str,
    corpus: &VectorizedCorpus,
    model: &EmbeddingModel,
    pipeline: &Pipeline,
) -> Result<RankedList, SimilarityError> {
    let seed = seed.trim();
    if seed.is_empty() {
        return Err(SimilarityError::EmptyQuery);
    }
    let q = query_vector(model, pipeline, seed, "seed")?;
    check_query(&q.vector)?;
    let descriptor = QueryDescriptor {
        mode: RankMode::SeedAbstract,
        model_name: model.name.clone(),
        query_digest: digest(seed),
        aggregation: None,
    };
    score(&[&q.vector], corpus, descriptor)
}
