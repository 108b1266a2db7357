//! Ranking published systematic reviews by semantic similarity to draft
//! research questions or a seed abstract.
//!
//! Text goes through [`text`] to become keyword n-grams, [`embedding`]
//! turns n-grams into document vectors, [`similarity`] ranks a corpus by
//! cosine distance, [`corpus`] stores curated review records and
//! [`evaluation`] scores rankings against human annotations.

pub mod corpus;
pub mod embedding;
pub mod evaluation;
pub mod similarity;
pub mod text;

pub use corpus::{ingest, Corpus, CorpusError, SlrRecord};
pub use embedding::{
    load_text_model, vectorize_document, DocumentVector, EmbeddingError, EmbeddingModel, ModelRegistry, ModelSummary,
};
pub use evaluation::{
    evaluate_models, precision_recall_at_k, spearman, AnnotatedCorpus, EvaluationMode, EvaluationReport, MetricError,
    ModelEvaluation, QueryInputs,
};
pub use similarity::{
    cosine, distance, rank_by_query, rank_by_research_questions, rank_by_seed_abstract, Aggregation, RankMode,
    RankedList, SimilarityError, SimilarityResult, SkippedDoc, VectorizedCorpus,
};
pub use text::{KeywordMode, Pipeline, PipelineConfig, TokenizedDocument};
