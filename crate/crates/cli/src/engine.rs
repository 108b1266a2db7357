//! Shared ranking state behind both the CLI and the HTTP service.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use revscope_core::evaluation::QueryInputs;
use revscope_core::{
    rank_by_research_questions, rank_by_seed_abstract, Corpus, ModelRegistry, Pipeline, RankedList, SimilarityError,
    VectorizedCorpus,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCode {
    UnknownModel,
    NoCoverage,
    EmptyQuery,
    MalformedRequest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.code, self.message)?;
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ApiError {}

impl From<SimilarityError> for ApiError {
    fn from(e: SimilarityError) -> Self {
        let code = match e {
            SimilarityError::EmptyQuery => ErrorCode::EmptyQuery,
            SimilarityError::NoCoverage | SimilarityError::ZeroVector | SimilarityError::NonFinite => {
                ErrorCode::NoCoverage
            }
            SimilarityError::EmptyCorpus | SimilarityError::DimensionMismatch(..) => ErrorCode::MalformedRequest,
        };
        ApiError::new(code, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InlineAbstract {
    pub doc_id: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRequest {
    pub model: Option<String>,
    pub query: QueryInputs,
    /// Documents to rank instead of the loaded corpus.
    pub abstracts: Option<Vec<InlineAbstract>>,
}

/// Corpus, models and pipeline, loaded once and read-only afterwards.
/// Corpus vectors are computed up front for every model.
pub struct Engine {
    corpus: Corpus,
    pipeline: Pipeline,
    models: ModelRegistry,
    default_model: String,
    corpus_vectors: BTreeMap<String, VectorizedCorpus>,
}

impl Engine {
    pub fn new(
        corpus: Corpus,
        pipeline: Pipeline,
        models: ModelRegistry,
        default_model: String,
    ) -> anyhow::Result<Self> {
        if models.get(&default_model).is_none() {
            anyhow::bail!("default model `{default_model}` is not loaded");
        }
        let corpus_vectors = models.models().map(|m| (m.name.clone(), corpus.vectorize(m))).collect();
        Ok(Self {
            corpus,
            pipeline,
            models,
            default_model,
            corpus_vectors,
        })
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn models(&self) -> &ModelRegistry {
        &self.models
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn rank(&self, request: &RankRequest) -> Result<RankedList, ApiError> {
        let name = request.model.as_deref().unwrap_or(&self.default_model);
        let model = self
            .models
            .get(name)
            .ok_or_else(|| ApiError::new(ErrorCode::UnknownModel, format!("unknown model `{name}`")))?;

        let inline;
        let vectors = match &request.abstracts {
            None => &self.corpus_vectors[name],
            Some(docs) => {
                if docs.is_empty() {
                    return Err(ApiError::new(
                        ErrorCode::MalformedRequest,
                        "abstracts must not be empty",
                    ));
                }
                let mut seen = HashSet::new();
                for d in docs {
                    if d.doc_id.is_empty() {
                        return Err(ApiError::new(ErrorCode::MalformedRequest, "doc_id must not be empty"));
                    }
                    if !seen.insert(d.doc_id.as_str()) {
                        return Err(ApiError::new(
                            ErrorCode::MalformedRequest,
                            format!("duplicate doc_id `{}`", d.doc_id),
                        ));
                    }
                }
                let processed: Vec<(String, Vec<String>)> = docs
                    .iter()
                    .map(|d| {
                        (
                            d.doc_id.clone(),
                            self.pipeline.preprocess(&d.abstract_text, &d.doc_id).ngrams,
                        )
                    })
                    .collect();
                inline = VectorizedCorpus::build(model, processed.iter().map(|(id, g)| (id.as_str(), g.as_slice())));
                &inline
            }
        };

        let ranked = match &request.query {
            QueryInputs::ResearchQuestions { questions, aggregation } => {
                rank_by_research_questions(questions, vectors, model, &self.pipeline, *aggregation)
            }
            QueryInputs::SeedAbstract(seed) => rank_by_seed_abstract(seed, vectors, model, &self.pipeline),
        };
        Ok(ranked?)
    }
}
