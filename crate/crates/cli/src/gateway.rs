//! HTTP service exposing the two similarity endpoints.
//!
//! Routes, all under `/v1`:
//!
//! | method | path                               |
//! | ------ | ---------------------------------- |
//! | POST   | `/v1/similarity/research-questions` |
//! | POST   | `/v1/similarity/seed-abstract`      |
//! | GET    | `/v1/models`                        |
//! | GET    | `/v1/health`                        |
//!
//! Errors are returned as `{code, message, detail?}`.

use std::sync::Arc;

use anyhow::Context;
use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use revscope_core::evaluation::{EvaluationMode, QueryInputs};
use revscope_core::{Aggregation, Corpus, ModelRegistry, ModelSummary, RankedList, SimilarityResult, SkippedDoc};

use crate::config::{load_pipeline, ServiceConfig};
use crate::engine::{ApiError, Engine, ErrorCode, InlineAbstract, RankRequest};

#[derive(Debug, Deserialize)]
struct ResearchQuestionsBody {
    model: Option<String>,
    #[serde(default)]
    aggregation: Option<Aggregation>,
    questions: Vec<String>,
    abstracts: Option<Vec<InlineAbstract>>,
}

#[derive(Debug, Deserialize)]
struct SeedAbstractBody {
    model: Option<String>,
    seed: String,
    abstracts: Option<Vec<InlineAbstract>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityResponse {
    pub model: String,
    pub mode: EvaluationMode,
    pub results: Vec<SimilarityResult>,
    pub skipped: Vec<SkippedDoc>,
}

impl SimilarityResponse {
    fn new(mode: EvaluationMode, ranked: RankedList) -> Self {
        Self {
            model: ranked.query.model_name,
            mode,
            results: ranked.results,
            skipped: ranked.skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub corpus_size: usize,
    pub models: Vec<String>,
}

impl ErrorCode {
    fn status(self) -> StatusCode {
        match self {
            ErrorCode::UnknownModel => StatusCode::NOT_FOUND,
            ErrorCode::NoCoverage => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::EmptyQuery | ErrorCode::MalformedRequest => StatusCode::BAD_REQUEST,
        }
    }
}

struct ErrorResponse(StatusCode, ApiError);

impl From<ApiError> for ErrorResponse {
    fn from(e: ApiError) -> Self {
        Self(e.code.status(), e)
    }
}

impl IntoResponse for ErrorResponse {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: Result<Bytes, BytesRejection>) -> Result<T, ErrorResponse> {
    let bytes = body.map_err(|rejection| {
        ErrorResponse(
            rejection.status(),
            ApiError::new(ErrorCode::MalformedRequest, "cannot read request body").with_detail(rejection.body_text()),
        )
    })?;
    serde_json::from_slice(&bytes).map_err(|e| {
        ApiError::new(ErrorCode::MalformedRequest, "request body does not match the schema")
            .with_detail(e.to_string())
            .into()
    })
}

async fn research_questions(
    State(engine): State<Arc<Engine>>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<SimilarityResponse>, ErrorResponse> {
    let body: ResearchQuestionsBody = parse_body(body)?;
    let request = RankRequest {
        model: body.model,
        query: QueryInputs::ResearchQuestions {
            questions: body.questions,
            aggregation: body.aggregation.unwrap_or_default(),
        },
        abstracts: body.abstracts,
    };
    let ranked = engine.rank(&request)?;
    Ok(Json(SimilarityResponse::new(EvaluationMode::ResearchQuestions, ranked)))
}

async fn seed_abstract(
    State(engine): State<Arc<Engine>>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<SimilarityResponse>, ErrorResponse> {
    let body: SeedAbstractBody = parse_body(body)?;
    let request = RankRequest {
        model: body.model,
        query: QueryInputs::SeedAbstract(body.seed),
        abstracts: body.abstracts,
    };
    let ranked = engine.rank(&request)?;
    Ok(Json(SimilarityResponse::new(EvaluationMode::SeedAbstract, ranked)))
}

async fn models(State(engine): State<Arc<Engine>>) -> Json<Vec<ModelSummary>> {
    Json(engine.models().list_models())
}

async fn health(State(engine): State<Arc<Engine>>) -> Json<HealthResponse> {
    Json(HealthResponse {
        status: "ok".into(),
        corpus_size: engine.corpus().len(),
        models: engine.models().names(),
    })
}

async fn not_found() -> ErrorResponse {
    ErrorResponse(
        StatusCode::NOT_FOUND,
        ApiError::new(ErrorCode::MalformedRequest, "no such endpoint"),
    )
}

pub fn router(engine: Arc<Engine>, request_size_limit: usize) -> Router {
    Router::new()
        .route("/v1/similarity/research-questions", post(research_questions))
        .route("/v1/similarity/seed-abstract", post(seed_abstract))
        .route("/v1/models", get(models))
        .route("/v1/health", get(health))
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(request_size_limit))
        .with_state(engine)
}

/// Loads corpus, models and pipeline named by `config`. Each failure names
/// the resource that could not be loaded.
pub fn build_engine(config: &ServiceConfig) -> anyhow::Result<Engine> {
    let corpus = Corpus::load(&config.corpus_path)
        .with_context(|| format!("failed to load corpus {}", config.corpus_path.display()))?;
    let pipeline = match &config.pipeline_config_path {
        Some(p) => load_pipeline(Some(p)).with_context(|| format!("failed to load pipeline config {}", p.display()))?,
        None => revscope_core::Pipeline::with_config(corpus.pipeline_config.clone())?,
    };
    let mut registry = ModelRegistry::new();
    for m in &config.model_paths {
        let model = revscope_core::load_text_model(&m.path, &m.name)
            .with_context(|| format!("failed to load model `{}` from {}", m.name, m.path.display()))?;
        registry.insert(model)?;
    }
    Engine::new(corpus, pipeline, registry, config.default_model.clone())
}

pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let engine = Arc::new(build_engine(&config)?);
    let addr = format!("{}:{}", config.listen_address, config.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .with_context(|| format!("cannot listen on {addr}"))?;
    log::info!("listening on {addr}");
    axum::serve(listener, router(engine, config.request_size_limit))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
