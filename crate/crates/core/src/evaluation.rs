//! Ranking quality against human screening decisions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::embedding::{EmbeddingModel, ModelRegistry};
use crate::similarity::{rank_by_research_questions, rank_by_seed_abstract, Aggregation, RankedList};
use crate::text::Pipeline;

pub const DEFAULT_K_VALUES: [usize; 3] = [5, 10, 20];
const ANNOTATION_HEADER: [&str; 3] = ["doc_id", "label", "rating"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two observations")]
    TooFew,
    #[error("one input is constant")]
    ConstantInput,
    #[error("no relevant documents are labelled")]
    NoPositives,
    #[error("k = {k} is outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("header must be `doc_id,label,rating`")]
    Header,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: doc_id `{doc_id}` is not in the corpus")]
    UnknownDocument { line: usize, doc_id: String },
    #[error("line {line}: doc_id `{doc_id}` annotated twice")]
    Duplicate { line: usize, doc_id: String },
}

/// Fractional ranks, 1-based; tied values share the mean of their positions.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(MetricError::TooFew);
    }
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

/// Precision and recall of the top `k` results. Skipped documents count as
/// not retrieved; unlabelled documents count as not relevant.
pub fn precision_recall_at_k(
    ranked: &RankedList,
    labels: &BTreeMap<String, u8>,
    k: usize,
) -> Result<(f64, f64), MetricError> {
    let relevant_total = labels.values().filter(|&&l| l == 1).count();
    if relevant_total == 0 {
        return Err(MetricError::NoPositives);
    }
    if k == 0 || k > ranked.results.len() {
        return Err(MetricError::KOutOfRange {
            k,
            max: ranked.results.len(),
        });
    }
    let hits = ranked.results[..k]
        .iter()
        .filter(|r| labels.get(&r.doc_id) == Some(&1))
        .count();
    Ok((hits as f64 / k as f64, hits as f64 / relevant_total as f64))
}

#[derive(Debug, Clone)]
pub struct AnnotatedCorpus<'a> {
    pub corpus: &'a Corpus,
    pub labels: BTreeMap<String, u8>,
    pub ratings: BTreeMap<String, f64>,
}

impl<'a> AnnotatedCorpus<'a> {
    /// Reads `doc_id,label[,rating]` rows after the mandatory header.
    pub fn read<R: std::io::Read>(corpus: &'a Corpus, reader: R) -> Result<Self, AnnotationError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut labels = BTreeMap::new();
        let mut ratings = BTreeMap::new();
        let mut rows = rdr.records();
        match rows.next() {
            Some(Ok(h)) if h.iter().eq(ANNOTATION_HEADER) => {}
            _ => return Err(AnnotationError::Header),
        }
        for row in rows {
            let row = row.map_err(|e| AnnotationError::Malformed {
                line: e.position().map_or(0, |p| p.line() as usize),
                reason: e.to_string(),
            })?;
            let line = row.position().map_or(0, |p| p.line() as usize);
            let malformed = |reason: &str| AnnotationError::Malformed {
                line,
                reason: reason.to_string(),
            };
            if row.iter().all(str::is_empty) {
                continue;
            }
            if !(2..=3).contains(&row.len()) {
                return Err(malformed("expected 2 or 3 fields"));
            }
            let doc_id = row[0].to_string();
            if !corpus.contains(&doc_id) {
                return Err(AnnotationError::UnknownDocument { line, doc_id });
            }
            let label = match &row[1] {
                "0" => 0u8,
                "1" => 1u8,
                _ => return Err(malformed("label must be 0 or 1")),
            };
            if labels.insert(doc_id.clone(), label).is_some() {
                return Err(AnnotationError::Duplicate { line, doc_id });
            }
            if let Some(raw) = row.get(2).filter(|r| !r.is_empty()) {
                match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() => {
                        ratings.insert(doc_id, v);
                    }
                    _ => return Err(malformed("rating must be a finite number")),
                }
            }
        }
        Ok(Self {
            corpus,
            labels,
            ratings,
        })
    }

    pub fn load(corpus: &'a Corpus, path: impl AsRef<Path>) -> Result<Self, AnnotationError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| AnnotationError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read(corpus, file)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    ResearchQuestions,
    SeedAbstract,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryInputs {
    ResearchQuestions {
        questions: Vec<String>,
        aggregation: Aggregation,
    },
    SeedAbstract(String),
}

impl QueryInputs {
    pub fn mode(&self) -> EvaluationMode {
        match self {
            QueryInputs::ResearchQuestions { .. } => EvaluationMode::ResearchQuestions,
            QueryInputs::SeedAbstract(_) => EvaluationMode::SeedAbstract,
        }
    }

    pub fn rank(
        &self,
        corpus: &Corpus,
        model: &EmbeddingModel,
        pipeline: &Pipeline,
    ) -> Result<RankedList, crate::similarity::SimilarityError> {
        let vectors = corpus.vectorize(model);
        match self {
            QueryInputs::ResearchQuestions { questions, aggregation } => {
                rank_by_research_questions(questions, &vectors, model, pipeline, *aggregation)
            }
            QueryInputs::SeedAbstract(seed) => rank_by_seed_abstract(seed, &vectors, model, pipeline),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEvaluation {
    pub model_name: String,
    /// `None` when undefined (constant input, fewer than two scored
    /// documents) or when the model failed.
    pub spearman_rho: Option<f64>,
    /// Whether rho was computed against graded ratings or binary labels.
    pub spearman_against: Option<String>,
    /// `None` for a cutoff beyond the number of ranked documents.
    pub precision_at_k: BTreeMap<usize, Option<f64>>,
    pub recall_at_k: BTreeMap<usize, Option<f64>>,
    pub n_scored: usize,
    pub n_skipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub mode: EvaluationMode,
    pub k_values: Vec<usize>,
    pub per_model: Vec<ModelEvaluation>,
}

fn failed_row(model_name: &str, error: String) -> ModelEvaluation {
    ModelEvaluation {
        model_name: model_name.to_string(),
        spearman_rho: None,
        spearman_against: None,
        precision_at_k: BTreeMap::new(),
        recall_at_k: BTreeMap::new(),
        n_scored: 0,
        n_skipped: 0,
        error: Some(error),
    }
}

/// Metrics for one ranking. Rho pairs each scored, annotated document's
/// similarity with its rating when any ratings exist, otherwise with its
/// label.
pub fn score_ranking(
    model_name: &str,
    ranked: &RankedList,
    annotated: &AnnotatedCorpus,
    k_values: &[usize],
) -> ModelEvaluation {
    let (targets, against) = if annotated.ratings.is_empty() {
        let labels = annotated
            .labels
            .iter()
            .map(|(k, v)| (k.clone(), f64::from(*v)))
            .collect();
        (labels, "labels")
    } else {
        (annotated.ratings.clone(), "ratings")
    };
    let (sims, human): (Vec<f64>, Vec<f64>) = ranked
        .results
        .iter()
        .filter_map(|r| targets.get(&r.doc_id).map(|t| (r.similarity, *t)))
        .unzip();
    let rho = spearman(&sims, &human).ok();

    let mut precision_at_k = BTreeMap::new();
    let mut recall_at_k = BTreeMap::new();
    let mut error = None;
    for &k in k_values {
        match precision_recall_at_k(ranked, &annotated.labels, k) {
            Ok((p, r)) => {
                precision_at_k.insert(k, Some(p));
                recall_at_k.insert(k, Some(r));
            }
            Err(MetricError::KOutOfRange { .. }) => {
                precision_at_k.insert(k, None);
                recall_at_k.insert(k, None);
            }
            Err(e) => {
                error = Some(e.to_string());
                precision_at_k.insert(k, None);
                recall_at_k.insert(k, None);
            }
        }
    }
    ModelEvaluation {
        model_name: model_name.to_string(),
        spearman_rho: rho,
        spearman_against: Some(against.to_string()),
        precision_at_k,
        recall_at_k,
        n_scored: ranked.results.len(),
        n_skipped: ranked.skipped.len(),
        error,
    }
}

/// Ranks the annotated corpus with every model and scores each ranking.
/// A model that fails produces an error row instead of aborting the run.
pub fn evaluate_models(
    annotated: &AnnotatedCorpus,
    models: &ModelRegistry,
    pipeline: &Pipeline,
    query: &QueryInputs,
    k_values: &[usize],
) -> EvaluationReport {
    let all: Vec<_> = models.models().collect();
    let mut per_model: Vec<ModelEvaluation> = all
        .par_iter()
        .map(|model| match query.rank(annotated.corpus, model, pipeline) {
            Ok(ranked) => score_ranking(&model.name, &ranked, annotated, k_values),
            Err(e) => failed_row(&model.name, e.to_string()),
        })
        .collect();
    per_model.sort_by(|a, b| a.model_name.cmp(&b.model_name));
    EvaluationReport {
        mode: query.mode(),
        k_values: k_values.to_vec(),
        per_model,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

impl EvaluationReport {
    /// Aligned plain-text table, one row per model.
    pub fn to_table(&self) -> String {
        let mut header = vec!["model".to_string(), "rho".to_string()];
        for k in &self.k_values {
            header.push(format!("P@{k}"));
            header.push(format!("R@{k}"));
        }
        header.extend(["scored".to_string(), "skipped".to_string(), "error".to_string()]);
        let mut rows = vec![header];
        for m in &self.per_model {
            let mut row = vec![m.model_name.clone(), cell(m.spearman_rho)];
            for k in &self.k_values {
                row.push(cell(m.precision_at_k.get(k).copied().flatten()));
                row.push(cell(m.recall_at_k.get(k).copied().flatten()));
            }
            row.push(m.n_scored.to_string());
            row.push(m.n_skipped.to_string());
            row.push(m.error.clone().unwrap_or_default());
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in rows {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }
}
