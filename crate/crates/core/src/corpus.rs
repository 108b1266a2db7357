//! Systematic-review records: ingestion, curation and persistence.
//!
//! Ingest input is one JSON object per line. A saved corpus is the same
//! line-delimited layout preceded by a header line that records the
//! pipeline configuration, the curation timestamp and the record count.
//! Records are kept sorted by `doc_id`, so saving is byte-stable.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::embedding::EmbeddingModel;
use crate::similarity::VectorizedCorpus;
use crate::text::Pipeline;
use crate::text::PipelineConfig;

pub const FORMAT_TAG: &str = "revscope-corpus/1";
const REQUIRED_KEYS: [&str; 4] = ["doc_id", "title", "year", "abstract"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("duplicate doc_id `{0}`")]
    DuplicateId(String),
    #[error("line {line}: missing or empty field `{field}`")]
    MissingField { line: usize, field: String },
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("{path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("stored pipeline config is invalid: {0}")]
    Config(#[from] crate::text::ConfigError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlrRecord {
    pub doc_id: String,
    pub title: String,
    #[serde(default)]
    pub authors: Vec<String>,
    pub year: i32,
    #[serde(default)]
    pub venue: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default)]
    pub research_questions: Vec<String>,
    #[serde(default)]
    pub curated_keywords: Vec<String>,
    #[serde(default)]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    curation_timestamp: String,
    record_count: usize,
    pipeline_config: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    records: Vec<SlrRecord>,
    index: BTreeMap<String, usize>,
    pub pipeline_config: PipelineConfig,
    pub curation_timestamp: String,
}

impl Corpus {
    /// Sorts by `doc_id` and rejects duplicates. Records are taken as-is;
    /// see [`Corpus::curate`] to fill `curated_keywords`.
    pub fn new(
        mut records: Vec<SlrRecord>,
        pipeline_config: PipelineConfig,
        curation_timestamp: String,
    ) -> Result<Self, CorpusError> {
        records.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        let mut index = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if index.insert(r.doc_id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateId(r.doc_id.clone()));
            }
        }
        Ok(Self {
            records,
            index,
            pipeline_config,
            curation_timestamp,
        })
    }

    /// Fills every record's `curated_keywords` with the abstract's n-grams.
    pub fn curate(
        records: Vec<SlrRecord>,
        pipeline: &Pipeline,
        curation_timestamp: String,
    ) -> Result<Self, CorpusError> {
        let records = records
            .into_iter()
            .map(|mut r| {
                r.curated_keywords = pipeline.preprocess(&r.abstract_text, &r.doc_id).ngrams;
                r
            })
            .collect();
        Self::new(records, pipeline.config.clone(), curation_timestamp)
    }

    pub fn records(&self) -> &[SlrRecord] {
        &self.records
    }

    pub fn get(&self, doc_id: &str) -> Option<&SlrRecord> {
        self.index.get(doc_id).map(|&i| &self.records[i])
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.index.contains_key(doc_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Document vectors built from the curated keywords.
    pub fn vectorize(&self, model: &EmbeddingModel) -> VectorizedCorpus {
        VectorizedCorpus::build(
            model,
            self.records
                .iter()
                .map(|r| (r.doc_id.as_str(), r.curated_keywords.as_slice())),
        )
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<(), std::io::Error> {
        let header = Header {
            format: FORMAT_TAG.to_string(),
            curation_timestamp: self.curation_timestamp.clone(),
            record_count: self.records.len(),
            pipeline_config: self.pipeline_config.clone(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        let path = path.as_ref();
        let io = |source| CorpusError::IoFailure {
            path: path.to_path_buf(),
            source,
        };
        let file = File::create(path).map_err(io)?;
        self.write(BufWriter::new(file)).map_err(io)
    }

    pub fn read<R: BufRead>(reader: R, origin: &Path) -> Result<Self, CorpusError> {
        let io = |source| CorpusError::IoFailure {
            path: origin.to_path_buf(),
            source,
        };
        let malformed = |line: usize, reason: String| CorpusError::MalformedRecord { line, reason };
        let mut lines = reader.lines().enumerate();
        let header: Header = match lines.next() {
            Some((_, line)) => {
                serde_json::from_str(&line.map_err(io)?).map_err(|e| malformed(1, format!("bad header: {e}")))?
            }
            None => return Err(malformed(1, "missing header".into())),
        };
        if header.format != FORMAT_TAG {
            return Err(malformed(1, format!("unsupported format `{}`", header.format)));
        }
        header.pipeline_config.validate()?;
        let mut records = Vec::with_capacity(header.record_count);
        for (idx, line) in lines {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            let record: SlrRecord = serde_json::from_str(&line).map_err(|e| malformed(idx + 1, e.to_string()))?;
            records.push(record);
        }
        if records.len() != header.record_count {
            return Err(malformed(
                records.len() + 2,
                format!("expected {} records, found {}", header.record_count, records.len()),
            ));
        }
        Self::new(records, header.pipeline_config, header.curation_timestamp)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| CorpusError::IoFailure {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read(BufReader::new(file), path)
    }
}

fn non_empty_string(obj: &Map<String, Value>, key: &str) -> bool {
    match obj.get(key) {
        Some(Value::String(s)) => !s.trim().is_empty(),
        Some(Value::Null) | None => false,
        Some(_) => true,
    }
}

/// Parses and validates raw ingest records. Unknown keys are ignored and
/// any supplied `curated_keywords` are discarded, since curation recomputes
/// them.
pub fn parse_records<R: BufRead>(reader: R, origin: &Path) -> Result<Vec<SlrRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::IoFailure {
            path: origin.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: String| CorpusError::MalformedRecord { line: line_no, reason };
        let mut obj = match serde_json::from_str::<Value>(&line).map_err(|e| malformed(e.to_string()))? {
            Value::Object(obj) => obj,
            _ => return Err(malformed("record is not an object".into())),
        };
        for key in REQUIRED_KEYS {
            let present = match key {
                "doc_id" | "abstract" => non_empty_string(&obj, key),
                _ => !matches!(obj.get(key), None | Some(Value::Null)),
            };
            if !present {
                return Err(CorpusError::MissingField {
                    line: line_no,
                    field: key.to_string(),
                });
            }
        }
        obj.retain(|k, v| {
            matches!(
                k.as_str(),
                "doc_id" | "title" | "authors" | "year" | "venue" | "abstract" | "research_questions" | "source"
            ) && !v.is_null()
        });
        let record: SlrRecord = serde_json::from_value(Value::Object(obj)).map_err(|e| malformed(e.to_string()))?;
        if !seen.insert(record.doc_id.clone()) {
            return Err(CorpusError::DuplicateId(record.doc_id));
        }
        records.push(record);
    }
    Ok(records)
}

/// Reads raw records from `path` and curates them with `pipeline`.
pub fn ingest(path: impl AsRef<Path>, pipeline: &Pipeline) -> Result<Corpus, CorpusError> {
    ingest_at(
        path,
        pipeline,
        chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string(),
    )
}

/// [`ingest`] with an explicit curation timestamp.
pub fn ingest_at(path: impl AsRef<Path>, pipeline: &Pipeline, timestamp: String) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::IoFailure {
        path: path.to_path_buf(),
        source,
    })?;
    let records = parse_records(BufReader::new(file), path)?;
    Corpus::curate(records, pipeline, timestamp)
}
