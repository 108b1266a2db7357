//! Whitespace-separated embedding text files.
//!
//! Each line holds a token followed by `d` decimal components, separated by
//! one or more ASCII spaces. An optional first line `count dim` (exactly two
//! integers) is a word2vec-style header and is skipped. This covers GloVe
//! exports and word2vec's text output.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{EmbeddingError, EmbeddingModel};

fn is_header(line: &str) -> bool {
    let fields: Vec<&str> = line.split(' ').filter(|f| !f.is_empty()).collect();
    fields.len() == 2 && fields.iter().all(|f| f.parse::<u64>().is_ok())
}

/// Reads a model from any buffered source. `source_path` is recorded
/// verbatim on the model.
pub fn read_text_model<R: BufRead>(reader: R, name: &str, source_path: &str) -> Result<EmbeddingModel, EmbeddingError> {
    let mut vocabulary: HashMap<String, Vec<f64>> = HashMap::new();
    let mut dimension: Option<usize> = None;
    let mut duplicates = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| EmbeddingError::Io {
            path: source_path.to_string(),
            source,
        })?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim_matches(' ').is_empty() {
            continue;
        }
        if line_no == 1 && is_header(line) {
            continue;
        }
        let mut fields = line.split(' ').filter(|f| !f.is_empty());
        let token = fields.next().expect("non-empty line has a field");
        let vector = fields
            .map(|f| match f.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(EmbeddingError::MalformedNumber(line_no)),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        match dimension {
            None if vector.is_empty() => return Err(EmbeddingError::DimensionMismatch(line_no)),
            None => dimension = Some(vector.len()),
            Some(d) if d != vector.len() => return Err(EmbeddingError::DimensionMismatch(line_no)),
            Some(_) => {}
        }
        if vocabulary.insert(token.to_string(), vector).is_some() {
            duplicates += 1;
        }
    }

    let dimension = dimension.ok_or(EmbeddingError::EmptyModel)?;
    if duplicates > 0 {
        log::warn!("{source_path}: {duplicates} duplicate tokens, last occurrence kept");
    }
    Ok(EmbeddingModel {
        name: name.to_string(),
        dimension,
        vocabulary,
        source_path: source_path.to_string(),
        duplicate_tokens: duplicates,
    })
}

pub fn load_text_model(path: impl AsRef<Path>, name: &str) -> Result<EmbeddingModel, EmbeddingError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| EmbeddingError::Io {
        path: display.clone(),
        source,
    })?;
    read_text_model(BufReader::new(file), name, &display)
}

/// Writes tokens in sorted order so the output is canonical. Components use
/// the shortest representation that parses back to the same `f64`.
pub fn write_text_model<W: Write>(model: &EmbeddingModel, mut out: W, with_header: bool) -> io::Result<()> {
    if with_header {
        writeln!(out, "{} {}", model.vocabulary.len(), model.dimension)?;
    }
    let mut tokens: Vec<&String> = model.vocabulary.keys().collect();
    tokens.sort();
    for token in tokens {
        out.write_all(token.as_bytes())?;
        for v in &model.vocabulary[token] {
            write!(out, " {v:?}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn save_text_model(model: &EmbeddingModel, path: impl AsRef<Path>, with_header: bool) -> io::Result<()> {
    write_text_model(model, BufWriter::new(File::create(path)?), with_header)
}
