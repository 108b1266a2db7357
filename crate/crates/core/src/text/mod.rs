//! Raw text to keyword n-grams.
//!
//! The stages run in a fixed order: normalize, tokenize, lemmatize, drop
//! stop words, keep nouns and verbs, then build n-grams. Every stage is a
//! pure function; [`Pipeline`] bundles the immutable resources they share.

mod lemma;
mod lexicon;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub use lemma::{LemmaDictionary, SuffixRule, DEFAULT_SUFFIX_RULES};
pub use lexicon::{bundled_stopwords, load_stopwords, parse_stopwords, PosLexicon, PosTag};

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {reason}")]
    Malformed {
        origin: String,
        line: usize,
        reason: String,
    },
    #[error("lemma dictionary entry `{0}` is part of a cycle")]
    LemmaCycle(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("ngram_max must be at least 1")]
    NgramMax,
    #[error("stop word `{0}` is not normalized")]
    StopwordNotNormalized(String),
}

pub(crate) fn read_resource(path: &Path) -> Result<String, ResourceError> {
    std::fs::read_to_string(path).map_err(|source| ResourceError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KeywordMode {
    #[default]
    PosFiltered,
    AllContentWords,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub lowercase: bool,
    pub strip_numbers: bool,
    pub stopword_list: BTreeSet<String>,
    pub ngram_max: usize,
    pub keyword_mode: KeywordMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_numbers: true,
            stopword_list: bundled_stopwords(),
            ngram_max: 2,
            keyword_mode: KeywordMode::PosFiltered,
        }
    }
}

impl PipelineConfig {
    /// Checks `ngram_max >= 1` and that every stop word is a single
    /// normalized token.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.ngram_max == 0 {
            return Err(ConfigError::NgramMax);
        }
        let probe = PipelineConfig {
            lowercase: true,
            strip_numbers: false,
            stopword_list: BTreeSet::new(),
            ngram_max: 1,
            keyword_mode: KeywordMode::AllContentWords,
        };
        for word in &self.stopword_list {
            if word.is_empty() || normalize(word, &probe) != *word || word.contains(' ') {
                return Err(ConfigError::StopwordNotNormalized(word.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub source_id: String,
    /// Tokens straight out of normalization, before lemmatization.
    pub tokens: Vec<String>,
    /// Lemmatized tokens with stop words removed.
    pub lemmas: Vec<String>,
    pub keywords: Vec<String>,
    pub ngrams: Vec<String>,
}

/// Unicode-aware cleanup. Text is NFC-composed and lowercased; every
/// character that is not a letter or digit becomes a space, digits too
/// when `strip_numbers` is set, and space runs collapse to one.
pub fn normalize(text: &str, config: &PipelineConfig) -> String {
    let composed: String = if config.lowercase {
        text.nfc().flat_map(char::to_lowercase).nfc().collect()
    } else {
        text.nfc().collect()
    };
    let mut out = String::with_capacity(composed.len());
    let mut pending_space = false;
    for c in composed.chars() {
        let keep = if config.lowercase && c.is_uppercase() {
            false
        } else if c.is_numeric() {
            !config.strip_numbers
        } else {
            c.is_alphabetic()
        };
        if keep {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

pub fn tokenize(normalized: &str) -> Vec<String> {
    normalized
        .split(' ')
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn lemmatize(token: &str, dict: &LemmaDictionary) -> String {
    dict.lemmatize(token)
}

pub fn remove_stopwords(tokens: Vec<String>, config: &PipelineConfig) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| !config.stopword_list.contains(t))
        .collect()
}

pub fn extract_keywords(tokens: Vec<String>, config: &PipelineConfig, lexicon: &PosLexicon) -> Vec<String> {
    match config.keyword_mode {
        KeywordMode::AllContentWords => tokens,
        KeywordMode::PosFiltered => tokens
            .into_iter()
            .filter(|t| lexicon.is_noun_or_verb_or_unknown(t))
            .collect(),
    }
}

/// Contiguous n-grams for `n = 1..=ngram_max`, grouped by `n` and in
/// order of appearance within each group.
pub fn build_ngrams(keywords: &[String], ngram_max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=ngram_max.min(keywords.len()) {
        out.extend(keywords.windows(n).map(|w| w.join(" ")));
    }
    out
}

/// Immutable resources for [`preprocess`], shareable across threads.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: PipelineConfig,
    pub lemmas: LemmaDictionary,
    pub lexicon: PosLexicon,
}

impl Pipeline {
    pub fn new(config: PipelineConfig, lemmas: LemmaDictionary, lexicon: PosLexicon) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Self {
            config,
            lemmas,
            lexicon,
        })
    }

    /// Bundled dictionary and lexicon with the given config.
    pub fn with_config(config: PipelineConfig) -> Result<Self, ConfigError> {
        Self::new(config, LemmaDictionary::bundled(), PosLexicon::bundled())
    }

    pub fn preprocess(&self, raw: &str, source_id: &str) -> TokenizedDocument {
        preprocess(raw, source_id, &self.lemmas, &self.lexicon, &self.config)
    }
}

impl Default for Pipeline {
    fn default() -> Self {
        Self::with_config(PipelineConfig::default()).expect("default config is valid")
    }
}

pub fn preprocess(
    raw: &str,
    source_id: &str,
    dict: &LemmaDictionary,
    lexicon: &PosLexicon,
    config: &PipelineConfig,
) -> TokenizedDocument {
    let tokens = tokenize(&normalize(raw, config));
    let lemmas = remove_stopwords(tokens.iter().map(|t| lemmatize(t, dict)).collect(), config);
    let keywords = extract_keywords(lemmas.clone(), config, lexicon);
    let ngrams = build_ngrams(&keywords, config.ngram_max);
    TokenizedDocument {
        source_id: source_id.to_string(),
        tokens,
        lemmas,
        keywords,
        ngrams,
    }
}
