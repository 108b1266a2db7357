//! TOML configuration files for the pipeline and the service.
//!
//! Relative paths inside a config file resolve against the file's own
//! directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use revscope_core::text::{bundled_stopwords, load_stopwords, LemmaDictionary, PosLexicon};
use revscope_core::{KeywordMode, Pipeline, PipelineConfig};

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Pipeline settings as written on disk. Omitted fields take the defaults
/// of [`PipelineConfig`]; omitted resource files use the bundled ones.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PipelineSettings {
    pub lowercase: Option<bool>,
    pub strip_numbers: Option<bool>,
    pub ngram_max: Option<usize>,
    pub keyword_mode: Option<KeywordMode>,
    pub stopwords_file: Option<PathBuf>,
    pub lemma_dictionary: Option<PathBuf>,
    pub pos_lexicon: Option<PathBuf>,
}

impl PipelineSettings {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read pipeline config {}", path.display()))?;
        let mut settings: Self =
            toml::from_str(&text).with_context(|| format!("invalid pipeline config {}", path.display()))?;
        let base = parent_dir(path);
        for p in [
            &mut settings.stopwords_file,
            &mut settings.lemma_dictionary,
            &mut settings.pos_lexicon,
        ]
        .into_iter()
        .flatten()
        {
            *p = resolve(&base, p);
        }
        Ok(settings)
    }

    pub fn build(&self) -> Result<Pipeline> {
        let defaults = PipelineConfig::default();
        let stopword_list = match &self.stopwords_file {
            Some(p) => load_stopwords(p)?,
            None => bundled_stopwords(),
        };
        let config = PipelineConfig {
            lowercase: self.lowercase.unwrap_or(defaults.lowercase),
            strip_numbers: self.strip_numbers.unwrap_or(defaults.strip_numbers),
            stopword_list,
            ngram_max: self.ngram_max.unwrap_or(defaults.ngram_max),
            keyword_mode: self.keyword_mode.unwrap_or(defaults.keyword_mode),
        };
        let lemmas = match &self.lemma_dictionary {
            Some(p) => LemmaDictionary::from_path(p)?,
            None => LemmaDictionary::bundled(),
        };
        let lexicon = match &self.pos_lexicon {
            Some(p) => PosLexicon::from_path(p)?,
            None => PosLexicon::bundled(),
        };
        Ok(Pipeline::new(config, lemmas, lexicon)?)
    }
}

/// Loads pipeline settings from `path`, or the defaults when `None`.
pub fn load_pipeline(path: Option<&Path>) -> Result<Pipeline> {
    match path {
        Some(p) => PipelineSettings::load(p)?.build(),
        None => PipelineSettings::default().build(),
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ModelPath {
    pub name: String,
    pub path: PathBuf,
}

fn default_listen() -> String {
    "127.0.0.1".into()
}

fn default_limit() -> usize {
    1 << 20
}

#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen_address: String,
    pub port: u16,
    pub corpus_path: PathBuf,
    #[serde(rename = "models")]
    pub model_paths: Vec<ModelPath>,
    pub default_model: String,
    /// When absent, queries use the corpus's recorded pipeline config.
    #[serde(default)]
    pub pipeline_config_path: Option<PathBuf>,
    #[serde(default = "default_limit")]
    pub request_size_limit: usize,
}

impl ServiceConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read service config {}", path.display()))?;
        let mut config: Self =
            toml::from_str(&text).with_context(|| format!("invalid service config {}", path.display()))?;
        let base = parent_dir(path);
        config.corpus_path = resolve(&base, &config.corpus_path);
        for m in &mut config.model_paths {
            m.path = resolve(&base, &m.path);
        }
        if let Some(p) = &mut config.pipeline_config_path {
            *p = resolve(&base, p);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.port == 0 {
            bail!("port must be in 1..=65535");
        }
        if !self.model_paths.iter().any(|m| m.name == self.default_model) {
            bail!(
                "default_model `{}` is not among the configured models",
                self.default_model
            );
        }
        let mut names: Vec<&str> = self.model_paths.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            bail!("model names must be unique");
        }
        Ok(())
    }
}
