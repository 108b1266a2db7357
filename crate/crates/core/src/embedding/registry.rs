use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{load_text_model, EmbeddingError, EmbeddingModel};

/// File extensions picked up by [`ModelRegistry::load_dir`].
pub const MODEL_EXTENSIONS: &[&str] = &["txt", "vec"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub name: String,
    pub dimension: usize,
    pub vocab_size: usize,
}

/// Named models, unique by name and iterated in name order.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    models: BTreeMap<String, Arc<EmbeddingModel>>,
}

impl ModelRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, model: EmbeddingModel) -> Result<(), EmbeddingError> {
        if self.models.contains_key(&model.name) {
            return Err(EmbeddingError::DuplicateModel(model.name));
        }
        self.models.insert(model.name.clone(), Arc::new(model));
        Ok(())
    }

    /// Loads every `*.txt` / `*.vec` file in `dir`, naming each model after
    /// its file stem.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, EmbeddingError> {
        let dir = dir.as_ref();
        let io_err = |source| EmbeddingError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut paths = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(io_err)? {
            let path = entry.map_err(io_err)?.path();
            let ext_ok = path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| MODEL_EXTENSIONS.contains(&e));
            if path.is_file() && ext_ok {
                paths.push(path);
            }
        }
        paths.sort();
        let mut registry = Self::new();
        for path in paths {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            registry.insert(load_text_model(&path, &name)?)?;
        }
        Ok(registry)
    }

    pub fn get(&self, name: &str) -> Option<&Arc<EmbeddingModel>> {
        self.models.get(name)
    }

    pub fn names(&self) -> Vec<String> {
        self.models.keys().cloned().collect()
    }

    pub fn models(&self) -> impl Iterator<Item = &Arc<EmbeddingModel>> {
        self.models.values()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn list_models(&self) -> Vec<ModelSummary> {
        self.models
            .values()
            .map(|m| ModelSummary {
                name: m.name.clone(),
                dimension: m.dimension,
                vocab_size: m.vocab_size(),
            })
            .collect()
    }
}
