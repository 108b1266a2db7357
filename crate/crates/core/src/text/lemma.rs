//! Dictionary-plus-suffix-rule lemmatizer.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::{read_resource, ResourceError};

const BUNDLED_LEMMAS: &str = include_str!("../../data/lemmas.tsv");

/// A suffix rewrite applied when no dictionary entry matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub suffix: &'static str,
    pub replacement: &'static str,
    /// Minimum number of characters that must remain before the suffix.
    pub min_stem: usize,
    /// The rule does not fire on tokens ending in any of these.
    pub unless: &'static [&'static str],
}

/// English plural rules, most specific first. Every rule strictly shortens
/// the token, so repeated application terminates.
pub const DEFAULT_SUFFIX_RULES: &[SuffixRule] = &[
    SuffixRule {
        suffix: "sses",
        replacement: "ss",
        min_stem: 1,
        unless: &[],
    },
    SuffixRule {
        suffix: "ies",
        replacement: "y",
        min_stem: 2,
        unless: &[],
    },
    SuffixRule {
        suffix: "ches",
        replacement: "ch",
        min_stem: 1,
        unless: &[],
    },
    SuffixRule {
        suffix: "shes",
        replacement: "sh",
        min_stem: 1,
        unless: &[],
    },
    SuffixRule {
        suffix: "xes",
        replacement: "x",
        min_stem: 1,
        unless: &[],
    },
    SuffixRule {
        suffix: "s",
        replacement: "",
        min_stem: 3,
        unless: &["ss", "us", "is"],
    },
];

impl SuffixRule {
    fn apply(&self, token: &str) -> Option<String> {
        let stem = token.strip_suffix(self.suffix)?;
        if stem.chars().count() < self.min_stem || self.unless.iter().any(|u| token.ends_with(u)) {
            return None;
        }
        Some(format!("{stem}{}", self.replacement))
    }
}

/// Maps inflected forms to base forms.
///
/// Lookup is total and idempotent. A token that is a dictionary key maps to
/// its entry; a token that is a known base form (any entry value) maps to
/// itself; otherwise the first matching suffix rule rewrites it and the
/// lookup continues on the result. Entry values are resolved transitively
/// at construction, so `a -> b, b -> c` stores `a -> c`.
#[derive(Debug, Clone)]
pub struct LemmaDictionary {
    entries: HashMap<String, String>,
    bases: HashSet<String>,
    rules: Vec<SuffixRule>,
}

impl LemmaDictionary {
    pub fn new(
        pairs: impl IntoIterator<Item = (String, String)>,
        rules: Vec<SuffixRule>,
    ) -> Result<Self, ResourceError> {
        let raw: HashMap<String, String> = pairs.into_iter().collect();
        let mut entries = HashMap::with_capacity(raw.len());
        for key in raw.keys() {
            let mut current = key;
            let mut seen = HashSet::new();
            while let Some(next) = raw.get(current) {
                if next == current {
                    break;
                }
                if !seen.insert(current) {
                    return Err(ResourceError::LemmaCycle(key.clone()));
                }
                current = next;
            }
            entries.insert(key.clone(), current.clone());
        }
        let bases = entries.values().cloned().collect();
        Ok(Self { entries, bases, rules })
    }

    /// The dictionary shipped with the crate, with [`DEFAULT_SUFFIX_RULES`].
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEMMAS, "<bundled lemmas>").expect("bundled lemma dictionary is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let path = path.as_ref();
        let text = read_resource(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses `inflected<TAB>base` lines; `#` starts a comment line.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ResourceError> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(form), Some(base), None) if !form.is_empty() && !base.is_empty() => {
                    pairs.push((form.to_string(), base.to_string()));
                }
                _ => {
                    return Err(ResourceError::Malformed {
                        origin: origin.to_string(),
                        line: idx + 1,
                        reason: "expected `inflected<TAB>base`".into(),
                    })
                }
            }
        }
        Self::new(pairs, DEFAULT_SUFFIX_RULES.to_vec())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lemmatize(&self, token: &str) -> String {
        let mut current = token.to_string();
        loop {
            if let Some(base) = self.entries.get(&current) {
                return base.clone();
            }
            if self.bases.contains(&current) {
                return current;
            }
            match self.rules.iter().find_map(|rule| rule.apply(&current)) {
                Some(next) => current = next,
                None => return current,
            }
        }
    }
}
