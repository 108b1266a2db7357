use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::str::FromStr;

use super::{read_resource, ResourceError};

const BUNDLED_POS: &str = include_str!("../../data/pos.tsv");
const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Other,
}

impl FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" => Ok(PosTag::Noun),
            "V" => Ok(PosTag::Verb),
            "ADJ" => Ok(PosTag::Adjective),
            "ADV" => Ok(PosTag::Adverb),
            "OTHER" => Ok(PosTag::Other),
            other => Err(format!("unknown tag `{other}`")),
        }
    }
}

/// Token → set of possible parts of speech.
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    tags: HashMap<String, Vec<PosTag>>,
}

impl PosLexicon {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_POS, "<bundled pos lexicon>").expect("bundled POS lexicon is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let path = path.as_ref();
        Self::parse(&read_resource(path)?, &path.display().to_string())
    }

    /// Parses `token<TAB>tags` lines, tags comma-separated from
    /// `N,V,ADJ,ADV,OTHER`.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ResourceError> {
        let mut tags: HashMap<String, Vec<PosTag>> = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: String| ResourceError::Malformed {
                origin: origin.to_string(),
                line: idx + 1,
                reason,
            };
            let (token, list) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected `token<TAB>tags`".into()))?;
            if token.is_empty() {
                return Err(malformed("empty token".into()));
            }
            let entry = tags.entry(token.to_string()).or_default();
            for tag in list.split(',') {
                let tag = tag.trim().parse::<PosTag>().map_err(malformed)?;
                if !entry.contains(&tag) {
                    entry.push(tag);
                }
            }
        }
        Ok(Self { tags })
    }

    pub fn tags(&self, token: &str) -> Option<&[PosTag]> {
        self.tags.get(token).map(Vec::as_slice)
    }

    /// Unknown tokens count as content words.
    pub fn is_noun_or_verb_or_unknown(&self, token: &str) -> bool {
        match self.tags(token) {
            Some(tags) => tags.iter().any(|t| matches!(t, PosTag::Noun | PosTag::Verb)),
            None => true,
        }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

pub fn bundled_stopwords() -> BTreeSet<String> {
    parse_stopwords(BUNDLED_STOPWORDS)
}

/// One token per line. Blank lines and `#` comment lines are ignored.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<BTreeSet<String>, ResourceError> {
    Ok(parse_stopwords(&read_resource(path.as_ref())?))
}
