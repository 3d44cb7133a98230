use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::tagger::{LexiconTagger, PosTagger, TaggedToken};
use super::tokenize::tokenize_clauses;

/// An ordered sequence of one or more lowercase words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    // `surface` first so the derived ordering is lexicographic by surface.
    surface: String,
    words: Vec<String>,
}

impl Term {
    /// Builds a term from its words. Returns `None` when no non-blank word is given.
    pub fn new<I, S>(words: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: Vec<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        if words.is_empty() {
            return None;
        }
        Some(Term {
            surface: words.join(" "),
            words,
        })
    }

    /// Parses a whitespace-separated surface string.
    pub fn parse(surface: &str) -> Option<Self> {
        Term::new(surface.split_whitespace())
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// True when `self` occurs as a contiguous word run inside `other`.
    pub fn is_contiguous_in(&self, other: &Term) -> bool {
        self.occurrences_in(other) > 0
    }

    /// Number of positions where `self` occurs as a contiguous run of `other`.
    pub fn occurrences_in(&self, other: &Term) -> usize {
        let n = self.words.len();
        if n > other.words.len() {
            return 0;
        }
        other.words.windows(n).filter(|w| *w == self.words.as_slice()).count()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.surface)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Term::parse(&s).ok_or_else(|| serde::de::Error::custom("empty term"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMode {
    #[default]
    #[serde(alias = "multi")]
    MultiWord,
    #[serde(alias = "single")]
    SingleWord,
}

/// Maximal runs of adjective/noun tags, as whole terms or split into words.
pub fn extract_terms(tagged: &[TaggedToken], mode: ExtractionMode) -> Vec<Term> {
    let mut terms = Vec::new();
    let mut start = None;
    for i in 0..=tagged.len() {
        let matches = tagged.get(i).is_some_and(|t| t.tag.is_term_tag());
        match (start, matches) {
            (None, true) => start = Some(i),
            (Some(s), false) => {
                let run = &tagged[s..i];
                match mode {
                    ExtractionMode::MultiWord => {
                        terms.extend(Term::new(run.iter().map(|t| t.word.as_str())))
                    }
                    ExtractionMode::SingleWord => {
                        terms.extend(run.iter().filter_map(|t| Term::new([t.word.as_str()])))
                    }
                }
                start = None;
            }
            _ => {}
        }
    }
    terms
}

/// The terms of one document, in title order with repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedDocument {
    pub id: i64,
    pub terms: Vec<Term>,
}

impl AsRef<[Term]> for ExtractedDocument {
    fn as_ref(&self) -> &[Term] {
        &self.terms
    }
}

/// Title-to-terms extraction with a fixed tagger and mode.
#[derive(Clone)]
pub struct TermExtractor {
    tagger: Arc<dyn PosTagger>,
    mode: ExtractionMode,
}

impl fmt::Debug for TermExtractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TermExtractor").field("mode", &self.mode).finish()
    }
}

impl TermExtractor {
    pub fn new(tagger: Arc<dyn PosTagger>, mode: ExtractionMode) -> Self {
        TermExtractor { tagger, mode }
    }

    pub fn bundled(mode: ExtractionMode) -> Self {
        Self::new(Arc::new(LexiconTagger::bundled()), mode)
    }

    pub fn mode(&self) -> ExtractionMode {
        self.mode
    }

    pub fn with_mode(&self, mode: ExtractionMode) -> Self {
        TermExtractor {
            tagger: Arc::clone(&self.tagger),
            mode,
        }
    }

    pub fn extract_document(&self, doc: &crate::document::Document) -> ExtractedDocument {
        ExtractedDocument {
            id: doc.id,
            terms: self.extract(&doc.title),
        }
    }

    /// Extracts terms clause by clause so no term spans punctuation.
    pub fn extract(&self, text: &str) -> Vec<Term> {
        tokenize_clauses(text)
            .iter()
            .flat_map(|clause| extract_terms(&self.tagger.tag(clause), self.mode))
            .collect()
    }
}
