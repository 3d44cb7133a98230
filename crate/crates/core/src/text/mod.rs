//! Title tokenization, part-of-speech tagging and term extraction.

mod extract;
mod tagger;
mod tokenize;

pub use extract::{extract_terms, ExtractedDocument, ExtractionMode, Term, TermExtractor};
pub use tagger::{LexiconTagger, PosTag, PosTagger, TaggedToken};
pub use tokenize::{tokenize_clauses, tokenize_title};
