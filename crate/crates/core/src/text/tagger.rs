use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{CoreError, Result};

macro_rules! pos_tags {
    ($($variant:ident => $symbol:literal),+ $(,)?) => {
        /// Penn Treebank part-of-speech tags understood by the tagger.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum PosTag {
            $($variant),+
        }

        impl PosTag {
            pub const ALL: &'static [PosTag] = &[$(PosTag::$variant),+];

            pub fn symbol(self) -> &'static str {
                match self {
                    $(PosTag::$variant => $symbol),+
                }
            }
        }

        impl FromStr for PosTag {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
                match s {
                    $($symbol => Ok(PosTag::$variant),)+
                    other => Err(format!("unknown tag `{other}`")),
                }
            }
        }
    };
}

pos_tags! {
    Cc => "CC", Cd => "CD", Dt => "DT", Ex => "EX", Fw => "FW", In => "IN",
    Jj => "JJ", Jjr => "JJR", Jjs => "JJS", Ls => "LS", Md => "MD",
    Nn => "NN", Nns => "NNS", Nnp => "NNP", Nnps => "NNPS",
    Pdt => "PDT", Pos => "POS", Prp => "PRP", PrpS => "PRP$",
    Rb => "RB", Rbr => "RBR", Rbs => "RBS", Rp => "RP", Sym => "SYM",
    To => "TO", Uh => "UH",
    Vb => "VB", Vbd => "VBD", Vbg => "VBG", Vbn => "VBN", Vbp => "VBP", Vbz => "VBZ",
    Wdt => "WDT", Wp => "WP", WpS => "WP$", Wrb => "WRB",
}

impl PosTag {
    /// Adjective and noun tags: the ones a term may consist of.
    pub fn is_term_tag(self) -> bool {
        matches!(
            self,
            PosTag::Jj
                | PosTag::Jjr
                | PosTag::Jjs
                | PosTag::Nn
                | PosTag::Nns
                | PosTag::Nnp
                | PosTag::Nnps
        )
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub word: String,
    pub tag: PosTag,
}

/// Assigns one tag per lowercase token.
pub trait PosTagger: Send + Sync {
    fn tag(&self, tokens: &[String]) -> Vec<TaggedToken>;
}

const BUNDLED_LEXICON: &str = include_str!("../../data/lexicon.tsv");

/// Lexicon lookup backed by suffix heuristics, defaulting to `NN`.
#[derive(Debug, Clone)]
pub struct LexiconTagger {
    lexicon: HashMap<String, PosTag>,
}

impl Default for LexiconTagger {
    fn default() -> Self {
        Self::bundled()
    }
}

impl LexiconTagger {
    pub fn bundled() -> Self {
        Self::from_lexicon_str(BUNDLED_LEXICON).expect("bundled lexicon is well-formed")
    }

    /// Parses `word<TAB>TAG` lines. Blank lines and `#` comments are skipped;
    /// later entries override earlier ones.
    pub fn from_lexicon_str(text: &str) -> Result<Self> {
        let mut lexicon = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line.split_once('\t').ok_or_else(|| CoreError::Lexicon {
                line: idx + 1,
                message: "expected word<TAB>TAG".into(),
            })?;
            let tag = tag.trim().parse::<PosTag>().map_err(|message| CoreError::Lexicon {
                line: idx + 1,
                message,
            })?;
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(CoreError::Lexicon {
                    line: idx + 1,
                    message: "empty word".into(),
                });
            }
            lexicon.insert(word, tag);
        }
        Ok(LexiconTagger { lexicon })
    }

    pub fn from_lexicon_file(path: &std::path::Path) -> Result<Self> {
        Self::from_lexicon_str(&std::fs::read_to_string(path)?)
    }

    /// Adds or replaces one entry.
    pub fn insert(&mut self, word: &str, tag: PosTag) {
        self.lexicon.insert(word.to_lowercase(), tag);
    }

    pub fn lookup(&self, word: &str) -> Option<PosTag> {
        self.lexicon.get(word).copied()
    }

    pub fn tag_word(&self, word: &str) -> PosTag {
        if let Some(tag) = self.lookup(word) {
            return tag;
        }
        if is_number(word) {
            return PosTag::Cd;
        }
        if let Some((_, last)) = word.rsplit_once('-') {
            // Compounds like "object-oriented" or "model-based" act as modifiers.
            if last.ends_with("ed") || last.ends_with("ing") && last.len() > 4 {
                return PosTag::Jj;
            }
            if !last.is_empty() {
                return match self.tag_word(last) {
                    tag if tag.is_term_tag() => tag,
                    _ => PosTag::Jj,
                };
            }
        }
        suffix_tag(word, self)
    }
}

impl PosTagger for LexiconTagger {
    fn tag(&self, tokens: &[String]) -> Vec<TaggedToken> {
        tokens
            .iter()
            .map(|w| TaggedToken {
                word: w.clone(),
                tag: self.tag_word(w),
            })
            .collect()
    }
}

fn is_number(word: &str) -> bool {
    word.chars().any(|c| c.is_ascii_digit())
        && word.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '-'))
}

fn suffix_tag(word: &str, tagger: &LexiconTagger) -> PosTag {
    let len = word.chars().count();
    if len <= 2 {
        return PosTag::Nn;
    }
    const NOUN: &[&str] = &[
        "ness", "tion", "sion", "ment", "ity", "ism", "ance", "ence", "ship", "hood", "ography",
        "ology",
    ];
    const ADJ: &[&str] = &[
        "ive", "al", "ic", "ous", "able", "ible", "ful", "less", "ish", "ary", "ent", "ant",
    ];
    if NOUN.iter().any(|s| word.ends_with(s)) {
        return PosTag::Nn;
    }
    if word.ends_with("ly") && len > 4 {
        return PosTag::Rb;
    }
    if word.ends_with("ing") && len > 5 {
        return PosTag::Vbg;
    }
    if word.ends_with("ed") && len > 4 {
        return PosTag::Vbn;
    }
    if (word.ends_with("ize") || word.ends_with("ise") || word.ends_with("ify")) && len > 5 {
        return PosTag::Vb;
    }
    if word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is")
    {
        let stem = &word[..word.len() - 1];
        return match tagger.lookup(stem) {
            Some(PosTag::Vb) => PosTag::Vbz,
            _ => PosTag::Nns,
        };
    }
    if ADJ.iter().any(|s| word.ends_with(s)) {
        return PosTag::Jj;
    }
    PosTag::Nn
}
