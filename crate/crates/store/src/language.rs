//! Character-trigram language identification in the Cavnar–Trenkle style.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

/// Trigrams kept per language profile.
pub const PROFILE_SIZE: usize = 300;

const TRAINING: [(&str, &str); 7] = [
    ("en", include_str!("../data/lang/en.txt")),
    ("fr", include_str!("../data/lang/fr.txt")),
    ("de", include_str!("../data/lang/de.txt")),
    ("es", include_str!("../data/lang/es.txt")),
    ("it", include_str!("../data/lang/it.txt")),
    ("pt", include_str!("../data/lang/pt.txt")),
    ("nl", include_str!("../data/lang/nl.txt")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    English,
    Other,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::English => "english",
            Language::Other => "other",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Trigram counts of `text`, with every word padded by one space on each side.
fn trigram_counts(text: &str) -> HashMap<String, usize> {
    let lower = text.to_lowercase();
    let mut counts = HashMap::new();
    for word in lower.split(|c: char| !c.is_alphabetic()).filter(|w| !w.is_empty()) {
        let chars: Vec<char> = std::iter::once(' ').chain(word.chars()).chain(std::iter::once(' ')).collect();
        for w in chars.windows(3) {
            *counts.entry(w.iter().collect::<String>()).or_insert(0) += 1;
        }
    }
    counts
}

/// Trigrams by descending count, ties in lexicographic order.
fn ranked_trigrams(text: &str) -> Vec<String> {
    let mut grams: Vec<(String, usize)> = trigram_counts(text).into_iter().collect();
    grams.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    grams.into_iter().map(|g| g.0).collect()
}

#[derive(Debug, Clone)]
pub struct Profile {
    pub language: String,
    ranks: HashMap<String, usize>,
}

impl Profile {
    pub fn train(language: &str, text: &str, size: usize) -> Self {
        let ranks = ranked_trigrams(text)
            .into_iter()
            .take(size)
            .enumerate()
            .map(|(r, g)| (g, r))
            .collect();
        Profile { language: language.to_string(), ranks }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Mean out-of-place distance of a ranked document profile; trigrams absent
    /// from this profile cost the profile size.
    pub fn distance(&self, doc: &[String]) -> f64 {
        if doc.is_empty() {
            return 0.0;
        }
        let max = self.ranks.len();
        let total: usize = doc
            .iter()
            .enumerate()
            .map(|(r, g)| self.ranks.get(g).map_or(max, |&p| p.abs_diff(r)))
            .sum();
        total as f64 / doc.len() as f64
    }
}

/// English versus everything else, by nearest profile with a margin.
#[derive(Debug, Clone)]
pub struct LanguageClassifier {
    english: Profile,
    others: Vec<Profile>,
    /// A title is English when its English distance exceeds the nearest other
    /// profile's distance by at most this much.
    pub margin: f64,
}

impl LanguageClassifier {
    pub fn new(english: Profile, others: Vec<Profile>, margin: f64) -> Self {
        LanguageClassifier { english, others, margin }
    }

    /// Profiles trained on the bundled samples.
    pub fn bundled() -> Self {
        let mut profiles = TRAINING.iter().map(|(l, t)| Profile::train(l, t, PROFILE_SIZE));
        let english = profiles.next().expect("english sample");
        LanguageClassifier::new(english, profiles.collect(), 0.0)
    }

    /// Distances to every profile, English first.
    pub fn distances(&self, text: &str) -> Vec<(String, f64)> {
        let doc = ranked_trigrams(text);
        std::iter::once(&self.english)
            .chain(&self.others)
            .map(|p| (p.language.clone(), p.distance(&doc)))
            .collect()
    }

    pub fn classify(&self, text: &str) -> Language {
        let doc = ranked_trigrams(text);
        if doc.is_empty() {
            return Language::English;
        }
        let en = self.english.distance(&doc);
        let other = self.others.iter().map(|p| p.distance(&doc)).fold(f64::INFINITY, f64::min);
        if en - other <= self.margin {
            Language::English
        } else {
            Language::Other
        }
    }
}

/// Classifies with the bundled profiles. Text without letters counts as English.
pub fn classify_language(text: &str) -> Language {
    static CLASSIFIER: OnceLock<LanguageClassifier> = OnceLock::new();
    CLASSIFIER.get_or_init(LanguageClassifier::bundled).classify(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_trigrams() {
        let c = trigram_counts("Ab, ab");
        assert_eq!(c.get(" ab"), Some(&2));
        assert_eq!(c.get("ab "), Some(&2));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn examples() {
        assert_eq!(classify_language("interactive support for non-programmers"), Language::English);
        assert_eq!(classify_language("analyse syntaxique des langues naturelles"), Language::Other);
    }

    #[test]
    fn degenerate_input_is_stable() {
        let s = "aaa ".repeat(50);
        assert_eq!(classify_language(&s), classify_language(&s));
        assert_eq!(classify_language("1234 !!"), Language::English);
    }

    #[test]
    fn profiles_are_full() {
        let c = LanguageClassifier::bundled();
        assert_eq!(c.english.len(), PROFILE_SIZE);
        assert!(c.others.iter().all(|p| p.len() >= 200));
    }
}
