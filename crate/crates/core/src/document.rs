use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VenueKind {
    Journal,
    Conference,
    Other,
}

impl VenueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VenueKind::Journal => "journal",
            VenueKind::Conference => "conference",
            VenueKind::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Self {
        match s {
            "journal" => VenueKind::Journal,
            "conference" => VenueKind::Conference,
            _ => VenueKind::Other,
        }
    }
}

/// One bibliographic record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: i64,
    pub title: String,
    pub authors: Vec<String>,
    pub venue: Option<String>,
    pub venue_kind: VenueKind,
    pub year: Option<i32>,
    pub is_english: bool,
    pub is_homepage: bool,
}

impl Document {
    /// A bare document carrying only a title, used for raw-text targets and tests.
    pub fn from_title(id: i64, title: impl Into<String>) -> Self {
        Document {
            id,
            title: title.into(),
            authors: Vec::new(),
            venue: None,
            venue_kind: VenueKind::Other,
            year: None,
            is_english: true,
            is_homepage: false,
        }
    }
}

fn default_true() -> bool {
    true
}

/// Metadata constraints for a document query. All present fields must match.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DocumentFilter {
    #[serde(default)]
    pub venue: Option<String>,
    #[serde(default)]
    pub author: Option<String>,
    #[serde(default)]
    pub year_range: Option<(i32, i32)>,
    #[serde(default)]
    pub sample_size: Option<usize>,
    #[serde(default)]
    pub sample_seed: u64,
    #[serde(default = "default_true")]
    pub english_only: bool,
    #[serde(default = "default_true")]
    pub exclude_homepages: bool,
}

impl Default for DocumentFilter {
    fn default() -> Self {
        DocumentFilter {
            venue: None,
            author: None,
            year_range: None,
            sample_size: None,
            sample_seed: 0,
            english_only: true,
            exclude_homepages: true,
        }
    }
}

impl DocumentFilter {
    /// Checks the filter invariants, returning `(field, message)` pairs.
    pub fn validate(&self) -> Vec<(&'static str, String)> {
        let mut errors = Vec::new();
        if let Some((lo, hi)) = self.year_range {
            if lo > hi {
                errors.push(("year_range", format!("lower bound {lo} exceeds upper bound {hi}")));
            }
        }
        if self.sample_size == Some(0) {
            errors.push(("sample_size", "must be at least 1".to_string()));
        }
        errors
    }
}
