//! The persistent document store.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use mocs_core::{Document, DocumentFilter, VenueKind};
use rusqlite::types::Value;
use rusqlite::{params, params_from_iter, Connection, OpenFlags, OptionalExtension};
use serde::{Deserialize, Serialize};

use crate::dblp::{read_records, RawRecord};
use crate::error::{Result, StoreError};
use crate::language::{classify_language, Language};
use crate::sample::reservoir_sample;

const SCHEMA: &str = "
CREATE TABLE IF NOT EXISTS venues (
    id INTEGER PRIMARY KEY,
    key TEXT NOT NULL,
    name TEXT NOT NULL,
    kind TEXT NOT NULL,
    UNIQUE (kind, key)
);
CREATE TABLE IF NOT EXISTS authors (
    id INTEGER PRIMARY KEY,
    name TEXT NOT NULL UNIQUE
);
CREATE TABLE IF NOT EXISTS documents (
    id INTEGER PRIMARY KEY,
    dblp_key TEXT UNIQUE,
    record_type TEXT NOT NULL,
    title TEXT NOT NULL,
    venue_id INTEGER REFERENCES venues (id),
    year INTEGER,
    is_english INTEGER NOT NULL,
    is_homepage INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS document_authors (
    document_id INTEGER NOT NULL REFERENCES documents (id),
    author_id INTEGER NOT NULL REFERENCES authors (id),
    position INTEGER NOT NULL,
    PRIMARY KEY (document_id, position)
);
CREATE INDEX IF NOT EXISTS documents_venue ON documents (venue_id);
CREATE INDEX IF NOT EXISTS documents_year ON documents (year);
CREATE INDEX IF NOT EXISTS document_authors_author ON document_authors (author_id);
";

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VenueRef {
    pub key: String,
    pub name: String,
    pub kind: VenueKind,
}

/// A record ready for insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewDocument {
    pub dblp_key: Option<String>,
    pub record_type: String,
    pub title: String,
    pub authors: Vec<String>,
    pub venue: Option<VenueRef>,
    pub year: Option<i32>,
}

impl NewDocument {
    pub fn new(title: impl Into<String>) -> Self {
        NewDocument {
            dblp_key: None,
            record_type: "article".to_string(),
            title: title.into(),
            authors: Vec::new(),
            venue: None,
            year: None,
        }
    }

    /// "Home Page" titles, and `www` records under `homepages/`.
    pub fn is_homepage(&self) -> bool {
        self.title.trim().eq_ignore_ascii_case("home page")
            || (self.record_type == "www"
                && self.dblp_key.as_deref().is_some_and(|k| k.starts_with("homepages/")))
    }

    /// Validates a parsed record. `None` means the record is malformed.
    pub fn from_raw(raw: RawRecord) -> Option<Self> {
        let title = raw.title.filter(|t| !t.trim().is_empty())?;
        let year = raw
            .year
            .and_then(|y| y.trim().parse::<i32>().ok())
            .filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y));
        let mut parts = raw.key.as_deref().unwrap_or("").split('/');
        let prefix = parts.next().unwrap_or("");
        let component = parts.next().filter(|c| !c.is_empty());
        let kind = match (prefix, raw.tag.as_str()) {
            ("journals", _) => VenueKind::Journal,
            ("conf", _) => VenueKind::Conference,
            (_, "article") => VenueKind::Journal,
            (_, "inproceedings" | "proceedings") => VenueKind::Conference,
            _ => VenueKind::Other,
        };
        let name = match raw.tag.as_str() {
            "article" => raw.journal.or(raw.booktitle),
            _ => raw.booktitle.or(raw.journal),
        }
        .filter(|n| !n.is_empty());
        let venue = if raw.tag == "www" {
            None
        } else {
            match (prefix, component, name) {
                ("journals" | "conf", Some(c), name) => Some(VenueRef {
                    key: c.to_string(),
                    name: name.unwrap_or_else(|| c.to_uppercase()),
                    kind,
                }),
                (_, _, Some(n)) => Some(VenueRef { key: n.to_lowercase(), name: n, kind }),
                _ => None,
            }
        };
        Some(NewDocument {
            dblp_key: raw.key,
            record_type: raw.tag,
            title,
            authors: raw.authors,
            venue,
            year,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Run the language classifier; otherwise every title counts as English.
    pub classify_language: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { classify_language: true }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub inserted: usize,
    /// Inserted but flagged as homepages, so default queries leave them out.
    pub skipped_homepage: usize,
    pub flagged_non_english: usize,
    pub parse_errors: usize,
    /// Records whose DBLP key was already stored.
    pub duplicates: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_documents: u64,
    pub n_journals: u64,
    pub n_conferences: u64,
    pub n_authors: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VenueInfo {
    pub key: String,
    pub name: String,
    pub kind: VenueKind,
    pub n_documents: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorInfo {
    pub name: String,
    pub n_documents: u64,
}

/// A store file. Reads open their own read-only connection, so a shared
/// handle serves concurrent queries; writes are serialized.
#[derive(Debug)]
pub struct CorpusStore {
    path: PathBuf,
    writer: Mutex<()>,
}

fn escape_like(q: &str) -> String {
    let mut s = String::with_capacity(q.len());
    for c in q.chars() {
        if matches!(c, '%' | '_' | '\\') {
            s.push('\\');
        }
        s.push(c);
    }
    s
}

impl CorpusStore {
    /// Opens or creates the store at `path`.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| StoreError::Unreadable { path: dir.to_path_buf(), source })?;
        }
        let conn = Connection::open(&path)?;
        conn.pragma_update(None, "journal_mode", "WAL")?;
        conn.execute_batch(SCHEMA)?;
        Ok(CorpusStore { path, writer: Mutex::new(()) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn read(&self) -> Result<Connection> {
        let conn = Connection::open_with_flags(
            &self.path,
            OpenFlags::SQLITE_OPEN_READ_ONLY | OpenFlags::SQLITE_OPEN_NO_MUTEX,
        )?;
        conn.busy_timeout(Duration::from_secs(30))?;
        Ok(conn)
    }

    fn write(&self) -> Result<Connection> {
        let conn = Connection::open(&self.path)?;
        conn.busy_timeout(Duration::from_secs(30))?;
        Ok(conn)
    }

    /// Parses a DBLP XML file and stores every record with a title, in one
    /// transaction: on a read or XML error nothing is stored.
    pub fn ingest_dblp_xml(&self, path: impl AsRef<Path>, opts: &IngestOptions) -> Result<IngestReport> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| StoreError::Unreadable { path: path.to_path_buf(), source })?;
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut conn = self.write()?;
        let tx = conn.transaction()?;
        let mut report = IngestReport::default();
        let mut failure: Option<rusqlite::Error> = None;
        read_records(BufReader::new(file), |raw| {
            if failure.is_some() {
                return;
            }
            match NewDocument::from_raw(raw) {
                Some(doc) => {
                    if let Err(e) = insert(&tx, &doc, opts, &mut report) {
                        failure = Some(e);
                    }
                }
                None => report.parse_errors += 1,
            }
        })?;
        if let Some(e) = failure {
            return Err(e.into());
        }
        tx.commit()?;
        log::info!(
            "ingested {} documents from {} ({} homepages, {} non-English, {} malformed)",
            report.inserted,
            path.display(),
            report.skipped_homepage,
            report.flagged_non_english,
            report.parse_errors
        );
        Ok(report)
    }

    /// Stores already-built records in one transaction.
    pub fn insert_documents(&self, docs: &[NewDocument], opts: &IngestOptions) -> Result<IngestReport> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut conn = self.write()?;
        let tx = conn.transaction()?;
        let mut report = IngestReport::default();
        for doc in docs {
            insert(&tx, doc, opts, &mut report)?;
        }
        tx.commit()?;
        Ok(report)
    }

    /// Documents matching every present field of `filter`, ordered by id.
    ///
    /// Venues match on key or name ignoring ASCII case; authors match
    /// exactly. With `sample_size`, a reservoir sample over the id-ordered
    /// matches is drawn with `ChaCha8Rng::seed_from_u64(sample_seed)`.
    pub fn query_documents(&self, filter: &DocumentFilter) -> Result<Vec<Document>> {
        if let Some((field, message)) = filter.validate().into_iter().next() {
            return Err(StoreError::InvalidFilter { field, message });
        }
        let conn = self.read()?;
        let mut sql = String::from(
            "SELECT d.id, d.title, v.key, v.kind, d.year, d.is_english, d.is_homepage
             FROM documents d LEFT JOIN venues v ON v.id = d.venue_id WHERE 1 = 1",
        );
        let mut args: Vec<Value> = Vec::new();
        if let Some(venue) = &filter.venue {
            sql.push_str(" AND (v.key = ? COLLATE NOCASE OR v.name = ? COLLATE NOCASE)");
            args.push(Value::Text(venue.clone()));
            args.push(Value::Text(venue.clone()));
        }
        if let Some(author) = &filter.author {
            sql.push_str(
                " AND d.id IN (SELECT da.document_id FROM document_authors da
                   JOIN authors a ON a.id = da.author_id WHERE a.name = ?)",
            );
            args.push(Value::Text(author.clone()));
        }
        if let Some((lo, hi)) = filter.year_range {
            sql.push_str(" AND d.year BETWEEN ? AND ?");
            args.push(Value::Integer(lo.into()));
            args.push(Value::Integer(hi.into()));
        }
        if filter.english_only {
            sql.push_str(" AND d.is_english = 1");
        }
        if filter.exclude_homepages {
            sql.push_str(" AND d.is_homepage = 0");
        }
        sql.push_str(" ORDER BY d.id");
        let mut stmt = conn.prepare(&sql)?;
        let rows = stmt.query_map(params_from_iter(args), |r| {
            Ok(Document {
                id: r.get(0)?,
                title: r.get(1)?,
                authors: Vec::new(),
                venue: r.get(2)?,
                venue_kind: r.get::<_, Option<String>>(3)?.map_or(VenueKind::Other, |k| VenueKind::parse(&k)),
                year: r.get(4)?,
                is_english: r.get(5)?,
                is_homepage: r.get(6)?,
            })
        })?;
        let mut docs = rows.collect::<rusqlite::Result<Vec<_>>>()?;
        if let Some(k) = filter.sample_size {
            docs = reservoir_sample(&docs, k, filter.sample_seed);
        }
        attach_authors(&conn, &mut docs)?;
        Ok(docs)
    }

    pub fn corpus_stats(&self) -> Result<CorpusStats> {
        let conn = self.read()?;
        let count = |sql: &str| conn.query_row(sql, [], |r| r.get::<_, i64>(0)).map(|n| n as u64);
        Ok(CorpusStats {
            n_documents: count("SELECT COUNT(*) FROM documents")?,
            n_journals: count("SELECT COUNT(*) FROM venues WHERE kind = 'journal'")?,
            n_conferences: count("SELECT COUNT(*) FROM venues WHERE kind = 'conference'")?,
            n_authors: count("SELECT COUNT(*) FROM authors")?,
        })
    }

    /// Venues whose key starts with, or name contains, `q` (ASCII case
    /// insensitive), most documents first.
    pub fn venues(&self, q: &str, limit: usize) -> Result<Vec<VenueInfo>> {
        let conn = self.read()?;
        let q = escape_like(q);
        let mut stmt = conn.prepare(
            "SELECT v.key, v.name, v.kind, COUNT(d.id) AS n FROM venues v
             LEFT JOIN documents d ON d.venue_id = v.id
             WHERE v.key LIKE ?1 || '%' ESCAPE '\\' OR v.name LIKE '%' || ?1 || '%' ESCAPE '\\'
             GROUP BY v.id ORDER BY n DESC, v.key, v.kind LIMIT ?2",
        )?;
        let rows = stmt.query_map(params![q, limit as i64], |r| {
            Ok(VenueInfo {
                key: r.get(0)?,
                name: r.get(1)?,
                kind: VenueKind::parse(&r.get::<_, String>(2)?),
                n_documents: r.get::<_, i64>(3)? as u64,
            })
        })?;
        Ok(rows.collect::<rusqlite::Result<_>>()?)
    }

    /// Authors whose name contains `q` (ASCII case insensitive), most
    /// documents first.
    pub fn authors(&self, q: &str, limit: usize) -> Result<Vec<AuthorInfo>> {
        let conn = self.read()?;
        let q = escape_like(q);
        let mut stmt = conn.prepare(
            "SELECT a.name, COUNT(da.document_id) AS n FROM authors a
             LEFT JOIN document_authors da ON da.author_id = a.id
             WHERE a.name LIKE '%' || ?1 || '%' ESCAPE '\\'
             GROUP BY a.id ORDER BY n DESC, a.name LIMIT ?2",
        )?;
        let rows = stmt.query_map(params![q, limit as i64], |r| {
            Ok(AuthorInfo { name: r.get(0)?, n_documents: r.get::<_, i64>(1)? as u64 })
        })?;
        Ok(rows.collect::<rusqlite::Result<_>>()?)
    }
}

fn insert(
    tx: &rusqlite::Transaction<'_>,
    doc: &NewDocument,
    opts: &IngestOptions,
    report: &mut IngestReport,
) -> rusqlite::Result<()> {
    let venue_id: Option<i64> = match &doc.venue {
        Some(v) => {
            tx.prepare_cached("INSERT OR IGNORE INTO venues (key, name, kind) VALUES (?1, ?2, ?3)")?
                .execute(params![v.key, v.name, v.kind.as_str()])?;
            tx.prepare_cached("SELECT id FROM venues WHERE kind = ?1 AND key = ?2")?
                .query_row(params![v.kind.as_str(), v.key], |r| r.get(0))
                .optional()?
        }
        None => None,
    };
    let is_homepage = doc.is_homepage();
    let is_english = !opts.classify_language || classify_language(&doc.title) == Language::English;
    let changed = tx
        .prepare_cached(
            "INSERT OR IGNORE INTO documents (dblp_key, record_type, title, venue_id, year, is_english, is_homepage)
             VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)",
        )?
        .execute(params![doc.dblp_key, doc.record_type, doc.title.trim(), venue_id, doc.year, is_english, is_homepage])?;
    if changed == 0 {
        report.duplicates += 1;
        return Ok(());
    }
    let doc_id = tx.last_insert_rowid();
    for (pos, name) in doc.authors.iter().enumerate() {
        tx.prepare_cached("INSERT OR IGNORE INTO authors (name) VALUES (?1)")?.execute([name])?;
        let author_id: i64 = tx.prepare_cached("SELECT id FROM authors WHERE name = ?1")?.query_row([name], |r| r.get(0))?;
        tx.prepare_cached("INSERT INTO document_authors (document_id, author_id, position) VALUES (?1, ?2, ?3)")?
            .execute(params![doc_id, author_id, pos as i64])?;
    }
    report.inserted += 1;
    if is_homepage {
        report.skipped_homepage += 1;
    }
    if !is_english {
        report.flagged_non_english += 1;
    }
    Ok(())
}

fn attach_authors(conn: &Connection, docs: &mut [Document]) -> Result<()> {
    for chunk in docs.chunks_mut(500) {
        let placeholders = vec!["?"; chunk.len()].join(",");
        let sql = format!(
            "SELECT da.document_id, a.name FROM document_authors da JOIN authors a ON a.id = da.author_id
             WHERE da.document_id IN ({placeholders}) ORDER BY da.document_id, da.position"
        );
        let mut stmt = conn.prepare(&sql)?;
        let ids: Vec<i64> = chunk.iter().map(|d| d.id).collect();
        let rows = stmt.query_map(params_from_iter(ids.iter()), |r| Ok((r.get::<_, i64>(0)?, r.get::<_, String>(1)?)))?;
        let mut cursor = 0;
        for row in rows {
            let (id, name) = row?;
            while chunk[cursor].id != id {
                cursor += 1;
            }
            chunk[cursor].authors.push(name);
        }
    }
    Ok(())
}
