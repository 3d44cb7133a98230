//! Streaming reader for DBLP-style XML dumps.

use std::io::BufRead;

use quick_xml::events::{BytesRef, BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Result, StoreError};

pub const RECORD_TAGS: [&str; 9] = [
    "article",
    "inproceedings",
    "proceedings",
    "book",
    "incollection",
    "phdthesis",
    "mastersthesis",
    "www",
    "data",
];

/// One record as read from the dump, before validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawRecord {
    pub tag: String,
    pub key: Option<String>,
    pub title: Option<String>,
    pub authors: Vec<String>,
    pub year: Option<String>,
    pub journal: Option<String>,
    pub booktitle: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Title,
    Author,
    Year,
    Journal,
    Booktitle,
}

impl Field {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "title" => Field::Title,
            "author" => Field::Author,
            "year" => Field::Year,
            "journal" => Field::Journal,
            "booktitle" => Field::Booktitle,
            _ => return None,
        })
    }
}

/// Names of the ISO-8859-1 entities from U+00A0 to U+00FF, in code point order,
/// as declared by the DBLP DTD.
const LATIN1_ENTITIES: [&str; 96] = [
    "nbsp", "iexcl", "cent", "pound", "curren", "yen", "brvbar", "sect", "uml", "copy", "ordf", "laquo", "not", "shy",
    "reg", "macr", "deg", "plusmn", "sup2", "sup3", "acute", "micro", "para", "middot", "cedil", "sup1", "ordm",
    "raquo", "frac14", "frac12", "frac34", "iquest", "Agrave", "Aacute", "Acirc", "Atilde", "Auml", "Aring", "AElig",
    "Ccedil", "Egrave", "Eacute", "Ecirc", "Euml", "Igrave", "Iacute", "Icirc", "Iuml", "ETH", "Ntilde", "Ograve",
    "Oacute", "Ocirc", "Otilde", "Ouml", "times", "Oslash", "Ugrave", "Uacute", "Ucirc", "Uuml", "Yacute", "THORN",
    "szlig", "agrave", "aacute", "acirc", "atilde", "auml", "aring", "aelig", "ccedil", "egrave", "eacute", "ecirc",
    "euml", "igrave", "iacute", "icirc", "iuml", "eth", "ntilde", "ograve", "oacute", "ocirc", "otilde", "ouml",
    "divide", "oslash", "ugrave", "uacute", "ucirc", "uuml", "yacute", "thorn", "yuml",
];

pub fn resolve_entity(name: &str) -> Option<char> {
    match name {
        "amp" => Some('&'),
        "lt" => Some('<'),
        "gt" => Some('>'),
        "quot" => Some('"'),
        "apos" => Some('\''),
        _ => LATIN1_ENTITIES
            .iter()
            .position(|&e| e == name)
            .and_then(|i| char::from_u32(0xA0 + i as u32)),
    }
}

fn resolve_ref(r: &BytesRef<'_>) -> Option<char> {
    if r.is_char_ref() {
        r.resolve_char_ref().ok().flatten()
    } else {
        resolve_entity(&r.xml10_content())
    }
}

fn key_attribute(start: &BytesStart<'_>) -> Option<String> {
    let attr = start.try_get_attribute("key").ok().flatten()?;
    Some(attr.value.into_owned())
}

fn clean(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Reads every record element and passes it to `on_record`. Returns the
/// number of records seen. Errors only on unreadable or ill-formed XML.
pub fn read_records<R: BufRead>(input: R, mut on_record: impl FnMut(RawRecord)) -> Result<usize> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().check_end_names = false;
    let mut buf = Vec::new();
    let mut record: Option<RawRecord> = None;
    let mut record_depth = 0usize;
    let mut field: Option<(Field, usize)> = None;
    let mut text = String::new();
    let mut depth = 0usize;
    let mut count = 0usize;
    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| StoreError::Xml {
            position: reader.error_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(start) => {
                depth += 1;
                let name = start.local_name().as_ref().to_string();
                if record.is_none() {
                    if let Some(tag) = RECORD_TAGS.iter().find(|t| **t == name) {
                        record = Some(RawRecord { tag: tag.to_string(), key: key_attribute(&start), ..Default::default() });
                        record_depth = depth;
                    }
                } else if field.is_none() {
                    if let Some(f) = Field::from_name(&name) {
                        field = Some((f, depth));
                        text.clear();
                    }
                }
            }
            Event::Empty(start) => {
                if record.is_none() {
                    let name = start.local_name().as_ref().to_string();
                    if let Some(tag) = RECORD_TAGS.iter().find(|t| **t == name) {
                        count += 1;
                        on_record(RawRecord { tag: tag.to_string(), key: key_attribute(&start), ..Default::default() });
                    }
                }
            }
            Event::Text(t) => {
                if field.is_some() {
                    text.push_str(&t.xml10_content());
                }
            }
            Event::CData(t) => {
                if field.is_some() {
                    text.push_str(&t);
                }
            }
            Event::GeneralRef(r) => {
                if field.is_some() {
                    match resolve_ref(&r) {
                        Some(c) => text.push(c),
                        None => log::debug!("unknown entity &{};", r.xml10_content()),
                    }
                }
            }
            Event::End(_) => {
                if let Some((f, d)) = field {
                    if d == depth {
                        let value = clean(&text);
                        if let Some(r) = record.as_mut() {
                            match f {
                                Field::Title => r.title = Some(value),
                                Field::Author => {
                                    if !value.is_empty() {
                                        r.authors.push(value)
                                    }
                                }
                                Field::Year => r.year = Some(value),
                                Field::Journal => r.journal = Some(value),
                                Field::Booktitle => r.booktitle = Some(value),
                            }
                        }
                        field = None;
                    }
                }
                if record.is_some() && depth == record_depth {
                    count += 1;
                    on_record(record.take().expect("open record"));
                }
                depth = depth.saturating_sub(1);
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if let Some(r) = record.take() {
        count += 1;
        on_record(r);
    }
    Ok(count)
}
