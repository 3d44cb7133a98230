//! Synthetic DBLP corpora shared by the service tests.
#![allow(dead_code)]

use std::fmt::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Topic {
    venue: (&'static str, &'static str),
    adjectives: &'static [&'static str],
    nouns: &'static [&'static str],
    authors: &'static [&'static str],
}

const TOPICS: &[Topic] = &[
    Topic {
        venue: ("tvcg", "TVCG"),
        adjectives: &["interactive", "visual", "scalable", "exploratory", "immersive"],
        nouns: &["visualization", "graph layout", "treemap", "volume rendering", "flow field", "glyph", "dashboard"],
        authors: &["Ada Lovelace", "Edward Tufte", "Jock Mackinlay"],
    },
    Topic {
        venue: ("tods", "ACM Trans. Database Syst."),
        adjectives: &["relational", "distributed", "transactional", "incremental", "adaptive"],
        nouns: &["query optimization", "database", "index structure", "join algorithm", "transaction", "storage engine"],
        authors: &["Edgar Codd", "Jim Gray", "Michael Stonebraker"],
    },
    Topic {
        venue: ("jmlr", "J. Mach. Learn. Res."),
        adjectives: &["neural", "statistical", "probabilistic", "sparse", "deep"],
        nouns: &["learning", "classification", "kernel method", "inference", "clustering", "feature selection"],
        authors: &["Judea Pearl", "Vladimir Vapnik", "Geoffrey Hinton"],
    },
    Topic {
        venue: ("tocs", "ACM Trans. Comput. Syst."),
        adjectives: &["parallel", "concurrent", "fault-tolerant", "virtual", "real-time"],
        nouns: &["scheduling", "cache coherence", "memory management", "operating system", "file system", "compiler"],
        authors: &["Leslie Lamport", "Barbara Liskov", "Butler Lampson"],
    },
];

fn title(rng: &mut ChaCha8Rng, topic: &Topic) -> String {
    let a = |rng: &mut ChaCha8Rng| *topic.adjectives.choose(rng).unwrap();
    let n = |rng: &mut ChaCha8Rng| *topic.nouns.choose(rng).unwrap();
    match rng.gen_range(0..5) {
        0 => format!("{} {} for {} {}", a(rng), n(rng), a(rng), n(rng)),
        1 => format!("On the {} of {} {}", n(rng), a(rng), n(rng)),
        2 => format!("{} {}: a {} approach", a(rng), n(rng), a(rng)),
        3 => format!("Towards {} {} with {}", a(rng), n(rng), n(rng)),
        _ => format!("{} and {} in {} {}", n(rng), n(rng), a(rng), n(rng)),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A DBLP-style XML dump of `n` journal articles over four topics.
pub fn synthetic_dblp_xml(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xml = String::from("<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?>\n<dblp>\n");
    for i in 0..n {
        let topic = &TOPICS[i % TOPICS.len()];
        let t = title(&mut rng, topic);
        let mut chars = t.chars();
        let t: String = chars.next().map(|c| c.to_uppercase().chain(chars).collect()).unwrap_or_default();
        let author = topic.authors.choose(&mut rng).unwrap();
        let year = rng.gen_range(1990..=2013);
        let (key, name) = topic.venue;
        writeln!(
            xml,
            "<article key=\"journals/{key}/p{i}\"><author>{}</author><title>{}.</title><year>{year}</year><journal>{}</journal></article>",
            escape(author),
            escape(&t),
            escape(name)
        )
        .unwrap();
    }
    xml.push_str("</dblp>\n");
    xml
}

pub fn write_corpus(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let path = dir.join("dblp.xml");
    std::fs::write(&path, synthetic_dblp_xml(n, seed)).unwrap();
    path
}

/// A store at `dir/mocs.db` holding the synthetic corpus.
pub fn ingested_store(dir: &Path, n: usize, seed: u64) -> mocs_store::CorpusStore {
    let xml = write_corpus(dir, n, seed);
    let store = mocs_store::CorpusStore::open(dir.join("mocs.db")).unwrap();
    let opts = mocs_store::IngestOptions { classify_language: false };
    let report = store.ingest_dblp_xml(&xml, &opts).unwrap();
    assert_eq!(report.inserted, n);
    store
}
