//! `mocs` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mocs_core::filtering::FilterParams;
use mocs_core::layout::LayoutBackend;
use mocs_core::{BasemapParams, DocumentFilter, ExtractionMode, HeatmapParams, RankingMethod, Resources, SimilarityMethod};
use mocs_store::{CorpusStore, IngestOptions};

use crate::artifacts::{load_basemap_dir, write_files, ArtifactStore};
use crate::config::Config;
use crate::error::{FieldError, Result, ServiceError};
use crate::jobs::JobManager;
use crate::request::{BasemapRequest, HeatmapRequest};
use crate::runner::{render_basemap, render_heatmap, Runner};

#[derive(Debug, Parser)]
#[command(name = "mocs", version, about = "Maps of computer science from DBLP titles")]
pub struct Cli {
    /// TOML config file (default: $MOCS_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Corpus store path, overriding the config.
    #[arg(long, global = true)]
    pub store: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a DBLP XML dump into the store.
    Ingest(IngestArgs),
    /// Build a basemap and write it to a directory.
    Basemap(BasemapArgs),
    /// Overlay a heatmap on a basemap directory.
    Heatmap(HeatmapArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub xml: PathBuf,
    /// Treat every title as English.
    #[arg(long)]
    pub no_language_check: bool,
}

#[derive(Debug, Args, Default)]
pub struct FilterArgs {
    /// Venue key or name.
    #[arg(long)]
    pub venue: Option<String>,
    #[arg(long)]
    pub author: Option<String>,
    /// Inclusive year range, `1990-1999` or a single year.
    #[arg(long, value_parser = parse_years)]
    pub years: Option<(i32, i32)>,
    /// Uniform sample size.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub sample_seed: u64,
    #[arg(long)]
    pub include_non_english: bool,
    #[arg(long)]
    pub include_homepages: bool,
}

impl FilterArgs {
    fn is_empty(&self) -> bool {
        self.venue.is_none() && self.author.is_none() && self.years.is_none() && self.sample.is_none()
    }

    pub fn to_filter(&self) -> DocumentFilter {
        DocumentFilter {
            venue: self.venue.clone(),
            author: self.author.clone(),
            year_range: self.years,
            sample_size: self.sample,
            sample_seed: self.sample_seed,
            english_only: !self.include_non_english,
            exclude_homepages: !self.include_homepages,
        }
    }
}

fn parse_years(s: &str) -> std::result::Result<(i32, i32), String> {
    let bad = |_| format!("expected a year or FROM-TO, got `{s}`");
    match s.split_once('-') {
        Some((a, b)) => Ok((a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?)),
        None => {
            let y = s.trim().parse().map_err(bad)?;
            Ok((y, y))
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Multi,
    Single,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RankingArg {
    Tf,
    Tficf,
    Cvalue,
    CvalueUnigrams,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SimilarityArg {
    Jaccard,
    Pmj,
    Lsa,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FilterArg {
    Top,
    PullLesser,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayoutArg {
    Mds,
    Force,
}

#[derive(Debug, Args)]
pub struct BasemapArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    #[arg(long, value_enum, default_value = "multi")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "cvalue-unigrams")]
    pub ranking: RankingArg,
    #[arg(long, value_enum, default_value = "pmj")]
    pub similarity: SimilarityArg,
    /// Term filtering method.
    #[arg(long = "filter", value_enum, default_value = "pull-lesser")]
    pub filter_method: FilterArg,
    /// Ranked pool size N.
    #[arg(long)]
    pub n_terms: Option<usize>,
    /// Top terms always kept.
    #[arg(long)]
    pub k: Option<usize>,
    /// Lesser terms pulled per top term.
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "mds")]
    pub layout: LayoutArg,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub lsa_rank: Option<usize>,
    #[arg(long)]
    pub min_pt: Option<f64>,
    #[arg(long)]
    pub max_pt: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(short, long)]
    pub output: PathBuf,
}

impl BasemapArgs {
    pub fn to_request(&self) -> BasemapRequest {
        let mut p = BasemapParams {
            extraction: match self.mode {
                ModeArg::Multi => ExtractionMode::MultiWord,
                ModeArg::Single => ExtractionMode::SingleWord,
            },
            ranking: match self.ranking {
                RankingArg::Tf => RankingMethod::Tf,
                RankingArg::Tficf => RankingMethod::TfIcf,
                RankingArg::Cvalue => RankingMethod::CValue,
                RankingArg::CvalueUnigrams => RankingMethod::CValueUnigrams,
            },
            similarity: match self.similarity {
                SimilarityArg::Jaccard => SimilarityMethod::Jaccard,
                SimilarityArg::Pmj => SimilarityMethod::PartialMatchJaccard,
                SimilarityArg::Lsa => SimilarityMethod::Lsa,
            },
            filtering: match self.filter_method {
                FilterArg::Top => FilterParams::top_terms(),
                FilterArg::PullLesser => FilterParams::pull_lesser_terms(),
            },
            seed: self.seed,
            ..BasemapParams::default()
        };
        if let Some(n) = self.n_terms {
            p.filtering.n_terms = n;
        }
        if let Some(k) = self.k {
            p.filtering.k = k;
        }
        if let Some(l) = self.l {
            p.filtering.l = l;
        }
        if let Some(s) = self.sigma {
            p.distance.sigma = s;
        }
        p.layout.backend = match self.layout {
            LayoutArg::Mds => LayoutBackend::Mds,
            LayoutArg::Force => LayoutBackend::ForceDirected,
        };
        if let Some(m) = self.max_iter {
            p.layout.max_iter = m;
        }
        if let Some(r) = self.lsa_rank {
            p.lsa_rank = r;
        }
        if let Some(v) = self.min_pt {
            p.min_pt = v;
        }
        if let Some(v) = self.max_pt {
            p.max_pt = v;
        }
        BasemapRequest { filter: self.filter.to_filter(), params: p }
    }
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    /// Basemap directory written by `mocs basemap`.
    #[arg(long)]
    pub basemap: PathBuf,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Raw text target, such as an abstract.
    #[arg(long, conflicts_with_all = ["venue", "author", "years", "sample", "text_file"])]
    pub text: Option<String>,
    /// Read the text target from a file.
    #[arg(long, conflicts_with_all = ["venue", "author", "years", "sample"])]
    pub text_file: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub radius_scale: Option<f64>,
    /// Output SVG; the intensities JSON is written next to it.
    #[arg(short, long)]
    pub output: PathBuf,
}

impl HeatmapArgs {
    pub fn to_request(&self) -> Result<HeatmapRequest> {
        let mut params = HeatmapParams::default();
        if let Some(b) = self.beta {
            params.beta = b;
        }
        if let Some(r) = self.radius_scale {
            params.radius_scale = r;
        }
        let text = match (&self.text, &self.text_file) {
            (Some(t), _) => Some(t.clone()),
            (None, Some(path)) => Some(
                std::fs::read_to_string(path).map_err(|e| ServiceError::io(format!("reading {}", path.display()), e))?,
            ),
            (None, None) => None,
        };
        let filter = if text.is_none() && !self.filter.is_empty() { Some(self.filter.to_filter()) } else { None };
        Ok(HeatmapRequest { filter, text, params })
    }
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub host: Option<String>,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Artifact directory, overriding the config.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

/// Parses `args` and runs the command, returning the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let ServiceError::Invalid(fields) = &e {
                for FieldError { field, message } in fields {
                    eprintln!("  {field}: {message}");
                }
            }
            1
        }
    }
}

fn open_store(cli_store: Option<&Path>, config: &Config) -> Result<CorpusStore> {
    let path = cli_store.unwrap_or(&config.store_path);
    Ok(CorpusStore::open(path)?)
}

pub fn execute(cli: Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref())?;
    let store_flag = cli.store.as_deref();
    match cli.command {
        Command::Ingest(args) => {
            if !args.xml.is_file() {
                return Err(ServiceError::NotFound(format!("input file {}", args.xml.display())));
            }
            let store = open_store(store_flag, &config)?;
            let opts = IngestOptions { classify_language: !args.no_language_check };
            let report = store.ingest_dblp_xml(&args.xml, &opts)?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
        Command::Basemap(args) => {
            let store = open_store(store_flag, &config)?;
            let req = args.to_request();
            let (files, warnings) = render_basemap(&store, &Resources::bundled(), &req)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            write_files(&args.output, &files.entries())?;
            println!("{} {}", files.id, args.output.display());
            Ok(())
        }
        Command::Heatmap(args) => {
            let req = args.to_request()?;
            let (basemap_id, map) = load_basemap_dir(&args.basemap)?;
            let store = open_store(store_flag, &config)?;
            let (files, warnings) = render_heatmap(&store, &Resources::bundled(), &basemap_id, &map, &req)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| ServiceError::io(format!("creating {}", dir.display()), e))?;
            }
            let json_path = args.output.with_extension("json");
            for (path, bytes) in [(&args.output, files.svg.as_slice()), (&json_path, files.intensities_json.as_bytes())] {
                std::fs::write(path, bytes).map_err(|e| ServiceError::io(format!("writing {}", path.display()), e))?;
            }
            println!("{} {}", files.id, args.output.display());
            Ok(())
        }
        Command::Serve(args) => {
            let mut config = config;
            if let Some(h) = args.host {
                config.host = h;
            }
            if let Some(p) = args.port {
                config.port = p;
            }
            if let Some(w) = args.workers {
                config.workers = w;
            }
            if let Some(o) = args.output_dir {
                config.output_dir = o;
            }
            let store = Arc::new(open_store(store_flag, &config)?);
            let runner = Runner::new(store, Resources::bundled(), ArtifactStore::new(&config.output_dir));
            let jobs = Arc::new(JobManager::new(runner, config.worker_count()));
            let rt = tokio::runtime::Runtime::new().map_err(|e| ServiceError::io("starting runtime", e))?;
            rt.block_on(crate::api::serve(jobs, &config.host, config.port))
                .map_err(|e| ServiceError::io(format!("serving on {}:{}", config.host, config.port), e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mocs_core::filtering::FilterMethod;

    #[test]
    fn years() {
        assert_eq!(parse_years("1990-1999"), Ok((1990, 1999)));
        assert_eq!(parse_years("2004"), Ok((2004, 2004)));
        assert!(parse_years("x-1").is_err());
    }

    #[test]
    fn figure_two_flags() {
        let cli = Cli::try_parse_from([
            "mocs", "basemap", "--venue", "TVCG", "--mode", "multi", "--ranking", "cvalue-unigrams", "--similarity",
            "pmj", "--filter", "pull-lesser", "--n-terms", "1500", "--seed", "7", "-o", "out/",
        ])
        .unwrap();
        let Command::Basemap(args) = cli.command else { panic!("wrong subcommand") };
        let req = args.to_request();
        assert_eq!(req.filter.venue.as_deref(), Some("TVCG"));
        assert_eq!(req.params.filtering.method, FilterMethod::PullLesserTerms);
        assert_eq!(req.params.filtering.n_terms, 1500);
        assert_eq!(req.params.seed, 7);
        assert_eq!(req.params.ranking, RankingMethod::CValueUnigrams);
    }

    #[test]
    fn bad_flags_exit_two() {
        assert_eq!(run(["mocs", "basemap", "--ranking", "nope", "-o", "x"]), 2);
        assert_eq!(run(["mocs", "frobnicate"]), 2);
    }
}
