//! Job queue: a fixed pool of worker threads fed over a channel.

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use crossbeam_channel::{unbounded, Receiver, Sender};
use mocs_store::{IngestOptions, IngestReport};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};
use crate::request::{content_id, BasemapRequest, HeatmapRequest};
use crate::runner::{Outcome, Runner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobKind {
    Basemap,
    Heatmap,
    Ingest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

impl JobState {
    pub fn is_finished(self) -> bool {
        matches!(self, JobState::Done | JobState::Failed)
    }

    /// Forward transitions only: queued, running, then done or failed.
    pub fn can_become(self, next: JobState) -> bool {
        matches!(
            (self, next),
            (JobState::Queued, JobState::Running)
                | (JobState::Queued, JobState::Failed)
                | (JobState::Running, JobState::Done)
                | (JobState::Running, JobState::Failed)
        )
    }
}

/// Where a finished job's artifacts live.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JobResult {
    pub id: String,
    pub dir: PathBuf,
    pub cached: bool,
    /// API paths of the artifacts, keyed by role.
    pub urls: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ingest: Option<IngestReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Job {
    pub id: String,
    pub kind: JobKind,
    pub state: JobState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basemap_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<JobResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub warnings: Vec<String>,
}

impl Job {
    fn new(id: String, kind: JobKind, basemap_id: Option<String>) -> Self {
        Job { id, kind, state: JobState::Queued, basemap_id, result: None, error: None, warnings: Vec::new() }
    }
}

pub fn basemap_urls(id: &str) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("svg".into(), format!("/api/basemaps/{id}.svg")),
        ("terms".into(), format!("/api/basemaps/{id}/terms.json")),
        ("basemap".into(), format!("/api/basemaps/{id}")),
    ])
}

pub fn heatmap_urls(id: &str) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("svg".into(), format!("/api/heatmaps/{id}.svg")),
        ("intensities".into(), format!("/api/heatmaps/{id}/intensities.json")),
    ])
}

enum Task {
    Basemap(BasemapRequest),
    Heatmap(String, HeatmapRequest),
    Ingest(PathBuf, IngestOptions),
}

struct Shared {
    jobs: Mutex<HashMap<String, Job>>,
    changed: Condvar,
    runner: Runner,
}

impl Shared {
    fn transition(&self, id: &str, next: JobState, update: impl FnOnce(&mut Job)) {
        let mut jobs = self.jobs.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(job) = jobs.get_mut(id) {
            if job.state.can_become(next) {
                job.state = next;
                update(job);
            } else {
                log::error!("job {id}: refusing {:?} -> {next:?}", job.state);
            }
        }
        drop(jobs);
        self.changed.notify_all();
    }
}

/// Owns the workers. Dropping the manager closes the queue and joins them.
pub struct JobManager {
    shared: Arc<Shared>,
    tx: Option<Sender<(String, Task)>>,
    workers: Vec<JoinHandle<()>>,
    ingest_seq: AtomicU64,
}

impl std::fmt::Debug for JobManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JobManager").field("workers", &self.workers.len()).finish()
    }
}

impl JobManager {
    pub fn new(runner: Runner, workers: usize) -> Self {
        let shared = Arc::new(Shared { jobs: Mutex::new(HashMap::new()), changed: Condvar::new(), runner });
        let (tx, rx) = unbounded::<(String, Task)>();
        let workers = (0..workers.max(1))
            .map(|i| {
                let shared = Arc::clone(&shared);
                let rx = rx.clone();
                std::thread::Builder::new()
                    .name(format!("mocs-worker-{i}"))
                    .spawn(move || worker(shared, rx))
                    .expect("spawning worker thread")
            })
            .collect();
        JobManager { shared, tx: Some(tx), workers, ingest_seq: AtomicU64::new(0) }
    }

    pub fn runner(&self) -> &Runner {
        &self.shared.runner
    }

    pub fn workers(&self) -> usize {
        self.workers.len()
    }

    /// Validates and enqueues. The same request maps to the same job unless
    /// that job failed.
    pub fn submit_basemap(&self, req: BasemapRequest) -> Result<String> {
        let errors = req.validate();
        if !errors.is_empty() {
            return Err(ServiceError::Invalid(errors));
        }
        let id = req.id();
        Ok(self.enqueue(id, JobKind::Basemap, None, Task::Basemap(req)))
    }

    /// Rejects the request when the basemap has not been built.
    pub fn submit_heatmap(&self, basemap_id: &str, req: HeatmapRequest) -> Result<String> {
        let errors = req.validate();
        if !errors.is_empty() {
            return Err(ServiceError::Invalid(errors));
        }
        if !self.shared.runner.artifacts.has_basemap(basemap_id) {
            return Err(ServiceError::NotFound(format!("basemap {basemap_id}")));
        }
        let id = req.id(basemap_id);
        Ok(self.enqueue(id, JobKind::Heatmap, Some(basemap_id.to_string()), Task::Heatmap(basemap_id.to_string(), req)))
    }

    /// Ingest jobs always run; each submission gets a fresh id.
    pub fn submit_ingest(&self, path: PathBuf, opts: IngestOptions) -> String {
        let seq = self.ingest_seq.fetch_add(1, Ordering::Relaxed);
        let id = content_id("ingest", &format!("{}\n{}\n{seq}", std::process::id(), path.display()));
        self.enqueue(id, JobKind::Ingest, None, Task::Ingest(path, opts))
    }

    fn enqueue(&self, id: String, kind: JobKind, basemap_id: Option<String>, task: Task) -> String {
        let mut jobs = self.shared.jobs.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(existing) = jobs.get(&id) {
            if existing.state != JobState::Failed {
                return id;
            }
        }
        jobs.insert(id.clone(), Job::new(id.clone(), kind, basemap_id));
        drop(jobs);
        self.tx.as_ref().expect("queue open").send((id.clone(), task)).expect("workers alive");
        id
    }

    pub fn get(&self, id: &str) -> Option<Job> {
        self.shared.jobs.lock().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }

    /// Blocks until the job finishes or `timeout` elapses; returns its last state.
    pub fn wait(&self, id: &str, timeout: Duration) -> Option<Job> {
        let deadline = Instant::now() + timeout;
        let mut jobs = self.shared.jobs.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            let job = jobs.get(id)?;
            let now = Instant::now();
            if job.state.is_finished() || now >= deadline {
                return Some(job.clone());
            }
            jobs = self.shared.changed.wait_timeout(jobs, deadline - now).unwrap_or_else(|e| e.into_inner()).0;
        }
    }
}

impl Drop for JobManager {
    fn drop(&mut self) {
        self.tx.take();
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

fn worker(shared: Arc<Shared>, rx: Receiver<(String, Task)>) {
    for (id, task) in rx {
        shared.transition(&id, JobState::Running, |_| {});
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&shared.runner, &task)));
        match outcome {
            Ok(Ok((result, warnings))) => shared.transition(&id, JobState::Done, |job| {
                job.result = Some(result);
                job.warnings = warnings;
            }),
            Ok(Err(e)) => {
                log::warn!("job {id} failed: {e}");
                shared.transition(&id, JobState::Failed, |job| job.error = Some(e.to_string()))
            }
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| panic.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "unknown panic".into());
                log::error!("job {id} panicked: {msg}");
                shared.transition(&id, JobState::Failed, |job| job.error = Some(format!("internal error: {msg}")))
            }
        }
    }
}

fn run(runner: &Runner, task: &Task) -> Result<(JobResult, Vec<String>)> {
    let finish = |o: Outcome, urls: BTreeMap<String, String>| {
        (JobResult { id: o.id, dir: o.dir, cached: o.cached, urls, ingest: None }, o.warnings)
    };
    match task {
        Task::Basemap(req) => {
            let o = runner.basemap(req)?;
            let urls = basemap_urls(&o.id);
            Ok(finish(o, urls))
        }
        Task::Heatmap(basemap_id, req) => {
            let o = runner.heatmap(basemap_id, req)?;
            let urls = heatmap_urls(&o.id);
            Ok(finish(o, urls))
        }
        Task::Ingest(path, opts) => {
            let report = runner.ingest(path, opts)?;
            let result = JobResult {
                id: String::new(),
                dir: runner.store.path().to_path_buf(),
                cached: false,
                urls: BTreeMap::from([("stats".into(), "/api/corpus/stats".into())]),
                ingest: Some(report),
            };
            Ok((result, Vec::new()))
        }
    }
}
