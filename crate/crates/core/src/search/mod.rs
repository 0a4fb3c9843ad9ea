//! The candidate -> screen -> BPSW -> certificate pipeline over a range of
//! indices.
//!
//! One producer walks the candidate recurrence and hands immutable work
//! items to a pool of workers. Results come back out of order and are
//! released strictly by ascending `n` to a single writer, which owns the
//! results stream, the certificate files and the checkpoint.

pub mod checkpoint;
pub mod record;

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::candidate::{Candidate, Candidates};
use crate::digits::exact_digit_count;
use crate::factor::factor_p_minus_1;
use crate::primality::certificate::{
    build_certificate_with_cap, verify_certificate, CertificateError, DEFAULT_WITNESS_CAP,
};
use crate::primality::probable_prime_test;
use crate::primality::screen::{default_trial_bound, TrialScreen};
use checkpoint::{checkpoint_load, checkpoint_save, write_atomic, CheckpointError, CheckpointState, CHECKPOINT_SCHEMA};
use record::{certificate_file_name, SearchRecord, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Worker threads; 1 runs everything on the calling thread.
    pub workers: usize,
    /// Save a checkpoint after this many emitted records.
    pub checkpoint_every: u64,
    /// Fixed trial-division bound; `None` uses `max(10^5, n^2)` per candidate.
    pub trial_bound: Option<u64>,
    pub witness_cap: u64,
    pub checkpoint_path: Option<PathBuf>,
    /// JSONL results stream.
    pub results_path: Option<PathBuf>,
    pub certs_dir: Option<PathBuf>,
    /// Include `elapsed_ms` in the results stream.
    pub record_timing: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            checkpoint_every: 10,
            trial_bound: None,
            witness_cap: DEFAULT_WITNESS_CAP,
            checkpoint_path: None,
            results_path: None,
            certs_dir: None,
            record_timing: false,
        }
    }
}

impl SearchConfig {
    /// Hash of every setting that can influence what gets recorded.
    pub fn fingerprint(&self, from_n: u64) -> String {
        let trial = match self.trial_bound {
            Some(b) => b.to_string(),
            None => "auto".to_owned(),
        };
        let canonical = format!(
            "{CHECKPOINT_SCHEMA};from={from_n};trial={trial};witness_cap={}",
            self.witness_cap
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid range [{from}, {to}]")]
    InvalidRange { from: u64, to: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot resume: {0}")]
    ResumeMismatch(String),
}

impl SearchError {
    pub fn is_persistence(&self) -> bool {
        matches!(self, Self::Checkpoint(_) | Self::Io { .. } | Self::ResumeMismatch(_))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchReport {
    /// Records produced by this invocation, ascending in `n`.
    pub records: Vec<SearchRecord>,
    /// Every prime index known after this invocation, resumed ones included.
    pub found: Vec<u64>,
    /// Where a resumed run picked up.
    pub resumed_from: Option<u64>,
    /// Stopped early through the stop flag.
    pub interrupted: bool,
}

/// Runs `[from_n, to_n]` with `config`, returning the records in order.
pub fn run_search(from_n: u64, to_n: u64, config: &SearchConfig) -> Result<Vec<SearchRecord>, SearchError> {
    Search::new(config.clone()).run(from_n, to_n).map(|r| r.records)
}

type RecordHook<'a> = Box<dyn FnMut(&SearchRecord) + 'a>;

/// A configured search with optional stop flag and per-record hook.
pub struct Search<'a> {
    config: SearchConfig,
    stop: Arc<AtomicBool>,
    on_record: Option<RecordHook<'a>>,
}

impl std::fmt::Debug for Search<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Search")
            .field("config", &self.config)
            .field("stop", &self.stop)
            .finish_non_exhaustive()
    }
}

impl<'a> Search<'a> {
    pub fn new(config: SearchConfig) -> Self {
        Self {
            config,
            stop: Arc::new(AtomicBool::new(false)),
            on_record: None,
        }
    }

    /// When the flag is raised the search stops after the current record,
    /// saves a checkpoint and returns with `interrupted` set.
    pub fn with_stop_flag(mut self, stop: Arc<AtomicBool>) -> Self {
        self.stop = stop;
        self
    }

    /// Called after each record is persisted.
    pub fn on_record(mut self, f: impl FnMut(&SearchRecord) + 'a) -> Self {
        self.on_record = Some(Box::new(f));
        self
    }

    pub fn run(&mut self, from_n: u64, to_n: u64) -> Result<SearchReport, SearchError> {
        if from_n == 0 || from_n > to_n {
            return Err(SearchError::InvalidRange { from: from_n, to: to_n });
        }
        if self.config.workers == 0 {
            return Err(SearchError::InvalidConfig("workers must be at least 1".into()));
        }
        if self.config.checkpoint_every == 0 {
            return Err(SearchError::InvalidConfig("checkpoint cadence must be at least 1".into()));
        }

        let fingerprint = self.config.fingerprint(from_n);
        let (state, resumed_from) = match &self.config.checkpoint_path {
            Some(path) if path.exists() => {
                let state = checkpoint_load(path, &fingerprint)?;
                if state.completed.first().is_some_and(|&first| first != from_n)
                    || state.next_n < from_n
                {
                    return Err(SearchError::ResumeMismatch(format!(
                        "checkpoint does not start at n={from_n}"
                    )));
                }
                let next = state.next_n;
                (state, Some(next))
            }
            _ => (CheckpointState::fresh(from_n, fingerprint), None),
        };

        let results = match &self.config.results_path {
            Some(path) => Some(open_results(path, &state, resumed_from.is_some())?),
            None => None,
        };
        if let Some(dir) = &self.config.certs_dir {
            fs::create_dir_all(dir).map_err(|source| SearchError::Io {
                path: dir.clone(),
                source,
            })?;
        }

        let start = state.next_n;
        let mut writer = Writer {
            results,
            results_path: self.config.results_path.clone(),
            certs_dir: self.config.certs_dir.clone(),
            checkpoint_path: self.config.checkpoint_path.clone(),
            record_timing: self.config.record_timing,
            every: self.config.checkpoint_every,
            since_checkpoint: 0,
            state,
            on_record: self.on_record.as_mut(),
            records: Vec::new(),
        };

        let mut interrupted = false;
        if start <= to_n {
            let screen_limit = self.config.trial_bound.unwrap_or_else(|| default_trial_bound(to_n));
            let evaluator = Evaluator {
                screen: TrialScreen::new(screen_limit),
                trial_bound: self.config.trial_bound,
                witness_cap: self.config.witness_cap,
            };
            interrupted = if self.config.workers == 1 {
                run_inline(&evaluator, start, to_n, &self.stop, &mut writer)?
            } else {
                run_pool(&evaluator, start, to_n, self.config.workers, &self.stop, &mut writer)?
            };
        }
        writer.checkpoint()?;

        Ok(SearchReport {
            records: writer.records,
            found: writer.state.found,
            resumed_from,
            interrupted,
        })
    }
}

struct Evaluator {
    screen: TrialScreen,
    trial_bound: Option<u64>,
    witness_cap: u64,
}

impl Evaluator {
    fn evaluate(&self, c: &Candidate) -> SearchRecord {
        let started = Instant::now();
        let n = c.n();
        let bound = self.trial_bound.unwrap_or_else(|| default_trial_bound(n));
        let mut record = SearchRecord {
            n,
            verdict: Verdict::Composite,
            digits: exact_digit_count(c),
            divisor: None,
            elapsed: Duration::ZERO,
            certificate_path: None,
            certificate: None,
        };

        record.divisor = self.screen.screen(c, bound).divisor();
        if record.divisor.is_none() && probable_prime_test(c.p()) {
            record.verdict = match build_certificate_with_cap(c, &factor_p_minus_1(n), self.witness_cap) {
                Ok(cert) => match verify_certificate(&cert) {
                    Ok(()) => {
                        record.certificate = Some(cert);
                        Verdict::PrimeCertified
                    }
                    Err(reason) => Verdict::Unproven {
                        reason: format!("self-check-failed: {reason}"),
                    },
                },
                Err(CertificateError::CompositeDetected { .. }) => Verdict::Composite,
                Err(e @ CertificateError::WitnessExhausted { .. }) => Verdict::Unproven {
                    reason: e.to_string(),
                },
                Err(e @ CertificateError::IndexMismatch { .. }) => unreachable!("{e}"),
            };
        }
        record.elapsed = started.elapsed();
        record
    }
}

fn run_inline(
    evaluator: &Evaluator,
    start: u64,
    to_n: u64,
    stop: &AtomicBool,
    writer: &mut Writer<'_, '_>,
) -> Result<bool, SearchError> {
    let candidates = Candidates::starting_at(start).expect("start >= 1");
    for c in candidates.take_while(|c| c.n() <= to_n) {
        if stop.load(Ordering::SeqCst) {
            return Ok(true);
        }
        writer.emit(evaluator.evaluate(&c))?;
    }
    Ok(false)
}

fn run_pool(
    evaluator: &Evaluator,
    start: u64,
    to_n: u64,
    workers: usize,
    stop: &AtomicBool,
    writer: &mut Writer<'_, '_>,
) -> Result<bool, SearchError> {
    let (work_tx, work_rx) = crossbeam_channel::bounded::<Candidate>(workers * 2);
    let (result_tx, result_rx) = crossbeam_channel::unbounded::<SearchRecord>();
    // lets the producer and workers wind down when the writer bails out
    let halt = AtomicBool::new(false);

    std::thread::scope(|scope| {
        let halt = &halt;
        scope.spawn(move || {
            let candidates = Candidates::starting_at(start).expect("start >= 1");
            for c in candidates.take_while(|c| c.n() <= to_n) {
                if halt.load(Ordering::SeqCst) || stop.load(Ordering::SeqCst) {
                    break;
                }
                if work_tx.send(c).is_err() {
                    break;
                }
            }
        });
        for _ in 0..workers {
            let work_rx = work_rx.clone();
            let result_tx = result_tx.clone();
            scope.spawn(move || {
                for c in work_rx {
                    if halt.load(Ordering::SeqCst) {
                        break;
                    }
                    if result_tx.send(evaluator.evaluate(&c)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(work_rx);
        drop(result_tx);

        let mut pending = BTreeMap::new();
        let mut next = start;
        let outcome = 'collect: {
            for record in &result_rx {
                pending.insert(record.n, record);
                while let Some(record) = pending.remove(&next) {
                    if let Err(e) = writer.emit(record) {
                        break 'collect Err(e);
                    }
                    next += 1;
                    if stop.load(Ordering::SeqCst) && next <= to_n {
                        break 'collect Ok(true);
                    }
                }
            }
            Ok(next <= to_n && stop.load(Ordering::SeqCst))
        };
        halt.store(true, Ordering::SeqCst);
        drop(result_rx);
        outcome
    })
}

/// The single owner of all persistent output.
struct Writer<'a, 'b> {
    results: Option<BufWriter<File>>,
    results_path: Option<PathBuf>,
    certs_dir: Option<PathBuf>,
    checkpoint_path: Option<PathBuf>,
    record_timing: bool,
    every: u64,
    since_checkpoint: u64,
    state: CheckpointState,
    on_record: Option<&'a mut RecordHook<'b>>,
    records: Vec<SearchRecord>,
}

impl Writer<'_, '_> {
    fn emit(&mut self, mut record: SearchRecord) -> Result<(), SearchError> {
        debug_assert_eq!(record.n, self.state.next_n);
        if let (Some(dir), Some(cert)) = (&self.certs_dir, &record.certificate) {
            let name = certificate_file_name(record.n);
            let path = dir.join(&name);
            let mut body = cert.to_json();
            body.push('\n');
            write_atomic(&path, body.as_bytes()).map_err(|source| SearchError::Io { path, source })?;
            record.certificate_path = Some(name);
        }
        if let Some(out) = &mut self.results {
            let mut line = record.to_json_line(self.record_timing);
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(|source| SearchError::Io {
                path: self.results_path.clone().unwrap_or_default(),
                source,
            })?;
        }

        self.state.completed.insert(record.n);
        self.state.next_n = record.n + 1;
        if record.is_prime() {
            self.state.found.push(record.n);
        }
        self.since_checkpoint += 1;
        if self.since_checkpoint >= self.every {
            self.checkpoint()?;
        }
        if let Some(hook) = &mut self.on_record {
            hook(&record);
        }
        self.records.push(record);
        Ok(())
    }

    /// Flushes the results stream, then records progress.
    fn checkpoint(&mut self) -> Result<(), SearchError> {
        if let Some(out) = &mut self.results {
            let path = self.results_path.clone().unwrap_or_default();
            out.flush()
                .and_then(|()| out.get_ref().sync_data())
                .map_err(|source| SearchError::Io { path, source })?;
        }
        if let Some(path) = &self.checkpoint_path {
            checkpoint_save(&self.state, path)?;
        }
        self.since_checkpoint = 0;
        Ok(())
    }
}

/// Opens the results stream for appending. On resume, lines past the
/// checkpoint are dropped first so the stream lines up with it again.
fn open_results(path: &Path, state: &CheckpointState, resuming: bool) -> Result<BufWriter<File>, SearchError> {
    let io_err = |source| SearchError::Io {
        path: path.to_owned(),
        source,
    };
    if resuming {
        let mut kept = String::new();
        let mut count = 0usize;
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(io_err)?);
            for line in reader.lines() {
                let line = line.map_err(io_err)?;
                match SearchRecord::index_of_line(&line) {
                    Some(n) if state.completed.contains(&n) => {
                        kept.push_str(&line);
                        kept.push('\n');
                        count += 1;
                    }
                    // a torn final line or records written after the checkpoint
                    _ => {}
                }
            }
        }
        if count != state.completed.len() {
            return Err(SearchError::ResumeMismatch(format!(
                "results stream {} holds {count} of {} checkpointed records",
                path.display(),
                state.completed.len()
            )));
        }
        write_atomic(path, kept.as_bytes()).map_err(io_err)?;
        let file = OpenOptions::new().append(true).open(path).map_err(io_err)?;
        Ok(BufWriter::new(file))
    } else {
        Ok(BufWriter::new(File::create(path).map_err(io_err)?))
    }
}
