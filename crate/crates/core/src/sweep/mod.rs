//! Exhaustive enumeration of permutation assignments with per-assignment
//! response-state optimization, gauge reduction, deterministic parallel
//! partitioning, and checkpoint/resume.
//!
//! Work is indexed by the mixed-radix assignment index. Workers claim fixed
//! batches of indices from a shared cursor and evaluate them independently;
//! the emitter consumes finished batches in index order, so record streams
//! and reports are identical regardless of worker count.

pub mod objective;
pub mod optimizer;

pub use objective::{objective, AssignmentEvaluator};
pub use optimizer::{optimize_psi, OptimizeOutcome, OptimizerConfig};

use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::domain::SigmaAssignment;
use crate::error::{Error, Result};
use crate::manifest::RunManifest;

/// Batch of assignment indices one worker claims at a time.
const BATCH: u64 = 32;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub r: usize,
    #[serde(default = "default_starts")]
    pub starts: u32,
    #[serde(default = "default_max_iters")]
    pub max_iters: u32,
    #[serde(default = "default_ftol")]
    pub ftol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub gauge_reduce: bool,
    /// Half-open subrange of assignment indices; `None` means the full space.
    #[serde(default)]
    pub index_range: Option<(u64, u64)>,
    #[serde(default = "default_tie_tol")]
    pub tie_tol: f64,
    /// Refuse sweeps whose evaluated range exceeds this.
    #[serde(default = "default_budget")]
    pub max_assignments: u64,
}

fn default_starts() -> u32 {
    20
}
fn default_max_iters() -> u32 {
    200
}
fn default_ftol() -> f64 {
    1e-10
}
fn default_seed() -> u64 {
    1729
}
fn default_tie_tol() -> f64 {
    1e-6
}
fn default_budget() -> u64 {
    10_000_000
}

impl SweepConfig {
    pub fn new(n: usize, r: usize) -> Self {
        Self {
            n,
            r,
            starts: default_starts(),
            max_iters: default_max_iters(),
            ftol: default_ftol(),
            seed: default_seed(),
            gauge_reduce: false,
            index_range: None,
            tie_tol: default_tie_tol(),
            max_assignments: default_budget(),
        }
    }

    pub fn with_range(mut self, lo: u64, hi: u64) -> Self {
        self.index_range = Some((lo, hi));
        self
    }

    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            starts: self.starts,
            max_iters: self.max_iters,
            ftol: self.ftol,
            seed: self.seed,
            grad_step: 1e-5,
        }
    }

    /// Validates the budget and resolves the index range.
    pub fn resolve_range(&self) -> Result<(u64, u64)> {
        let total = SigmaAssignment::total(self.n, self.r)?;
        let (lo, hi) = match self.index_range {
            Some((lo, hi)) => {
                if lo >= hi || (hi as u128) > total {
                    return Err(Error::InvalidConfig(format!(
                        "index range [{lo}, {hi}) invalid for total {total}"
                    )));
                }
                (lo, hi)
            }
            None => {
                if total > u64::MAX as u128 {
                    return Err(Error::BudgetExceeded {
                        work: total,
                        budget: self.max_assignments,
                    });
                }
                (0, total as u64)
            }
        };
        let work = (hi - lo) as u128;
        if work > self.max_assignments as u128 {
            return Err(Error::BudgetExceeded {
                work,
                budget: self.max_assignments,
            });
        }
        Ok((lo, hi))
    }

    /// Fields that must match for a checkpoint to be resumable: everything
    /// that influences per-record values.
    fn determinism_key(&self) -> (usize, usize, u32, u32, u64, u64, bool) {
        (
            self.n,
            self.r,
            self.starts,
            self.max_iters,
            self.ftol.to_bits(),
            self.seed,
            self.gauge_reduce,
        )
    }
}

/// One assignment's optimization result.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub assignment_index: u64,
    /// Cycle text per distance, sigma_0 first.
    pub sigma: Vec<String>,
    /// Optimal response state as (re, im) pairs, gauge-fixed.
    pub psi_star: Vec<(f64, f64)>,
    /// Maximized objective, rounded to 12 significant digits.
    pub probability: f64,
    pub rank: usize,
    pub rank_deficient: bool,
    pub starts_used: u32,
    pub converged: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
pub struct SweepTotals {
    pub evaluated: u64,
    pub skipped_by_gauge: u64,
    pub rank_deficient: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SweepReport {
    pub best_probability: f64,
    /// Every record within tie_tol of the best, in index order.
    pub optima: Vec<SweepRecord>,
    pub totals: SweepTotals,
    pub config: SweepConfig,
    pub wall_clock_seconds: f64,
}

/// Destination for the per-assignment record stream.
pub trait RecordSink {
    fn emit(&mut self, record: &SweepRecord) -> Result<()>;
}

/// Collects records in memory.
#[derive(Default)]
pub struct VecSink {
    pub records: Vec<SweepRecord>,
}

impl RecordSink for VecSink {
    fn emit(&mut self, record: &SweepRecord) -> Result<()> {
        self.records.push(record.clone());
        Ok(())
    }
}

/// Discards records; the report is still built.
pub struct NullSink;

impl RecordSink for NullSink {
    fn emit(&mut self, _record: &SweepRecord) -> Result<()> {
        Ok(())
    }
}

/// Rounds to 12 significant digits; record probabilities are stored rounded
/// so parsed checkpoints reproduce fresh runs exactly.
pub fn round_sig12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float")
}

/// Runs the sweep over the configured range, streaming one record per
/// evaluated assignment to the sink in index order.
pub fn sweep_assignments(
    cfg: &SweepConfig,
    workers: usize,
    sink: &mut dyn RecordSink,
) -> Result<SweepReport> {
    run_sweep(cfg, workers, sink, Vec::new())
}

/// Continues an interrupted sweep from its record file. Already-recorded
/// assignment indices are skipped; the final report is identical to an
/// uninterrupted run (up to wall clock). Only newly evaluated records are
/// emitted to the sink.
pub fn resume(
    checkpoint: &Path,
    cfg: &SweepConfig,
    workers: usize,
    sink: &mut dyn RecordSink,
) -> Result<SweepReport> {
    let (manifest, prior) = read_checkpoint(checkpoint)?;
    check_compat(&manifest, cfg)?;
    run_sweep(cfg, workers, sink, prior)
}

/// Reads a checkpoint record file: one manifest header line, then one JSON
/// record per line. A truncated final line (interrupt artifact) is dropped;
/// damage anywhere else is an error.
pub fn read_checkpoint(path: &Path) -> Result<(RunManifest, Vec<SweepRecord>)> {
    let file = std::fs::File::open(path)?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::CorruptCheckpoint("empty checkpoint file".into()))??;
    let manifest = RunManifest::parse_header_line(&header)?;
    let mut records: Vec<SweepRecord> = Vec::new();
    let mut pending_error: Option<String> = None;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if pending_error.is_some() {
            // The bad line was not the last one.
            return Err(Error::CorruptCheckpoint(pending_error.unwrap()));
        }
        match serde_json::from_str::<SweepRecord>(&line) {
            Ok(rec) => records.push(rec),
            Err(e) => pending_error = Some(format!("unparseable record line: {e}")),
        }
    }
    records.sort_by_key(|r| r.assignment_index);
    records.dedup_by_key(|r| r.assignment_index);
    Ok((manifest, records))
}

fn check_compat(manifest: &RunManifest, cfg: &SweepConfig) -> Result<()> {
    if manifest.command != "sweep" {
        return Err(Error::CheckpointMismatch(format!(
            "checkpoint was written by command {:?}",
            manifest.command
        )));
    }
    let old: SweepConfig = manifest
        .config_as()
        .map_err(|e| Error::CheckpointMismatch(format!("unreadable config echo: {e}")))?;
    if old.determinism_key() != cfg.determinism_key() {
        return Err(Error::CheckpointMismatch(format!(
            "checkpoint config (n={}, r={}, starts={}, max_iters={}, ftol={:e}, seed={}, gauge={}) \
             differs from requested (n={}, r={}, starts={}, max_iters={}, ftol={:e}, seed={}, gauge={})",
            old.n, old.r, old.starts, old.max_iters, old.ftol, old.seed, old.gauge_reduce,
            cfg.n, cfg.r, cfg.starts, cfg.max_iters, cfg.ftol, cfg.seed, cfg.gauge_reduce,
        )));
    }
    Ok(())
}

struct BatchOutput {
    records: Vec<SweepRecord>,
    skipped_by_gauge: u64,
}

struct Shared {
    next_batch: AtomicU64,
    finished: Mutex<std::collections::BTreeMap<u64, BatchOutput>>,
    ready: Condvar,
}

fn run_sweep(
    cfg: &SweepConfig,
    workers: usize,
    sink: &mut dyn RecordSink,
    prior: Vec<SweepRecord>,
) -> Result<SweepReport> {
    let started = Instant::now();
    let (lo, hi) = cfg.resolve_range()?;
    let done: HashSet<u64> = prior.iter().map(|r| r.assignment_index).collect();
    // Gauge reduction keeps only sigma_0 = identity, which is the index
    // prefix [0, (r!)^n).
    let gauge_cutoff: u128 = if cfg.gauge_reduce {
        SigmaAssignment::total(cfg.n, cfg.r)? / crate::domain::factorials(cfg.r)[cfg.r] as u128
    } else {
        u128::MAX
    };

    let num_batches = (hi - lo).div_ceil(BATCH);
    let shared = Shared {
        next_batch: AtomicU64::new(0),
        finished: Mutex::new(std::collections::BTreeMap::new()),
        ready: Condvar::new(),
    };
    let worker_count = workers.max(1).min(num_batches as usize).max(1);
    let opt_cfg = cfg.optimizer();

    let mut builder = ReportBuilder::new(cfg.tie_tol);
    let mut prior_iter = prior.into_iter().peekable();

    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..worker_count {
            scope.spawn(|| {
                loop {
                    let b = shared.next_batch.fetch_add(1, Ordering::SeqCst);
                    if b >= num_batches {
                        break;
                    }
                    let batch_lo = lo + b * BATCH;
                    let batch_hi = (batch_lo + BATCH).min(hi);
                    let out = evaluate_batch(
                        cfg,
                        &opt_cfg,
                        batch_lo,
                        batch_hi,
                        gauge_cutoff,
                        &done,
                    );
                    let mut finished = shared.finished.lock().expect("sweep mutex");
                    finished.insert(b, out);
                    shared.ready.notify_all();
                }
            });
        }

        // Consume batches in order so records hit the sink sorted by index.
        for expect in 0..num_batches {
            let out = {
                let mut finished = shared.finished.lock().expect("sweep mutex");
                loop {
                    if let Some(out) = finished.remove(&expect) {
                        break out;
                    }
                    finished = shared.ready.wait(finished).expect("sweep condvar");
                }
            };
            builder.skipped_by_gauge += out.skipped_by_gauge;
            for record in out.records {
                // Interleave resumed records that precede this fresh one.
                while prior_iter
                    .peek()
                    .is_some_and(|p| p.assignment_index < record.assignment_index)
                {
                    builder.add(prior_iter.next().unwrap());
                }
                builder.add(record.clone());
                sink.emit(&record)?;
            }
        }
        Ok(())
    })?;
    for leftover in prior_iter {
        builder.add(leftover);
    }

    builder.into_report(cfg.clone(), started.elapsed().as_secs_f64())
}

fn evaluate_batch(
    cfg: &SweepConfig,
    opt_cfg: &OptimizerConfig,
    lo: u64,
    hi: u64,
    gauge_cutoff: u128,
    done: &HashSet<u64>,
) -> BatchOutput {
    let mut records = Vec::new();
    let mut skipped_by_gauge = 0u64;
    for idx in lo..hi {
        if (idx as u128) >= gauge_cutoff {
            skipped_by_gauge += 1;
            continue;
        }
        if done.contains(&idx) {
            continue;
        }
        records.push(evaluate_assignment(cfg, opt_cfg, idx));
    }
    BatchOutput {
        records,
        skipped_by_gauge,
    }
}

fn evaluate_assignment(cfg: &SweepConfig, opt_cfg: &OptimizerConfig, idx: u64) -> SweepRecord {
    let sigma = SigmaAssignment::from_index(idx, cfg.n, cfg.r)
        .expect("index validated against the assignment total");
    let mut evaluator =
        AssignmentEvaluator::new(cfg.n, &sigma).expect("assignment shape is consistent");
    let out = optimizer::optimize(&mut evaluator, opt_cfg, idx);
    SweepRecord {
        assignment_index: idx,
        sigma: sigma.cycle_texts(),
        psi_star: out
            .psi_star
            .entries()
            .iter()
            .map(|z| (z.re, z.im))
            .collect(),
        probability: round_sig12(out.probability),
        rank: out.rank,
        rank_deficient: out.rank_deficient,
        starts_used: out.starts_used,
        converged: out.converged,
    }
}

struct ReportBuilder {
    tie_tol: f64,
    best: f64,
    optima: Vec<SweepRecord>,
    evaluated: u64,
    skipped_by_gauge: u64,
    rank_deficient: u64,
}

impl ReportBuilder {
    fn new(tie_tol: f64) -> Self {
        Self {
            tie_tol,
            best: f64::NEG_INFINITY,
            optima: Vec::new(),
            evaluated: 0,
            skipped_by_gauge: 0,
            rank_deficient: 0,
        }
    }

    fn add(&mut self, record: SweepRecord) {
        self.evaluated += 1;
        if record.rank_deficient {
            self.rank_deficient += 1;
        }
        if record.probability > self.best {
            self.best = record.probability;
            self.optima.retain(|r| r.probability >= self.best - self.tie_tol);
        }
        if record.probability >= self.best - self.tie_tol {
            self.optima.push(record);
        }
    }

    fn into_report(self, config: SweepConfig, wall_clock_seconds: f64) -> Result<SweepReport> {
        if self.evaluated == 0 {
            return Err(Error::InvalidConfig(
                "sweep evaluated no assignments (range empty after gauge reduction?)".into(),
            ));
        }
        let mut optima = self.optima;
        optima.sort_by_key(|r| r.assignment_index);
        Ok(SweepReport {
            best_probability: self.best,
            optima,
            totals: SweepTotals {
                evaluated: self.evaluated,
                skipped_by_gauge: self.skipped_by_gauge,
                rank_deficient: self.rank_deficient,
            },
            config,
            wall_clock_seconds,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_cfg(n: usize, r: usize) -> SweepConfig {
        let mut cfg = SweepConfig::new(n, r);
        cfg.starts = 8;
        cfg
    }

    #[test]
    fn n3_r2_full_sweep_matches_reported_optimum() {
        let cfg = small_cfg(3, 2);
        let mut sink = VecSink::default();
        let report = sweep_assignments(&cfg, 2, &mut sink).unwrap();
        assert_eq!(report.totals.evaluated, 16);
        assert_eq!(sink.records.len(), 16);
        assert_abs_diff_eq!(report.best_probability, 0.8, epsilon = 5e-3);
        // The maximum is attained by the swap at distance 1, by its
        // distance-reversal partner (swap at distance n-1 = 2; the two
        // ensembles are related by relabeling a <-> complement(a)), and by
        // their right-composition gauge copies.
        let tie_sigmas: Vec<&Vec<String>> = report.optima.iter().map(|r| &r.sigma).collect();
        let swap_d1 = vec!["(1)", "(12)", "(1)", "(1)"];
        let swap_d2 = vec!["(1)", "(1)", "(12)", "(1)"];
        assert!(tie_sigmas.iter().any(|s| **s == swap_d1), "{tie_sigmas:?}");
        assert!(tie_sigmas.iter().any(|s| **s == swap_d2), "{tie_sigmas:?}");
    }

    #[test]
    fn records_come_out_in_index_order_and_deterministically() {
        let cfg = small_cfg(2, 2);
        let mut sink_a = VecSink::default();
        let report_a = sweep_assignments(&cfg, 1, &mut sink_a).unwrap();
        let mut sink_b = VecSink::default();
        let report_b = sweep_assignments(&cfg, 2, &mut sink_b).unwrap();
        let indices: Vec<u64> = sink_a.records.iter().map(|r| r.assignment_index).collect();
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        assert_eq!(indices, sorted);
        assert_eq!(sink_a.records, sink_b.records);
        assert_eq!(
            serde_json::to_string(&report_a.optima).unwrap(),
            serde_json::to_string(&report_b.optima).unwrap()
        );
        assert_eq!(report_a.best_probability, report_b.best_probability);
    }

    #[test]
    fn partition_union_matches_full_run() {
        let full_cfg = small_cfg(3, 2);
        let mut full_sink = VecSink::default();
        let full = sweep_assignments(&full_cfg, 2, &mut full_sink).unwrap();

        let mut merged: Vec<SweepRecord> = Vec::new();
        for part in 0..8u64 {
            let cfg = small_cfg(3, 2).with_range(part * 2, (part + 1) * 2);
            let mut sink = VecSink::default();
            sweep_assignments(&cfg, 1, &mut sink).unwrap();
            merged.extend(sink.records);
        }
        merged.sort_by_key(|r| r.assignment_index);
        assert_eq!(merged, full_sink.records);

        let best = merged
            .iter()
            .map(|r| r.probability)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best, full.best_probability);
        let optima: Vec<u64> = merged
            .iter()
            .filter(|r| r.probability >= best - full_cfg.tie_tol)
            .map(|r| r.assignment_index)
            .collect();
        let full_optima: Vec<u64> = full.optima.iter().map(|r| r.assignment_index).collect();
        assert_eq!(optima, full_optima);
    }

    #[test]
    fn gauge_reduction_skips_nonidentity_sigma0() {
        let mut cfg = small_cfg(2, 2);
        cfg.gauge_reduce = true;
        let mut sink = VecSink::default();
        let report = sweep_assignments(&cfg, 1, &mut sink).unwrap();
        // (2!)^3 = 8 assignments, 4 with sigma_0 = id.
        assert_eq!(report.totals.evaluated, 4);
        assert_eq!(report.totals.skipped_by_gauge, 4);
        assert!(sink
            .records
            .iter()
            .all(|r| r.sigma[0] == "(1)"));
    }

    #[test]
    fn budget_is_enforced() {
        let mut cfg = SweepConfig::new(3, 3);
        cfg.max_assignments = 100;
        assert!(matches!(
            sweep_assignments(&cfg, 1, &mut NullSink),
            Err(Error::BudgetExceeded { .. })
        ));
        cfg.index_range = Some((0, 50));
        assert!(sweep_assignments(&cfg, 1, &mut NullSink).is_ok());
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        let mut cfg = small_cfg(2, 2);
        cfg.index_range = Some((5, 5));
        assert!(matches!(
            sweep_assignments(&cfg, 1, &mut NullSink),
            Err(Error::InvalidConfig(_))
        ));
        cfg.index_range = Some((0, 9));
        assert!(matches!(
            sweep_assignments(&cfg, 1, &mut NullSink),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn round_sig12_is_stable_under_roundtrip() {
        for &x in &[0.8, 0.97435278, 1.0 / 3.0, 0.0, 1.0, 0.7214285] {
            let rounded = round_sig12(x);
            assert_eq!(rounded, round_sig12(rounded));
            assert!((rounded - x).abs() <= 1e-11 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn resume_reproduces_uninterrupted_report() {
        use std::io::Write;
        let cfg = small_cfg(3, 2);

        // Uninterrupted reference.
        let mut full_sink = VecSink::default();
        let full = sweep_assignments(&cfg, 2, &mut full_sink).unwrap();

        // Simulate an interrupt: only the first half was recorded.
        let half_cfg = cfg.clone().with_range(0, 8);
        let mut half_sink = VecSink::default();
        sweep_assignments(&half_cfg, 1, &mut half_sink).unwrap();

        let dir = std::env::temp_dir().join(format!("permoracle-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("resume-records.ndjson");
        {
            let mut f = std::fs::File::create(&path).unwrap();
            let manifest = RunManifest::new(
                "sweep",
                serde_json::to_value(&cfg).unwrap(),
                "t0".into(),
            );
            writeln!(f, "{}", manifest.header_line().unwrap()).unwrap();
            for rec in &half_sink.records {
                writeln!(f, "{}", serde_json::to_string(rec).unwrap()).unwrap();
            }
            // Interrupt artifact: a truncated final line.
            write!(f, "{{\"assignment_index\":9,\"sig").unwrap();
        }

        let mut resumed_sink = VecSink::default();
        let resumed = resume(&path, &cfg, 2, &mut resumed_sink).unwrap();
        assert_eq!(resumed.totals.evaluated, 16);
        assert_eq!(resumed_sink.records.len(), 8, "only new records re-emitted");
        assert_eq!(resumed.best_probability, full.best_probability);
        assert_eq!(
            serde_json::to_string(&resumed.optima).unwrap(),
            serde_json::to_string(&full.optima).unwrap()
        );
        assert_eq!(resumed.totals, full.totals);

        // Resuming a complete run evaluates nothing new.
        let complete = dir.join("complete-records.ndjson");
        {
            let mut f = std::fs::File::create(&complete).unwrap();
            let manifest = RunManifest::new(
                "sweep",
                serde_json::to_value(&cfg).unwrap(),
                "t0".into(),
            );
            writeln!(f, "{}", manifest.header_line().unwrap()).unwrap();
            for rec in &full_sink.records {
                writeln!(f, "{}", serde_json::to_string(rec).unwrap()).unwrap();
            }
        }
        let mut none_sink = VecSink::default();
        let again = resume(&complete, &cfg, 1, &mut none_sink).unwrap();
        assert!(none_sink.records.is_empty());
        assert_eq!(again.best_probability, full.best_probability);

        // Mismatched seed is rejected.
        let mut other = cfg.clone();
        other.seed = 999;
        assert!(matches!(
            resume(&path, &other, 1, &mut NullSink),
            Err(Error::CheckpointMismatch(_))
        ));

        // Damage in the middle is rejected.
        let corrupt = dir.join("corrupt-records.ndjson");
        {
            let mut f = std::fs::File::create(&corrupt).unwrap();
            let manifest = RunManifest::new(
                "sweep",
                serde_json::to_value(&cfg).unwrap(),
                "t0".into(),
            );
            writeln!(f, "{}", manifest.header_line().unwrap()).unwrap();
            writeln!(f, "not json").unwrap();
            writeln!(
                f,
                "{}",
                serde_json::to_string(&full_sink.records[0]).unwrap()
            )
            .unwrap();
        }
        assert!(matches!(
            resume(&corrupt, &cfg, 1, &mut NullSink),
            Err(Error::CorruptCheckpoint(_))
        ));

        std::fs::remove_dir_all(&dir).ok();
    }
}
