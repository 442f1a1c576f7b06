//! `permoracle sweep`: enumerate assignments, optimize the response state
//! per assignment, and report the maxima.
//!
//! Two files are produced under the `--out` base name: `<base>.records.ndjson`
//! (one manifest header line plus one JSON record per evaluated assignment;
//! this file doubles as the checkpoint) and `<base>.report.json` (manifest
//! header plus the summary report).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use permoracle::sweep::{self, RecordSink, SweepConfig, SweepRecord, SweepReport};

use crate::config::ConfigFile;
use crate::docs::{fmt_prob, manifest_for, write_document};
use crate::{Failure, WorkerArgs};

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Query width.
    #[arg(long)]
    n: Option<usize>,
    /// Response register dimension.
    #[arg(long)]
    r: Option<usize>,
    /// Multistart count per assignment.
    #[arg(long)]
    starts: Option<u32>,
    /// Optimizer iteration cap.
    #[arg(long)]
    max_iters: Option<u32>,
    /// Objective convergence tolerance.
    #[arg(long)]
    ftol: Option<f64>,
    /// Deterministic seed for the start distribution.
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluate only assignments with sigma_0 = identity (one representative
    /// per right-composition gauge class).
    #[arg(long, default_value_t = false)]
    gauge: bool,
    /// Assignment index subrange LO:HI (half-open).
    #[arg(long)]
    range: Option<String>,
    /// Ties within this distance of the best are all reported.
    #[arg(long)]
    tie_tol: Option<f64>,
    /// Refuse sweeps over more assignments than this.
    #[arg(long)]
    budget: Option<u64>,
    /// Base name for the records and report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continue from an existing records file.
    #[arg(long, default_value_t = false)]
    resume: bool,
    /// key = value configuration file (flags take precedence).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    workers: WorkerArgs,
}

fn parse_range(text: &str) -> Result<(u64, u64), Failure> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("--range wants LO:HI, got {text:?}")))?;
    let lo = lo
        .parse()
        .map_err(|e| Failure::Usage(format!("range start {lo:?}: {e}")))?;
    let hi = hi
        .parse()
        .map_err(|e| Failure::Usage(format!("range end {hi:?}: {e}")))?;
    Ok((lo, hi))
}

struct Resolved {
    config: SweepConfig,
    workers: usize,
    out_base: PathBuf,
}

fn resolve(args: &SweepArgs) -> Result<Resolved, Failure> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let n = args
        .n
        .or(file.get("n")?)
        .ok_or_else(|| Failure::Usage("--n is required (flag or config)".into()))?;
    let r = args
        .r
        .or(file.get("r")?)
        .ok_or_else(|| Failure::Usage("--r is required (flag or config)".into()))?;
    let mut config = SweepConfig::new(n, r);
    if let Some(v) = args.starts.or(file.get("starts")?) {
        config.starts = v;
    }
    if let Some(v) = args.max_iters.or(file.get("max_iters")?) {
        config.max_iters = v;
    }
    if let Some(v) = args.ftol.or(file.get("ftol")?) {
        config.ftol = v;
    }
    if let Some(v) = args.seed.or(file.get("seed")?) {
        config.seed = v;
    }
    config.gauge_reduce = args.gauge || file.get_flag("gauge")?.unwrap_or(false);
    let range_text: Option<String> = match &args.range {
        Some(t) => Some(t.clone()),
        None => file.get("range")?,
    };
    if let Some(text) = range_text {
        config.index_range = Some(parse_range(&text)?);
    }
    if let Some(v) = args.tie_tol.or(file.get("tie_tol")?) {
        config.tie_tol = v;
    }
    if let Some(v) = args.budget.or(file.get("budget")?) {
        config.max_assignments = v;
    }
    let out_base = args
        .out
        .clone()
        .or(file.get::<PathBuf>("out")?)
        .unwrap_or_else(|| PathBuf::from(format!("sweep_n{n}_r{r}")));
    let workers = args.workers.resolve(file.get("workers")?);
    Ok(Resolved {
        config,
        workers,
        out_base,
    })
}

struct FileSink {
    writer: std::io::BufWriter<std::fs::File>,
}

impl FileSink {
    fn create(path: &Path, header: &str) -> Result<Self, Failure> {
        let mut writer = std::io::BufWriter::new(
            std::fs::File::create(path)
                .map_err(|e| Failure::Run(format!("cannot create {}: {e}", path.display())))?,
        );
        writeln!(writer, "{header}").map_err(|e| Failure::Run(e.to_string()))?;
        Ok(Self { writer })
    }

    fn append(path: &Path) -> Result<Self, Failure> {
        let writer = std::io::BufWriter::new(
            std::fs::OpenOptions::new()
                .append(true)
                .open(path)
                .map_err(|e| Failure::Run(format!("cannot append {}: {e}", path.display())))?,
        );
        Ok(Self { writer })
    }
}

impl RecordSink for FileSink {
    fn emit(&mut self, record: &SweepRecord) -> permoracle::Result<()> {
        let line = serde_json::to_string(record)?;
        writeln!(self.writer, "{line}")?;
        Ok(())
    }
}

pub fn run(args: SweepArgs) -> Result<(), Failure> {
    let resolved = resolve(&args)?;
    let config = &resolved.config;
    let records_path = resolved.out_base.with_extension("records.ndjson");
    let report_path = resolved.out_base.with_extension("report.json");

    let mut inputs: Vec<&Path> = Vec::new();
    if let Some(cfg_path) = &args.config {
        inputs.push(cfg_path);
    }
    if args.resume {
        inputs.push(&records_path);
    }
    let manifest = manifest_for(
        "sweep",
        serde_json::to_value(config).map_err(|e| Failure::Run(e.to_string()))?,
        Some(config.seed),
        &inputs,
    )?;

    let report = if args.resume {
        let mut sink = FileSink::append(&records_path)?;
        let report = sweep::resume(&records_path, config, resolved.workers, &mut sink)?;
        sink.writer.flush().map_err(|e| Failure::Run(e.to_string()))?;
        report
    } else {
        let header = manifest
            .header_line()
            .map_err(|e| Failure::Run(e.to_string()))?;
        let mut sink = FileSink::create(&records_path, &header)?;
        let report = sweep::sweep_assignments(config, resolved.workers, &mut sink)?;
        sink.writer.flush().map_err(|e| Failure::Run(e.to_string()))?;
        report
    };

    let mut report_manifest = manifest.clone();
    report_manifest.finished_at = Some(chrono::Utc::now().to_rfc3339());
    write_document(&report_path, &report_manifest, &report)?;

    print_summary(&report, resolved.workers);
    println!("records: {}", records_path.display());
    println!("report:  {}", report_path.display());
    Ok(())
}

fn print_summary(report: &SweepReport, workers: usize) {
    let cfg = &report.config;
    println!(
        "sweep n={} r={} starts={} seed={} gauge={} workers={workers}",
        cfg.n, cfg.r, cfg.starts, cfg.seed, cfg.gauge_reduce
    );
    println!(
        "evaluated {} assignments ({} gauge-skipped, {} rank-deficient) in {:.1}s",
        report.totals.evaluated,
        report.totals.skipped_by_gauge,
        report.totals.rank_deficient,
        report.wall_clock_seconds
    );
    println!("best probability: {}", fmt_prob(report.best_probability));
    println!("optima within tie tolerance: {}", report.optima.len());
    for record in report.optima.iter().take(10) {
        println!(
            "  index {:>8}  sigma {}  p = {}{}",
            record.assignment_index,
            record.sigma.join(","),
            fmt_prob(record.probability),
            if record.rank_deficient {
                format!("  [rank {}]", record.rank)
            } else {
                String::new()
            }
        );
    }
    if report.optima.len() > 10 {
        println!("  ... {} more", report.optima.len() - 10);
    }
}
