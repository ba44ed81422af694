//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::mc::{
    build_certified, empirical_mg_cell_mgf, mg_divergence_series, mgf_from_values, probe_assumptions, replicate,
    scaling_test, tail_from_values, MgCellReport, MgfEstimate, DEFAULT_BATCHES,
};
use crate::measure::{Functionals, FunctionalsRow};
use crate::rng::StreamKey;
use crate::tess::Tessellation;
use crate::verify::{run_suite, verify_tessellation, CheckReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;

/// Version of the CSV and JSON output layouts.
pub const OUTPUT_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "tessmc", version, about = "Random tessellation sampling, moment estimation and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one realization and write tessellation.json and functionals.csv.
    Sample {
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// Exponential moments with batch-means intervals: mgf.csv, plot_*.csv, summary.json.
    Estimate,
    /// Exceedance probabilities at the configured thresholds: tail.csv.
    Tail,
    /// Run the check suite, or check interchange files: checks.csv.
    Verify {
        /// Interchange files to check instead of running the suite.
        #[arg(long)]
        input: Vec<PathBuf>,
    },
    /// Two-sample KS test of the Delaunay scaling relation: scaling.csv.
    ScalingTest,
    /// Manhattan-grid cell-count series: series.csv, series.json.
    Series,
    /// Void and annulus-count surrogates: probe.csv.
    ProbeAssumptions,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Uncertified(_) | Error::WindowTooSmall(_) | Error::EmptySample(_) | Error::UncoveredTarget(_) => {
            EXIT_UNCERTIFIED
        }
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` (including the program name), runs, and returns the exit status.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::from_toml("")?,
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    fs::create_dir_all(&cfg.out)?;
    pool.install(|| match &cli.command {
        Command::Sample { stream } => cmd_sample(&cfg, *stream),
        Command::Estimate => cmd_estimate(&cfg),
        Command::Tail => cmd_tail(&cfg),
        Command::Verify { input } => cmd_verify(&cfg, input),
        Command::ScalingTest => cmd_scaling(&cfg),
        Command::Series => cmd_series(&cfg),
        Command::ProbeAssumptions => cmd_probe(&cfg),
    })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    info!("wrote {}", path.display());
    Ok(())
}

pub fn cmd_sample(cfg: &RunConfig, stream: u64) -> Result<i32> {
    let spec = cfg.spec()?;
    let key = StreamKey::new(cfg.seed, stream);
    let (t, _) = build_certified(spec, &cfg.target(), &key, &cfg.build)?;
    let f = Functionals::of(&t)?;
    fs::write(cfg.out.join("tessellation.json"), t.to_json()? + "\n")?;
    write_csv(&cfg.out.join("functionals.csv"), &[FunctionalsRow::new(&key, &t, &f)])?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct MgfRow<'a> {
    functional: &'a str,
    alpha: f64,
    mean: f64,
    log_mean: f64,
    se: f64,
    ci_low: f64,
    ci_high: f64,
    n: usize,
    batches: usize,
}

#[derive(Serialize)]
struct PlotRow {
    x: f64,
    y: f64,
    ci_low: f64,
    ci_high: f64,
}

#[derive(Serialize)]
struct EstimateSummary<'a> {
    output_version: u32,
    config_sha256: String,
    seed: u64,
    n: usize,
    retried: usize,
    kind: &'a str,
    estimates: Vec<FunctionalEstimates<'a>>,
}

#[derive(Serialize)]
struct FunctionalEstimates<'a> {
    functional: &'a str,
    mgf: Vec<MgfEstimate>,
}

pub fn cmd_estimate(cfg: &RunConfig) -> Result<i32> {
    let spec = cfg.spec()?;
    let e = &cfg.estimate;
    let reps = replicate(spec, &cfg.target(), &e.functionals, e.n, cfg.seed, &cfg.build)?;
    if reps.retried > 0 {
        warn!("{} replications needed a doubled window cap", reps.retried);
    }
    let mut rows = Vec::new();
    let mut estimates = Vec::new();
    for f in &e.functionals {
        let est = mgf_from_values(&reps.column(*f).unwrap(), &e.alphas, DEFAULT_BATCHES)?;
        rows.extend(est.iter().map(|m| MgfRow {
            functional: f.as_str(),
            alpha: m.alpha,
            mean: m.mean,
            log_mean: m.log_mean,
            se: m.se,
            ci_low: m.ci_low,
            ci_high: m.ci_high,
            n: m.n,
            batches: m.batches,
        }));
        let plot: Vec<PlotRow> =
            est.iter().map(|m| PlotRow { x: m.alpha, y: m.mean, ci_low: m.ci_low, ci_high: m.ci_high }).collect();
        write_csv(&cfg.out.join(format!("plot_{}.csv", f.as_str())), &plot)?;
        estimates.push(FunctionalEstimates { functional: f.as_str(), mgf: est });
    }
    write_csv(&cfg.out.join("mgf.csv"), &rows)?;
    let summary = EstimateSummary {
        output_version: OUTPUT_VERSION,
        config_sha256: cfg.hash()?,
        seed: cfg.seed,
        n: e.n,
        retried: reps.retried,
        kind: spec.kind().as_str(),
        estimates,
    };
    write_json(&cfg.out.join("summary.json"), &summary)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TailRow<'a> {
    functional: &'a str,
    threshold: f64,
    p: f64,
    log_p: f64,
    ci_low: f64,
    ci_high: f64,
    n: usize,
}

pub fn cmd_tail(cfg: &RunConfig) -> Result<i32> {
    let spec = cfg.spec()?;
    let e = &cfg.estimate;
    if e.thresholds.is_empty() {
        return Err(Error::Config("estimate.thresholds is empty".into()));
    }
    let reps = replicate(spec, &cfg.target(), &e.functionals, e.n, cfg.seed, &cfg.build)?;
    let mut rows = Vec::new();
    for f in &e.functionals {
        for t in tail_from_values(&reps.column(*f).unwrap(), &e.thresholds) {
            rows.push(TailRow {
                functional: f.as_str(),
                threshold: t.threshold,
                p: t.p,
                log_p: t.log_p,
                ci_low: t.ci_low,
                ci_high: t.ci_high,
                n: t.n,
            });
        }
    }
    write_csv(&cfg.out.join("tail.csv"), &rows)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CheckRow {
    source: String,
    check_name: String,
    realizations: usize,
    violations: usize,
    vacuous: usize,
    worst_margin: f64,
    first_violation: Option<String>,
}

impl CheckRow {
    fn new(source: &str, r: CheckReport) -> Self {
        CheckRow {
            source: source.to_string(),
            check_name: r.check_name,
            realizations: r.realizations,
            violations: r.violations,
            vacuous: r.vacuous,
            worst_margin: r.worst_margin,
            first_violation: r.first_violation,
        }
    }
}

pub fn cmd_verify(cfg: &RunConfig, inputs: &[PathBuf]) -> Result<i32> {
    let files: Vec<&PathBuf> =
        if inputs.is_empty() { cfg.verify.inputs.iter().collect() } else { inputs.iter().collect() };
    let mut rows = Vec::new();
    if files.is_empty() {
        let reports = run_suite(&cfg.verify.checks, &cfg.verify.suite(cfg.seed), &cfg.build)?;
        rows.extend(reports.into_iter().map(|r| CheckRow::new("suite", r)));
    } else {
        for path in files {
            let text = fs::read_to_string(path)?;
            let t = Tessellation::from_json(&text).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                other => other,
            })?;
            let label = path.display().to_string();
            rows.extend(verify_tessellation(&t, &label)?.into_iter().map(|r| CheckRow::new(&label, r)));
        }
    }
    write_csv(&cfg.out.join("checks.csv"), &rows)?;
    let failed: Vec<&CheckRow> = rows.iter().filter(|r| r.violations > 0).collect();
    for r in &failed {
        eprintln!("violation in {} ({}): {}", r.check_name, r.source, r.first_violation.as_deref().unwrap_or(""));
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct ScalingRow {
    lambda: f64,
    r: f64,
    n: usize,
    statistic: f64,
    p_value: f64,
    passed: bool,
}

/// Seed of the second sample in the scaling test.
pub fn scaling_second_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

pub fn cmd_scaling(cfg: &RunConfig) -> Result<i32> {
    let s = &cfg.scaling;
    let rep = scaling_test(s.lambda, s.r, s.n, (cfg.seed, scaling_second_seed(cfg.seed)), &cfg.build)?;
    let passed = rep.ks.p_value > s.level;
    write_csv(
        &cfg.out.join("scaling.csv"),
        &[ScalingRow {
            lambda: rep.lambda,
            r: rep.r,
            n: rep.n,
            statistic: rep.ks.statistic,
            p_value: rep.ks.p_value,
            passed,
        }],
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct SeriesRow {
    k: usize,
    log_term: f64,
    log_partial_sum: f64,
}

#[derive(Serialize)]
struct SeriesSummary {
    output_version: u32,
    alpha: f64,
    lambda: f64,
    diverged_at: Option<usize>,
    increasing_from: Option<usize>,
    empirical: Option<MgCellReport>,
}

pub fn cmd_series(cfg: &RunConfig) -> Result<i32> {
    let s = &cfg.series;
    let rep = mg_divergence_series(s.alpha, s.lambda, s.k_max)?;
    let rows: Vec<SeriesRow> = rep
        .log_terms
        .iter()
        .zip(&rep.log_partial_sums)
        .enumerate()
        .map(|(k, (t, p))| SeriesRow { k, log_term: *t, log_partial_sum: *p })
        .collect();
    write_csv(&cfg.out.join("series.csv"), &rows)?;
    let empirical = if s.empirical_n > 0 {
        Some(empirical_mg_cell_mgf(s.alpha, s.lambda, s.empirical_n, cfg.seed, s.cap)?)
    } else {
        None
    };
    if let Some(m) = &empirical {
        info!("empirical log running means {:?}, largest term share {:.3}", m.log_running_means, m.max_term_share);
    }
    let summary = SeriesSummary {
        output_version: OUTPUT_VERSION,
        alpha: s.alpha,
        lambda: s.lambda,
        diverged_at: rep.diverged_at,
        increasing_from: rep.increasing_from(),
        empirical,
    };
    write_json(&cfg.out.join("series.json"), &summary)?;
    Ok(EXIT_OK)
}

pub fn cmd_probe(cfg: &RunConfig) -> Result<i32> {
    let p = &cfg.probe;
    let rows = probe_assumptions(&p.source, &p.n_values, p.reps, cfg.seed)?;
    write_csv(&cfg.out.join("probe.csv"), &rows)?;
    Ok(EXIT_OK)
}
