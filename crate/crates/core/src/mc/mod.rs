//! Replicated estimation: exponential moments with batch-means intervals,
//! tails, distribution tests and the exact Manhattan-grid series.

mod ks;
mod probe;
mod series;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Region;
use crate::measure::{count_cells_v, count_edges_w, count_lines_winf, total_edge_length};
use crate::rng::StreamKey;
use crate::tess::{BuildOptions, TessSpec, Tessellation};

pub use ks::{ks_calibration, ks_two_sample, scaling_test, KsReport, ScalingReport};
pub use probe::{count_calibration, probe_assumptions, CountCalibration, ProbeRow};
pub use series::{empirical_mg_cell_mgf, mg_divergence_series, MgCellReport, SeriesReport};

/// Default number of batches for batch-means intervals.
pub const DEFAULT_BATCHES: usize = 20;

/// Two-sided 97.5% Student quantile with 19 degrees of freedom.
const T_19: f64 = 2.093;

/// Smallest replication count accepted by the estimators.
pub const MIN_REPLICATIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// Total edge length in the target.
    Length,
    /// Number of edges meeting the target.
    W,
    /// Number of cells meeting the target.
    V,
    /// Number of lines meeting the target (line tessellations).
    WInf,
}

impl Functional {
    pub fn as_str(&self) -> &'static str {
        match self {
            Functional::Length => "length",
            Functional::W => "w",
            Functional::V => "v",
            Functional::WInf => "w_inf",
        }
    }

    pub fn evaluate(&self, t: &Tessellation, d: &Region) -> Result<f64> {
        Ok(match self {
            Functional::Length => total_edge_length(t, d)?,
            Functional::W => count_edges_w(t, d)? as f64,
            Functional::V => count_cells_v(t, d)? as f64,
            Functional::WInf => count_lines_winf(t, d)? as f64,
        })
    }
}

/// Builds replication `stream`, retrying once with a doubled window cap when
/// the first attempt is uncertified.
pub fn build_certified(
    spec: &TessSpec,
    target: &Region,
    key: &StreamKey,
    opts: &BuildOptions,
) -> Result<(Tessellation, bool)> {
    let t = spec.build(target, key, opts)?;
    if t.certified {
        return Ok((t, false));
    }
    warn!("stream {} uncertified, retrying with a doubled window cap", key.stream());
    let t = spec.build(target, key, &opts.with_doubled_cap())?;
    if t.certified {
        Ok((t, true))
    } else {
        Err(Error::Uncertified(format!("replication {} after retry", key.stream())))
    }
}

/// Functional values of replications `0..n` (streams of `seed`), in stream
/// order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Replications {
    pub values: Vec<Vec<f64>>,
    pub functionals: Vec<Functional>,
    pub retried: usize,
}

impl Replications {
    pub fn column(&self, f: Functional) -> Option<Vec<f64>> {
        let k = self.functionals.iter().position(|g| *g == f)?;
        Some(self.values.iter().map(|row| row[k]).collect())
    }
}

pub fn replicate(
    spec: &TessSpec,
    target: &Region,
    functionals: &[Functional],
    n: usize,
    seed: u64,
    opts: &BuildOptions,
) -> Result<Replications> {
    spec.validate()?;
    let rows: Vec<Result<(Vec<f64>, bool)>> = (0..n as u64)
        .into_par_iter()
        .map(|s| {
            let (t, retried) = build_certified(spec, target, &StreamKey::new(seed, s), opts)?;
            let vals = functionals.iter().map(|f| f.evaluate(&t, target)).collect::<Result<Vec<f64>>>()?;
            Ok((vals, retried))
        })
        .collect();
    let mut values = Vec::with_capacity(n);
    let mut retried = 0;
    for r in rows {
        let (v, re) = r?;
        retried += usize::from(re);
        values.push(v);
    }
    Ok(Replications { values, functionals: functionals.to_vec(), retried })
}

/// `log(mean(exp(x)))`, stable for large arguments.
pub fn log_mean_exp(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + s.ln() - (xs.len() as f64).ln()
}

/// Contiguous batch boundaries of sizes differing by at most one.
fn batch_ranges(n: usize, batches: usize) -> Vec<std::ops::Range<usize>> {
    (0..batches).map(|k| (k * n / batches)..((k + 1) * n / batches)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchMean {
    pub mean: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
    pub batches: usize,
}

/// Sample mean with a batch-means interval.
pub fn batch_mean(values: &[f64], batches: usize) -> Result<BatchMean> {
    if batches < 2 || values.len() < batches {
        return Err(Error::invalid("need at least two batches and one value per batch"));
    }
    let means: Vec<f64> = batch_ranges(values.len(), batches)
        .into_iter()
        .map(|r| values[r.clone()].iter().sum::<f64>() / r.len() as f64)
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let bm = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - bm) * (x - bm)).sum::<f64>() / (batches - 1) as f64;
    let se = (var / batches as f64).sqrt();
    Ok(BatchMean { mean, se, ci_low: mean - T_19 * se, ci_high: mean + T_19 * se, n: values.len(), batches })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MgfEstimate {
    pub alpha: f64,
    pub mean: f64,
    pub log_mean: f64,
    /// Batch-means standard error.
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
    pub batches: usize,
}

/// Sample mean of `exp(α·v)` with a batch-means interval, for each α on the
/// shared sample `values`.
pub fn mgf_from_values(values: &[f64], alphas: &[f64], batches: usize) -> Result<Vec<MgfEstimate>> {
    if batches < 2 || values.len() < batches {
        return Err(Error::invalid("need at least two batches and one value per batch"));
    }
    if let Some(a) = alphas.iter().find(|a| !a.is_finite()) {
        return Err(Error::invalid(format!("alpha must be finite, got {a}")));
    }
    let ranges = batch_ranges(values.len(), batches);
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let args: Vec<f64> = values.iter().map(|v| if alpha == 0.0 { 0.0 } else { alpha * v }).collect();
            let log_mean = log_mean_exp(&args);
            let logs: Vec<f64> = ranges.iter().map(|r| log_mean_exp(&args[r.clone()])).collect();
            // Batch means relative to the overall mean, so overflow only hits the final scale.
            let rel: Vec<f64> = logs.iter().map(|l| (l - log_mean).exp()).collect();
            let rm = rel.iter().sum::<f64>() / batches as f64;
            let var = rel.iter().map(|x| (x - rm) * (x - rm)).sum::<f64>() / (batches - 1) as f64;
            let scale = log_mean.exp();
            let se = scale * (var / batches as f64).sqrt();
            let mean = scale;
            MgfEstimate {
                alpha,
                mean,
                log_mean,
                se,
                ci_low: mean - T_19 * se,
                ci_high: mean + T_19 * se,
                n: values.len(),
                batches,
            }
        })
        .collect())
}

/// Exponential moments of `functional` over `n` certified replications.
pub fn estimate_mgf(
    spec: &TessSpec,
    target: &Region,
    functional: Functional,
    alphas: &[f64],
    n: usize,
    seed: u64,
    opts: &BuildOptions,
) -> Result<Vec<MgfEstimate>> {
    if n < MIN_REPLICATIONS {
        return Err(Error::invalid(format!("need at least {MIN_REPLICATIONS} replications")));
    }
    let reps = replicate(spec, target, &[functional], n, seed, opts)?;
    mgf_from_values(&reps.column(functional).unwrap(), alphas, DEFAULT_BATCHES)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub threshold: f64,
    /// Empirical `P(value ≥ threshold)`.
    pub p: f64,
    pub log_p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

/// Empirical exceedance probabilities with normal-approximation intervals.
pub fn tail_from_values(values: &[f64], thresholds: &[f64]) -> Vec<TailEstimate> {
    let n = values.len();
    thresholds
        .iter()
        .map(|&t| {
            let k = values.iter().filter(|&&v| v >= t).count();
            let p = if n == 0 { 0.0 } else { k as f64 / n as f64 };
            let half = 1.96 * (p * (1.0 - p) / n.max(1) as f64).sqrt();
            TailEstimate {
                threshold: t,
                p,
                log_p: p.ln(),
                ci_low: (p - half).max(0.0),
                ci_high: (p + half).min(1.0),
                n,
            }
        })
        .collect()
}

pub fn estimate_tail(
    spec: &TessSpec,
    target: &Region,
    functional: Functional,
    thresholds: &[f64],
    n: usize,
    seed: u64,
    opts: &BuildOptions,
) -> Result<Vec<TailEstimate>> {
    let reps = replicate(spec, target, &[functional], n, seed, opts)?;
    Ok(tail_from_values(&reps.column(functional).unwrap(), thresholds))
}
