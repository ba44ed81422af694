//! Exponential moment of the Manhattan-grid cell count: the exact series and
//! its empirical counterpart.

use serde::Serialize;

use super::log_mean_exp;
use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Region};
use crate::measure::count_cells_v;
use crate::rng::StreamKey;
use crate::tess::{BuildOptions, TessSpec};

/// Threshold for reporting the partial sums as diverged.
pub const DIVERGENCE_LEVEL: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesReport {
    pub alpha: f64,
    pub lambda: f64,
    /// `log a_k` for `k = 0..=k_max`.
    pub log_terms: Vec<f64>,
    /// `log Σ_{j ≤ k} a_j`.
    pub log_partial_sums: Vec<f64>,
    /// First `k` with partial sum above [`DIVERGENCE_LEVEL`].
    pub diverged_at: Option<usize>,
}

impl SeriesReport {
    /// Smallest `k` from which the terms increase up to `k_max`.
    pub fn increasing_from(&self) -> Option<usize> {
        let t = &self.log_terms;
        let mut k = t.len().checked_sub(1)?;
        while k > 0 && t[k] > t[k - 1] {
            k -= 1;
        }
        (k + 1 < t.len()).then_some(k)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Partial sums of `e^{α−2λ} Σ_k exp(αk + λe^{α(k+1)}) λ^k / k!`, the
/// exponential moment of the cell count of a Manhattan grid with axis
/// intensities `λ` meeting the unit square.
pub fn mg_divergence_series(alpha: f64, lambda: f64, k_max: usize) -> Result<SeriesReport> {
    if k_max < 5 {
        return Err(Error::invalid("k_max must be at least 5"));
    }
    if !(lambda > 0.0 && lambda.is_finite() && alpha.is_finite()) {
        return Err(Error::invalid("need lambda > 0 and finite alpha"));
    }
    let mut log_terms = Vec::with_capacity(k_max + 1);
    let mut log_partial_sums = Vec::with_capacity(k_max + 1);
    let mut log_fact = 0.0;
    let mut acc = f64::NEG_INFINITY;
    let mut diverged_at = None;
    for k in 0..=k_max {
        if k > 0 {
            log_fact += (k as f64).ln();
        }
        let kf = k as f64;
        let lt = alpha - 2.0 * lambda + alpha * kf + lambda * (alpha * (kf + 1.0)).exp() + kf * lambda.ln() - log_fact;
        acc = log_add(acc, lt);
        log_terms.push(lt);
        log_partial_sums.push(acc);
        if diverged_at.is_none() && acc > DIVERGENCE_LEVEL.ln() {
            diverged_at = Some(k);
        }
    }
    Ok(SeriesReport { alpha, lambda, log_terms, log_partial_sums, diverged_at })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MgCellReport {
    pub alpha: f64,
    pub lambda: f64,
    pub n: usize,
    pub log_estimate: f64,
    /// Replications with `α·V′` above the cap.
    pub capped: usize,
    /// Log running means at `n/8, n/4, n/2, n`.
    pub log_running_means: Vec<f64>,
    /// Largest single term over the sum of all terms.
    pub max_term_share: f64,
    /// Replications where the cell count differed from `(N_v + 1)(N_h + 1)`.
    pub formula_mismatches: usize,
}

/// Sample mean of `exp(α·V′)` with `V′` the number of cells of a Manhattan
/// grid (both axis intensities `lambda`) meeting the unit square.
pub fn empirical_mg_cell_mgf(alpha: f64, lambda: f64, n: usize, seed: u64, cap: f64) -> Result<MgCellReport> {
    if n == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    let spec = TessSpec::Manhattan { lambda_v: lambda, lambda_h: lambda, palm: false };
    let q = Region::Box(BoxRegion::centered(1.0));
    let opts = BuildOptions::default();
    let mut args = Vec::with_capacity(n);
    let mut mismatches = 0;
    for s in 0..n as u64 {
        let t = spec.build(&q, &StreamKey::new(seed, s), &opts)?;
        let v = count_cells_v(&t, &q)?;
        let (mut nv, mut nh) = (0, 0);
        for e in &t.edges {
            let p = e.geometry.pieces(0.0)[0];
            if p.a.x == p.b.x {
                nv += 1;
            } else {
                nh += 1;
            }
        }
        if v != (nv + 1) * (nh + 1) {
            mismatches += 1;
        }
        args.push(alpha * v as f64);
    }
    let capped = args.iter().filter(|&&a| a > cap).count();
    let log_estimate = log_mean_exp(&args);
    let log_running_means =
        [n / 8, n / 4, n / 2, n].iter().filter(|&&m| m > 0).map(|&m| log_mean_exp(&args[..m])).collect();
    let max = args.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total = log_mean_exp(&args) + (n as f64).ln();
    Ok(MgCellReport {
        alpha,
        lambda,
        n,
        log_estimate,
        capped,
        log_running_means,
        max_term_share: (max - total).exp(),
        formula_mismatches: mismatches,
    })
}
