//! Finite-window surrogates of the void-probability and annulus-count
//! conditions on the driving point process, and the Poisson count calibration.

use rayon::prelude::*;
use serde::Serialize;

use super::{batch_mean, mgf_from_values, BatchMean, MgfEstimate, DEFAULT_BATCHES};
use crate::error::{Error, Result};
use crate::geom::{Disk, Point2};
use crate::pointproc::{sample_ppp, Levels, PointModel, PointSource, Window};
use crate::rng::StreamKey;

/// Width of the annulus `B_{n+4} \ B_n`.
const ANNULUS_WIDTH: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: f64,
    pub reps: usize,
    pub voids: usize,
    /// `−log P̂(void)/|B_n|`; when no void was seen this is the value at
    /// `P̂ = 1/reps`, a lower bound on the estimate.
    pub void_rate: f64,
    pub void_rate_is_bound: bool,
    /// `log Ê[exp(β N)]/|B_{n+4} \ B_n|` for β = 1 and β = 2.
    pub annulus_log_mgf_1: f64,
    pub annulus_log_mgf_2: f64,
    /// Closed forms for Poisson sources.
    pub exact_void_rate: Option<f64>,
    pub exact_annulus_1: Option<f64>,
    pub exact_annulus_2: Option<f64>,
}

/// For each `n`, samples `source` on `B_{n+4}` and records whether `B_n` is
/// empty and the count in `B_{n+4} \ B_n`. With marks, membership uses the
/// Johnson–Mehl ball `|x| + t ≤ r`; areas are always the spatial ones.
pub fn probe_assumptions(source: &PointSource, n_values: &[f64], reps: usize, seed: u64) -> Result<Vec<ProbeRow>> {
    source.validate()?;
    if reps == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    let mut rows = Vec::new();
    for (level, &n) in n_values.iter().enumerate() {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("probe radii must be positive"));
        }
        let outer = n + ANNULUS_WIDTH;
        let obs: Vec<Result<(bool, f64)>> = (0..reps as u64)
            .into_par_iter()
            .map(|s| {
                let key = StreamKey::new(seed, level as u64 * reps as u64 + s);
                let sample = source.sample_levels(&Levels::disks(vec![outer]), &key)?;
                let radius = |k: usize, p: Point2| p.norm() + sample.marks.as_ref().map_or(0.0, |m| m[k]);
                let pts = &sample.pattern.points;
                let void = !pts.iter().enumerate().any(|(k, p)| radius(k, *p) <= n);
                let ann = pts
                    .iter()
                    .enumerate()
                    .filter(|(k, p)| {
                        let r = radius(*k, **p);
                        r > n && r <= outer
                    })
                    .count();
                Ok((void, ann as f64))
            })
            .collect();
        let obs: Vec<(bool, f64)> = obs.into_iter().collect::<Result<_>>()?;
        let voids = obs.iter().filter(|o| o.0).count();
        let ball = std::f64::consts::PI * n * n;
        let ann_area = std::f64::consts::PI * (outer * outer - n * n);
        let p = voids.max(1) as f64 / reps as f64;
        let counts: Vec<f64> = obs.iter().map(|o| o.1).collect();
        let lme = |beta: f64| {
            let a: Vec<f64> = counts.iter().map(|c| beta * c).collect();
            super::log_mean_exp(&a) / ann_area
        };
        let lambda = match (&source.model, source.marks.is_none() && !source.palm) {
            (PointModel::Poisson { lambda }, true) => Some(*lambda),
            _ => None,
        };
        rows.push(ProbeRow {
            n,
            reps,
            voids,
            void_rate: -p.ln() / ball,
            void_rate_is_bound: voids == 0,
            annulus_log_mgf_1: lme(1.0),
            annulus_log_mgf_2: lme(2.0),
            exact_void_rate: lambda,
            exact_annulus_1: lambda.map(|l| l * (1f64.exp() - 1.0)),
            exact_annulus_2: lambda.map(|l| l * (2f64.exp() - 1.0)),
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountCalibration {
    pub lambda: f64,
    pub radius: f64,
    /// Estimates of `E[exp(β N)]`, one per β.
    pub count_mgf: Vec<MgfEstimate>,
    pub exact_count_mgf: Vec<f64>,
    /// Estimate of `P(N = 0)` as a mean of indicators.
    pub void: BatchMean,
    pub exact_void: f64,
}

/// Poisson counts `N` in the disk of `radius`: empirical exponential moments
/// and void probability against `exp((e^β − 1)λ|B|)` and `exp(−λ|B|)`.
pub fn count_calibration(lambda: f64, radius: f64, betas: &[f64], n: usize, seed: u64) -> Result<CountCalibration> {
    let window = Window::Disk(Disk::centered(radius));
    let counts: Vec<Result<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|s| Ok(sample_ppp(lambda, &window, &StreamKey::new(seed, s))?.len() as f64))
        .collect();
    let counts: Vec<f64> = counts.into_iter().collect::<Result<_>>()?;
    let area = window.area();
    let count_mgf = mgf_from_values(&counts, betas, DEFAULT_BATCHES)?;
    let indicators: Vec<f64> = counts.iter().map(|&c| f64::from(u8::from(c == 0.0))).collect();
    let void = batch_mean(&indicators, DEFAULT_BATCHES)?;
    Ok(CountCalibration {
        lambda,
        radius,
        exact_count_mgf: betas.iter().map(|b| ((b.exp() - 1.0) * lambda * area).exp()).collect(),
        count_mgf,
        void,
        exact_void: (-lambda * area).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::CoxModel;
    use crate::pointproc::RadiusLaw;

    #[test]
    fn poisson_void_rate_matches_closed_form() {
        let src = PointSource::new(PointModel::Poisson { lambda: 0.1 });
        let rows = probe_assumptions(&src, &[2.0], 4000, 9).unwrap();
        let r = &rows[0];
        let p = r.voids as f64 / r.reps as f64;
        let se = (p * (1.0 - p) / r.reps as f64).sqrt() / (p * std::f64::consts::PI * 4.0);
        assert!((r.void_rate - 0.1).abs() < 3.0 * se, "{} vs 0.1 (se {se})", r.void_rate);
    }

    #[test]
    fn degenerate_modulation_matches_poisson() {
        let cox = PointSource::new(PointModel::Cox(CoxModel::Modulated {
            lambda_in: 0.2,
            lambda_out: 0.2,
            germ_intensity: 0.5,
            radius: RadiusLaw::Fixed { r: 0.5 },
        }));
        let ppp = PointSource::new(PointModel::Poisson { lambda: 0.2 });
        let a = &probe_assumptions(&cox, &[1.0], 3000, 4).unwrap()[0];
        let b = &probe_assumptions(&ppp, &[1.0], 3000, 5).unwrap()[0];
        let (pa, pb) = (a.voids as f64 / 3000.0, b.voids as f64 / 3000.0);
        let se = (pa * (1.0 - pa) / 3000.0 + pb * (1.0 - pb) / 3000.0).sqrt();
        assert!((pa - pb).abs() < 4.0 * se);
    }

    #[test]
    fn count_calibration_small_run() {
        let c = count_calibration(1.0, 1.0, &[0.0, 0.2], 4000, 2).unwrap();
        assert_eq!(c.count_mgf[0].mean, 1.0);
        assert!((c.count_mgf[1].mean - c.exact_count_mgf[1]).abs() < 4.0 * c.count_mgf[1].se);
        assert!((c.void.mean - c.exact_void).abs() < 4.0 * c.void.se.max(1e-3));
    }
}
