//! Two-sample Kolmogorov–Smirnov test and the Delaunay scaling test built on it.

use rand::Rng;
use serde::Serialize;

use super::{replicate, Functional};
use crate::error::{Error, Result};
use crate::geom::{Disk, Region};
use crate::pointproc::{PointModel, PointSource};
use crate::rng::StreamKey;
use crate::tess::{BuildOptions, TessSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

/// Kolmogorov distribution tail `P(K > x)`.
fn kolmogorov_q(x: f64) -> f64 {
    if x < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample statistic `sup |F₁ − F₂|` and its asymptotic p-value with
/// the Stephens small-sample correction.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::NoPoints);
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::invalid("samples contain NaN"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n1 && j < n2 {
        let v = x[i].min(y[j]);
        while i < n1 && x[i] == v {
            i += 1;
        }
        while j < n2 && y[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let en = ((n1 * n2) as f64 / (n1 + n2) as f64).sqrt();
    let p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    Ok(KsReport { statistic: d, p_value, n1, n2 })
}

/// Fraction of `runs` null comparisons (two uniform samples of size `n`)
/// rejected at level 0.05.
pub fn ks_calibration(runs: usize, n: usize, seed: u64) -> Result<f64> {
    let mut rejected = 0;
    for r in 0..runs as u64 {
        let mut rng = StreamKey::new(seed, r).rng();
        let a: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        if ks_two_sample(&a, &b)?.p_value < 0.05 {
            rejected += 1;
        }
    }
    Ok(rejected as f64 / runs as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub lambda: f64,
    pub r: f64,
    pub n: usize,
    pub ks: KsReport,
}

/// Compares Poisson–Delaunay edge length in the unit disk at intensity
/// `lambda` with the length in the disk of radius `r` at intensity
/// `lambda / r²`, divided by `r`. The two samples use seeds `seeds.0` and
/// `seeds.1`.
pub fn scaling_test(lambda: f64, r: f64, n: usize, seeds: (u64, u64), opts: &BuildOptions) -> Result<ScalingReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("scale must be positive"));
    }
    let dt = |l: f64| TessSpec::Delaunay { source: PointSource::new(PointModel::Poisson { lambda: l }) };
    let unit = replicate(&dt(lambda), &Region::Disk(Disk::centered(1.0)), &[Functional::Length], n, seeds.0, opts)?;
    let scaled =
        replicate(&dt(lambda / (r * r)), &Region::Disk(Disk::centered(r)), &[Functional::Length], n, seeds.1, opts)?;
    let a = unit.column(Functional::Length).unwrap();
    let b: Vec<f64> = scaled.column(Functional::Length).unwrap().iter().map(|v| v / r).collect();
    Ok(ScalingReport { lambda, r, n, ks: ks_two_sample(&a, &b)? })
}
