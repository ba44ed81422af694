//! Poisson line processes and Poisson processes on the coordinate axes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::poisson_count;
use crate::error::{Error, Result};
use crate::geom::LineRT;
use crate::rng::{tag, StreamKey};

/// Lines `{x : x·(cos θ, sin θ) = ρ}` with `|ρ| ≤ rho_max`, `θ ∈ [0, π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineProcessSample {
    pub lines: Vec<LineRT>,
    pub rho_max: f64,
    pub intensity: f64,
}

/// Sorted Poisson points on an interval of a coordinate axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSample {
    pub coords: Vec<f64>,
    pub interval: (f64, f64),
    pub intensity: f64,
}

impl AxisSample {
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        self.coords.iter().filter(|&&c| c >= lo && c <= hi).count()
    }
}

/// Poisson process of intensity `lambda` on `[−rho_max, rho_max] × [0, π)`.
pub fn sample_line_process(lambda: f64, rho_max: f64, key: &StreamKey) -> Result<LineProcessSample> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("line intensity must be finite and nonnegative"));
    }
    if !(rho_max >= 1.0 && rho_max.is_finite()) {
        return Err(Error::invalid(format!("rho_max must be at least 1, got {rho_max}")));
    }
    let mut rng = key.child(tag::LINES).rng();
    let n = poisson_count(lambda * 2.0 * rho_max * std::f64::consts::PI, &mut rng);
    let lines = (0..n)
        .map(|_| {
            let rho = rho_max * (2.0 * rng.random::<f64>() - 1.0);
            let theta = std::f64::consts::PI * rng.random::<f64>();
            LineRT::new(rho, theta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LineProcessSample { lines, rho_max, intensity: lambda })
}

/// Palm line process: the base sample plus the line `ρ = 0` with an
/// independent uniform angle, appended last.
pub fn palm_line_process(lambda: f64, rho_max: f64, key: &StreamKey) -> Result<LineProcessSample> {
    let mut s = sample_line_process(lambda, rho_max, key)?;
    let phi = std::f64::consts::PI * key.child(tag::PALM).rng().random::<f64>();
    s.lines.push(LineRT::new(0.0, phi)?);
    Ok(s)
}

/// Poisson process of intensity `lambda` on `[lo, hi]`, sorted.
pub fn sample_axis_poisson(lambda: f64, interval: (f64, f64), key: &StreamKey) -> Result<AxisSample> {
    let (lo, hi) = interval;
    if !(hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid(format!("empty axis interval [{lo}, {hi}]")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("axis intensity must be finite and nonnegative"));
    }
    let mut rng = key.rng();
    let n = poisson_count(lambda * (hi - lo), &mut rng);
    let mut coords: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    coords.sort_by(f64::total_cmp);
    Ok(AxisSample { coords, interval, intensity: lambda })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MgAxis {
    Vertical,
    Horizontal,
}

/// Palm Manhattan grid: independent axis processes, with `0` added to the
/// horizontal axis process (a horizontal line through the origin) with
/// probability `λ_h / (λ_h + λ_v)` and to the vertical one otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PalmMgSample {
    pub vertical: AxisSample,
    pub horizontal: AxisSample,
    pub chosen: MgAxis,
}

pub fn palm_mg(lambda_v: f64, lambda_h: f64, interval: (f64, f64), key: &StreamKey) -> Result<PalmMgSample> {
    if !(lambda_v > 0.0 && lambda_h > 0.0) {
        return Err(Error::invalid("Palm Manhattan grid needs positive axis intensities"));
    }
    let mut vertical = sample_axis_poisson(lambda_v, interval, &key.child(tag::AXIS_V))?;
    let mut horizontal = sample_axis_poisson(lambda_h, interval, &key.child(tag::AXIS_H))?;
    let u = key.child(tag::BRANCH).rng().random::<f64>();
    let chosen = if u < lambda_h / (lambda_h + lambda_v) { MgAxis::Horizontal } else { MgAxis::Vertical };
    let target = match chosen {
        MgAxis::Horizontal => &mut horizontal,
        MgAxis::Vertical => &mut vertical,
    };
    let pos = target.coords.partition_point(|&c| c < 0.0);
    target.coords.insert(pos, 0.0);
    Ok(PalmMgSample { vertical, horizontal, chosen })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_process_basics() {
        assert!(sample_line_process(0.0, 2.0, &StreamKey::new(1, 0)).unwrap().lines.is_empty());
        let n = 100_000;
        let mut sum = 0.0;
        for s in 0..n {
            let l = sample_line_process(1.0, 2.0, &StreamKey::new(31, s)).unwrap();
            assert!(l.lines.iter().all(|x| x.theta >= 0.0 && x.theta < std::f64::consts::PI && x.rho.abs() <= 2.0));
            sum += l.lines.iter().filter(|x| x.rho.abs() <= 1.0).count() as f64;
        }
        let mean = sum / n as f64;
        let want = 2.0 * std::f64::consts::PI;
        assert!((mean - want).abs() < 3.0 * (want / n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn palm_line_has_origin_line() {
        let n = 20_000;
        let mut sum = 0.0;
        for s in 0..n {
            let l = palm_line_process(0.5, 1.0, &StreamKey::new(3, s)).unwrap();
            let last = l.lines.last().unwrap();
            assert_eq!(last.rho, 0.0);
            sum += last.theta;
        }
        let mean = sum / n as f64;
        let se = std::f64::consts::PI / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - std::f64::consts::FRAC_PI_2).abs() < 3.0 * se);
    }

    #[test]
    fn axis_mgf_matches_closed_form() {
        let (beta, lambda, len) = (0.5_f64, 1.0, 2.0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n)
            .map(|s| {
                let a = sample_axis_poisson(lambda, (-1.0, 1.0), &StreamKey::new(6, s)).unwrap();
                assert!(a.coords.windows(2).all(|w| w[0] <= w[1]));
                (beta * a.coords.len() as f64).exp()
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let want = ((beta.exp() - 1.0) * lambda * len).exp();
        assert!((mean - want).abs() < 3.0 * (var / n as f64).sqrt(), "{mean} vs {want}");
        assert!(sample_axis_poisson(0.0, (0.0, 1.0), &StreamKey::new(1, 1)).unwrap().coords.is_empty());
    }

    #[test]
    fn palm_mg_branch_frequencies() {
        for (lv, lh, p) in [(1.0, 1.0, 0.5), (1.0, 3.0, 0.75)] {
            let n = 100_000;
            let mut hits = 0usize;
            for s in 0..n {
                let m = palm_mg(lv, lh, (-0.5, 0.5), &StreamKey::new(41, s)).unwrap();
                let zv = m.vertical.coords.contains(&0.0);
                let zh = m.horizontal.coords.contains(&0.0);
                assert!(zv ^ zh);
                hits += usize::from(m.chosen == MgAxis::Horizontal);
            }
            let f = hits as f64 / n as f64;
            assert!((f - p).abs() < 3.0 * (p * (1.0 - p) / n as f64).sqrt(), "{f} vs {p}");
        }
    }
}
