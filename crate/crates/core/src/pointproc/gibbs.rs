//! Widom–Rowlinson area-interaction process by birth–death Metropolis–Hastings.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PointPattern, Window};
use crate::error::{Error, Result};
use crate::geom::{lattice_uncovered_area, Point2};
use crate::rng::{tag, StreamKey};

/// Parameters of the chain targeting density `∝ λⁿ exp(−γ |∪ B_r(xᵢ)|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsParams {
    pub lambda: f64,
    pub gamma: f64,
    pub r: f64,
    /// Sweeps after burn-in; one sweep is `max(1, round(λ|W|))` proposals.
    pub sweeps: usize,
    pub burn_in: usize,
    /// Lattice cell side for the area increments; defaults to `r / 32`.
    #[serde(default)]
    pub resolution: Option<f64>,
}

impl GibbsParams {
    pub fn new(lambda: f64, gamma: f64, r: f64) -> Self {
        GibbsParams { lambda, gamma, r, sweeps: 100, burn_in: 50, resolution: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("Gibbs lambda must be positive"));
        }
        if !self.gamma.is_finite() {
            return Err(Error::invalid("Gibbs gamma must be finite"));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::invalid("Gibbs r must be positive"));
        }
        if self.sweeps == 0 || self.sweeps <= self.burn_in {
            return Err(Error::invalid("Gibbs sweeps must exceed burn_in"));
        }
        if let Some(h) = self.resolution {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::invalid("Gibbs resolution must be positive"));
            }
        }
        Ok(())
    }

    pub fn lattice_step(&self) -> f64 {
        self.resolution.unwrap_or(self.r / 32.0)
    }

    /// Acceptance probability of adding a point that uncovers area `du` to a
    /// configuration of `n` points in a window of area `area`.
    pub(crate) fn birth_acceptance(&self, n: usize, area: f64, du: f64) -> f64 {
        (self.lambda * area / (n + 1) as f64 * (-self.gamma * du).exp()).min(1.0)
    }

    /// Acceptance probability of removing one of `n` points whose own
    /// uncovered area is `du`.
    pub(crate) fn death_acceptance(&self, n: usize, area: f64, du: f64) -> f64 {
        (n as f64 / (self.lambda * area) * (self.gamma * du).exp()).min(1.0)
    }
}

fn uncovered(params: &GibbsParams, x: Point2, others: impl Iterator<Item = Point2>) -> f64 {
    let reach2 = 4.0 * params.r * params.r;
    let near: Vec<Point2> = others.filter(|o| o.dist2(x) <= reach2).collect();
    lattice_uncovered_area(x, params.r, &near, params.lattice_step())
}

/// Runs a fresh chain from the empty configuration (free boundary) for
/// `burn_in + sweeps` sweeps and returns its final state.
pub fn sample_wr_gibbs(params: &GibbsParams, window: &Window, key: &StreamKey) -> Result<PointPattern> {
    params.validate()?;
    window.validate()?;
    let area = window.area();
    let mut rng = key.child(tag::CHAIN).rng();
    let per_sweep = ((params.lambda * area).round() as usize).max(1);
    let total = per_sweep * (params.burn_in + params.sweeps);
    let mut pts: Vec<Point2> = Vec::new();
    for _ in 0..total {
        let n = pts.len();
        if rng.random::<f64>() < 0.5 {
            let x = window.uniform_point(&mut rng);
            let du = uncovered(params, x, pts.iter().copied());
            if rng.random::<f64>() < params.birth_acceptance(n, area, du) {
                pts.push(x);
            }
        } else if n > 0 {
            let i = rng.random_range(0..n);
            let x = pts[i];
            let du = uncovered(params, x, pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p));
            if rng.random::<f64>() < params.death_acceptance(n, area, du) {
                pts.swap_remove(i);
            }
        }
    }
    Ok(PointPattern {
        points: pts,
        window: *window,
        intensity_hint: params.lambda,
        seed: key.seed(),
        stream: key.stream(),
    })
}
