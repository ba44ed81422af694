//! Cox processes driven by a Boolean model or a shot-noise field, sampled by
//! thinning a dominating Poisson process.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{poisson_count, ppp_points, Levels, PointPattern, Window};
use crate::error::{Error, Result};
use crate::geom::index::PointIndex;
use crate::geom::{BoxRegion, Point2};
use crate::rng::{tag, StreamKey};

/// Law of the germ radii of a Boolean model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusLaw {
    Fixed { r: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl RadiusLaw {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadiusLaw::Fixed { r } => r >= 0.0 && r.is_finite(),
            RadiusLaw::Uniform { lo, hi } => lo >= 0.0 && hi >= lo && hi.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid radius law {self:?}")))
        }
    }

    fn max(&self) -> f64 {
        match *self {
            RadiusLaw::Fixed { r } => r,
            RadiusLaw::Uniform { hi, .. } => hi,
        }
    }

    fn mean_square(&self) -> f64 {
        match *self {
            RadiusLaw::Fixed { r } => r * r,
            RadiusLaw::Uniform { lo, hi } => (lo * lo + lo * hi + hi * hi) / 3.0,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RadiusLaw::Fixed { r } => r,
            RadiusLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        }
    }
}

/// Nonnegative, bounded, compactly supported radial kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Kernel {
    /// `height · 1{|x| ≤ radius}`.
    Indicator { height: f64, radius: f64 },
    /// `height · max(0, 1 − |x| / radius)`.
    Cone { height: f64, radius: f64 },
}

impl Kernel {
    fn parts(&self) -> (f64, f64) {
        match *self {
            Kernel::Indicator { height, radius } | Kernel::Cone { height, radius } => (height, radius),
        }
    }

    fn validate(&self) -> Result<()> {
        let (height, radius) = self.parts();
        if height.is_infinite() {
            return Err(Error::UnboundedKernel);
        }
        if !(height >= 0.0) {
            return Err(Error::invalid("kernel height must be nonnegative"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("kernel support radius must be positive and finite"));
        }
        Ok(())
    }

    pub fn support(&self) -> f64 {
        self.parts().1
    }

    pub fn max_value(&self) -> f64 {
        self.parts().0
    }

    pub fn eval(&self, dist: f64) -> f64 {
        match *self {
            Kernel::Indicator { height, radius } => {
                if dist <= radius {
                    height
                } else {
                    0.0
                }
            }
            Kernel::Cone { height, radius } => height * (1.0 - dist / radius).max(0.0),
        }
    }

    pub fn integral(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Kernel::Indicator { height, radius } => height * PI * radius * radius,
            Kernel::Cone { height, radius } => height * PI * radius * radius / 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoxModel {
    /// Intensity `lambda_in` on a Boolean model of disks, `lambda_out` elsewhere.
    Modulated { lambda_in: f64, lambda_out: f64, germ_intensity: f64, radius: RadiusLaw },
    /// Intensity `Σ_g κ(x − g)` over a Poisson germ process.
    ShotNoise { germ_intensity: f64, kernel: Kernel },
}

impl CoxModel {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |x: f64, what: &str| {
            if x >= 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be finite and nonnegative, got {x}")))
            }
        };
        match self {
            CoxModel::Modulated { lambda_in, lambda_out, germ_intensity, radius } => {
                nonneg(*lambda_in, "lambda_in")?;
                nonneg(*lambda_out, "lambda_out")?;
                nonneg(*germ_intensity, "germ_intensity")?;
                radius.validate()
            }
            CoxModel::ShotNoise { germ_intensity, kernel } => {
                nonneg(*germ_intensity, "germ_intensity")?;
                kernel.validate()
            }
        }
    }

    /// Range of influence of a germ.
    fn reach(&self) -> f64 {
        match self {
            CoxModel::Modulated { radius, .. } => radius.max(),
            CoxModel::ShotNoise { kernel, .. } => kernel.support(),
        }
    }

    fn germ_intensity(&self) -> f64 {
        match self {
            CoxModel::Modulated { germ_intensity, .. } | CoxModel::ShotNoise { germ_intensity, .. } => *germ_intensity,
        }
    }

    pub fn mean_intensity(&self) -> f64 {
        match self {
            CoxModel::Modulated { lambda_in, lambda_out, germ_intensity, radius } => {
                let covered = 1.0 - (-germ_intensity * std::f64::consts::PI * radius.mean_square()).exp();
                lambda_in * covered + lambda_out * (1.0 - covered)
            }
            CoxModel::ShotNoise { germ_intensity, kernel } => germ_intensity * kernel.integral(),
        }
    }
}

/// Germs sampled so far, with their radii for the Boolean model.
struct Germs {
    points: Vec<Point2>,
    radii: Vec<f64>,
    index: PointIndex,
}

impl Germs {
    fn new() -> Self {
        Germs { points: Vec::new(), radii: Vec::new(), index: PointIndex::new(&[]) }
    }

    fn add(&mut self, model: &CoxModel, window: &Window, key: &StreamKey) {
        let pts = ppp_points(model.germ_intensity(), window, key);
        if let CoxModel::Modulated { radius, .. } = model {
            let mut rng = key.child(tag::MARKS).rng();
            self.radii.extend((0..pts.len()).map(|_| radius.draw(&mut rng)));
        }
        self.points.extend(pts);
        self.index = PointIndex::new(&self.points);
    }

    fn field(&self, model: &CoxModel, x: Point2) -> f64 {
        match model {
            CoxModel::Modulated { lambda_in, lambda_out, radius, .. } => {
                let covered =
                    self.index.within(x, radius.max()).into_iter().any(|g| self.points[g].dist(x) <= self.radii[g]);
                if covered {
                    *lambda_in
                } else {
                    *lambda_out
                }
            }
            CoxModel::ShotNoise { kernel, .. } => {
                self.index.within(x, kernel.support()).into_iter().map(|g| kernel.eval(self.points[g].dist(x))).sum()
            }
        }
    }
}

/// Thins a dominating PPP on `piece` down to the Cox intensity given `germs`.
fn thin_piece(model: &CoxModel, piece: &Window, germs: &Germs, key: &StreamKey) -> Vec<Point2> {
    let mut rng = key.child(tag::THIN).rng();
    match model {
        CoxModel::Modulated { lambda_in, lambda_out, .. } => {
            let bound = lambda_in.max(*lambda_out);
            ppp_points(bound, piece, key)
                .into_iter()
                .filter(|&x| bound > 0.0 && rng.random::<f64>() * bound < germs.field(model, x))
                .collect()
        }
        CoxModel::ShotNoise { kernel, .. } => {
            // Per-cell bound: kernel maximum times the number of germs that can
            // reach the cell.
            let s = kernel.support();
            let bb = piece.bounding_box();
            let n = (bb.side / s).ceil().max(1.0) as usize;
            let cell = bb.side / n as f64;
            let lo = bb.min();
            let mut out = Vec::new();
            for iy in 0..n {
                for ix in 0..n {
                    let c = Point2::new(lo.x + (ix as f64 + 0.5) * cell, lo.y + (iy as f64 + 0.5) * cell);
                    let reach = germs.index.within(c, s + cell * std::f64::consts::FRAC_1_SQRT_2).len();
                    let bound = reach as f64 * kernel.max_value();
                    if bound <= 0.0 {
                        continue;
                    }
                    let cell_window = Window::Box(BoxRegion::new(c, cell));
                    let count = poisson_count(bound * cell * cell, &mut rng);
                    for _ in 0..count {
                        let x = cell_window.uniform_point(&mut rng);
                        let u = rng.random::<f64>();
                        if piece.contains(x) && u * bound < germs.field(model, x) {
                            out.push(x);
                        }
                    }
                }
            }
            out
        }
    }
}

/// Cox process on `window`.
pub fn sample_cox(model: &CoxModel, window: &Window, key: &StreamKey) -> Result<PointPattern> {
    model.validate()?;
    window.validate()?;
    let mut germs = Germs::new();
    germs.add(model, &window.grown(model.reach()), &key.child(tag::GERMS));
    let points = thin_piece(model, window, &germs, key);
    Ok(PointPattern {
        points,
        window: *window,
        intensity_hint: model.mean_intensity(),
        seed: key.seed(),
        stream: key.stream(),
    })
}

/// Cox points per piece of `levels`. Germs for piece `k` cover level `k`
/// grown by the germ reach; germs added later lie farther than the reach
/// from level `k`, so earlier pieces never change.
pub(super) fn sample_cox_levels(model: &CoxModel, levels: &Levels, key: &StreamKey) -> Result<Vec<Vec<Point2>>> {
    model.validate()?;
    let reach = model.reach();
    let grown = match levels {
        Levels::Disks { center, radii } => {
            Levels::Disks { center: *center, radii: radii.iter().map(|r| r + reach).collect() }
        }
        Levels::Boxes { center, sides } => {
            Levels::Boxes { center: *center, sides: sides.iter().map(|s| s + 2.0 * reach).collect() }
        }
    };
    let mut germs = Germs::new();
    let mut out = Vec::with_capacity(levels.len());
    for k in 0..levels.len() {
        let pk = key.child_indexed(tag::LEVEL, k as u64);
        germs.add(model, &grown.piece(k), &pk.child(tag::GERMS));
        out.push(thin_piece(model, &levels.piece(k), &germs, &pk));
    }
    Ok(out)
}
