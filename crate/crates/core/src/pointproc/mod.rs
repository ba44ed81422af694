//! Seeded samplers for stationary point processes and their Palm versions.
//!
//! All samplers are pure functions of their parameters and a [`StreamKey`].
//! Sampling over growing windows is prefix-stable: [`PointSource::sample_levels`]
//! draws each annular piece from its own sub-stream, so enlarging the window
//! keeps every point already drawn (except for the Gibbs model, whose chain is
//! rerun on the final window).

mod cox;
mod gibbs;
mod lines;

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Disk, Point2};
use crate::rng::{tag, StreamKey};

pub use cox::{sample_cox, CoxModel, Kernel, RadiusLaw};
pub use gibbs::{sample_wr_gibbs, GibbsParams};
pub use lines::{
    palm_line_process, palm_mg, sample_axis_poisson, sample_line_process, AxisSample, LineProcessSample, MgAxis,
    PalmMgSample,
};

/// Sampling window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Window {
    Disk(Disk),
    Box(BoxRegion),
    /// `{x : inner < |x − center| ≤ outer}`.
    Annulus {
        center: Point2,
        inner: f64,
        outer: f64,
    },
    /// `Q_outer(center) \ Q_inner(center)` with the inner box closed.
    BoxAnnulus {
        center: Point2,
        inner: f64,
        outer: f64,
    },
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        match self {
            Window::Disk(d) => d.validate(),
            Window::Box(b) => b.validate(),
            Window::Annulus { inner, outer, .. } | Window::BoxAnnulus { inner, outer, .. } => {
                if !(*inner >= 0.0 && outer > inner && outer.is_finite()) {
                    return Err(Error::invalid(format!("annulus needs 0 <= inner < outer, got {inner}, {outer}")));
                }
                Ok(())
            }
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Window::Disk(d) => d.contains(p),
            Window::Box(b) => b.contains(p),
            Window::Annulus { center, inner, outer } => {
                let r2 = p.dist2(*center);
                r2 > inner * inner && r2 <= outer * outer
            }
            Window::BoxAnnulus { center, inner, outer } => {
                let m = (p.x - center.x).abs().max((p.y - center.y).abs());
                m > 0.5 * inner && m <= 0.5 * outer
            }
        }
    }

    pub fn area(&self) -> f64 {
        use std::f64::consts::PI;
        match self {
            Window::Disk(d) => d.area(),
            Window::Box(b) => b.area(),
            Window::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
            Window::BoxAnnulus { inner, outer, .. } => outer * outer - inner * inner,
        }
    }

    pub fn bounding_box(&self) -> BoxRegion {
        match self {
            Window::Disk(d) => d.bounding_box(),
            Window::Box(b) => *b,
            Window::Annulus { center, outer, .. } => BoxRegion::new(*center, 2.0 * outer),
            Window::BoxAnnulus { center, outer, .. } => BoxRegion::new(*center, *outer),
        }
    }

    /// The window grown by `r` (a superset of its Minkowski sum with `B_r`
    /// for boxes), used for germ processes.
    pub fn grown(&self, r: f64) -> Window {
        match *self {
            Window::Disk(d) => Window::Disk(Disk::new(d.center, d.radius + r)),
            Window::Box(b) => Window::Box(BoxRegion::new(b.center, b.side + 2.0 * r)),
            Window::Annulus { center, inner, outer } => {
                Window::Annulus { center, inner: (inner + r).max(0.0).min(outer + r), outer: outer + r }
            }
            Window::BoxAnnulus { center, inner, outer } => {
                Window::BoxAnnulus { center, inner: inner + 2.0 * r, outer: outer + 2.0 * r }
            }
        }
    }

    /// Uniform point in the window.
    pub fn uniform_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point2 {
        use std::f64::consts::TAU;
        match *self {
            Window::Disk(d) => {
                let r = d.radius * rng.random::<f64>().sqrt();
                let phi = TAU * rng.random::<f64>();
                d.center + Point2::new(r * phi.cos(), r * phi.sin())
            }
            Window::Box(b) => {
                let lo = b.min();
                Point2::new(lo.x + b.side * rng.random::<f64>(), lo.y + b.side * rng.random::<f64>())
            }
            Window::Annulus { center, inner, outer } => {
                let r = (inner * inner + rng.random::<f64>() * (outer * outer - inner * inner)).sqrt();
                let phi = TAU * rng.random::<f64>();
                center + Point2::new(r * phi.cos(), r * phi.sin())
            }
            Window::BoxAnnulus { .. } => {
                let bb = self.bounding_box();
                loop {
                    let p = Window::Box(bb).uniform_point(rng);
                    if self.contains(p) {
                        return p;
                    }
                }
            }
        }
    }
}

impl From<Disk> for Window {
    fn from(d: Disk) -> Self {
        Window::Disk(d)
    }
}

impl From<BoxRegion> for Window {
    fn from(b: BoxRegion) -> Self {
        Window::Box(b)
    }
}

/// Nested windows of one shape, innermost first.
#[derive(Clone, Debug, PartialEq)]
pub enum Levels {
    Disks { center: Point2, radii: Vec<f64> },
    Boxes { center: Point2, sides: Vec<f64> },
}

impl Levels {
    pub fn disks(radii: Vec<f64>) -> Self {
        Levels::Disks { center: Point2::ORIGIN, radii }
    }

    pub fn boxes(sides: Vec<f64>) -> Self {
        Levels::Boxes { center: Point2::ORIGIN, sides }
    }

    pub fn len(&self) -> usize {
        match self {
            Levels::Disks { radii, .. } => radii.len(),
            Levels::Boxes { sides, .. } => sides.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        let v = match self {
            Levels::Disks { radii, .. } => radii,
            Levels::Boxes { sides, .. } => sides,
        };
        if v.is_empty() || v[0] <= 0.0 || v.windows(2).any(|w| w[1] <= w[0]) || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("window levels must be positive and strictly increasing"));
        }
        Ok(())
    }

    /// The whole window at level `k`.
    pub fn window(&self, k: usize) -> Window {
        match self {
            Levels::Disks { center, radii } => Window::Disk(Disk::new(*center, radii[k])),
            Levels::Boxes { center, sides } => Window::Box(BoxRegion::new(*center, sides[k])),
        }
    }

    pub fn outer(&self) -> Window {
        self.window(self.len() - 1)
    }

    /// Level `k` minus level `k − 1`.
    pub fn piece(&self, k: usize) -> Window {
        if k == 0 {
            return self.window(0);
        }
        match self {
            Levels::Disks { center, radii } => {
                Window::Annulus { center: *center, inner: radii[k - 1], outer: radii[k] }
            }
            Levels::Boxes { center, sides } => {
                Window::BoxAnnulus { center: *center, inner: sides[k - 1], outer: sides[k] }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    pub points: Vec<Point2>,
    pub window: Window,
    pub intensity_hint: f64,
    pub seed: u64,
    pub stream: u64,
}

impl PointPattern {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count_in(&self, pred: impl Fn(Point2) -> bool) -> usize {
        self.points.iter().filter(|p| pred(**p)).count()
    }
}

/// Probability law of i.i.d. marks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarkLaw {
    /// Uniform on `[0, tau]`; `tau = 0` gives all-zero marks.
    Uniform { tau: f64 },
    /// Exponential with the given rate (mean `1 / rate`).
    Exponential { rate: f64 },
    /// Every mark equals `value`.
    Constant { value: f64 },
}

impl MarkLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            MarkLaw::Uniform { tau } => tau >= 0.0 && tau.is_finite(),
            MarkLaw::Exponential { rate } => rate > 0.0 && rate.is_finite(),
            MarkLaw::Constant { value } => value >= 0.0 && value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid mark law {self:?}")))
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            MarkLaw::Uniform { tau } => tau * rng.random::<f64>(),
            MarkLaw::Exponential { rate } => Exp::new(rate).expect("validated rate").sample(rng),
            MarkLaw::Constant { value } => value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedPointPattern {
    pub base: PointPattern,
    pub marks: Vec<f64>,
    pub mark_law: MarkLaw,
}

fn check_intensity(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("intensity must be finite and nonnegative, got {lambda}")));
    }
    Ok(())
}

/// Poisson count with the given mean; zero mean gives zero.
pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
}

/// Homogeneous Poisson points in `window` drawn from `key`'s stream.
pub(crate) fn ppp_points(lambda: f64, window: &Window, key: &StreamKey) -> Vec<Point2> {
    let mut rng = key.rng();
    let n = poisson_count(lambda * window.area(), &mut rng);
    (0..n).map(|_| window.uniform_point(&mut rng)).collect()
}

/// Homogeneous PPP of intensity `lambda` on `window`.
pub fn sample_ppp(lambda: f64, window: &Window, key: &StreamKey) -> Result<PointPattern> {
    check_intensity(lambda)?;
    window.validate()?;
    Ok(PointPattern {
        points: ppp_points(lambda, window, key),
        window: *window,
        intensity_hint: lambda,
        seed: key.seed(),
        stream: key.stream(),
    })
}

/// PPP with i.i.d. marks. Marks come from a separate sub-stream, so the
/// locations coincide with [`sample_ppp`] for the same key.
pub fn sample_marked_ppp(
    lambda: f64,
    window: &Window,
    mark_law: MarkLaw,
    key: &StreamKey,
) -> Result<MarkedPointPattern> {
    mark_law.validate()?;
    let base = sample_ppp(lambda, window, key)?;
    let mut rng = key.child(tag::MARKS).rng();
    let marks = (0..base.len()).map(|_| mark_law.draw(&mut rng)).collect();
    Ok(MarkedPointPattern { base, marks, mark_law })
}

/// Model for [`palmify`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PalmBase {
    Poisson { lambda: f64 },
    MarkedPoisson { lambda: f64, marks: MarkLaw },
}

/// Slivnyak–Mecke Palm version: a sample of the base model with the origin
/// appended (with an independent mark when marked).
pub fn palmify(base: PalmBase, window: &Window, key: &StreamKey) -> Result<MarkedPointPattern> {
    let mut out = match base {
        PalmBase::Poisson { lambda } => {
            let base = sample_ppp(lambda, window, key)?;
            let n = base.len();
            MarkedPointPattern { base, marks: vec![0.0; n], mark_law: MarkLaw::Constant { value: 0.0 } }
        }
        PalmBase::MarkedPoisson { lambda, marks } => sample_marked_ppp(lambda, window, marks, key)?,
    };
    out.base.points.push(Point2::ORIGIN);
    let mut rng = key.child(tag::PALM).rng();
    out.marks.push(out.mark_law.draw(&mut rng));
    Ok(out)
}

/// Point-process model for adaptive windowed sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointModel {
    Poisson {
        lambda: f64,
    },
    Cox(CoxModel),
    Gibbs(GibbsParams),
    /// A fixed configuration (used for tests and replayed inputs).
    Fixed {
        points: Vec<Point2>,
    },
}

impl PointModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            PointModel::Poisson { lambda } => check_intensity(*lambda),
            PointModel::Cox(c) => c.validate(),
            PointModel::Gibbs(g) => g.validate(),
            PointModel::Fixed { points } => {
                if points.iter().all(|p| p.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::invalid("fixed points must be finite"))
                }
            }
        }
    }

    pub fn is_poisson(&self) -> bool {
        matches!(self, PointModel::Poisson { .. })
    }

    /// Mean number of points per unit area (approximate for Gibbs).
    pub fn intensity(&self) -> f64 {
        match self {
            PointModel::Poisson { lambda } => *lambda,
            PointModel::Cox(c) => c.mean_intensity(),
            PointModel::Gibbs(g) => g.lambda,
            PointModel::Fixed { .. } => 0.0,
        }
    }

    /// Samples on a single window.
    pub fn sample(&self, window: &Window, key: &StreamKey) -> Result<PointPattern> {
        window.validate()?;
        match self {
            PointModel::Poisson { lambda } => sample_ppp(*lambda, window, key),
            PointModel::Cox(c) => sample_cox(c, window, key),
            PointModel::Gibbs(g) => sample_wr_gibbs(g, window, key),
            PointModel::Fixed { points } => Ok(PointPattern {
                points: points.iter().copied().filter(|p| window.contains(*p)).collect(),
                window: *window,
                intensity_hint: 0.0,
                seed: key.seed(),
                stream: key.stream(),
            }),
        }
    }
}

/// A point model with optional marks and Palm conditioning, sampled over
/// nested windows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSource {
    pub model: PointModel,
    #[serde(default)]
    pub marks: Option<MarkLaw>,
    #[serde(default)]
    pub palm: bool,
}

/// Output of [`PointSource::sample_levels`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPoints {
    pub pattern: PointPattern,
    /// Present when the source is marked; same length as the points.
    pub marks: Option<Vec<f64>>,
    /// Index of the Palm origin, if one was added.
    pub origin: Option<usize>,
}

impl PointSource {
    pub fn new(model: PointModel) -> Self {
        PointSource { model, marks: None, palm: false }
    }

    /// Whether every sample is empty (zero intensity, no Palm origin).
    pub fn is_surely_empty(&self) -> bool {
        !self.palm
            && match &self.model {
                PointModel::Fixed { points } => points.is_empty(),
                m => m.intensity() == 0.0,
            }
    }

    pub fn with_marks(mut self, law: MarkLaw) -> Self {
        self.marks = Some(law);
        self
    }

    pub fn palm(mut self) -> Self {
        self.palm = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if let Some(m) = &self.marks {
            m.validate()?;
        }
        if self.palm && !matches!(self.model, PointModel::Poisson { .. }) {
            return Err(Error::PalmOnlyPoisson);
        }
        Ok(())
    }

    /// Samples the model over the outermost window of `levels`.
    ///
    /// For Poisson and Cox models, piece `k` (level `k` minus level `k − 1`)
    /// uses the sub-stream `LEVEL/k`, so the points in level `k` do not depend
    /// on how many further levels are requested. Points are ordered by piece.
    pub fn sample_levels(&self, levels: &Levels, key: &StreamKey) -> Result<SampledPoints> {
        self.validate()?;
        levels.validate()?;
        let outer = levels.outer();
        let mut points = Vec::new();
        let mut marks = self.marks.map(|_| Vec::new());
        let push_marks = |count: usize, piece_key: &StreamKey, marks: &mut Option<Vec<f64>>| {
            if let (Some(law), Some(m)) = (self.marks, marks.as_mut()) {
                let mut rng = piece_key.child(tag::MARKS).rng();
                m.extend((0..count).map(|_| law.draw(&mut rng)));
            }
        };
        match &self.model {
            PointModel::Poisson { lambda } => {
                for k in 0..levels.len() {
                    let pk = key.child_indexed(tag::LEVEL, k as u64);
                    let pts = ppp_points(*lambda, &levels.piece(k), &pk);
                    push_marks(pts.len(), &pk, &mut marks);
                    points.extend(pts);
                }
            }
            PointModel::Cox(c) => {
                let pts = cox::sample_cox_levels(c, levels, key)?;
                for (k, piece) in pts.into_iter().enumerate() {
                    let pk = key.child_indexed(tag::LEVEL, k as u64);
                    push_marks(piece.len(), &pk, &mut marks);
                    points.extend(piece);
                }
            }
            PointModel::Gibbs(_) | PointModel::Fixed { .. } => {
                let pat = self.model.sample(&outer, key)?;
                push_marks(pat.len(), key, &mut marks);
                points = pat.points;
            }
        }
        let mut origin = None;
        if self.palm {
            origin = Some(points.len());
            points.push(Point2::ORIGIN);
            if let (Some(law), Some(m)) = (self.marks, marks.as_mut()) {
                m.push(law.draw(&mut key.child(tag::PALM).rng()));
            }
        }
        Ok(SampledPoints {
            pattern: PointPattern {
                points,
                window: outer,
                intensity_hint: self.model.intensity(),
                seed: key.seed(),
                stream: key.stream(),
            },
            marks,
            origin,
        })
    }
}
