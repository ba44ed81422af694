//! Planar geometric primitives: points, segments, disks, boxes, polylines and
//! lines in normal form, plus clipping and length measurement against disks and
//! boxes.

mod coverage;
pub mod delaunay;
pub mod index;
pub mod polygon;
pub mod predicates;
mod union;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coverage::coverage_radius;
pub use union::{lattice_uncovered_area, union_of_disks_area, UnionArea};

/// Default polyline tolerance in model length units.
pub const DEFAULT_POLYLINE_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn dist2(self, o: Point2) -> f64 {
        (self - o).norm2()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        self.lerp(o, 0.5)
    }

    pub(crate) fn coord(self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    /// Euclidean distance from `p` to the closed segment.
    pub fn dist_to_point(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.norm2();
        if len2 == 0.0 {
            return p.dist(self.a);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.dist(self.a.lerp(self.b, t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point2, radius: f64) -> Self {
        Disk { center, radius }
    }

    /// The closed centered disk `B_r`.
    pub fn centered(radius: f64) -> Self {
        Disk::new(Point2::ORIGIN, radius)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) || !self.center.is_finite() {
            return Err(Error::invalid(format!("disk radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.dist2(self.center) <= self.radius * self.radius
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn bounding_box(&self) -> BoxRegion {
        BoxRegion::new(self.center, 2.0 * self.radius)
    }
}

/// Axis-parallel square `Q_side(center)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxRegion {
    pub center: Point2,
    pub side: f64,
}

impl BoxRegion {
    pub fn new(center: Point2, side: f64) -> Self {
        BoxRegion { center, side }
    }

    pub fn centered(side: f64) -> Self {
        BoxRegion::new(Point2::ORIGIN, side)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side > 0.0 && self.side.is_finite()) || !self.center.is_finite() {
            return Err(Error::invalid(format!("box side must be positive, got {}", self.side)));
        }
        Ok(())
    }

    pub fn half(&self) -> f64 {
        0.5 * self.side
    }

    pub fn min(&self) -> Point2 {
        Point2::new(self.center.x - self.half(), self.center.y - self.half())
    }

    pub fn max(&self) -> Point2 {
        Point2::new(self.center.x + self.half(), self.center.y + self.half())
    }

    pub fn contains(&self, p: Point2) -> bool {
        (p.x - self.center.x).abs() <= self.half() && (p.y - self.center.y).abs() <= self.half()
    }

    pub fn contains_disk(&self, d: &Disk) -> bool {
        (d.center.x - self.center.x).abs() + d.radius <= self.half()
            && (d.center.y - self.center.y).abs() + d.radius <= self.half()
    }

    /// Strict containment of a disk in the open box.
    pub fn contains_disk_strictly(&self, d: &Disk) -> bool {
        (d.center.x - self.center.x).abs() + d.radius < self.half()
            && (d.center.y - self.center.y).abs() + d.radius < self.half()
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn corners(&self) -> [Point2; 4] {
        let (lo, hi) = (self.min(), self.max());
        [lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)]
    }
}

/// A measurement region: closed disk or closed axis-parallel square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    Disk(Disk),
    Box(BoxRegion),
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        match self {
            Region::Disk(d) => d.validate(),
            Region::Box(b) => b.validate(),
        }
    }

    pub fn center(&self) -> Point2 {
        match self {
            Region::Disk(d) => d.center,
            Region::Box(b) => b.center,
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Region::Disk(d) => d.contains(p),
            Region::Box(b) => b.contains(p),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Region::Disk(d) => d.area(),
            Region::Box(b) => b.area(),
        }
    }

    pub fn bounding_box(&self) -> BoxRegion {
        match self {
            Region::Disk(d) => d.bounding_box(),
            Region::Box(b) => *b,
        }
    }

    /// Radius of the smallest centered disk containing the region.
    pub fn circumradius(&self) -> f64 {
        match self {
            Region::Disk(d) => d.radius,
            Region::Box(b) => b.half() * std::f64::consts::SQRT_2,
        }
    }

    pub fn clip_segment(&self, s: &Segment) -> Option<Segment> {
        match self {
            Region::Disk(d) => clip_segment_to_disk(s, d),
            Region::Box(b) => clip_segment_to_box(s, b),
        }
    }

    /// Whether the closed segment meets the closed region (touching counts).
    pub fn segment_meets(&self, s: &Segment) -> bool {
        match self {
            Region::Disk(d) => segment_meets_disk(s, d),
            Region::Box(b) => segment_meets_box(s, b),
        }
    }

    pub fn segment_length_inside(&self, s: &Segment) -> f64 {
        self.clip_segment(s).map_or(0.0, |c| c.length())
    }

    pub fn polyline_length_inside(&self, p: &Polyline) -> f64 {
        p.segments().map(|s| self.segment_length_inside(&s)).sum()
    }

    pub fn polyline_meets(&self, p: &Polyline) -> bool {
        p.segments().any(|s| self.segment_meets(&s))
    }

    /// Intersection of an infinite line with the region as a segment.
    pub fn clip_line(&self, l: &LineRT) -> Option<Segment> {
        let extent = self.center().norm() + self.circumradius() + 1.0;
        self.clip_segment(&l.segment_within(extent))
    }

    pub fn line_meets(&self, l: &LineRT) -> bool {
        match self {
            Region::Disk(d) => l.distance_to(d.center) <= d.radius,
            Region::Box(_) => {
                let extent = self.center().norm() + self.circumradius() + 1.0;
                self.segment_meets(&l.segment_within(extent))
            }
        }
    }
}

impl From<Disk> for Region {
    fn from(d: Disk) -> Self {
        Region::Disk(d)
    }
}

impl From<BoxRegion> for Region {
    fn from(b: BoxRegion) -> Self {
        Region::Box(b)
    }
}

/// Ordered chain of vertices approximating a curve, with the maximal deviation
/// from the true curve recorded at construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub vertices: Vec<Point2>,
    pub tolerance: f64,
}

impl Polyline {
    pub fn new(vertices: Vec<Point2>, tolerance: f64) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid("polyline needs at least two vertices"));
        }
        if !(tolerance > 0.0) {
            return Err(Error::invalid("polyline tolerance must be positive"));
        }
        let mut v: Vec<Point2> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        if v.len() < 2 {
            return Err(Error::invalid("polyline collapses to a point"));
        }
        Ok(Polyline { vertices: v, tolerance })
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|s| s.length()).sum()
    }
}

/// Line `{x : x₁ cos θ + x₂ sin θ = ρ}` with signed `ρ` and `θ ∈ [0, π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineRT {
    pub rho: f64,
    pub theta: f64,
}

impl LineRT {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(0.0..std::f64::consts::PI).contains(&theta) || !rho.is_finite() {
            return Err(Error::invalid(format!("line parameters out of range: rho={rho}, theta={theta}")));
        }
        Ok(LineRT { rho, theta })
    }

    pub fn normal(&self) -> Point2 {
        Point2::new(self.theta.cos(), self.theta.sin())
    }

    /// Absolute distance from `p` to the line.
    pub fn distance_to(&self, p: Point2) -> f64 {
        (p.dot(self.normal()) - self.rho).abs()
    }

    /// The piece of the line within distance `extent` of its foot point.
    pub fn segment_within(&self, extent: f64) -> Segment {
        let n = self.normal();
        let foot = n * self.rho;
        let dir = n.perp();
        Segment::new(foot - dir * extent, foot + dir * extent)
    }
}

/// Intersection of a segment with a closed disk; `None` when empty or a point.
pub fn clip_segment_to_disk(s: &Segment, d: &Disk) -> Option<Segment> {
    let dir = s.b - s.a;
    let a2 = dir.norm2();
    if a2 == 0.0 {
        return None;
    }
    let rel = s.a - d.center;
    let b = dir.dot(rel);
    let c = rel.norm2() - d.radius * d.radius;
    let disc = b * b - a2 * c;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Stable roots of a2 t² + 2 b t + c.
    let (t1, t2) = if b > 0.0 {
        let q = -(b + sq);
        (q / a2, c / q)
    } else {
        let q = -b + sq;
        (c / q, q / a2)
    };
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    if lo >= hi {
        return None;
    }
    Some(Segment::new(s.a.lerp(s.b, lo), s.a.lerp(s.b, hi)))
}

pub fn segment_meets_disk(s: &Segment, d: &Disk) -> bool {
    s.dist_to_point(d.center) <= d.radius
}

/// Liang–Barsky parameter interval of the segment inside the closed box.
fn box_interval(s: &Segment, b: &BoxRegion) -> Option<(f64, f64)> {
    let (lo, hi) = (b.min(), b.max());
    let d = s.b - s.a;
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    for (p, q) in [(-d.x, s.a.x - lo.x), (d.x, hi.x - s.a.x), (-d.y, s.a.y - lo.y), (d.y, hi.y - s.a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

pub fn clip_segment_to_box(s: &Segment, b: &BoxRegion) -> Option<Segment> {
    let (t0, t1) = box_interval(s, b)?;
    if t0 >= t1 {
        return None;
    }
    Some(Segment::new(s.a.lerp(s.b, t0), s.a.lerp(s.b, t1)))
}

pub fn segment_meets_box(s: &Segment, b: &BoxRegion) -> bool {
    box_interval(s, b).is_some()
}

/// Length of the chord cut from a line by a disk.
pub fn chord_length(l: &LineRT, d: &Disk) -> f64 {
    let h = l.distance_to(d.center);
    if h > d.radius {
        0.0
    } else {
        2.0 * (d.radius * d.radius - h * h).sqrt()
    }
}

pub fn polyline_length_in_disk(p: &Polyline, d: &Disk) -> f64 {
    Region::Disk(*d).polyline_length_inside(p)
}

/// Unique disk through three non-collinear points.
pub fn circumdisk(p: Point2, q: Point2, r: Point2) -> Result<Disk> {
    if predicates::orient2d(p, q, r) == 0.0 {
        return Err(Error::DegenerateTriangle);
    }
    let center = circumcenter(p, q, r);
    if !center.is_finite() {
        return Err(Error::DegenerateTriangle);
    }
    let radius = (center.dist(p) + center.dist(q) + center.dist(r)) / 3.0;
    Ok(Disk::new(center, radius))
}

/// Circumcenter without a degeneracy check.
pub(crate) fn circumcenter(p: Point2, q: Point2, r: Point2) -> Point2 {
    let b = q - p;
    let c = r - p;
    let d = 2.0 * b.cross(c);
    let b2 = b.norm2();
    let c2 = c.norm2();
    Point2::new(p.x + (c.y * b2 - b.y * c2) / d, p.y + (b.x * c2 - c.x * b2) / d)
}

/// Parameters `t` at which `origin + t·dir` crosses the circle.
pub(crate) fn line_circle_params(origin: Point2, dir: Point2, d: &Disk) -> Option<(f64, f64)> {
    let a2 = dir.norm2();
    if a2 == 0.0 {
        return None;
    }
    let rel = origin - d.center;
    let b = dir.dot(rel);
    let c = rel.norm2() - d.radius * d.radius;
    let disc = b * b - a2 * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    Some(((-b - sq) / a2, (-b + sq) / a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn unit() -> Disk {
        Disk::centered(1.0)
    }

    #[test]
    fn clip_diameter() {
        let s = Segment::new(Point2::new(-2.0, 0.0), Point2::new(2.0, 0.0));
        let c = clip_segment_to_disk(&s, &unit()).unwrap();
        assert_abs_diff_eq!(c.length(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.a.x, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.b.x, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn clip_disjoint_is_none() {
        let s = Segment::new(Point2::new(3.0, 3.0), Point2::new(4.0, 4.0));
        assert!(clip_segment_to_disk(&s, &unit()).is_none());
    }

    #[test]
    fn clip_chord() {
        let s = Segment::new(Point2::new(-2.0, 0.6), Point2::new(2.0, 0.6));
        let c = clip_segment_to_disk(&s, &unit()).unwrap();
        assert_abs_diff_eq!(c.length(), 1.6, epsilon = 1e-14);
    }

    #[test]
    fn tangent_segment_meets_but_has_no_length() {
        let s = Segment::new(Point2::new(-2.0, 1.0), Point2::new(2.0, 1.0));
        assert!(clip_segment_to_disk(&s, &unit()).is_none());
        assert!(segment_meets_disk(&s, &unit()));
    }

    #[test]
    fn chord_lengths() {
        assert_abs_diff_eq!(chord_length(&LineRT::new(0.0, 0.3).unwrap(), &unit()), 2.0);
        assert_eq!(chord_length(&LineRT::new(1.2, 0.0).unwrap(), &unit()), 0.0);
        assert_abs_diff_eq!(chord_length(&LineRT::new(0.6, 1.0).unwrap(), &unit()), 1.6, epsilon = 1e-14);
    }

    #[test]
    fn line_rejects_bad_angle() {
        assert!(LineRT::new(0.0, std::f64::consts::PI).is_err());
        assert!(LineRT::new(0.0, -0.1).is_err());
    }

    #[test]
    fn polyline_reductions() {
        let seg = Segment::new(Point2::new(-3.0, 0.2), Point2::new(0.5, 0.9));
        let p = Polyline::new(vec![seg.a, seg.b], DEFAULT_POLYLINE_TOLERANCE).unwrap();
        assert_abs_diff_eq!(
            polyline_length_in_disk(&p, &unit()),
            clip_segment_to_disk(&seg, &unit()).unwrap().length(),
            epsilon = 1e-15
        );
        let v: Vec<Point2> = (0..5).map(|i| Point2::new(-2.0 + i as f64, 0.0)).collect();
        let p = Polyline::new(v, DEFAULT_POLYLINE_TOLERANCE).unwrap();
        assert_abs_diff_eq!(polyline_length_in_disk(&p, &unit()), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn inscribed_polygon_perimeter() {
        let n = 1024;
        let v: Vec<Point2> = (0..=n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point2::new(t.cos(), t.sin())
            })
            .collect();
        let p = Polyline::new(v, DEFAULT_POLYLINE_TOLERANCE).unwrap();
        let len = polyline_length_in_disk(&p, &Disk::centered(2.0));
        assert!((len - 2.0 * std::f64::consts::PI).abs() < 1e-4, "{len}");
    }

    #[test]
    fn circumdisk_examples() {
        let d = circumdisk(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(d.center.x, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.center.y, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.radius, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let d = circumdisk(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(d.center.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.center.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.radius, 1.0, epsilon = 1e-15);
        assert!(matches!(
            circumdisk(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0)),
            Err(Error::DegenerateTriangle)
        ));
    }

    #[test]
    fn circumdisk_residuals_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p: Vec<Point2> =
                (0..3).map(|_| Point2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))).collect();
            let d = circumdisk(p[0], p[1], p[2]).unwrap();
            for q in &p {
                assert!((q.dist(d.center) - d.radius).abs() <= 1e-10 * d.radius.max(1.0));
            }
        }
    }

    #[test]
    fn box_clipping() {
        let b = BoxRegion::centered(1.0);
        let s = Segment::new(Point2::new(-1.0, 0.1), Point2::new(1.0, 0.1));
        assert_abs_diff_eq!(clip_segment_to_box(&s, &b).unwrap().length(), 1.0, epsilon = 1e-15);
        let edge = Segment::new(Point2::new(-1.0, 0.5), Point2::new(1.0, 0.5));
        assert!(segment_meets_box(&edge, &b));
        let out = Segment::new(Point2::new(-1.0, 0.6), Point2::new(1.0, 0.6));
        assert!(!segment_meets_box(&out, &b));
    }

    fn pt() -> impl Strategy<Value = Point2> {
        (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| Point2::new(x, y))
    }

    proptest! {
        #[test]
        fn clipping_is_monotone(a in pt(), b in pt(), c in pt(), r in 0.01..4.0f64) {
            let s = Segment::new(a, b);
            let d = Disk::new(c, r);
            if let Some(cl) = clip_segment_to_disk(&s, &d) {
                prop_assert!(cl.length() <= s.length() * (1.0 + 1e-12));
                prop_assert!(cl.length() <= 2.0 * r * (1.0 + 1e-12));
                prop_assert!(segment_meets_disk(&s, &d));
            }
        }

        #[test]
        fn chord_is_theta_invariant_and_even(rho in -3.0..3.0f64, t1 in 0.0..std::f64::consts::PI, t2 in 0.0..std::f64::consts::PI) {
            let d = Disk::centered(1.5);
            let a = chord_length(&LineRT::new(rho, t1).unwrap(), &d);
            let b = chord_length(&LineRT::new(rho, t2).unwrap(), &d);
            let c = chord_length(&LineRT::new(-rho, t1).unwrap(), &d);
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((a - c).abs() < 1e-12);
        }
    }
}
