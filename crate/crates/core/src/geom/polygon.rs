//! Convex polygons: half-plane clipping, area, and region tests.

use serde::{Deserialize, Serialize};

use super::{BoxRegion, Point2, Region, Segment};

/// Convex polygon with counter-clockwise vertices. May be empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    pub vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn from_box(b: &BoxRegion) -> Self {
        ConvexPolygon { vertices: b.corners().to_vec() }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Keeps the closed half-plane `{x : normal·x <= offset}`.
    pub fn clip(&self, normal: Point2, offset: f64) -> ConvexPolygon {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let fp = normal.dot(p) - offset;
            let fq = normal.dot(q) - offset;
            if fp <= 0.0 {
                out.push(p);
            }
            if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
                out.push(p.lerp(q, fp / (fp - fq)));
            }
        }
        ConvexPolygon { vertices: out }
    }

    /// Keeps the points at least as close to `site` as to `other`.
    pub fn clip_bisector(&self, site: Point2, other: Point2) -> ConvexPolygon {
        let normal = other - site;
        let offset = 0.5 * (other.norm2() - site.norm2());
        self.clip(normal, offset)
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum::<f64>() * 0.5
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Closed containment test.
    pub fn contains(&self, p: Point2) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let scale = self.vertices.iter().map(|v| v.norm()).fold(p.norm(), f64::max).max(1.0);
        let eps = 1e-12 * scale * scale;
        self.edges().all(|e| (e.b - e.a).cross(p - e.a) >= -eps)
    }

    /// Part of `s` inside the closed polygon (Cyrus–Beck); `None` when empty
    /// or a single point.
    pub fn clip_segment(&self, s: &Segment) -> Option<Segment> {
        if self.vertices.len() < 3 {
            return None;
        }
        let d = s.b - s.a;
        let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
        for e in self.edges() {
            // Inside is to the left of each counter-clockwise edge.
            let edge = e.b - e.a;
            let num = edge.cross(s.a - e.a);
            let den = edge.cross(d);
            if den == 0.0 {
                if num < 0.0 {
                    return None;
                }
            } else {
                let t = -num / den;
                if den > 0.0 {
                    t0 = t0.max(t);
                } else {
                    t1 = t1.min(t);
                }
            }
        }
        (t0 < t1).then(|| Segment::new(s.a.lerp(s.b, t0), s.a.lerp(s.b, t1)))
    }

    /// Whether the closed polygon meets the closed region.
    pub fn meets(&self, region: &Region) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        match region {
            Region::Disk(d) => self.contains(d.center) || self.edges().any(|e| region.segment_meets(&e)),
            Region::Box(b) => {
                self.vertices.iter().any(|v| b.contains(*v))
                    || b.corners().iter().any(|c| self.contains(*c))
                    || self.edges().any(|e| region.segment_meets(&e))
            }
        }
    }
}
