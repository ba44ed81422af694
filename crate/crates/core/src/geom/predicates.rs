//! Orientation and in-circle predicates.
//!
//! Both are evaluated with adaptive-precision arithmetic, so their signs are
//! exact for finite inputs. Exact cocircularity is resolved by a symbolic
//! perturbation of the lifted coordinate `|p|²`: point `i` is raised by `εⁱ⁺¹`,
//! so lower indices dominate. This makes every in-circle query non-zero for
//! distinct points and the resulting triangulation unique.

use super::Point2;

/// Twice the signed area of `(a, b, c)`; positive when counter-clockwise.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> f64 {
    robust::orient2d(a.coord(), b.coord(), c.coord())
}

/// Positive when `d` lies strictly inside the circle through the
/// counter-clockwise triple `(a, b, c)`.
pub fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    robust::incircle(a.coord(), b.coord(), c.coord(), d.coord())
}

/// In-circle test with symbolic tie-breaking on point index.
///
/// `(a, b, c)` must be counter-clockwise. Returns `true` when `d` is inside the
/// perturbed circle. The four indices must be distinct points.
pub fn incircle_sos(pts: &[Point2], a: usize, b: usize, c: usize, d: usize) -> bool {
    let (pa, pb, pc, pd) = (pts[a], pts[b], pts[c], pts[d]);
    let det = incircle(pa, pb, pc, pd);
    if det != 0.0 {
        return det > 0.0;
    }
    let mut order = [a, b, c, d];
    order.sort_unstable();
    for &dominant in &order {
        // Raising d pushes it outside. Raising a vertex of the triangle lifts the
        // plane on that vertex's side, which puts d inside iff d lies on the
        // same side of the opposite edge as the vertex.
        let s = if dominant == d {
            return false;
        } else if dominant == a {
            orient2d(pb, pc, pd)
        } else if dominant == b {
            orient2d(pc, pa, pd)
        } else {
            orient2d(pa, pb, pd)
        };
        if s != 0.0 {
            return s > 0.0;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_sign() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(1.0, 0.0);
        let c = Point2::new(0.0, 1.0);
        assert!(orient2d(a, b, c) > 0.0);
        assert!(orient2d(a, c, b) < 0.0);
        assert_eq!(orient2d(a, b, Point2::new(2.0, 0.0)), 0.0);
    }

    #[test]
    fn incircle_sign() {
        let p = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(0.4, 0.4),
            Point2::new(3.0, 3.0),
        ];
        assert!(incircle_sos(&p, 0, 1, 2, 3));
        assert!(!incircle_sos(&p, 0, 1, 2, 4));
    }

    #[test]
    fn cocircular_square_is_consistent() {
        // Unit square: exactly cocircular. Exactly one diagonal must win.
        let p = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)];
        // Triangles of diagonal 0-2: (0,1,2) and (0,2,3).
        let d02 = !incircle_sos(&p, 0, 1, 2, 3) && !incircle_sos(&p, 0, 2, 3, 1);
        // Triangles of diagonal 1-3: (0,1,3) and (1,2,3).
        let d13 = !incircle_sos(&p, 0, 1, 3, 2) && !incircle_sos(&p, 1, 2, 3, 0);
        assert!(d02 ^ d13);
    }
}
