//! Delaunay tessellation restricted to a target, certified by empty
//! circumdisks inside the sampling window.

use log::warn;

use super::{BuildOptions, Cell, Edge, EdgeGeometry, TessKind, Tessellation};
use crate::error::Result;
use crate::geom::delaunay::{Face, Triangulation};
use crate::geom::polygon::ConvexPolygon;
use crate::geom::{circumdisk, BoxRegion, Point2, Region, Segment};
use crate::pointproc::{Levels, PointSource};
use crate::rng::StreamKey;

/// Smallest integer `r ≥ 2a` such that each of the 16 boxes `Q_r(c + r·z)`,
/// `z ∈ ℤ²`, `‖z‖_∞ = 2`, contains a point. Only radii whose boxes fit in the
/// window `Q_side(c)` (that is `5r ≤ side`) are decidable; returns `None` if
/// none of them qualifies.
pub fn discretization_radius(points: &[Point2], center: Point2, a: f64, window_side: f64) -> Option<u32> {
    let start = (2.0 * a).ceil().max(1.0) as u32;
    let mut r = start;
    while 5.0 * r as f64 <= window_side {
        let rf = r as f64;
        let all = ring_offsets().all(|(zx, zy)| {
            let b = BoxRegion::new(center + Point2::new(rf * zx as f64, rf * zy as f64), rf);
            points.iter().any(|p| b.contains(*p))
        });
        if all {
            return Some(r);
        }
        r += 1;
    }
    None
}

fn ring_offsets() -> impl Iterator<Item = (i32, i32)> {
    (-2..=2).flat_map(|x| (-2..=2).map(move |y| (x, y))).filter(|&(x, y): &(i32, i32)| x.abs().max(y.abs()) == 2)
}

struct Restricted {
    edges: Vec<Edge>,
    cells: Vec<Cell>,
    certified: bool,
}

fn triangle_polygon(pts: &[Point2], t: [usize; 3]) -> ConvexPolygon {
    ConvexPolygon { vertices: t.iter().map(|&i| pts[i]).collect() }
}

/// Delaunay edges and triangles meeting `target`; certified when the target
/// lies inside the hull and every triangle meeting it has its circumdisk
/// strictly inside `window`. Such triangles are Delaunay for every superset
/// of points outside the window, and they cover the target.
fn restrict(pts: &[Point2], target: &Region, window: Option<&BoxRegion>) -> Restricted {
    let tri = Triangulation::new(pts);
    let edges: Vec<Edge> = tri
        .edges()
        .iter()
        .filter_map(|e| {
            let s = Segment::new(pts[e.u], pts[e.v]);
            target.segment_meets(&s).then_some((e, s))
        })
        .enumerate()
        .map(|(id, (e, s))| Edge { id, geometry: EdgeGeometry::Segment(s), pair: Some((e.u, e.v)) })
        .collect();
    let cells: Vec<Cell> = tri
        .triangles()
        .iter()
        .enumerate()
        .filter_map(|(id, &t)| {
            let poly = triangle_polygon(pts, t);
            poly.meets(target).then_some(Cell { id, polygon: poly })
        })
        .collect();
    let certified = match window {
        None => false,
        Some(w) => {
            !tri.is_collinear()
                && cells.iter().any(|c| c.polygon.contains(target.center()))
                && !tri.edges().iter().any(|e| {
                    (e.left == Face::Outside || e.right == Face::Outside)
                        && target.segment_meets(&Segment::new(pts[e.u], pts[e.v]))
                })
                && cells.iter().all(|c| {
                    let v = &c.polygon.vertices;
                    circumdisk(v[0], v[1], v[2]).is_ok_and(|d| w.contains_disk_strictly(&d))
                })
        }
    };
    Restricted { edges, cells, certified }
}

/// Delaunay tessellation of a fixed pattern (uncertified); every edge and
/// triangle is kept.
pub fn build_delaunay(points: &[Point2]) -> Tessellation {
    let (mut lo, mut hi) = (Point2::new(-1.0, -1.0), Point2::new(1.0, 1.0));
    for p in points {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let side = (hi.x - lo.x).max(hi.y - lo.y) + 2.0;
    let target = Region::Box(BoxRegion::new(lo.midpoint(hi), side));
    let r = restrict(points, &target, None);
    Tessellation {
        edges: r.edges,
        cells: Some(r.cells),
        generators: points.to_vec(),
        certified: false,
        window_radius_used: 0.5 * side,
        ..Tessellation::empty(TessKind::Delaunay, target)
    }
}

/// Delaunay tessellation of `source` restricted to `target`.
///
/// Square windows double from side `12⌈2a⌉`. Once the discretization radius
/// `R` is decidable and the side is at least `12R`, the output is certified
/// when every triangle meeting the target has an empty circumdisk strictly
/// inside the window and the target lies inside the hull.
pub fn restrict_delaunay_certified(
    source: &PointSource,
    target: &Region,
    key: &StreamKey,
    opts: &BuildOptions,
) -> Result<Tessellation> {
    let a = target.circumradius();
    let center = target.center();
    let cap_side = 2.0 * opts.max_window_factor * a;
    let mut sides = vec![12.0 * (2.0 * a).ceil().max(1.0)];
    loop {
        let side = *sides.last().unwrap();
        let sample = source.sample_levels(&Levels::Boxes { center, sides: sides.clone() }, key)?;
        let pts = &sample.pattern.points;
        let disc_r = discretization_radius(pts, center, a, side);
        let window = BoxRegion::new(center, side);
        let ready = disc_r.is_some_and(|r| 12.0 * r as f64 <= side);
        let mut r = restrict(pts, target, ready.then_some(&window));
        r.certified |= pts.is_empty() && source.is_surely_empty();
        if r.certified || 2.0 * side > cap_side {
            if !r.certified {
                warn!("delaunay certificate not reached within window side {side}");
            }
            return Ok(Tessellation {
                edges: r.edges,
                cells: Some(r.cells),
                generators: sample.pattern.points,
                marks: sample.marks,
                origin: sample.origin,
                certified: r.certified,
                window_radius_used: 0.5 * side,
                disc_r,
                ..Tessellation::empty(TessKind::Delaunay, *target)
            });
        }
        sides.push(2.0 * side);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Disk;
    use crate::pointproc::PointModel;

    fn ring_pattern(r: f64) -> Vec<Point2> {
        ring_offsets().map(|(x, y)| Point2::new(r * x as f64, r * y as f64)).collect()
    }

    #[test]
    fn constructed_discretization_radius() {
        let pts = ring_pattern(2.0);
        assert_eq!(discretization_radius(&pts, Point2::ORIGIN, 1.0, 100.0), Some(2));
        // Boxes at r = 3 miss the points (centers 6 apart, half side 1.5).
        let sparse: Vec<Point2> = pts.iter().copied().filter(|p| p.x != 4.0).collect();
        assert_eq!(discretization_radius(&sparse, Point2::ORIGIN, 1.0, 10.0), None);
        assert_eq!(discretization_radius(&pts, Point2::ORIGIN, 1.0, 9.0), None);
    }

    #[test]
    fn three_points() {
        let t = build_delaunay(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)]);
        assert_eq!(t.edges.len(), 3);
        assert_eq!(t.cells.unwrap().len(), 1);
    }

    #[test]
    fn certified_restriction_is_window_stable() {
        let src = PointSource::new(PointModel::Poisson { lambda: 1.0 });
        let target = Region::Disk(Disk::centered(1.0));
        for s in 0..30 {
            let key = StreamKey::new(5, s);
            let t = restrict_delaunay_certified(&src, &target, &key, &BuildOptions::default()).unwrap();
            assert!(t.certified);
            let r = t.disc_r.unwrap();
            assert!(r >= 2 && 12.0 * r as f64 <= 2.0 * t.window_radius_used);
            let mut sides = vec![24.0];
            while *sides.last().unwrap() < 2.0 * t.window_radius_used {
                sides.push(2.0 * sides.last().unwrap());
            }
            sides.push(2.0 * sides.last().unwrap());
            let big = src.sample_levels(&Levels::boxes(sides), &key).unwrap();
            let rb = restrict(&big.pattern.points, &target, None);
            let mut a: Vec<_> = t.edges.iter().map(|e| e.pair).collect();
            let mut b: Vec<_> = rb.edges.iter().map(|e| e.pair).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }
}
