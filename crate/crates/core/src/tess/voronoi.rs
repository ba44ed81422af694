//! Voronoi tessellation as the dual of the Delaunay triangulation.

use log::warn;

use super::{BuildOptions, Cell, Edge, EdgeGeometry, TessKind, Tessellation};
use crate::error::Result;
use crate::geom::delaunay::{Face, Triangulation};
use crate::geom::index::PointIndex;
use crate::geom::polygon::ConvexPolygon;
use crate::geom::{circumcenter, clip_segment_to_box, coverage_radius, BoxRegion, Disk, Point2, Region, Segment};
use crate::pointproc::{Levels, PointSource};
use crate::rng::StreamKey;

/// Slack on the closed coverage certificate.
const CERT_SLACK: f64 = 1e-9;

fn face_center(pts: &[Point2], f: Face) -> Option<Point2> {
    match f {
        Face::Triangle(t) => Some(circumcenter(pts[t[0]], pts[t[1]], pts[t[2]])),
        Face::Outside => None,
    }
}

/// Ray or segment from `origin` in direction `dir`, long enough to leave
/// `bbox`, clipped to it.
fn clip_ray(origin: Point2, dir: Point2, bbox: &BoxRegion) -> Option<Segment> {
    let n = dir.norm();
    if n == 0.0 {
        return None;
    }
    let reach = origin.dist(bbox.center) + bbox.side * std::f64::consts::SQRT_2 + 1.0;
    clip_segment_to_box(&Segment::new(origin, origin + dir * (reach / n)), bbox)
}

/// Voronoi edges dual to the Delaunay edges, clipped to `bbox`, with their
/// generator pairs. Edges missing `bbox` and degenerate (cocircular) edges
/// are dropped.
pub(crate) fn voronoi_edges(tri: &Triangulation, bbox: &BoxRegion) -> Vec<((usize, usize), Segment)> {
    let pts = tri.points();
    let mut out = Vec::with_capacity(tri.edges().len());
    for e in tri.edges() {
        let (p, q) = (pts[e.u], pts[e.v]);
        // Outward normal on the right of u -> v.
        let right = Point2::new((q - p).y, -(q - p).x);
        let seg = match (face_center(pts, e.left), face_center(pts, e.right)) {
            (Some(a), Some(b)) => {
                if a == b {
                    continue;
                }
                clip_segment_to_box(&Segment::new(a, b), bbox)
            }
            (Some(a), None) => clip_ray(a, right, bbox),
            (None, Some(b)) => clip_ray(b, -right, bbox),
            (None, None) => {
                let mid = p.midpoint(q);
                let dir = (q - p).perp();
                let reach = mid.dist(bbox.center) + bbox.side * std::f64::consts::SQRT_2 + 1.0;
                let d = dir * (reach / dir.norm());
                clip_segment_to_box(&Segment::new(mid - d, mid + d), bbox)
            }
        };
        if let Some(s) = seg {
            out.push(((e.u, e.v), s));
        }
    }
    out
}

/// Voronoi cell of `site` within `bbox`.
pub(crate) fn voronoi_cell(pts: &[Point2], site: usize, neighbors: &[usize], bbox: &BoxRegion) -> ConvexPolygon {
    let mut poly = ConvexPolygon::from_box(bbox);
    for &j in neighbors {
        poly = poly.clip_bisector(pts[site], pts[j]);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Voronoi tessellation of `points` restricted to `target`, with rays and
/// lines clipped to `bbox`.
pub(crate) fn voronoi_restricted(points: &[Point2], target: &Region, bbox: &BoxRegion) -> (Vec<Edge>, Vec<Cell>) {
    let tri = Triangulation::new(points);
    let mut edges = Vec::new();
    let mut owners: Vec<usize> = Vec::new();
    for ((u, v), s) in voronoi_edges(&tri, bbox) {
        if target.segment_meets(&s) {
            owners.push(u);
            owners.push(v);
            edges.push(Edge { id: edges.len(), geometry: EdgeGeometry::Segment(s), pair: Some((u, v)) });
        }
    }
    if !points.is_empty() {
        if let Some((c, _)) = PointIndex::new(points).nearest(target.center()) {
            owners.push(c);
        }
    }
    owners.sort_unstable();
    owners.dedup();
    let adj = tri.adjacency();
    let cells = owners
        .into_iter()
        .filter(|&i| tri.is_vertex(i))
        .filter_map(|i| {
            let poly = voronoi_cell(points, i, &adj[i], bbox);
            poly.meets(target).then_some(Cell { id: i, polygon: poly })
        })
        .collect();
    (edges, cells)
}

/// Voronoi tessellation of a fixed pattern inside `bbox` (uncertified).
pub fn build_voronoi(points: &[Point2], bbox: BoxRegion) -> Tessellation {
    let target = Region::Box(bbox);
    let (edges, cells) = voronoi_restricted(points, &target, &bbox);
    Tessellation {
        edges,
        cells: Some(cells),
        generators: points.to_vec(),
        certified: false,
        window_radius_used: bbox.half(),
        ..Tessellation::empty(TessKind::Voronoi, target)
    }
}

/// Voronoi tessellation of `source` restricted to `target`.
///
/// Windows `B_M` around the target center double from `M = 4a` (with `a` the
/// target circumradius) until every point of `B_a` is within `M − a` of a
/// sampled point; then no point outside `B_M` can be nearest to any point of
/// the target, so the restriction is exact.
pub fn restrict_voronoi_certified(
    source: &PointSource,
    target: &Region,
    key: &StreamKey,
    opts: &BuildOptions,
) -> Result<Tessellation> {
    let a = target.circumradius();
    let center = target.center();
    let cert_disk = Disk::new(center, a);
    let cap = opts.max_window_factor * a;
    let mut radii = vec![4.0 * a];
    loop {
        let m = *radii.last().unwrap();
        let levels = Levels::Disks { center, radii: radii.clone() };
        let sample = source.sample_levels(&levels, key)?;
        let pts = &sample.pattern.points;
        let certified = if pts.is_empty() {
            source.is_surely_empty()
        } else {
            coverage_radius(pts, &cert_disk)? <= m - a + CERT_SLACK
        };
        if certified || 2.0 * m > cap {
            if !certified {
                warn!("voronoi certificate not reached within window radius {m}");
            }
            let bbox = BoxRegion::new(center, 4.0 * m);
            let (edges, cells) = voronoi_restricted(pts, target, &bbox);
            return Ok(Tessellation {
                edges,
                cells: Some(cells),
                generators: sample.pattern.points,
                marks: sample.marks,
                origin: sample.origin,
                certified,
                window_radius_used: m,
                ..Tessellation::empty(TessKind::Voronoi, *target)
            });
        }
        radii.push(2.0 * m);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::PointModel;
    use rand::{Rng, SeedableRng};

    #[test]
    fn small_patterns() {
        let bbox = BoxRegion::centered(8.0);
        assert!(build_voronoi(&[Point2::ORIGIN], bbox).edges.is_empty());
        let t = build_voronoi(&[Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)], bbox);
        assert_eq!(t.edges.len(), 1);
        let EdgeGeometry::Segment(s) = &t.edges[0].geometry else { panic!() };
        assert!(s.a.x.abs() < 1e-12 && s.b.x.abs() < 1e-12);
        assert!((s.length() - 8.0).abs() < 1e-9);
        assert_eq!(t.cells.unwrap().len(), 2);
    }

    #[test]
    fn edges_are_bisectors_and_vertices_equidistant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
        let pts: Vec<Point2> =
            (0..50).map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let tri = Triangulation::new(&pts);
        let bbox = BoxRegion::centered(8.0);
        let edges = voronoi_edges(&tri, &bbox);
        assert!(edges.len() <= tri.edges().len() && edges.len() + 20 >= tri.edges().len());
        for ((u, v), s) in &edges {
            let m = s.midpoint();
            let du = m.dist(pts[*u]);
            assert!((du - m.dist(pts[*v])).abs() <= 1e-9 * du.max(1.0));
            for (k, p) in pts.iter().enumerate() {
                if k != *u && k != *v {
                    assert!(m.dist(*p) > du);
                }
            }
        }
        for t in tri.triangles() {
            let c = circumcenter(pts[t[0]], pts[t[1]], pts[t[2]]);
            let r = [0, 1, 2].map(|i| c.dist(pts[t[i]]));
            assert!((r[0] - r[1]).abs() <= 1e-9 * r[0] && (r[0] - r[2]).abs() <= 1e-9 * r[0]);
        }
    }

    #[test]
    fn single_point_certifies_at_first_window() {
        let src = PointSource::new(PointModel::Fixed { points: vec![Point2::ORIGIN] });
        let t = restrict_voronoi_certified(
            &src,
            &Region::Disk(Disk::centered(1.0)),
            &StreamKey::new(0, 0),
            &BuildOptions::default(),
        )
        .unwrap();
        assert!(t.certified);
        assert_eq!(t.window_radius_used, 4.0);
        assert!(t.edges.is_empty());
    }

    #[test]
    fn certified_restriction_is_window_stable() {
        let src = PointSource::new(PointModel::Poisson { lambda: 1.0 });
        let target = Region::Disk(Disk::centered(1.0));
        for s in 0..50 {
            let key = StreamKey::new(17, s);
            let t = restrict_voronoi_certified(&src, &target, &key, &BuildOptions::default()).unwrap();
            assert!(t.certified);
            // Same points plus more far away: same restricted edges.
            let m = t.window_radius_used;
            let mut radii = vec![4.0];
            while *radii.last().unwrap() < m {
                radii.push(2.0 * radii.last().unwrap());
            }
            radii.extend([2.0 * m, 4.0 * m]);
            let big = src.sample_levels(&Levels::disks(radii), &key).unwrap();
            let (edges, _) = voronoi_restricted(&big.pattern.points, &target, &BoxRegion::centered(16.0 * m));
            let mut a: Vec<_> = t.edges.iter().map(|e| e.pair).collect();
            let mut b: Vec<_> = edges.iter().map(|e| e.pair).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
            let la: f64 = t.edges.iter().map(|e| e.geometry.length_in(&target)).sum();
            let lb: f64 = edges.iter().map(|e| e.geometry.length_in(&target)).sum();
            assert!((la - lb).abs() < 1e-9);
        }
    }
}
