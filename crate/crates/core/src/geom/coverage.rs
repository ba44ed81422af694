//! Largest distance from a point of a disk to its nearest pattern point.

use super::delaunay::Triangulation;
use super::index::PointIndex;
use super::{circumcenter, line_circle_params, Disk, Point2};
use crate::error::{Error, Result};

/// `max_{x ∈ d} min_i |x − p_i|`.
///
/// The nearest-point distance restricted to a Voronoi cell is the distance to
/// its generator, which has no interior local maximum. So the maximum over the
/// disk sits at a Voronoi vertex inside the disk, at a crossing of a Voronoi
/// edge with the circle, or at the point of the circle farthest from a
/// generator. Every candidate lies in the disk and is scored with its true
/// nearest distance, so extra candidates never overshoot.
pub fn coverage_radius(points: &[Point2], d: &Disk) -> Result<f64> {
    let pts: Vec<Point2> = points.iter().copied().filter(|p| p.is_finite()).collect();
    if pts.is_empty() {
        return Err(Error::NoPoints);
    }
    d.validate()?;
    let index = PointIndex::new(&pts);
    let tri = Triangulation::new(&pts);
    let mut candidates: Vec<Point2> = Vec::new();
    for t in tri.triangles() {
        let c = circumcenter(pts[t[0]], pts[t[1]], pts[t[2]]);
        if c.is_finite() && d.contains(c) {
            candidates.push(c);
        }
    }
    for e in tri.edges() {
        let (p, q) = (pts[e.u], pts[e.v]);
        let mid = p.midpoint(q);
        let dir = (q - p).perp();
        if let Some((t1, t2)) = line_circle_params(mid, dir, d) {
            candidates.push(mid + dir * t1);
            candidates.push(mid + dir * t2);
        }
    }
    for &p in &pts {
        let away = d.center - p;
        let n = away.norm();
        let unit = if n > 0.0 { away * (1.0 / n) } else { Point2::new(1.0, 0.0) };
        candidates.push(d.center + unit * d.radius);
    }
    let best = candidates.iter().filter_map(|&c| index.nearest(c).map(|(_, dist)| dist)).fold(0.0, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn simple_patterns() {
        let unit = Disk::centered(1.0);
        assert!((coverage_radius(&[Point2::ORIGIN], &unit).unwrap() - 1.0).abs() < 1e-12);
        let two = [Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)];
        assert!((coverage_radius(&two, &unit).unwrap() - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!(matches!(coverage_radius(&[], &unit), Err(Error::NoPoints)));
    }

    #[test]
    fn matches_grid_maximization() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Point2> =
            (0..50).map(|_| Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        let d = Disk::new(Point2::new(0.2, -0.1), 1.0);
        let got = coverage_radius(&pts, &d).unwrap();
        let index = PointIndex::new(&pts);
        let step = 1e-3;
        let n = (d.radius / step) as i64;
        let mut grid: f64 = 0.0;
        for i in -n..=n {
            for j in -n..=n {
                let x = d.center + Point2::new(i as f64 * step, j as f64 * step);
                if d.contains(x) {
                    grid = grid.max(index.nearest(x).unwrap().1);
                }
            }
        }
        assert!(got >= grid - 1e-12);
        assert!(got - grid <= 2e-3, "exact {got}, grid {grid}");
    }

    #[test]
    fn adding_points_never_increases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let d = Disk::centered(1.5);
        let mut pts: Vec<Point2> =
            (0..5).map(|_| Point2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect();
        let mut prev = coverage_radius(&pts, &d).unwrap();
        for _ in 0..40 {
            pts.push(Point2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)));
            let next = coverage_radius(&pts, &d).unwrap();
            assert!(next <= prev + 1e-12);
            prev = next;
        }
    }
}
