//! Manhattan grid: axis-parallel lines through two axis point processes.

use super::{Cell, Edge, EdgeGeometry, TessKind, Tessellation};
use crate::error::{Error, Result};
use crate::geom::polygon::ConvexPolygon;
use crate::geom::{BoxRegion, Point2, Region, Segment};
use crate::pointproc::{palm_mg, sample_axis_poisson, AxisSample};
use crate::rng::{tag, StreamKey};

/// Breakpoints of `[lo, hi]` cut at the coordinates strictly inside it.
pub(crate) fn breakpoints(coords: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut out = vec![lo];
    out.extend(coords.iter().copied().filter(|&c| c > lo && c < hi));
    out.push(hi);
    out
}

/// Manhattan grid clipped to `window`: a vertical segment for each vertical
/// coordinate and a horizontal one for each horizontal coordinate inside the
/// window, and the `(N_v + 1)(N_h + 1)` rectangular cells.
pub fn build_mg(yv: &AxisSample, yh: &AxisSample, window: BoxRegion) -> Result<Tessellation> {
    window.validate()?;
    let (lo, hi) = (window.min(), window.max());
    if yv.interval.0 > lo.x || yv.interval.1 < hi.x || yh.interval.0 > lo.y || yh.interval.1 < hi.y {
        return Err(Error::invalid("axis intervals must cover the window projections"));
    }
    let xs = breakpoints(&yv.coords, lo.x, hi.x);
    let ys = breakpoints(&yh.coords, lo.y, hi.y);
    let mut edges = Vec::new();
    for &x in &xs[1..xs.len() - 1] {
        let s = Segment::new(Point2::new(x, lo.y), Point2::new(x, hi.y));
        edges.push(Edge { id: edges.len(), geometry: EdgeGeometry::Segment(s), pair: None });
    }
    for &y in &ys[1..ys.len() - 1] {
        let s = Segment::new(Point2::new(lo.x, y), Point2::new(hi.x, y));
        edges.push(Edge { id: edges.len(), geometry: EdgeGeometry::Segment(s), pair: None });
    }
    let mut cells = Vec::with_capacity((xs.len() - 1) * (ys.len() - 1));
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            let poly = ConvexPolygon {
                vertices: vec![
                    Point2::new(xs[i], ys[j]),
                    Point2::new(xs[i + 1], ys[j]),
                    Point2::new(xs[i + 1], ys[j + 1]),
                    Point2::new(xs[i], ys[j + 1]),
                ],
            };
            cells.push(Cell { id: cells.len(), polygon: poly });
        }
    }
    Ok(Tessellation {
        edges,
        cells: Some(cells),
        window_radius_used: window.half(),
        ..Tessellation::empty(TessKind::Manhattan, Region::Box(window))
    })
}

/// Manhattan grid on the bounding box of `target`, measured on `target`.
pub(super) fn build_mg_model(
    lambda_v: f64,
    lambda_h: f64,
    palm: bool,
    target: &Region,
    key: &StreamKey,
) -> Result<Tessellation> {
    let window = target.bounding_box();
    let (lo, hi) = (window.min(), window.max());
    let (yv, yh) = if palm {
        let interval = (lo.x.min(lo.y).min(0.0), hi.x.max(hi.y).max(0.0));
        let s = palm_mg(lambda_v, lambda_h, interval, key)?;
        (s.vertical, s.horizontal)
    } else {
        (
            sample_axis_poisson(lambda_v, (lo.x, hi.x), &key.child(tag::AXIS_V))?,
            sample_axis_poisson(lambda_h, (lo.y, hi.y), &key.child(tag::AXIS_H))?,
        )
    };
    let mut t = build_mg(&yv, &yh, window)?;
    t.target = *target;
    if let Some(cells) = t.cells.as_mut() {
        cells.retain(|c| c.polygon.meets(target));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(coords: Vec<f64>) -> AxisSample {
        AxisSample { coords, interval: (-0.5, 0.5), intensity: 1.0 }
    }

    #[test]
    fn unit_crossings() {
        let t = build_mg(&axis(vec![-0.2, 0.3]), &axis(vec![0.1]), BoxRegion::centered(1.0)).unwrap();
        let total: f64 = t.edges.iter().map(|e| e.geometry.length_in(&t.target)).sum();
        assert!((total - 3.0).abs() < 1e-12);
        assert_eq!(t.cells.as_ref().unwrap().len(), 6);
    }

    #[test]
    fn empty_axes_give_one_cell() {
        let t = build_mg(&axis(vec![]), &axis(vec![]), BoxRegion::centered(1.0)).unwrap();
        assert!(t.edges.is_empty());
        assert_eq!(t.cells.unwrap().len(), 1);
    }

    #[test]
    fn uncovered_window_is_an_error() {
        assert!(build_mg(&axis(vec![]), &axis(vec![]), BoxRegion::centered(2.0)).is_err());
    }
}
