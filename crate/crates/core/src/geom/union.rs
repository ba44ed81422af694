//! Area of a union of equal disks by lattice counting.
//!
//! The plane is divided into square cells of side `h` centered at
//! `((i + ½)h, (j + ½)h)`. A cell counts as covered when its center lies in
//! some closed disk. On each lattice row a disk covers a contiguous range of
//! column indices, so the count is exact integer arithmetic over merged
//! ranges. Because every call uses the same global lattice,
//! [`lattice_uncovered_area`] equals the difference of two
//! [`union_of_disks_area`] calls exactly.

use super::Point2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnionArea {
    pub area: f64,
    /// Bound on the absolute discretization error.
    pub tolerance: f64,
}

/// Column index range `[lo, hi]` covered by disk `c` on row `j`, if any.
fn row_range(c: Point2, r: f64, j: i64, h: f64) -> Option<(i64, i64)> {
    let dy = (j as f64 + 0.5) * h - c.y;
    let s = r * r - dy * dy;
    if s < 0.0 {
        return None;
    }
    let half = s.sqrt();
    let lo = ((c.x - half) / h - 0.5).ceil() as i64;
    let hi = ((c.x + half) / h - 0.5).floor() as i64;
    (lo <= hi).then_some((lo, hi))
}

fn row_span(c: Point2, r: f64, h: f64) -> (i64, i64) {
    (((c.y - r) / h - 0.5).ceil() as i64, ((c.y + r) / h - 0.5).floor() as i64)
}

fn merged_count(ranges: &mut [(i64, i64)]) -> i64 {
    ranges.sort_unstable();
    let mut total = 0;
    let mut cur: Option<(i64, i64)> = None;
    for &(lo, hi) in ranges.iter() {
        match cur {
            Some((clo, chi)) if lo <= chi + 1 => cur = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += chi - clo + 1;
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = cur {
        total += chi - clo + 1;
    }
    total
}

/// Lattice area of `∪ B_r(c)` with cell side `resolution`.
pub fn union_of_disks_area(centers: &[Point2], r: f64, resolution: f64) -> UnionArea {
    let h = resolution;
    if centers.is_empty() || !(r > 0.0) || !(h > 0.0) {
        return UnionArea { area: 0.0, tolerance: 0.0 };
    }
    let mut order: Vec<usize> = (0..centers.len()).collect();
    order.sort_by(|&a, &b| centers[a].y.total_cmp(&centers[b].y));
    let spans: Vec<(i64, i64)> = order.iter().map(|&i| row_span(centers[i], r, h)).collect();
    let first = spans.iter().map(|s| s.0).min().unwrap();
    let last = spans.iter().map(|s| s.1).max().unwrap();
    let mut count: i64 = 0;
    let mut next = 0;
    let mut active: Vec<usize> = Vec::new();
    let mut ranges = Vec::new();
    for j in first..=last {
        while next < order.len() && spans[next].0 <= j {
            active.push(next);
            next += 1;
        }
        active.retain(|&k| spans[k].1 >= j);
        ranges.clear();
        ranges.extend(active.iter().filter_map(|&k| row_range(centers[order[k]], r, j, h)));
        count += merged_count(&mut ranges);
    }
    let perimeter = centers.len() as f64 * 2.0 * std::f64::consts::PI * r;
    UnionArea { area: count as f64 * h * h, tolerance: 2.0 * perimeter * h }
}

/// Lattice area of `B_r(x) \ ∪ B_r(n)` over `neighbors`, on the same lattice as
/// [`union_of_disks_area`].
pub fn lattice_uncovered_area(x: Point2, r: f64, neighbors: &[Point2], resolution: f64) -> f64 {
    let h = resolution;
    if !(r > 0.0) || !(h > 0.0) {
        return 0.0;
    }
    let near: Vec<Point2> = neighbors.iter().copied().filter(|n| n.dist2(x) <= 4.0 * r * r * (1.0 + 1e-12)).collect();
    let (j0, j1) = row_span(x, r, h);
    let mut count: i64 = 0;
    let mut ranges = Vec::new();
    for j in j0..=j1 {
        let Some((lo, hi)) = row_range(x, r, j, h) else { continue };
        ranges.clear();
        ranges.extend(near.iter().filter_map(|&c| row_range(c, r, j, h)).filter_map(|(a, b)| {
            let (a, b) = (a.max(lo), b.min(hi));
            (a <= b).then_some((a, b))
        }));
        count += (hi - lo + 1) - merged_count(&mut ranges);
    }
    count as f64 * h * h
}
