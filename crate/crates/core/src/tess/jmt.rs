//! Johnson–Mehl tessellation: cells of the additively weighted distance
//! `|x − X_i| + T_i`, extracted on a square lattice.
//!
//! Every lattice node is labeled with its nearest generator. Each lattice
//! edge whose end labels differ is bisected down to rounding, which puts the
//! crossing on the exact boundary between the two final labels. Squares are
//! then stitched by marching squares: two crossings of the same pair give a
//! segment, saddles are resolved by the label at the square center, and
//! squares with three labels get a junction solved by Newton's method.

use std::collections::HashMap;

use log::warn;

use super::{BuildOptions, Edge, EdgeGeometry, LabelGrid, TessKind, Tessellation};
use crate::error::{Error, Result};
use crate::geom::{BoxRegion, Point2, Polyline, Region};
use crate::pointproc::{Levels, PointSource};
use crate::rng::StreamKey;

/// Default lattice step for edge extraction.
pub const DEFAULT_GRID_STEP: f64 = 0.01;

/// Nearest generator in the Johnson–Mehl distance and that distance.
/// Ties go to the lowest index.
pub fn jm_argmin(points: &[Point2], marks: &[f64], x: Point2) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (p, t)) in points.iter().zip(marks).enumerate() {
        let d = x.dist(*p) + t;
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best
}

/// Generators sorted by mark for pruned nearest queries.
struct Field {
    pts: Vec<Point2>,
    marks: Vec<f64>,
    ids: Vec<usize>,
}

impl Field {
    fn new(points: &[Point2], marks: &[f64], keep: impl Fn(usize) -> bool) -> Self {
        let mut order: Vec<usize> = (0..points.len()).filter(|&i| keep(i)).collect();
        order.sort_by(|&i, &j| marks[i].total_cmp(&marks[j]).then(i.cmp(&j)));
        Field {
            pts: order.iter().map(|&i| points[i]).collect(),
            marks: order.iter().map(|&i| marks[i]).collect(),
            ids: order,
        }
    }

    fn dist(&self, k: usize, x: Point2) -> f64 {
        x.dist(self.pts[k]) + self.marks[k]
    }

    /// Local index of the nearest generator; `hint` only seeds the search.
    /// Ties go to the lowest global id, so the answer does not depend on it.
    fn argmin(&self, x: Point2, hint: Option<usize>) -> usize {
        let (mut arg, mut best) = match hint {
            Some(h) => (h, self.dist(h, x)),
            None => (0, self.dist(0, x)),
        };
        for k in 0..self.pts.len() {
            let t = self.marks[k];
            if t > best {
                break;
            }
            let r = best - t;
            if x.dist2(self.pts[k]) <= r * r {
                let d = self.dist(k, x);
                if d < best || (d == best && self.ids[k] < self.ids[arg]) {
                    best = d;
                    arg = k;
                }
            }
        }
        arg
    }
}

#[derive(Clone, Copy)]
struct Crossing {
    at: Point2,
    pair: (usize, usize),
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Point of `[p, q]` where the label changes, with the labels on either side.
fn bisect(field: &Field, mut p: Point2, lp: usize, mut q: Point2, mut lq: usize) -> Crossing {
    for _ in 0..64 {
        let m = p.midpoint(q);
        if m == p || m == q {
            break;
        }
        let lm = field.argmin(m, Some(lp));
        if lm == lp {
            p = m;
        } else {
            q = m;
            lq = lm;
        }
    }
    Crossing { at: p.midpoint(q), pair: ordered(lp, lq) }
}

/// Point equidistant from three generators, by Newton's method from `start`.
fn junction(field: &Field, labels: [usize; 3], start: Point2, bound: &BoxRegion) -> Option<Point2> {
    let [a, b, c] = labels;
    let mut x = start;
    for _ in 0..50 {
        let da = field.dist(a, x);
        let f = [da - field.dist(b, x), da - field.dist(c, x)];
        if f[0].abs().max(f[1].abs()) < 1e-13 {
            return bound.contains(x).then_some(x);
        }
        let unit = |k: usize| {
            let v = x - field.pts[k];
            let n = v.norm();
            if n == 0.0 {
                None
            } else {
                Some(v * (1.0 / n))
            }
        };
        let (ua, ub, uc) = (unit(a)?, unit(b)?, unit(c)?);
        let (r0, r1) = (ua - ub, ua - uc);
        let det = r0.cross(r1);
        if det.abs() < 1e-300 {
            return None;
        }
        let step = Point2::new((f[0] * r1.y - f[1] * r0.y) / det, (r0.x * f[1] - r1.x * f[0]) / det);
        x = x - step;
        if !x.is_finite() {
            return None;
        }
    }
    None
}

struct Grid {
    origin: Point2,
    step: f64,
    nodes: usize,
}

impl Grid {
    fn node(&self, i: usize, j: usize) -> Point2 {
        self.origin + Point2::new(i as f64 * self.step, j as f64 * self.step)
    }
}

/// Boundary pieces as `(pair, a, b)` segments plus the node labels (local).
fn march(field: &Field, grid: &Grid) -> (Vec<((usize, usize), Point2, Point2)>, Vec<usize>) {
    let n = grid.nodes;
    let mut labels = vec![0usize; n * n];
    let mut hint = None;
    for j in 0..n {
        for i in 0..n {
            let l = field.argmin(grid.node(i, j), hint);
            labels[j * n + i] = l;
            hint = Some(l);
        }
        hint = Some(labels[j * n]);
    }
    let lab = |i: usize, j: usize| labels[j * n + i];
    // Horizontal lattice edge (i, j)-(i+1, j) and vertical (i, j)-(i, j+1).
    let mut horiz: HashMap<(usize, usize), Crossing> = HashMap::new();
    let mut vert: HashMap<(usize, usize), Crossing> = HashMap::new();
    for j in 0..n {
        for i in 0..n {
            if i + 1 < n && lab(i, j) != lab(i + 1, j) {
                horiz.insert((i, j), bisect(field, grid.node(i, j), lab(i, j), grid.node(i + 1, j), lab(i + 1, j)));
            }
            if j + 1 < n && lab(i, j) != lab(i, j + 1) {
                vert.insert((i, j), bisect(field, grid.node(i, j), lab(i, j), grid.node(i, j + 1), lab(i, j + 1)));
            }
        }
    }
    let mut pieces = Vec::new();
    for j in 0..n.saturating_sub(1) {
        for i in 0..n - 1 {
            let around = [horiz.get(&(i, j)), vert.get(&(i + 1, j)), horiz.get(&(i, j + 1)), vert.get(&(i, j))];
            let hits: Vec<Crossing> = around.iter().flatten().map(|c| **c).collect();
            if hits.is_empty() {
                continue;
            }
            let corners = [lab(i, j), lab(i + 1, j), lab(i + 1, j + 1), lab(i, j + 1)];
            let same_pair = hits.iter().all(|c| c.pair == hits[0].pair);
            if hits.len() == 2 && same_pair {
                pieces.push((hits[0].pair, hits[0].at, hits[1].at));
                continue;
            }
            let center = grid.node(i, j) + Point2::new(0.5 * grid.step, 0.5 * grid.step);
            if hits.len() == 4 && same_pair && corners[0] == corners[2] && corners[1] == corners[3] {
                // Saddle: the center label's corners are joined through the square.
                let c = |k: usize| around[k].unwrap().at;
                let pair = hits[0].pair;
                if field.argmin(center, Some(corners[0])) == corners[0] {
                    pieces.push((pair, c(0), c(1)));
                    pieces.push((pair, c(2), c(3)));
                } else {
                    pieces.push((pair, c(1), c(2)));
                    pieces.push((pair, c(3), c(0)));
                }
                continue;
            }
            let mut involved: Vec<usize> = hits.iter().flat_map(|c| [c.pair.0, c.pair.1]).collect();
            involved.sort_unstable();
            involved.dedup();
            let bound = BoxRegion::new(center, 2.0 * grid.step);
            let solved = match involved[..] {
                [a, b, c] => junction(field, [a, b, c], center, &bound),
                _ => None,
            };
            let j_at = solved.unwrap_or_else(|| {
                let s = hits.iter().fold(Point2::ORIGIN, |acc, c| acc + c.at);
                s * (1.0 / hits.len() as f64)
            });
            for c in &hits {
                pieces.push((c.pair, c.at, j_at));
            }
        }
    }
    (pieces, labels)
}

type Bits = (u64, u64);

fn bits(p: Point2) -> Bits {
    (p.x.to_bits(), p.y.to_bits())
}

/// Joins segments of one pair into maximal chains by shared endpoints.
fn chain(segs: &[(Point2, Point2)]) -> Vec<Vec<Point2>> {
    let mut at: HashMap<Bits, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segs.iter().enumerate() {
        at.entry(bits(*a)).or_default().push(k);
        at.entry(bits(*b)).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let other = |k: usize, p: Point2| if bits(segs[k].0) == bits(p) { segs[k].1 } else { segs[k].0 };
    let next = |p: Point2, used: &[bool]| at[&bits(p)].iter().copied().find(|&k| !used[k]);
    // Start from chain ends first so open chains come out whole.
    let mut starts: Vec<usize> = (0..segs.len()).filter(|&k| at[&bits(segs[k].0)].len() == 1).collect();
    starts.extend(0..segs.len());
    let mut out = Vec::new();
    for s in starts {
        if used[s] {
            continue;
        }
        used[s] = true;
        let mut line = vec![segs[s].0, segs[s].1];
        let mut tail = segs[s].1;
        while let Some(k) = next(tail, &used) {
            used[k] = true;
            tail = other(k, tail);
            line.push(tail);
        }
        let mut head = segs[s].0;
        let mut front = Vec::new();
        while let Some(k) = next(head, &used) {
            used[k] = true;
            head = other(k, head);
            front.push(head);
        }
        front.reverse();
        front.extend(line);
        out.push(front);
    }
    out
}

/// Johnson–Mehl edges of the generators selected by `keep`, traced on a
/// lattice of step at most `grid_step` over the bounding box of `target`.
fn extract(
    points: &[Point2],
    marks: &[f64],
    keep: impl Fn(usize) -> bool,
    target: &Region,
    grid_step: f64,
) -> Result<(Vec<Edge>, LabelGrid)> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::invalid("grid_step must be positive"));
    }
    let field = Field::new(points, marks, keep);
    if field.pts.is_empty() {
        return Err(Error::EmptySample("no Johnson-Mehl generators".into()));
    }
    let bbox = target.bounding_box();
    let cells = (bbox.side / grid_step).ceil().max(1.0) as usize;
    let grid = Grid { origin: bbox.min(), step: bbox.side / cells as f64, nodes: cells + 1 };
    let (pieces, labels) = march(&field, &grid);
    let mut by_pair: HashMap<(usize, usize), Vec<(Point2, Point2)>> = HashMap::new();
    for (pair, a, b) in pieces {
        if a != b {
            by_pair.entry(pair).or_default().push((a, b));
        }
    }
    let mut pairs: Vec<_> = by_pair.into_iter().collect();
    pairs.sort_by_key(|(p, _)| *p);
    let mut edges = Vec::new();
    for ((u, v), segs) in pairs {
        let pair = ordered(field.ids[u], field.ids[v]);
        for verts in chain(&segs) {
            let Ok(p) = Polyline::new(verts, grid.step) else { continue };
            if target.polyline_meets(&p) {
                edges.push(Edge { id: edges.len(), geometry: EdgeGeometry::Polyline(p), pair: Some(pair) });
            }
        }
    }
    let label_grid = LabelGrid {
        origin: grid.origin,
        step: grid.step,
        nodes: grid.nodes,
        labels: labels.iter().map(|&l| field.ids[l] as u32).collect(),
    };
    Ok((edges, label_grid))
}

/// Johnson–Mehl tessellation of a fixed marked pattern over `target`
/// (uncertified).
pub fn build_jmt_from_points(
    points: &[Point2],
    marks: &[f64],
    target: &Region,
    grid_step: f64,
) -> Result<Tessellation> {
    if points.len() != marks.len() {
        return Err(Error::invalid("one mark per point required"));
    }
    let (edges, labels) = extract(points, marks, |_| true, target, grid_step)?;
    Ok(Tessellation {
        edges,
        generators: points.to_vec(),
        marks: Some(marks.to_vec()),
        certified: false,
        window_radius_used: target.circumradius(),
        tolerance: labels.step,
        labels: Some(labels),
        ..Tessellation::empty(TessKind::JohnsonMehl, *target)
    })
}

/// Johnson–Mehl tessellation of a marked `source` restricted to `target`.
///
/// With `R′` the smallest value of `|X_i − c| + T_i` over the sample (`c` the
/// target center, `a` its circumradius), every edge point in the target is at
/// Johnson–Mehl distance at most `R′ + a` from its two nearest generators, so
/// only generators with `|X_i − c| + T_i ≤ R′ + 3a` matter. Disk windows
/// double from `4a` until they contain all of those.
pub fn build_jmt(
    source: &PointSource,
    target: &Region,
    grid_step: f64,
    key: &StreamKey,
    opts: &BuildOptions,
) -> Result<Tessellation> {
    if source.marks.is_none() {
        return Err(Error::invalid("Johnson-Mehl source needs a mark law"));
    }
    let a = target.circumradius();
    let c = target.center();
    let cap = opts.max_window_factor * a;
    let mut radii = vec![4.0 * a];
    loop {
        let m = *radii.last().unwrap();
        let sample = source.sample_levels(&Levels::Disks { center: c, radii: radii.clone() }, key)?;
        let pts = &sample.pattern.points;
        let marks = sample.marks.as_deref().unwrap_or_default();
        let r_prime = pts.iter().zip(marks).map(|(p, t)| p.dist(c) + t).fold(f64::INFINITY, f64::min);
        let reach = r_prime + 3.0 * a;
        let certified = reach <= m;
        if certified || 2.0 * m > cap {
            if pts.is_empty() {
                return Err(Error::EmptySample(format!("no marked points within radius {m}")));
            }
            if !certified {
                warn!("Johnson-Mehl locality not reached within window radius {m}");
            }
            let (edges, labels) = extract(pts, marks, |i| pts[i].dist(c) + marks[i] <= reach, target, grid_step)?;
            return Ok(Tessellation {
                edges,
                generators: sample.pattern.points.clone(),
                marks: sample.marks.clone(),
                origin: sample.origin,
                certified,
                window_radius_used: m,
                tolerance: labels.step,
                labels: Some(labels),
                ..Tessellation::empty(TessKind::JohnsonMehl, *target)
            });
        }
        radii.push(2.0 * m);
    }
}
