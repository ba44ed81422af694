//! Incremental Delaunay triangulation (Bowyer–Watson with a vertex at infinity).
//!
//! Points are inserted in Hilbert order; each insertion walks to a conflicting
//! triangle, grows the conflict cavity by breadth-first search and re-stars it
//! around the new point. Hull edges are bounded by "ghost" triangles that share
//! the infinite vertex, so points outside the current hull need no special
//! case. Predicates are exact and cocircular ties are broken symbolically by
//! point index (see [`super::predicates`]), so the output is unique for any
//! input without duplicate points. Duplicates are ignored after their first
//! occurrence; an all-collinear input yields the path through the sorted
//! points.

use std::collections::BTreeSet;

use super::predicates::{incircle_sos, orient2d};
use super::Point2;

const GHOST: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

/// Face on one side of a Delaunay edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Face {
    /// Finite triangle, vertices counter-clockwise.
    Triangle([usize; 3]),
    /// Outside the convex hull.
    Outside,
}

/// An undirected Delaunay edge `u < v` with the faces to its left and right
/// when traversed from `u` to `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DelaunayEdge {
    pub u: usize,
    pub v: usize,
    pub left: Face,
    pub right: Face,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    points: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<DelaunayEdge>,
    collinear: bool,
    vertices: Vec<bool>,
}

impl Triangulation {
    /// Triangulates `points`. Non-finite points are ignored.
    pub fn new(points: &[Point2]) -> Triangulation {
        let mut builder = Builder::new(points);
        builder.run();
        builder.finish()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    /// Finite triangles, counter-clockwise.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[DelaunayEdge] {
        &self.edges
    }

    /// True when all (distinct) input points are collinear; edges then form a
    /// path and have no adjacent triangles.
    pub fn is_collinear(&self) -> bool {
        self.collinear
    }

    /// Whether input point `i` is a vertex (false for duplicates).
    pub fn is_vertex(&self, i: usize) -> bool {
        self.vertices.get(i).copied().unwrap_or(false)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| **v).count()
    }

    /// Delaunay neighbours of every point.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.points.len()];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn edge_pairs(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    /// Whether vertex `i` lies on the convex hull.
    pub fn on_hull(&self, i: usize) -> bool {
        self.edges.iter().any(|e| (e.u == i || e.v == i) && (e.left == Face::Outside || e.right == Face::Outside))
    }
}

struct Builder<'a> {
    pts: &'a [Point2],
    tris: Vec<[u32; 3]>,
    nbrs: Vec<[u32; 3]>,
    alive: Vec<bool>,
    free: Vec<u32>,
    mark: Vec<u32>,
    epoch: u32,
    hint: u32,
    vertices: Vec<bool>,
    collinear_path: Option<Vec<(usize, usize)>>,
    walk_rot: usize,
    // Scratch buffers reused across insertions.
    cavity: Vec<u32>,
    stack: Vec<u32>,
    boundary: Vec<(u32, u32, u32)>,
    created: Vec<(u32, u32, u32)>,
    by_end: Vec<(u32, u32)>,
}

enum Located {
    Duplicate,
    Conflict(u32),
}

impl<'a> Builder<'a> {
    fn new(pts: &'a [Point2]) -> Self {
        Builder {
            pts,
            tris: Vec::new(),
            nbrs: Vec::new(),
            alive: Vec::new(),
            free: Vec::new(),
            mark: Vec::new(),
            epoch: 0,
            hint: 0,
            vertices: vec![false; pts.len()],
            collinear_path: None,
            walk_rot: 0,
            cavity: Vec::new(),
            stack: Vec::new(),
            boundary: Vec::new(),
            created: Vec::new(),
            by_end: Vec::new(),
        }
    }

    fn p(&self, v: u32) -> Point2 {
        self.pts[v as usize]
    }

    fn run(&mut self) {
        let order = hilbert_order(self.pts);
        if order.is_empty() {
            return;
        }
        let i0 = order[0];
        let Some(i1) = order.iter().copied().find(|&i| self.pts[i] != self.pts[i0]) else {
            self.vertices[i0] = true;
            self.collinear_path = Some(Vec::new());
            return;
        };
        let (p0, p1) = (self.pts[i0], self.pts[i1]);
        let Some(i2) = order.iter().copied().find(|&i| orient2d(p0, p1, self.pts[i]) != 0.0) else {
            self.collinear(&order, p0, p1);
            return;
        };
        let (a, b, c) = if orient2d(p0, p1, self.pts[i2]) > 0.0 { (i0, i1, i2) } else { (i0, i2, i1) };
        let cap = 2 * order.len() + 8;
        self.tris.reserve(cap);
        self.nbrs.reserve(cap);
        self.alive.reserve(cap);
        self.mark.reserve(cap);
        self.init(a as u32, b as u32, c as u32);
        for &i in &order {
            if i == i0 || i == i1 || i == i2 {
                continue;
            }
            self.insert(i as u32);
        }
    }

    fn collinear(&mut self, order: &[usize], p0: Point2, p1: Point2) {
        let dir = p1 - p0;
        let mut idx: Vec<usize> = order.to_vec();
        idx.sort_by(|&i, &j| {
            let ti = (self.pts[i] - p0).dot(dir);
            let tj = (self.pts[j] - p0).dot(dir);
            ti.total_cmp(&tj).then(i.cmp(&j))
        });
        let mut kept: Vec<usize> = Vec::new();
        for i in idx {
            if kept.last().is_none_or(|&k| self.pts[k] != self.pts[i]) {
                kept.push(i);
            }
        }
        for &k in &kept {
            self.vertices[k] = true;
        }
        self.collinear_path = Some(kept.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect());
    }

    fn alloc(&mut self, t: [u32; 3]) -> u32 {
        if let Some(id) = self.free.pop() {
            self.tris[id as usize] = t;
            self.nbrs[id as usize] = [NONE; 3];
            self.alive[id as usize] = true;
            id
        } else {
            self.tris.push(t);
            self.nbrs.push([NONE; 3]);
            self.alive.push(true);
            self.mark.push(0);
            (self.tris.len() - 1) as u32
        }
    }

    fn init(&mut self, a: u32, b: u32, c: u32) {
        let ids =
            [self.alloc([a, b, c]), self.alloc([b, a, GHOST]), self.alloc([c, b, GHOST]), self.alloc([a, c, GHOST])];
        for &t in &ids {
            for i in 0..3 {
                let (u, w) = self.edge(t, i);
                for &s in &ids {
                    if s == t {
                        continue;
                    }
                    for j in 0..3 {
                        if self.edge(s, j) == (w, u) {
                            self.nbrs[t as usize][i] = s;
                        }
                    }
                }
            }
        }
        for v in [a, b, c] {
            self.vertices[v as usize] = true;
        }
        self.hint = ids[0];
    }

    /// Directed edge opposite vertex slot `i`.
    fn edge(&self, t: u32, i: usize) -> (u32, u32) {
        let tri = self.tris[t as usize];
        (tri[(i + 1) % 3], tri[(i + 2) % 3])
    }

    fn ghost_slot(&self, t: u32) -> Option<usize> {
        self.tris[t as usize].iter().position(|&v| v == GHOST)
    }

    fn in_conflict(&self, t: u32, v: u32) -> bool {
        let p = self.p(v);
        let tri = self.tris[t as usize];
        match self.ghost_slot(t) {
            Some(k) => {
                let (e0, e1) = (self.p(tri[(k + 1) % 3]), self.p(tri[(k + 2) % 3]));
                let o = orient2d(e0, e1, p);
                o > 0.0 || (o == 0.0 && (p - e0).dot(e1 - e0) > 0.0 && (p - e1).dot(e0 - e1) > 0.0)
            }
            None => incircle_sos(self.pts, tri[0] as usize, tri[1] as usize, tri[2] as usize, v as usize),
        }
    }

    fn locate(&mut self, v: u32) -> Located {
        let p = self.p(v);
        let mut t = self.hint;
        if !self.alive[t as usize] {
            t = self.alive.iter().position(|&a| a).unwrap() as u32;
        }
        if let Some(k) = self.ghost_slot(t) {
            t = self.nbrs[t as usize][k];
        }
        let max_steps = 4 * self.tris.len() + 16;
        for _ in 0..max_steps {
            if self.ghost_slot(t).is_some() {
                return Located::Conflict(t);
            }
            self.walk_rot = (self.walk_rot + 1) % 3;
            let mut moved = false;
            for k in 0..3 {
                let i = (self.walk_rot + k) % 3;
                let (e0, e1) = self.edge(t, i);
                if orient2d(self.p(e0), self.p(e1), p) < 0.0 {
                    t = self.nbrs[t as usize][i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                if self.tris[t as usize].iter().any(|&w| self.p(w) == p) {
                    return Located::Duplicate;
                }
                return Located::Conflict(t);
            }
        }
        // Walk did not terminate; fall back to a scan.
        for (s, &alive) in self.alive.iter().enumerate() {
            if alive && self.tris[s].iter().any(|&w| w != GHOST && self.p(w) == p) {
                return Located::Duplicate;
            }
        }
        for s in 0..self.tris.len() {
            if self.alive[s] && self.in_conflict(s as u32, v) {
                return Located::Conflict(s as u32);
            }
        }
        unreachable!("no conflicting triangle for a new point")
    }

    fn insert(&mut self, v: u32) {
        let t0 = match self.locate(v) {
            Located::Duplicate => return,
            Located::Conflict(t) => t,
        };
        self.epoch = self.epoch.wrapping_add(2);
        if self.epoch < 2 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 2;
        }
        let yes = self.epoch;
        let no = self.epoch + 1;
        let mut cavity = std::mem::take(&mut self.cavity);
        let mut stack = std::mem::take(&mut self.stack);
        // (u, w, outside triangle)
        let mut boundary = std::mem::take(&mut self.boundary);
        let mut created = std::mem::take(&mut self.created);
        let mut by_end = std::mem::take(&mut self.by_end);
        cavity.clear();
        stack.clear();
        boundary.clear();
        created.clear();
        by_end.clear();
        cavity.push(t0);
        stack.push(t0);
        self.mark[t0 as usize] = yes;
        while let Some(t) = stack.pop() {
            for i in 0..3 {
                let nb = self.nbrs[t as usize][i];
                let m = self.mark[nb as usize];
                if m == yes {
                    continue;
                }
                if m != no && self.in_conflict(nb, v) {
                    self.mark[nb as usize] = yes;
                    cavity.push(nb);
                    stack.push(nb);
                } else {
                    self.mark[nb as usize] = no;
                    let (u, w) = self.edge(t, i);
                    boundary.push((u, w, nb));
                }
            }
        }
        for &t in &cavity {
            self.alive[t as usize] = false;
            self.free.push(t);
        }
        for &(u, w, outside) in &boundary {
            let nt = self.alloc([u, w, v]);
            self.nbrs[nt as usize][2] = outside;
            let slot = (0..3).find(|&j| self.edge(outside, j) == (w, u)).expect("cavity boundary mismatch");
            self.nbrs[outside as usize][slot] = nt;
            created.push((u, w, nt));
        }
        created.sort_unstable_by_key(|c| c.0);
        by_end.extend(created.iter().map(|c| (c.1, c.2)));
        by_end.sort_unstable();
        for &(u, w, nt) in &created {
            self.nbrs[nt as usize][0] = created[created.binary_search_by_key(&w, |c| c.0).expect("open cavity")].2;
            self.nbrs[nt as usize][1] = by_end[by_end.binary_search_by_key(&u, |c| c.0).expect("open cavity")].1;
        }
        self.vertices[v as usize] = true;
        self.hint = created.iter().find(|c| c.0 != GHOST && c.1 != GHOST).map_or(created[0].2, |c| c.2);
        self.cavity = cavity;
        self.stack = stack;
        self.boundary = boundary;
        self.created = created;
        self.by_end = by_end;
    }

    fn finish(self) -> Triangulation {
        let points = self.pts.to_vec();
        if let Some(path) = self.collinear_path {
            let edges = path
                .into_iter()
                .map(|(u, v)| DelaunayEdge { u, v, left: Face::Outside, right: Face::Outside })
                .collect();
            return Triangulation { points, triangles: Vec::new(), edges, collinear: true, vertices: self.vertices };
        }
        let mut triangles = Vec::new();
        let mut edges = Vec::new();
        for t in 0..self.tris.len() {
            if !self.alive[t] {
                continue;
            }
            let tri = self.tris[t];
            let face = |s: usize| -> Face {
                let tt = self.tris[s];
                if tt.contains(&GHOST) {
                    Face::Outside
                } else {
                    Face::Triangle([tt[0] as usize, tt[1] as usize, tt[2] as usize])
                }
            };
            if !tri.contains(&GHOST) {
                triangles.push([tri[0] as usize, tri[1] as usize, tri[2] as usize]);
            }
            for i in 0..3 {
                let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                if a == GHOST || b == GHOST || a > b {
                    continue;
                }
                // Triangle t lies to the left of a -> b.
                let other = self.nbrs[t][i] as usize;
                edges.push(DelaunayEdge { u: a as usize, v: b as usize, left: face(t), right: face(other) });
            }
        }
        edges.sort_unstable_by_key(|e| (e.u, e.v));
        triangles.sort_unstable();
        Triangulation { points, triangles, edges, collinear: false, vertices: self.vertices }
    }
}

/// Indices of the finite points sorted along a Hilbert curve over their
/// bounding box.
fn hilbert_order(pts: &[Point2]) -> Vec<usize> {
    let idx: Vec<usize> = (0..pts.len()).filter(|&i| pts[i].is_finite()).collect();
    if idx.len() <= 2 {
        return idx;
    }
    let (mut lo, mut hi) = (pts[idx[0]], pts[idx[0]]);
    for &i in &idx {
        lo = Point2::new(lo.x.min(pts[i].x), lo.y.min(pts[i].y));
        hi = Point2::new(hi.x.max(pts[i].x), hi.y.max(pts[i].y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    const N: u32 = 1 << 16;
    let mut keyed: Vec<(u64, usize)> = idx
        .into_iter()
        .map(|i| {
            let gx = (((pts[i].x - lo.x) / span) * (N - 1) as f64) as u32;
            let gy = (((pts[i].y - lo.y) / span) * (N - 1) as f64) as u32;
            (hilbert_d(N, gx, gy), i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

fn hilbert_d(n: u32, mut x: u32, mut y: u32) -> u64 {
    let mut d: u64 = 0;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += (s as u64) * (s as u64) * ((3 * rx) ^ ry) as u64;
        if ry == 0 {
            if rx == 1 {
                x = s.wrapping_sub(1).wrapping_sub(x) & (n - 1);
                y = s.wrapping_sub(1).wrapping_sub(y) & (n - 1);
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::circumdisk;
    use rand::{Rng, SeedableRng};

    fn random_points(seed: u64, n: usize) -> Vec<Point2> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    /// O(n⁴) oracle: (i, j) is a Delaunay edge iff some circle through both
    /// has no point strictly inside (witnessed by a third point or by the
    /// diametral circle).
    fn brute_force_edges(p: &[Point2]) -> BTreeSet<(usize, usize)> {
        let n = p.len();
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                let empty =
                    |c: Point2, r2: f64| (0..n).all(|k| k == i || k == j || p[k].dist2(c) >= r2 * (1.0 - 1e-12));
                let mid = p[i].midpoint(p[j]);
                let mut ok = empty(mid, mid.dist2(p[i]));
                for k in 0..n {
                    if ok {
                        break;
                    }
                    if k == i || k == j {
                        continue;
                    }
                    if let Ok(d) = circumdisk(p[i], p[j], p[k]) {
                        ok = (0..n)
                            .all(|m| m == i || m == j || m == k || p[m].dist(d.center) >= d.radius * (1.0 - 1e-12));
                    }
                }
                if ok {
                    out.insert((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn three_points() {
        let t = Triangulation::new(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)]);
        assert_eq!(t.edges().len(), 3);
        assert_eq!(t.triangles().len(), 1);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(Triangulation::new(&[]).edges().is_empty());
        assert!(Triangulation::new(&[Point2::new(1.0, 1.0)]).edges().is_empty());
        let two = Triangulation::new(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]);
        assert_eq!(two.edge_pairs(), BTreeSet::from([(0, 1)]));
        let line: Vec<Point2> = [3.0, 0.0, 1.0, 2.0].iter().map(|&x| Point2::new(x, 2.0 * x)).collect();
        let t = Triangulation::new(&line);
        assert!(t.is_collinear());
        assert_eq!(t.edge_pairs(), BTreeSet::from([(1, 2), (2, 3), (0, 3)]));
    }

    #[test]
    fn duplicates_are_ignored() {
        let mut p = random_points(5, 30);
        p.push(p[3]);
        p.push(p[10]);
        let t = Triangulation::new(&p);
        assert!(!t.is_vertex(30) && !t.is_vertex(31));
        let q = &p[..30];
        assert_eq!(t.edge_pairs(), Triangulation::new(q).edge_pairs());
    }

    #[test]
    fn matches_brute_force_small() {
        for seed in 0..300 {
            let n = 3 + (seed as usize % 10);
            let p = random_points(seed, n);
            let t = Triangulation::new(&p);
            assert_eq!(t.edge_pairs(), brute_force_edges(&p), "seed {seed}");
        }
    }

    #[test]
    fn empty_circumdisks_and_euler() {
        let p = random_points(99, 400);
        let t = Triangulation::new(&p);
        for tri in t.triangles() {
            assert!(orient2d(p[tri[0]], p[tri[1]], p[tri[2]]) > 0.0);
            let d = circumdisk(p[tri[0]], p[tri[1]], p[tri[2]]).unwrap();
            for (k, q) in p.iter().enumerate() {
                if !tri.contains(&k) {
                    assert!(q.dist(d.center) >= d.radius * (1.0 - 1e-9));
                }
            }
        }
        let n = p.len();
        assert!(t.edges().len() <= 3 * n - 6);
        let hull = t.edges().iter().filter(|e| e.left == Face::Outside || e.right == Face::Outside).count();
        // Euler: E = 3n - 3 - h, T = 2n - 2 - h for points in general position.
        assert_eq!(t.edges().len(), 3 * n - 3 - hull);
        assert_eq!(t.triangles().len(), 2 * n - 2 - hull);
    }

    #[test]
    fn lattice_input_is_a_triangulation() {
        // Many exact cocircular quadruples and collinear hull points.
        let mut p = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                p.push(Point2::new(i as f64, j as f64));
            }
        }
        let t = Triangulation::new(&p);
        let n = p.len();
        let hull = t.edges().iter().filter(|e| e.left == Face::Outside || e.right == Face::Outside).count();
        assert_eq!(hull, 28);
        assert_eq!(t.edges().len(), 3 * n - 3 - hull);
        assert_eq!(t.triangles().len(), 2 * n - 2 - hull);
        let area: f64 = t.triangles().iter().map(|tr| 0.5 * orient2d(p[tr[0]], p[tr[1]], p[tr[2]])).sum();
        assert!((area - 49.0).abs() < 1e-9);
        // Deterministic regardless of input order.
        let mut rev = p.clone();
        rev.reverse();
        let t2 = Triangulation::new(&rev);
        assert_eq!(t2.edges().len(), t.edges().len());
    }
}
