//! Uniform bucket grid for nearest-point and range queries.

use super::Point2;

#[derive(Clone, Debug)]
pub struct PointIndex {
    points: Vec<Point2>,
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    // CSR layout: bucket b holds ids[start[b]..start[b + 1]].
    start: Vec<usize>,
    ids: Vec<usize>,
}

impl PointIndex {
    /// Indexes the finite points of `points`; ids refer to positions in the
    /// input slice.
    pub fn new(points: &[Point2]) -> Self {
        let finite: Vec<usize> = (0..points.len()).filter(|&i| points[i].is_finite()).collect();
        let (mut lo, mut hi) = (Point2::new(0.0, 0.0), Point2::new(0.0, 0.0));
        if let Some(&f) = finite.first() {
            lo = points[f];
            hi = points[f];
        }
        for &i in &finite {
            lo = Point2::new(lo.x.min(points[i].x), lo.y.min(points[i].y));
            hi = Point2::new(hi.x.max(points[i].x), hi.y.max(points[i].y));
        }
        let (w, h) = ((hi.x - lo.x).max(1e-12), (hi.y - lo.y).max(1e-12));
        let n = finite.len().max(1);
        // About two points per bucket.
        let cell = ((w * h * 2.0) / n as f64).sqrt().max(w.max(h) / 4096.0).max(1e-12);
        let nx = ((w / cell).floor() as usize + 1).min(4096);
        let ny = ((h / cell).floor() as usize + 1).min(4096);
        let mut index = PointIndex {
            points: points.to_vec(),
            origin: lo,
            cell,
            nx,
            ny,
            start: vec![0; nx * ny + 1],
            ids: vec![0; finite.len()],
        };
        let buckets: Vec<usize> = finite.iter().map(|&i| index.bucket_of(points[i])).collect();
        for &b in &buckets {
            index.start[b + 1] += 1;
        }
        for b in 0..nx * ny {
            index.start[b + 1] += index.start[b];
        }
        let mut fill = index.start.clone();
        for (&i, &b) in finite.iter().zip(&buckets) {
            index.ids[fill[b]] = i;
            fill[b] += 1;
        }
        index
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    fn cell_coords(&self, p: Point2) -> (usize, usize) {
        let cx = ((p.x - self.origin.x) / self.cell).floor();
        let cy = ((p.y - self.origin.y) / self.cell).floor();
        (cx.clamp(0.0, (self.nx - 1) as f64) as usize, cy.clamp(0.0, (self.ny - 1) as f64) as usize)
    }

    fn bucket_of(&self, p: Point2) -> usize {
        let (cx, cy) = self.cell_coords(p);
        cy * self.nx + cx
    }

    fn bucket(&self, cx: usize, cy: usize) -> &[usize] {
        let b = cy * self.nx + cx;
        &self.ids[self.start[b]..self.start[b + 1]]
    }

    /// Visits buckets on the Chebyshev ring `k` around `(cx, cy)`. Returns
    /// false when the ring lies entirely outside the grid.
    fn ring(&self, cx: usize, cy: usize, k: usize, mut f: impl FnMut(usize)) -> bool {
        let (cx, cy, k) = (cx as i64, cy as i64, k as i64);
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        if cx - k < 0 && cy - k < 0 && cx + k >= nx && cy + k >= ny {
            return false;
        }
        let mut visit = |x: i64, y: i64| {
            if x >= 0 && y >= 0 && x < nx && y < ny {
                for &i in self.bucket(x as usize, y as usize) {
                    f(i);
                }
            }
        };
        if k == 0 {
            visit(cx, cy);
            return true;
        }
        for x in cx - k..=cx + k {
            visit(x, cy - k);
            visit(x, cy + k);
        }
        for y in cy - k + 1..cy + k {
            visit(cx - k, y);
            visit(cx + k, y);
        }
        true
    }

    /// The `count` nearest indexed points to `q`, closest first, ties by id.
    pub fn k_nearest(&self, q: Point2, count: usize) -> Vec<(usize, f64)> {
        if self.ids.is_empty() || count == 0 {
            return Vec::new();
        }
        let (cx, cy) = self.cell_coords(q);
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(count + 1);
        let mut k = 0;
        loop {
            let any = self.ring(cx, cy, k, |i| {
                let d2 = self.points[i].dist2(q);
                let key = (d2, i);
                if best.len() < count || key < *best.last().unwrap() {
                    let pos = best.partition_point(|b| *b < key);
                    best.insert(pos, key);
                    best.truncate(count);
                }
            });
            // Points beyond ring k are at least k cells away from q's
            // (projected) cell.
            let reach = k as f64 * self.cell;
            if best.len() == count.min(self.ids.len()) && best.last().unwrap().0 <= reach * reach {
                break;
            }
            if !any {
                break;
            }
            k += 1;
        }
        best.into_iter().map(|(d2, i)| (i, d2.sqrt())).collect()
    }

    pub fn nearest(&self, q: Point2) -> Option<(usize, f64)> {
        self.k_nearest(q, 1).into_iter().next()
    }

    /// Ids of points within distance `r` of `q` (closed), sorted.
    pub fn within(&self, q: Point2, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if self.ids.is_empty() || !(r >= 0.0) {
            return out;
        }
        let lo = self.cell_coords(Point2::new(q.x - r, q.y - r));
        let hi = self.cell_coords(Point2::new(q.x + r, q.y + r));
        let r2 = r * r;
        for cy in lo.1..=hi.1 {
            for cx in lo.0..=hi.0 {
                out.extend(self.bucket(cx, cy).iter().copied().filter(|&i| self.points[i].dist2(q) <= r2));
            }
        }
        out.sort_unstable();
        out
    }
}
