//! Functionals of a tessellation realization: total edge length, edge and
//! cell counts, and the radii used by the stabilization arguments.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::delaunay::Triangulation;
use crate::geom::{circumdisk, BoxRegion, Point2, Region};
use crate::pointproc::{Levels, PointModel, PointSource};
use crate::rng::StreamKey;
use crate::tess::{discretization_radius, BuildOptions, EdgeKey, TessKind, Tessellation};

const CONTAIN_EPS: f64 = 1e-12;

/// Whether `inner` lies in `outer` (up to rounding).
pub fn region_within(inner: &Region, outer: &Region) -> bool {
    let eps = CONTAIN_EPS * (1.0 + outer.circumradius() + outer.center().norm());
    match (inner, outer) {
        (Region::Disk(d), Region::Disk(o)) => d.center.dist(o.center) + d.radius <= o.radius + eps,
        (Region::Disk(d), Region::Box(b)) => {
            (d.center.x - b.center.x).abs() + d.radius <= b.half() + eps
                && (d.center.y - b.center.y).abs() + d.radius <= b.half() + eps
        }
        (Region::Box(b), Region::Disk(o)) => b.corners().iter().all(|c| c.dist(o.center) <= o.radius + eps),
        (Region::Box(b), Region::Box(o)) => {
            (b.center.x - o.center.x).abs() + b.half() <= o.half() + eps
                && (b.center.y - o.center.y).abs() + b.half() <= o.half() + eps
        }
    }
}

fn check_region(t: &Tessellation, d: &Region) -> Result<()> {
    d.validate()?;
    if region_within(d, &t.target) {
        Ok(())
    } else {
        Err(Error::invalid("measurement region exceeds the construction target"))
    }
}

/// `ν₁(S ∩ d)`: summed clipped lengths of the edges.
pub fn total_edge_length(t: &Tessellation, d: &Region) -> Result<f64> {
    check_region(t, d)?;
    Ok(t.edges.iter().map(|e| e.geometry.length_in(d)).sum())
}

/// Number of distinct edges meeting the closed region `d`. Edges with a
/// generator pair are identified by it; Manhattan edges are whole lines.
pub fn count_edges_w(t: &Tessellation, d: &Region) -> Result<usize> {
    check_region(t, d)?;
    if t.kind == TessKind::Line {
        return Err(Error::Unsupported("line tessellations have no finite edges; use count_lines_winf".into()));
    }
    let keys: BTreeSet<EdgeKey> = t.edges.iter().filter(|e| e.geometry.meets(d)).map(|e| e.key()).collect();
    Ok(keys.len())
}

/// Number of lines of a line tessellation meeting `d`.
pub fn count_lines_winf(t: &Tessellation, d: &Region) -> Result<usize> {
    check_region(t, d)?;
    if t.kind != TessKind::Line {
        return Err(Error::Unsupported("line count needs a line tessellation".into()));
    }
    Ok(t.edges.iter().filter(|e| e.geometry.meets(d)).count())
}

/// Number of cells meeting the closed region `d`.
///
/// Polygonal cells are tested directly. Johnson–Mehl cells are the labels of
/// lattice nodes in `d` together with the generators of edges meeting `d`; a
/// cell meeting `d` only between lattice nodes and without an edge in `d` is
/// missed, so that count is exact only for fine enough lattices.
pub fn count_cells_v(t: &Tessellation, d: &Region) -> Result<usize> {
    check_region(t, d)?;
    let v = match (&t.cells, &t.labels) {
        (Some(cells), _) if t.kind != TessKind::Nested => cells.iter().filter(|c| c.polygon.meets(d)).count(),
        (_, Some(grid)) => {
            let mut ids: BTreeSet<usize> = BTreeSet::new();
            for j in 0..grid.nodes {
                for i in 0..grid.nodes {
                    if d.contains(grid.node(i, j)) {
                        ids.insert(grid.label(i, j) as usize);
                    }
                }
            }
            for e in t.edges.iter().filter(|e| e.geometry.meets(d)) {
                if let Some((u, v)) = e.pair {
                    ids.insert(u);
                    ids.insert(v);
                }
            }
            ids.len()
        }
        _ => return Err(Error::Unsupported(format!("cell count for {} tessellations", t.kind.as_str()))),
    };
    // With no edge in `d` the region lies in a single cell.
    if count_edges_w(t, d)? == 0 {
        return Ok(1);
    }
    Ok(v)
}

/// Distance from `center` to the nearest point.
pub fn nearest_radius_r(points: &[Point2], center: Point2) -> Result<f64> {
    points.iter().map(|p| p.dist(center)).min_by(f64::total_cmp).ok_or(Error::NoPoints)
}

/// Smallest Johnson–Mehl distance `|X_i − center| + T_i`.
pub fn jm_nearest_r_prime(points: &[Point2], marks: &[f64], center: Point2) -> Result<f64> {
    if points.len() != marks.len() {
        return Err(Error::invalid("one mark per point required"));
    }
    points.iter().zip(marks).map(|(p, t)| p.dist(center) + t).min_by(f64::total_cmp).ok_or(Error::NoPoints)
}

/// Discretization radius of a pattern sampled on the box `Q_side(center)`.
pub fn discretization_r(points: &[Point2], center: Point2, a: f64, window_side: f64) -> Result<u32> {
    discretization_radius(points, center, a, window_side).ok_or_else(|| {
        Error::WindowTooSmall(format!("discretization radius undetermined in window side {window_side}"))
    })
}

/// Delaunay degree of point `origin` in a fixed pattern.
pub fn palm_delaunay_degree(points: &[Point2], origin: usize) -> Result<usize> {
    if origin >= points.len() {
        return Err(Error::invalid("origin index out of range"));
    }
    let tri = Triangulation::new(points);
    Ok(tri.adjacency()[origin].len())
}

/// Delaunay degree of the origin under the Palm version of a Poisson model,
/// with square windows doubling until the origin is interior to the hull and
/// each triangle at it has its circumdisk strictly inside the window.
pub fn palm_delaunay_degree_adaptive(lambda: f64, key: &StreamKey, opts: &BuildOptions) -> Result<usize> {
    let source = PointSource::new(PointModel::Poisson { lambda }).palm();
    source.validate()?;
    let mut sides = vec![(8.0 / lambda.sqrt()).max(1.0)];
    let cap = 2.0 * opts.max_window_factor * sides[0];
    loop {
        let side = *sides.last().unwrap();
        let sample = source.sample_levels(&Levels::boxes(sides.clone()), key)?;
        let o = sample.origin.ok_or_else(|| Error::invalid("Palm sample without origin"))?;
        let pts = &sample.pattern.points;
        let tri = Triangulation::new(pts);
        let window = BoxRegion::centered(side);
        let incident: Vec<[usize; 3]> = tri.triangles().iter().copied().filter(|t| t.contains(&o)).collect();
        let certified = !tri.is_collinear()
            && !tri.on_hull(o)
            && incident
                .iter()
                .all(|t| circumdisk(pts[t[0]], pts[t[1]], pts[t[2]]).is_ok_and(|d| window.contains_disk_strictly(&d)));
        if certified {
            return Ok(tri.adjacency()[o].len());
        }
        if 2.0 * side > cap {
            return Err(Error::Uncertified(format!("Palm Delaunay degree within window side {side}")));
        }
        sides.push(2.0 * side);
    }
}

/// Functionals of one realization, measured on its construction target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Functionals {
    pub total_length: f64,
    pub edge_count: Option<usize>,
    pub cell_count: Option<usize>,
    pub line_count: Option<usize>,
    pub r: Option<f64>,
    pub r_prime: Option<f64>,
    pub disc_r: Option<u32>,
    pub palm_degree: Option<usize>,
    pub certified: bool,
}

impl Functionals {
    pub fn of(t: &Tessellation) -> Result<Self> {
        let d = t.target;
        let center = d.center();
        let total_length = total_edge_length(t, &d)?;
        let (edge_count, line_count) = if t.kind == TessKind::Line {
            (None, Some(count_lines_winf(t, &d)?))
        } else {
            (Some(count_edges_w(t, &d)?), None)
        };
        let cell_count = match t.kind {
            TessKind::Line | TessKind::Nested => None,
            _ => Some(count_cells_v(t, &d)?),
        };
        let r = nearest_radius_r(&t.generators, center).ok();
        let r_prime = match (t.kind, &t.marks) {
            (TessKind::JohnsonMehl, Some(m)) => jm_nearest_r_prime(&t.generators, m, center).ok(),
            _ => None,
        };
        let palm_degree = match (t.kind, t.origin) {
            (TessKind::Delaunay, Some(o)) if t.certified => {
                Some(t.edges.iter().filter(|e| e.pair.is_some_and(|(u, v)| u == o || v == o)).count())
            }
            _ => None,
        };
        Ok(Functionals {
            total_length,
            edge_count,
            cell_count,
            line_count,
            r,
            r_prime,
            disc_r: t.disc_r,
            palm_degree,
            certified: t.certified,
        })
    }
}

/// One CSV row per realization, in the documented column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalsRow {
    pub seed: u64,
    pub stream: u64,
    pub kind: &'static str,
    pub a: f64,
    pub length: f64,
    #[serde(rename = "W")]
    pub w: Option<usize>,
    #[serde(rename = "V")]
    pub v: Option<usize>,
    #[serde(rename = "W_inf")]
    pub w_inf: Option<usize>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    #[serde(rename = "R_prime")]
    pub r_prime: Option<f64>,
    #[serde(rename = "disc_R")]
    pub disc_r: Option<u32>,
    pub palm_degree: Option<usize>,
    pub certified: bool,
}

impl FunctionalsRow {
    pub fn new(key: &StreamKey, t: &Tessellation, f: &Functionals) -> Self {
        FunctionalsRow {
            seed: key.seed(),
            stream: key.stream(),
            kind: t.kind.as_str(),
            a: t.target.circumradius(),
            length: f.total_length,
            w: f.edge_count,
            v: f.cell_count,
            w_inf: f.line_count,
            r: f.r,
            r_prime: f.r_prime,
            disc_r: f.disc_r,
            palm_degree: f.palm_degree,
            certified: f.certified,
        }
    }
}
