//! Tessellations restricted to a target region, with stabilization
//! certificates.
//!
//! A builder samples its driving process on growing windows until a
//! certificate shows that no point outside the window can change the
//! tessellation inside the target. The resulting [`Tessellation`] keeps only
//! the edges (and cells) that meet the target.

mod delaunay;
mod jmt;
mod lines;
mod manhattan;
mod nested;
mod voronoi;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::polygon::ConvexPolygon;
use crate::geom::{BoxRegion, LineRT, Point2, Polyline, Region, Segment};
use crate::pointproc::PointSource;
use crate::rng::StreamKey;

pub use delaunay::{build_delaunay, discretization_radius, restrict_delaunay_certified};
pub use jmt::{build_jmt, build_jmt_from_points, jm_argmin, DEFAULT_GRID_STEP};
pub use lines::build_lt;
pub use manhattan::build_mg;
pub use nested::build_nested;
pub use voronoi::{build_voronoi, restrict_voronoi_certified};

/// Version of the JSON interchange format.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TessKind {
    Voronoi,
    Delaunay,
    JohnsonMehl,
    Line,
    Manhattan,
    Nested,
}

impl TessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TessKind::Voronoi => "voronoi",
            TessKind::Delaunay => "delaunay",
            TessKind::JohnsonMehl => "johnson_mehl",
            TessKind::Line => "line",
            TessKind::Manhattan => "manhattan",
            TessKind::Nested => "nested",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EdgeGeometry {
    Segment(Segment),
    Polyline(Polyline),
    Line(LineRT),
}

impl EdgeGeometry {
    /// Length of the part inside the closed region.
    pub fn length_in(&self, region: &Region) -> f64 {
        match self {
            EdgeGeometry::Segment(s) => region.segment_length_inside(s),
            EdgeGeometry::Polyline(p) => region.polyline_length_inside(p),
            EdgeGeometry::Line(l) => region.clip_line(l).map_or(0.0, |c| c.length()),
        }
    }

    pub fn meets(&self, region: &Region) -> bool {
        match self {
            EdgeGeometry::Segment(s) => region.segment_meets(s),
            EdgeGeometry::Polyline(p) => region.polyline_meets(p),
            EdgeGeometry::Line(l) => region.line_meets(l),
        }
    }

    /// Straight pieces of the geometry; lines are cut to `extent` around
    /// their foot point.
    pub fn pieces(&self, extent: f64) -> Vec<Segment> {
        match self {
            EdgeGeometry::Segment(s) => vec![*s],
            EdgeGeometry::Polyline(p) => p.segments().collect(),
            EdgeGeometry::Line(l) => vec![l.segment_within(extent)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub geometry: EdgeGeometry,
    /// Generator pair `(i, j)`, `i < j`, separated by (or joined by) the edge.
    #[serde(default)]
    pub pair: Option<(usize, usize)>,
}

impl Edge {
    /// Identity used when counting edges: the generator pair when known.
    pub fn key(&self) -> EdgeKey {
        match self.pair {
            Some(p) => EdgeKey::Pair(p),
            None => EdgeKey::Id(self.id),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKey {
    Pair((usize, usize)),
    Id(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    pub polygon: ConvexPolygon,
}

/// Nearest-generator labels on a square lattice of nodes
/// `origin + step·(i, j)`, `0 ≤ i, j < nodes`, row-major in `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelGrid {
    pub origin: Point2,
    pub step: f64,
    pub nodes: usize,
    pub labels: Vec<u32>,
}

impl LabelGrid {
    pub fn node(&self, i: usize, j: usize) -> Point2 {
        self.origin + Point2::new(i as f64 * self.step, j as f64 * self.step)
    }

    pub fn label(&self, i: usize, j: usize) -> u32 {
        self.labels[j * self.nodes + i]
    }
}

/// Axis data of a Manhattan grid nested in a Manhattan grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedMgInfo {
    pub window: BoxRegion,
    /// First-layer vertical line abscissae inside the window.
    pub first_vertical: Vec<f64>,
    /// First-layer horizontal line ordinates inside the window.
    pub first_horizontal: Vec<f64>,
    pub cells: Vec<NestedMgCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedMgCell {
    pub x: (f64, f64),
    pub y: (f64, f64),
    /// Second-layer vertical abscissae inside `x`.
    pub vertical: Vec<f64>,
    /// Second-layer horizontal ordinates inside `y`.
    pub horizontal: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tessellation {
    pub kind: TessKind,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub cells: Option<Vec<Cell>>,
    pub generators: Vec<Point2>,
    #[serde(default)]
    pub marks: Option<Vec<f64>>,
    /// Index of the Palm origin among the generators.
    #[serde(default)]
    pub origin: Option<usize>,
    pub certified: bool,
    /// Radius (or half side) of the sampling window that certified the output.
    pub window_radius_used: f64,
    pub target: Region,
    /// Geometric tolerance of curved edges (0 when exact).
    #[serde(default)]
    pub tolerance: f64,
    #[serde(default)]
    pub labels: Option<LabelGrid>,
    #[serde(default)]
    pub line_count: Option<usize>,
    #[serde(default)]
    pub disc_r: Option<u32>,
    #[serde(default)]
    pub nested_mg: Option<NestedMgInfo>,
}

impl Tessellation {
    pub(crate) fn empty(kind: TessKind, target: Region) -> Self {
        Tessellation {
            kind,
            edges: Vec::new(),
            cells: None,
            generators: Vec::new(),
            marks: None,
            origin: None,
            certified: true,
            window_radius_used: 0.0,
            target,
            tolerance: 0.0,
            labels: None,
            line_count: None,
            disc_r: None,
            nested_mg: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = Interchange { format_version: FORMAT_VERSION, tessellation: self.clone() };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: Interchange = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported interchange version {}", doc.format_version)));
        }
        Ok(doc.tessellation)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Interchange {
    format_version: u32,
    tessellation: Tessellation,
}

/// Limits for adaptive builders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildOptions {
    /// Largest sampling window radius, in multiples of the target radius.
    pub max_window_factor: f64,
    /// Default lattice step for Johnson–Mehl edge extraction.
    pub grid_step: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { max_window_factor: 512.0, grid_step: DEFAULT_GRID_STEP }
    }
}

impl BuildOptions {
    pub fn with_doubled_cap(&self) -> Self {
        BuildOptions { max_window_factor: 2.0 * self.max_window_factor, ..self.clone() }
    }
}

/// A tessellation family with its driving process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TessSpec {
    Voronoi {
        source: PointSource,
    },
    Delaunay {
        source: PointSource,
    },
    JohnsonMehl {
        source: PointSource,
        #[serde(default)]
        grid_step: Option<f64>,
    },
    Line {
        lambda: f64,
        #[serde(default)]
        palm: bool,
    },
    Manhattan {
        lambda_v: f64,
        lambda_h: f64,
        #[serde(default)]
        palm: bool,
    },
    Nested {
        first: Box<TessSpec>,
        second: Box<TessSpec>,
    },
}

impl TessSpec {
    pub fn kind(&self) -> TessKind {
        match self {
            TessSpec::Voronoi { .. } => TessKind::Voronoi,
            TessSpec::Delaunay { .. } => TessKind::Delaunay,
            TessSpec::JohnsonMehl { .. } => TessKind::JohnsonMehl,
            TessSpec::Line { .. } => TessKind::Line,
            TessSpec::Manhattan { .. } => TessKind::Manhattan,
            TessSpec::Nested { .. } => TessKind::Nested,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TessSpec::Voronoi { source } | TessSpec::Delaunay { source } => source.validate(),
            TessSpec::JohnsonMehl { source, grid_step } => {
                source.validate()?;
                if source.marks.is_none() {
                    return Err(Error::invalid("Johnson-Mehl source needs a mark law"));
                }
                if let Some(h) = grid_step {
                    if !(*h > 0.0 && h.is_finite()) {
                        return Err(Error::invalid("grid_step must be positive"));
                    }
                }
                Ok(())
            }
            TessSpec::Line { lambda, .. } => {
                if *lambda >= 0.0 && lambda.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("line intensity must be nonnegative"))
                }
            }
            TessSpec::Manhattan { lambda_v, lambda_h, palm } => {
                let ok = |x: f64| if *palm { x > 0.0 } else { x >= 0.0 } && x.is_finite();
                if ok(*lambda_v) && ok(*lambda_h) {
                    Ok(())
                } else {
                    Err(Error::invalid("Manhattan grid intensities must be nonnegative (positive for Palm)"))
                }
            }
            TessSpec::Nested { first, second } => {
                if !matches!(**first, TessSpec::Voronoi { .. } | TessSpec::Manhattan { .. }) {
                    return Err(Error::Unsupported("nested first layer must be voronoi or manhattan".into()));
                }
                if matches!(**second, TessSpec::Nested { .. } | TessSpec::JohnsonMehl { .. }) {
                    return Err(Error::Unsupported(
                        "nested second layer must be voronoi, delaunay, line or manhattan".into(),
                    ));
                }
                first.validate()?;
                second.validate()
            }
        }
    }

    /// Builds the tessellation restricted to `target`.
    pub fn build(&self, target: &Region, key: &StreamKey, opts: &BuildOptions) -> Result<Tessellation> {
        self.validate()?;
        target.validate()?;
        match self {
            TessSpec::Voronoi { source } => restrict_voronoi_certified(source, target, key, opts),
            TessSpec::Delaunay { source } => restrict_delaunay_certified(source, target, key, opts),
            TessSpec::JohnsonMehl { source, grid_step } => {
                build_jmt(source, target, grid_step.unwrap_or(opts.grid_step), key, opts)
            }
            TessSpec::Line { lambda, palm } => lines::build_lt_model(*lambda, *palm, target, key),
            TessSpec::Manhattan { lambda_v, lambda_h, palm } => {
                manhattan::build_mg_model(*lambda_v, *lambda_h, *palm, target, key)
            }
            TessSpec::Nested { first, second } => build_nested(first, second, target, key, opts),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Disk;
    use crate::pointproc::{MarkLaw, PointModel};

    #[test]
    fn interchange_round_trip() {
        let spec = TessSpec::Voronoi { source: PointSource::new(PointModel::Poisson { lambda: 1.0 }) };
        let t =
            spec.build(&Region::Disk(Disk::centered(1.0)), &StreamKey::new(1, 2), &BuildOptions::default()).unwrap();
        let back = Tessellation::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(matches!(Tessellation::from_json("{\"format_version\": 1}"), Err(Error::Parse(_))));
    }

    #[test]
    fn spec_validation() {
        let jm =
            TessSpec::JohnsonMehl { source: PointSource::new(PointModel::Poisson { lambda: 1.0 }), grid_step: None };
        assert!(jm.validate().is_err());
        let jm = TessSpec::JohnsonMehl {
            source: PointSource::new(PointModel::Poisson { lambda: 1.0 }).with_marks(MarkLaw::Uniform { tau: 1.0 }),
            grid_step: Some(0.0),
        };
        assert!(jm.validate().is_err());
        let nested = TessSpec::Nested {
            first: Box::new(TessSpec::Line { lambda: 1.0, palm: false }),
            second: Box::new(TessSpec::Line { lambda: 1.0, palm: false }),
        };
        assert!(matches!(nested.validate(), Err(Error::Unsupported(_))));
    }
}
