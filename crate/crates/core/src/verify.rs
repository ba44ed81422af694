//! Per-realization checks of the deterministic inequalities behind the
//! moment bounds, and suites running them over seeded realizations.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{clip_segment_to_disk, segment_meets_disk, BoxRegion, Disk, Point2, Region};
use crate::measure::{count_cells_v, count_edges_w, total_edge_length};
use crate::pointproc::{sample_line_process, LineProcessSample, MarkLaw, PointModel, PointSource};
use crate::rng::StreamKey;
use crate::tess::{build_lt, jm_argmin, BuildOptions, EdgeGeometry, TessKind, TessSpec, Tessellation};

/// Slack for floating-point comparisons of lengths.
const LENGTH_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Pass {
        margin: f64,
    },
    /// The precondition failed, so the inequality says nothing.
    Vacuous,
    Violation {
        margin: f64,
        detail: String,
    },
}

fn outcome(margin: f64, detail: impl FnOnce() -> String) -> Outcome {
    if margin >= 0.0 {
        Outcome::Pass { margin }
    } else {
        Outcome::Violation { margin, detail: detail() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub realizations: usize,
    pub violations: usize,
    pub vacuous: usize,
    /// Smallest margin over non-vacuous realizations (negative on violation).
    pub worst_margin: f64,
    pub first_violation: Option<String>,
}

impl CheckReport {
    pub fn new(name: &str) -> Self {
        CheckReport {
            check_name: name.to_string(),
            realizations: 0,
            violations: 0,
            vacuous: 0,
            worst_margin: f64::INFINITY,
            first_violation: None,
        }
    }

    pub fn record(&mut self, o: &Outcome, label: &str) {
        self.realizations += 1;
        match o {
            Outcome::Pass { margin } => self.worst_margin = self.worst_margin.min(*margin),
            Outcome::Vacuous => self.vacuous += 1,
            Outcome::Violation { margin, detail } => {
                self.violations += 1;
                self.worst_margin = self.worst_margin.min(*margin);
                if self.first_violation.is_none() {
                    self.first_violation = Some(format!("{label}: {detail}"));
                }
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn vacuous_fraction(&self) -> f64 {
        if self.realizations == 0 {
            0.0
        } else {
            self.vacuous as f64 / self.realizations as f64
        }
    }
}

fn count_within(points: &[Point2], d: &Disk) -> usize {
    points.iter().filter(|p| d.contains(**p)).count()
}

fn require(t: &Tessellation, kind: TessKind) -> Result<()> {
    if t.kind != kind {
        return Err(Error::invalid(format!("expected a {} tessellation, got {}", kind.as_str(), t.kind.as_str())));
    }
    if !t.certified {
        return Err(Error::Uncertified(format!("{} input", kind.as_str())));
    }
    Ok(())
}

/// Voronoi edges meeting `B_a` number at most `3·#(X ∩ B_{b+3a})` when
/// `X ∩ B_b` is nonempty (balls around the target center).
pub fn check_voronoi_edge_bound(t: &Tessellation, a: f64, b: f64) -> Result<Outcome> {
    require(t, TessKind::Voronoi)?;
    if !(a > 0.0 && b >= a) {
        return Err(Error::invalid("need b >= a > 0"));
    }
    if b + 3.0 * a > t.window_radius_used {
        return Err(Error::WindowTooSmall(format!("ball radius {} exceeds sampled window", b + 3.0 * a)));
    }
    let c = t.target.center();
    if count_within(&t.generators, &Disk::new(c, b)) == 0 {
        return Ok(Outcome::Vacuous);
    }
    let w = count_edges_w(t, &Region::Disk(Disk::new(c, a)))?;
    let n = count_within(&t.generators, &Disk::new(c, b + 3.0 * a));
    Ok(outcome(3.0 * n as f64 - w as f64, || format!("W = {w} > 3·{n}")))
}

/// Probe points on Johnson–Mehl edges inside `B_a` have their nearest
/// generators (and the edge's generator pair) within Johnson–Mehl distance
/// `b + 3a` of the center, whenever some generator is within `b`.
pub fn check_jm_locality(t: &Tessellation, a: f64, b: f64, probe_count: usize) -> Result<Outcome> {
    require(t, TessKind::JohnsonMehl)?;
    let marks = t.marks.as_ref().ok_or_else(|| Error::invalid("Johnson-Mehl input without marks"))?;
    let c = t.target.center();
    let jm = |k: usize| t.generators[k].dist(c) + marks[k];
    if !(0..t.generators.len()).any(|k| jm(k) <= b) {
        return Ok(Outcome::Vacuous);
    }
    let ball = Disk::new(c, a);
    let mut probes: Vec<(Point2, (usize, usize))> = Vec::new();
    for e in &t.edges {
        if let (EdgeGeometry::Polyline(p), Some(pair)) = (&e.geometry, e.pair) {
            probes.extend(p.vertices.iter().filter(|v| ball.contains(**v)).map(|v| (*v, pair)));
        }
    }
    let limit = b + 3.0 * a;
    let mut margin = f64::INFINITY;
    let step = (probes.len() / probe_count.max(1)).max(1);
    for (x, (u, v)) in probes.iter().step_by(step).take(probe_count) {
        let (i, _) = jm_argmin(&t.generators, marks, *x).ok_or(Error::NoPoints)?;
        let worst = jm(i).max(jm(*u)).max(jm(*v));
        margin = margin.min(limit - worst);
        if worst > limit {
            return Ok(Outcome::Violation {
                margin: limit - worst,
                detail: format!("probe ({}, {}) uses a generator at distance {worst} > {limit}", x.x, x.y),
            });
        }
    }
    Ok(Outcome::Pass { margin })
}

/// A simple planar graph has at most three edges per vertex.
pub fn check_euler_bound(edges: &[(usize, usize)]) -> Outcome {
    let distinct: BTreeSet<(usize, usize)> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    let vertices: BTreeSet<usize> = distinct.iter().flat_map(|&(u, v)| [u, v]).collect();
    let (e, n) = (distinct.len(), vertices.len());
    outcome(3.0 * n as f64 - e as f64, || format!("{e} edges on {n} vertices"))
}

/// `V ≤ 2W + 1` on the target, and `V = 1` when `W = 0`.
pub fn check_v_bound(t: &Tessellation) -> Result<Outcome> {
    let d = t.target;
    let w = count_edges_w(t, &d)?;
    let v = count_cells_v(t, &d)?;
    if w == 0 && v != 1 {
        return Ok(Outcome::Violation { margin: -1.0, detail: format!("W = 0 but V = {v}") });
    }
    Ok(outcome(2.0 * w as f64 + 1.0 - v as f64, || format!("V = {v} > 2·{w} + 1")))
}

/// A line meets the disk iff its distance parameter is at most the radius,
/// chords are at most a diameter, and the built tessellation has exactly
/// those lines and chord lengths.
pub fn check_lt_chord_criterion(sample: &LineProcessSample, d: &Disk) -> Result<Outcome> {
    let t = build_lt(sample, &Region::Disk(*d))?;
    let extent = d.center.norm() + d.radius + 1.0;
    let criterion = sample.lines.iter().filter(|l| (l.rho - l.normal().dot(d.center)).abs() <= d.radius).count();
    let geometric = sample.lines.iter().filter(|l| segment_meets_disk(&l.segment_within(extent), d)).count();
    if criterion != geometric || t.line_count != Some(criterion) {
        return Ok(Outcome::Violation {
            margin: -1.0,
            detail: format!("criterion {criterion}, geometric {geometric}, built {:?}", t.line_count),
        });
    }
    let chords: Vec<f64> = sample
        .lines
        .iter()
        .filter_map(|l| clip_segment_to_disk(&l.segment_within(extent), d))
        .map(|s| s.length())
        .collect();
    let longest = chords.iter().copied().fold(0.0, f64::max);
    let formula: f64 = sample
        .lines
        .iter()
        .map(|l| {
            let h = (l.rho - l.normal().dot(d.center)).abs();
            if h <= d.radius {
                2.0 * (d.radius * d.radius - h * h).sqrt()
            } else {
                0.0
            }
        })
        .sum();
    let built = total_edge_length(&t, &Region::Disk(*d))?;
    let tol = LENGTH_EPS * (1.0 + formula);
    let margin = (2.0 * d.radius + LENGTH_EPS - longest).min(tol - (built - formula).abs());
    Ok(outcome(margin, || format!("longest chord {longest}, built length {built} vs {formula}")))
}

/// With discretization radius `k`, Delaunay edges meeting `B_a` number at
/// most `3·#(X ∩ Q_{6k})`.
pub fn check_delaunay_box_bound(t: &Tessellation, a: f64) -> Result<Outcome> {
    require(t, TessKind::Delaunay)?;
    let k = t.disc_r.ok_or_else(|| Error::WindowTooSmall("discretization radius undetermined".into()))?;
    let c = t.target.center();
    let q = BoxRegion::new(c, 6.0 * k as f64);
    if q.half() > t.window_radius_used {
        return Err(Error::WindowTooSmall(format!("box Q_{} exceeds sampled window", 6 * k)));
    }
    let w = count_edges_w(t, &Region::Disk(Disk::new(c, a)))?;
    let n = t.generators.iter().filter(|p| q.contains(**p)).count();
    Ok(outcome(3.0 * n as f64 - w as f64, || format!("W = {w} > 3·{n} with R = {k}")))
}

/// Length of a Manhattan grid nested in a Manhattan grid splits into the
/// first-layer lines plus, per cell, second-layer lines times the cell's
/// extent.
pub fn check_nested_mg_decomposition(t: &Tessellation) -> Result<Outcome> {
    let info = t.nested_mg.as_ref().ok_or_else(|| Error::invalid("no nested Manhattan data"))?;
    let q = info.window;
    let lhs = total_edge_length(t, &Region::Box(q))?;
    let mut rhs = (info.first_vertical.len() + info.first_horizontal.len()) as f64 * q.side;
    for cell in &info.cells {
        rhs += (cell.y.1 - cell.y.0) * cell.vertical.len() as f64;
        rhs += (cell.x.1 - cell.x.0) * cell.horizontal.len() as f64;
    }
    let tol = LENGTH_EPS * rhs.max(1.0);
    Ok(outcome(tol - (lhs - rhs).abs(), || format!("length {lhs} vs decomposition {rhs}")))
}

/// For a Palm Voronoi realization: `W ≤ 3·#(X ∩ B_4)` and `|S ∩ B_1| ≤ 2W`.
pub fn check_palm_domination(t: &Tessellation) -> Result<Outcome> {
    require(t, TessKind::Voronoi)?;
    if t.origin.is_none() {
        return Err(Error::invalid("Palm check needs the origin among the generators"));
    }
    if t.window_radius_used < 4.0 {
        return Err(Error::WindowTooSmall("Palm check needs the window to contain B_4".into()));
    }
    let c = t.target.center();
    let unit = Region::Disk(Disk::new(c, 1.0));
    let w = count_edges_w(t, &unit)?;
    let len = total_edge_length(t, &unit)?;
    let n = count_within(&t.generators, &Disk::new(c, 4.0));
    let margin = (3.0 * n as f64 - w as f64).min(2.0 * w as f64 + LENGTH_EPS - len);
    Ok(outcome(margin, || format!("W = {w}, N = {n}, length = {len}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    VoronoiEdgeBound,
    JmLocality,
    EulerBound,
    VBound,
    LtChordCriterion,
    DelaunayBoxBound,
    NestedMgDecomposition,
    PalmDomination,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::VoronoiEdgeBound,
        CheckKind::JmLocality,
        CheckKind::EulerBound,
        CheckKind::VBound,
        CheckKind::LtChordCriterion,
        CheckKind::DelaunayBoxBound,
        CheckKind::NestedMgDecomposition,
        CheckKind::PalmDomination,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::VoronoiEdgeBound => "check_voronoi_edge_bound",
            CheckKind::JmLocality => "check_jm_locality",
            CheckKind::EulerBound => "check_euler_bound",
            CheckKind::VBound => "check_v_bound",
            CheckKind::LtChordCriterion => "check_lt_chord_criterion",
            CheckKind::DelaunayBoxBound => "check_delaunay_box_bound",
            CheckKind::NestedMgDecomposition => "check_nested_mg_decomposition",
            CheckKind::PalmDomination => "check_palm_domination",
        }
    }
}

/// Parameters of a seeded check suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub lambdas: Vec<f64>,
    /// Realizations per intensity.
    pub realizations: usize,
    /// Realizations per intensity for the Johnson–Mehl check.
    pub jm_realizations: usize,
    pub jm_grid_step: f64,
    pub probes: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            lambdas: vec![0.5, 1.0, 4.0],
            realizations: 10_000,
            jm_realizations: 1_000,
            jm_grid_step: 0.02,
            probes: 50,
            seed: 0,
        }
    }
}

fn poisson(lambda: f64) -> PointSource {
    PointSource::new(PointModel::Poisson { lambda })
}

fn unit_disk() -> Region {
    Region::Disk(Disk::centered(1.0))
}

/// One realization of `kind` at intensity `lambda`.
fn realize(kind: CheckKind, lambda: f64, key: &StreamKey, cfg: &SuiteConfig, opts: &BuildOptions) -> Result<Outcome> {
    let build = |spec: TessSpec, target: Region| crate::mc::build_certified(&spec, &target, key, opts).map(|(t, _)| t);
    match kind {
        CheckKind::VoronoiEdgeBound => {
            check_voronoi_edge_bound(&build(TessSpec::Voronoi { source: poisson(lambda) }, unit_disk())?, 1.0, 1.0)
        }
        CheckKind::JmLocality => {
            let source = poisson(lambda).with_marks(MarkLaw::Uniform { tau: 1.0 });
            let t = build(TessSpec::JohnsonMehl { source, grid_step: Some(cfg.jm_grid_step) }, unit_disk())?;
            check_jm_locality(&t, 1.0, 2.0, cfg.probes)
        }
        CheckKind::EulerBound => {
            let t = build(TessSpec::Delaunay { source: poisson(lambda) }, unit_disk())?;
            Ok(check_euler_bound(&t.edges.iter().filter_map(|e| e.pair).collect::<Vec<_>>()))
        }
        CheckKind::VBound => {
            let spec = if key.stream().is_multiple_of(2) {
                TessSpec::Voronoi { source: poisson(lambda) }
            } else {
                TessSpec::Delaunay { source: poisson(lambda) }
            };
            check_v_bound(&build(spec, unit_disk())?)
        }
        CheckKind::LtChordCriterion => {
            let sample = sample_line_process(lambda, 2.0, key)?;
            check_lt_chord_criterion(&sample, &Disk::centered(1.0))
        }
        CheckKind::DelaunayBoxBound => {
            check_delaunay_box_bound(&build(TessSpec::Delaunay { source: poisson(lambda) }, unit_disk())?, 1.0)
        }
        CheckKind::NestedMgDecomposition => {
            let mg = TessSpec::Manhattan { lambda_v: lambda, lambda_h: lambda, palm: false };
            let spec = TessSpec::Nested { first: Box::new(mg.clone()), second: Box::new(mg) };
            check_nested_mg_decomposition(&build(spec, Region::Box(BoxRegion::centered(1.0)))?)
        }
        CheckKind::PalmDomination => {
            check_palm_domination(&build(TessSpec::Voronoi { source: poisson(lambda).palm() }, unit_disk())?)
        }
    }
}

/// Runs `kind` over every intensity of `cfg`; realization `s` at intensity
/// index `i` uses stream `i·N + s` of `cfg.seed`.
pub fn run_check(kind: CheckKind, cfg: &SuiteConfig, opts: &BuildOptions) -> Result<CheckReport> {
    let per = if kind == CheckKind::JmLocality { cfg.jm_realizations } else { cfg.realizations };
    let jobs: Vec<(usize, u64)> =
        (0..cfg.lambdas.len()).flat_map(|i| (0..per as u64).map(move |s| (i, i as u64 * per as u64 + s))).collect();
    let outcomes: Vec<Result<Outcome>> = jobs
        .par_iter()
        .map(|&(i, stream)| realize(kind, cfg.lambdas[i], &StreamKey::new(cfg.seed, stream), cfg, opts))
        .collect();
    let mut report = CheckReport::new(kind.name());
    for ((i, stream), o) in jobs.iter().zip(outcomes) {
        report.record(&o?, &format!("lambda={} stream={stream}", cfg.lambdas[*i]));
    }
    Ok(report)
}

pub fn run_suite(kinds: &[CheckKind], cfg: &SuiteConfig, opts: &BuildOptions) -> Result<Vec<CheckReport>> {
    kinds.iter().map(|k| run_check(*k, cfg, opts)).collect()
}

/// Checks applicable to a stored tessellation, each on that one realization.
pub fn verify_tessellation(t: &Tessellation, label: &str) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let mut push = |kind: CheckKind, o: Outcome| {
        let mut r = CheckReport::new(kind.name());
        r.record(&o, label);
        out.push(r);
    };
    let a = t.target.circumradius();
    match t.kind {
        TessKind::Voronoi | TessKind::Delaunay | TessKind::JohnsonMehl => push(CheckKind::VBound, check_v_bound(t)?),
        _ => {}
    }
    if t.kind == TessKind::Voronoi && t.certified && matches!(t.target, Region::Disk(_)) {
        push(CheckKind::VoronoiEdgeBound, check_voronoi_edge_bound(t, a, a)?);
        if t.origin.is_some() && a >= 1.0 {
            push(CheckKind::PalmDomination, check_palm_domination(t)?);
        }
    }
    if t.kind == TessKind::Delaunay {
        push(CheckKind::EulerBound, check_euler_bound(&t.edges.iter().filter_map(|e| e.pair).collect::<Vec<_>>()));
        if t.certified && t.disc_r.is_some() && matches!(t.target, Region::Disk(_)) {
            push(CheckKind::DelaunayBoxBound, check_delaunay_box_bound(t, a)?);
        }
    }
    if t.kind == TessKind::JohnsonMehl && t.certified {
        push(CheckKind::JmLocality, check_jm_locality(t, a, a + 1.0, 50)?);
    }
    if t.nested_mg.is_some() {
        push(CheckKind::NestedMgDecomposition, check_nested_mg_decomposition(t)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{LineRT, Segment};
    use crate::tess::{build_nested, build_voronoi, Edge};

    fn fixed_vt(points: Vec<Point2>, palm: bool) -> Tessellation {
        let mut src = PointSource::new(PointModel::Fixed { points });
        src.palm = false;
        let mut t = TessSpec::Voronoi { source: src }
            .build(&unit_disk(), &StreamKey::new(0, 0), &BuildOptions::default())
            .unwrap();
        if palm {
            t.origin = Some(0);
        }
        t
    }

    #[test]
    fn trivial_voronoi_cases() {
        let t = fixed_vt(vec![Point2::ORIGIN], true);
        assert_eq!(check_voronoi_edge_bound(&t, 1.0, 1.0).unwrap(), Outcome::Pass { margin: 3.0 });
        assert_eq!(check_v_bound(&t).unwrap(), Outcome::Pass { margin: 0.0 });
        assert!(matches!(check_palm_domination(&t).unwrap(), Outcome::Pass { .. }));
        let t = fixed_vt(vec![Point2::ORIGIN, Point2::new(0.5, 0.0)], true);
        assert!(matches!(check_palm_domination(&t).unwrap(), Outcome::Pass { .. }));
        assert!(matches!(check_voronoi_edge_bound(&t, 1.0, 1.0).unwrap(), Outcome::Pass { .. }));
    }

    #[test]
    fn two_point_v_bound() {
        let mut t = build_voronoi(&[Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)], BoxRegion::centered(20.0));
        t.target = unit_disk();
        assert_eq!(check_v_bound(&t).unwrap(), Outcome::Pass { margin: 1.0 });
    }

    #[test]
    fn euler_small_graphs() {
        assert_eq!(check_euler_bound(&[(0, 1), (1, 2), (0, 2)]), Outcome::Pass { margin: 6.0 });
        assert_eq!(check_euler_bound(&[(3, 4)]), Outcome::Pass { margin: 5.0 });
        let dense: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        assert!(matches!(check_euler_bound(&dense), Outcome::Pass { .. }));
        let k: Vec<(usize, usize)> = (0..9).flat_map(|i| (i + 1..9).map(move |j| (i, j))).collect();
        assert!(matches!(check_euler_bound(&k), Outcome::Violation { .. }));
    }

    #[test]
    fn lt_chord_examples() {
        let lines = [0.5, -1.2, 0.99].iter().map(|&r| LineRT::new(r, 1.0).unwrap()).collect();
        let s = LineProcessSample { lines, rho_max: 2.0, intensity: 1.0 };
        assert!(matches!(check_lt_chord_criterion(&s, &Disk::centered(1.0)).unwrap(), Outcome::Pass { .. }));
        let empty = LineProcessSample { lines: vec![], rho_max: 2.0, intensity: 1.0 };
        assert!(matches!(check_lt_chord_criterion(&empty, &Disk::centered(1.0)).unwrap(), Outcome::Pass { .. }));
    }

    #[test]
    fn nested_mg_trivial_layers() {
        let q = Region::Box(BoxRegion::centered(1.0));
        let opts = BuildOptions::default();
        let mg = |l: f64| TessSpec::Manhattan { lambda_v: l, lambda_h: l, palm: false };
        for (a, b) in [(2.0, 0.0), (0.0, 2.0), (1.5, 2.5)] {
            let t = build_nested(&mg(a), &mg(b), &q, &StreamKey::new(3, 1), &opts).unwrap();
            assert!(matches!(check_nested_mg_decomposition(&t).unwrap(), Outcome::Pass { .. }));
        }
    }

    #[test]
    fn jm_single_point_and_constant_marks() {
        let opts = BuildOptions::default();
        let src = PointSource::new(PointModel::Fixed { points: vec![Point2::new(0.3, 0.0)] })
            .with_marks(MarkLaw::Constant { value: 0.2 });
        let t = TessSpec::JohnsonMehl { source: src, grid_step: Some(0.05) }
            .build(&unit_disk(), &StreamKey::new(0, 0), &opts)
            .unwrap();
        assert!(t.edges.is_empty());
        assert!(matches!(check_jm_locality(&t, 1.0, 1.0, 50).unwrap(), Outcome::Pass { .. }));
        let src = poisson(1.0).with_marks(MarkLaw::Constant { value: 0.0 });
        let t = TessSpec::JohnsonMehl { source: src, grid_step: Some(0.05) }
            .build(&unit_disk(), &StreamKey::new(0, 1), &opts)
            .unwrap();
        assert!(!matches!(check_jm_locality(&t, 1.0, 2.0, 50).unwrap(), Outcome::Violation { .. }));
    }

    #[test]
    fn corrupted_realization_is_caught() {
        let mut t = fixed_vt(vec![Point2::new(-0.5, 0.0), Point2::new(0.5, 0.0), Point2::new(0.0, 0.7)], false);
        let extra = t.cells.as_ref().unwrap()[0].clone();
        t.cells.as_mut().unwrap().extend(std::iter::repeat_n(extra, 10));
        assert!(matches!(check_v_bound(&t).unwrap(), Outcome::Violation { .. }));
        let next = t.edges.len();
        t.edges.extend((0..10).map(|k| Edge {
            id: next + k,
            geometry: EdgeGeometry::Segment(Segment { a: Point2::ORIGIN, b: Point2::new(0.1, 0.01 * k as f64) }),
            pair: None,
        }));
        assert!(matches!(check_voronoi_edge_bound(&t, 1.0, 1.0).unwrap(), Outcome::Violation { .. }));
    }

    #[test]
    fn small_suite_passes() {
        let cfg = SuiteConfig { realizations: 30, jm_realizations: 5, seed: 7, ..SuiteConfig::default() };
        for r in run_suite(&CheckKind::ALL, &cfg, &BuildOptions::default()).unwrap() {
            assert!(r.passed(), "{r:?}");
            assert!(r.vacuous_fraction() < 0.5, "{r:?}");
        }
    }
}
