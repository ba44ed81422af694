//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always print.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use tessmc::geom::circumdisk;
use tessmc::geom::delaunay::Triangulation;
use tessmc::mc::{
    count_calibration, empirical_mg_cell_mgf, ks_calibration, mg_divergence_series, mgf_from_values, replicate,
    scaling_test, Functional, DEFAULT_BATCHES,
};
use tessmc::measure::total_edge_length;
use tessmc::pointproc::{sample_ppp, MarkLaw, PointModel, PointSource, Window};
use tessmc::tess::{build_delaunay, build_jmt_from_points, build_voronoi, BuildOptions, TessSpec, Tessellation};
use tessmc::verify::{run_suite, CheckKind, SuiteConfig};
use tessmc::{BoxRegion, Disk, Point2, Region, StreamKey};

type Outcome = (bool, String);

fn unit_disk() -> Region {
    Region::Disk(Disk::centered(1.0))
}

fn poisson(lambda: f64) -> PointSource {
    PointSource::new(PointModel::Poisson { lambda })
}

fn check_suites() -> Outcome {
    let start = Instant::now();
    let reports = match run_suite(&CheckKind::ALL, &SuiteConfig::default(), &BuildOptions::default()) {
        Ok(r) => r,
        Err(e) => return (false, format!("suite error: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let mut ok = secs < 600.0;
    let mut parts = Vec::new();
    for r in &reports {
        ok &= r.passed() && r.vacuous_fraction() < 0.5;
        parts.push(format!(
            "{} {}/{} violations, {:.1}% vacuous",
            r.check_name,
            r.violations,
            r.realizations,
            100.0 * r.vacuous_fraction()
        ));
        if let Some(v) = &r.first_violation {
            parts.push(format!("first violation {v}"));
        }
    }
    (ok, format!("{:.0} s; {}", secs, parts.join("; ")))
}

/// Triangles of the O(n⁴) empty-circumdisk oracle.
fn oracle_triangles(p: &[Point2]) -> BTreeSet<[usize; 3]> {
    let n = p.len();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (p[i], p[j], p[k]);
                let orient = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
                if orient == 0.0 {
                    continue;
                }
                let inside = |d: Point2| {
                    let rows = [a, b, c].map(|q| {
                        let (dx, dy) = (q.x - d.x, q.y - d.y);
                        [dx, dy, dx * dx + dy * dy]
                    });
                    let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
                        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
                        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
                    det * orient.signum() > 0.0
                };
                if (0..n).filter(|&m| m != i && m != j && m != k).all(|m| !inside(p[m])) {
                    out.insert([i, j, k]);
                }
            }
        }
    }
    out
}

fn edge_pairs(t: &Tessellation) -> BTreeSet<(usize, usize)> {
    t.edges.iter().filter_map(|e| e.pair).collect()
}

fn brute_force_delaunay() -> Outcome {
    let mut mismatches = Vec::new();
    let mut duality = 0;
    for s in 0..1000u64 {
        let mut rng = StreamKey::new(20_240, s).rng();
        let n = rng.random_range(3..=12);
        let pts: Vec<Point2> = (0..n).map(|_| Point2::new(rng.random(), rng.random())).collect();
        let oracle = oracle_triangles(&pts);
        let tri: BTreeSet<[usize; 3]> = Triangulation::new(&pts)
            .triangles()
            .iter()
            .map(|t| {
                let mut t = *t;
                t.sort_unstable();
                t
            })
            .collect();
        let oracle_edges: BTreeSet<(usize, usize)> =
            oracle.iter().flat_map(|t| [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]).collect();
        let dt = edge_pairs(&build_delaunay(&pts));
        // Windowed build of the same pattern on a disk inside the hull region.
        let target = Region::Disk(Disk::new(Point2::new(0.5, 0.5), 0.25));
        let spec = TessSpec::Delaunay { source: PointSource::new(PointModel::Fixed { points: pts.clone() }) };
        let windowed = match spec.build(&target, &StreamKey::new(20_240, s), &BuildOptions::default()) {
            Ok(t) => t,
            Err(e) => return (false, format!("instance {s}: {e}")),
        };
        let tol = |i: usize| windowed.generators[i];
        let windowed_pairs: BTreeSet<(Point2Key, Point2Key)> =
            windowed.edges.iter().filter_map(|e| e.pair).map(|(u, v)| order(key(tol(u)), key(tol(v)))).collect();
        let oracle_windowed: BTreeSet<(Point2Key, Point2Key)> = oracle_edges
            .iter()
            .filter(|(u, v)| target.segment_meets(&tessmc::Segment::new(pts[*u], pts[*v])))
            .map(|(u, v)| order(key(pts[*u]), key(pts[*v])))
            .collect();
        if tri != oracle || dt != oracle_edges || windowed_pairs != oracle_windowed {
            mismatches.push(s);
        }
        // Box holding every Voronoi vertex, so no edge is lost to clipping.
        let reach = oracle
            .iter()
            .filter_map(|t| circumdisk(pts[t[0]], pts[t[1]], pts[t[2]]).ok())
            .map(|d| d.center.dist(Point2::new(0.5, 0.5)))
            .fold(1.0, f64::max);
        let vt = edge_pairs(&build_voronoi(&pts, BoxRegion::new(Point2::new(0.5, 0.5), 4.0 * reach)));
        if vt != dt {
            duality += 1;
        }
    }
    (
        mismatches.is_empty() && duality == 0,
        format!(
            "1000 instances, {} oracle mismatches {:?}, {} duality failures",
            mismatches.len(),
            &mismatches[..mismatches.len().min(5)],
            duality
        ),
    )
}

type Point2Key = (u64, u64);

fn key(p: Point2) -> Point2Key {
    (p.x.to_bits(), p.y.to_bits())
}

fn order(a: Point2Key, b: Point2Key) -> (Point2Key, Point2Key) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn poisson_calibration() -> Outcome {
    let c = match count_calibration(1.0, 1.0, &[0.2, 0.5], 100_000, 31) {
        Ok(c) => c,
        Err(e) => return (false, e.to_string()),
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, exact) in c.count_mgf.iter().zip(&c.exact_count_mgf) {
        let z = (m.mean - exact) / m.se;
        ok &= z.abs() <= 3.0;
        parts.push(format!("beta {}: {:.5} vs {:.5} ({:+.2} SE)", m.alpha, m.mean, exact, z));
    }
    let z = (c.void.mean - c.exact_void) / c.void.se;
    ok &= z.abs() <= 3.0;
    parts.push(format!("void {:.5} vs {:.5} ({:+.2} SE)", c.void.mean, c.exact_void, z));
    (ok, parts.join("; "))
}

fn scaling_identity() -> Outcome {
    let opts = BuildOptions::default();
    let calib = match ks_calibration(100, 2000, 77) {
        Ok(f) => f,
        Err(e) => return (false, e.to_string()),
    };
    let calib_ok = (0.0..=0.10).contains(&calib);
    let mut detail = format!("KS null rejection rate {calib:.2}");
    for (attempt, seeds) in [(41u64, 42u64), (43, 44)].into_iter().enumerate() {
        match scaling_test(1.0, 2.0, 2000, seeds, &opts) {
            Ok(r) => {
                detail.push_str(&format!(
                    "; attempt {}: D = {:.4}, p = {:.4}",
                    attempt + 1,
                    r.ks.statistic,
                    r.ks.p_value
                ));
                if r.ks.p_value > 0.01 {
                    return (calib_ok, detail);
                }
            }
            Err(e) => return (false, format!("{detail}; {e}")),
        }
    }
    (false, detail)
}

fn divergence_series() -> Outcome {
    let r = match mg_divergence_series(1.0, 1.0, 30) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let ok = r.diverged_at.is_some_and(|k| k <= 3) && r.increasing_from().is_some();
    let mut detail = format!(
        "partial sum exceeds 1e6 at K = {:?}, terms increase from k = {:?}",
        r.diverged_at,
        r.increasing_from()
    );
    match empirical_mg_cell_mgf(1.0, 1.0, 10_000, 5, 700.0) {
        Ok(m) => detail.push_str(&format!(
            "; empirical log running means {:?} (diagnostic), largest term share {:.3}",
            m.log_running_means.iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>(),
            m.max_term_share
        )),
        Err(e) => detail.push_str(&format!("; empirical run failed: {e}")),
    }
    (ok, detail)
}

fn moment_stability() -> Outcome {
    let alphas = [0.0, 0.5, 1.0, 2.0];
    let jm = poisson(1.0).with_marks(MarkLaw::Uniform { tau: 1.0 });
    let specs = [
        ("PVT", TessSpec::Voronoi { source: poisson(1.0) }),
        ("PDT", TessSpec::Delaunay { source: poisson(1.0) }),
        ("JMT", TessSpec::JohnsonMehl { source: jm, grid_step: Some(0.02) }),
        ("LT", TessSpec::Line { lambda: 1.0, palm: false }),
        ("MG", TessSpec::Manhattan { lambda_v: 1.0, lambda_h: 1.0, palm: false }),
    ];
    let opts = BuildOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, spec) in &specs {
        let mut runs = Vec::new();
        for seed in [101u64, 202] {
            let est = replicate(spec, &unit_disk(), &[Functional::Length], 10_000, seed, &opts)
                .and_then(|r| mgf_from_values(&r.column(Functional::Length).unwrap(), &alphas, DEFAULT_BATCHES));
            match est {
                Ok(e) => runs.push(e),
                Err(e) => return (false, format!("{name}: {e}")),
            }
        }
        let (a, b) = (&runs[0], &runs[1]);
        let mut line = format!("{name}:");
        ok &= a[0].mean == 1.0 && b[0].mean == 1.0;
        for (x, y) in a.iter().zip(b).skip(1) {
            let overlap = x.ci_low <= y.ci_high && y.ci_low <= x.ci_high;
            ok &= overlap && x.mean.is_finite() && y.mean.is_finite();
            line.push_str(&format!(
                " a={} [{:.4e}, {:.4e}] vs [{:.4e}, {:.4e}]{}",
                x.alpha,
                x.ci_low,
                x.ci_high,
                y.ci_low,
                y.ci_high,
                if overlap { "" } else { " NO OVERLAP" }
            ));
        }
        parts.push(line);
    }
    (ok, parts.join("; "))
}

/// Edge length in the unit disk from counting pixels within `w/2` of a cell
/// boundary, using only the generators.
fn rasterized_length(gens: &[Point2], step: f64, w: f64) -> f64 {
    let coarse = 0.05;
    let per = (coarse / step).round() as usize;
    let cells = (2.0 / coarse).round() as usize;
    let half_diag = coarse * std::f64::consts::FRAC_1_SQRT_2;
    let mut count = 0usize;
    let mut cand: Vec<Point2> = Vec::new();
    for ci in 0..cells {
        for cj in 0..cells {
            let c = Point2::new(-1.0 + (ci as f64 + 0.5) * coarse, -1.0 + (cj as f64 + 0.5) * coarse);
            if c.norm() > 1.0 + half_diag {
                continue;
            }
            let dmin = gens.iter().map(|g| g.dist(c)).fold(f64::INFINITY, f64::min);
            cand.clear();
            cand.extend(gens.iter().copied().filter(|g| g.dist(c) <= dmin + 2.0 * half_diag + w));
            for pi in 0..per {
                for pj in 0..per {
                    let x = -1.0 + ci as f64 * coarse + (pi as f64 + 0.5) * step;
                    let y = -1.0 + cj as f64 * coarse + (pj as f64 + 0.5) * step;
                    if x * x + y * y > 1.0 {
                        continue;
                    }
                    let p = Point2::new(x, y);
                    let (mut best, mut bd) = (0, f64::INFINITY);
                    for (k, g) in cand.iter().enumerate() {
                        let d = g.dist2(p);
                        if d < bd {
                            best = k;
                            bd = d;
                        }
                    }
                    let gi = cand[best];
                    let boundary = cand
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != best)
                        .map(|(_, g)| (g.dist2(p) - bd) / (2.0 * g.dist(gi)))
                        .fold(f64::INFINITY, f64::min);
                    if boundary < 0.5 * w {
                        count += 1;
                    }
                }
            }
        }
    }
    count as f64 * step * step / w
}

fn rasterization_oracle() -> Outcome {
    let spec = TessSpec::Voronoi { source: poisson(1.0) };
    let opts = BuildOptions::default();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for s in 0..100u64 {
        let t = match spec.build(&unit_disk(), &StreamKey::new(707, s), &opts) {
            Ok(t) => t,
            Err(e) => return (false, format!("realization {s}: {e}")),
        };
        let analytic = total_edge_length(&t, &unit_disk()).unwrap();
        let raster = rasterized_length(&t.generators, 1e-3, 0.01);
        let rel = (raster - analytic).abs() / analytic.max(1e-12);
        worst = worst.max(rel);
        if rel > 0.02 {
            failures += 1;
        }
    }
    (
        failures == 0,
        format!("100 PVT realizations, worst relative difference {:.3}%, {} above 2%", 100.0 * worst, failures),
    )
}

fn jm_degeneration() -> Outcome {
    let d = unit_disk();
    let window = Window::Disk(Disk::centered(6.0));
    let (mut worst_vt, mut worst_half) = (0.0f64, 0.0f64);
    for s in 0..100u64 {
        let key = StreamKey::new(808, s);
        let pts = match sample_ppp(1.0, &window, &key) {
            Ok(p) => p.points,
            Err(e) => return (false, e.to_string()),
        };
        if pts.is_empty() {
            continue;
        }
        let vt = build_voronoi(&pts, BoxRegion::centered(48.0));
        let vt_len: f64 = vt.edges.iter().map(|e| e.geometry.length_in(&d)).sum();
        let zeros = vec![0.0; pts.len()];
        let jm_len = |marks: &[f64], h: f64| -> Result<f64, String> {
            let t = build_jmt_from_points(&pts, marks, &d, h).map_err(|e| e.to_string())?;
            Ok(t.edges.iter().map(|e| e.geometry.length_in(&d)).sum())
        };
        let constant = match jm_len(&zeros, 0.01) {
            Ok(l) => l,
            Err(e) => return (false, e),
        };
        worst_vt = worst_vt.max((constant - vt_len).abs() / vt_len);
        let mut rng = key.child(1).rng();
        let marks: Vec<f64> = pts.iter().map(|_| rng.random()).collect();
        match (jm_len(&marks, 0.01), jm_len(&marks, 0.005)) {
            (Ok(a), Ok(b)) => worst_half = worst_half.max((a - b).abs() / b.max(1e-12)),
            (Err(e), _) | (_, Err(e)) => return (false, e),
        }
    }
    (
        worst_vt < 0.02 && worst_half < 0.01,
        format!("constant marks vs VT worst {:.3}%, grid halving worst {:.3}%", 100.0 * worst_vt, 100.0 * worst_half),
    )
}

fn run_cli(dir: &Path, threads: usize, args: &[&str]) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_tessmc"))
        .args(args)
        .args(["--threads", &threads.to_string(), "--out"])
        .arg(dir)
        .status()
        .map_err(|e| e.to_string())?;
    status.code().ok_or_else(|| "killed".to_string())
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"seed = 11
[tessellation]
kind = "delaunay"
[tessellation.source.model]
kind = "poisson"
lambda = 1.0
[estimate]
n = 300
thresholds = [5.0, 10.0]
[verify]
realizations = 40
jm_realizations = 5
[scaling]
n = 200
[series]
empirical_n = 500
[probe]
reps = 200
"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap().to_string();
    let commands: [&[&str]; 7] =
        [&["sample"], &["estimate"], &["tail"], &["verify"], &["scaling-test"], &["series"], &["probe-assumptions"]];
    let mut compared = 0;
    for threads in [1, 4] {
        let dir = root.path().join(format!("t{threads}"));
        for c in commands {
            let mut args: Vec<&str> = c.to_vec();
            args.extend(["--config", &cfg]);
            match run_cli(&dir, threads, &args) {
                Ok(0) | Ok(1) => {}
                Ok(code) => return (false, format!("{c:?} exited with {code}")),
                Err(e) => return (false, e),
            }
        }
    }
    let mut names: Vec<_> =
        std::fs::read_dir(root.path().join("t1")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in &names {
        let a = std::fs::read(root.path().join("t1").join(name)).unwrap();
        let b = std::fs::read(root.path().join("t4").join(name));
        if b.as_deref().ok() != Some(&a[..]) {
            return (false, format!("{} differs between 1 and 4 threads", name.to_string_lossy()));
        }
        compared += 1;
    }
    (compared > 0, format!("{compared} output files byte-identical across 1 and 4 threads"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("check suites", check_suites),
        ("brute-force Delaunay equivalence", brute_force_delaunay),
        ("Poisson closed-form calibration", poisson_calibration),
        ("Delaunay scaling identity", scaling_identity),
        ("Manhattan-grid divergence", divergence_series),
        ("moment stability", moment_stability),
        ("rasterization cross-check", rasterization_oracle),
        ("Johnson-Mehl degeneration", jm_degeneration),
        ("determinism across threads", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|x| x == &label) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = f();
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {} ({:.1} s): {}",
            if ok { "PASS" } else { "FAIL" },
            label,
            name,
            start.elapsed().as_secs_f64(),
            detail
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
