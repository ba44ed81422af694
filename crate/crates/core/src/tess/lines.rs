//! Poisson line tessellation restricted to a target region.

use super::{Edge, EdgeGeometry, TessKind, Tessellation};
use crate::error::{Error, Result};
use crate::geom::Region;
use crate::pointproc::{palm_line_process, sample_line_process, LineProcessSample};
use crate::rng::StreamKey;

/// Lines of `sample` meeting `target`. Each line is one edge; `line_count`
/// records how many lines meet the target.
pub fn build_lt(sample: &LineProcessSample, target: &Region) -> Result<Tessellation> {
    let reach = target.center().norm() + target.circumradius();
    if sample.rho_max < reach {
        return Err(Error::UncoveredTarget(format!(
            "line window |rho| <= {} does not cover the target (needs {reach})",
            sample.rho_max
        )));
    }
    let edges: Vec<Edge> = sample
        .lines
        .iter()
        .filter(|l| target.line_meets(l))
        .enumerate()
        .map(|(id, l)| Edge { id, geometry: EdgeGeometry::Line(*l), pair: None })
        .collect();
    Ok(Tessellation {
        line_count: Some(edges.len()),
        edges,
        window_radius_used: sample.rho_max,
        ..Tessellation::empty(TessKind::Line, *target)
    })
}

pub(super) fn build_lt_model(lambda: f64, palm: bool, target: &Region, key: &StreamKey) -> Result<Tessellation> {
    let rho_max = (target.center().norm() + target.circumradius()).max(1.0);
    let sample =
        if palm { palm_line_process(lambda, rho_max, key)? } else { sample_line_process(lambda, rho_max, key)? };
    build_lt(&sample, target)
}
