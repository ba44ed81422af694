//! Nested tessellations: an independent second-layer tessellation inside each
//! first-layer cell.

use super::{BuildOptions, Edge, EdgeGeometry, NestedMgCell, NestedMgInfo, TessKind, TessSpec, Tessellation};
use crate::error::{Error, Result};
use crate::geom::Region;
use crate::rng::{tag, StreamKey};

fn axis_coords(t: &Tessellation) -> (Vec<f64>, Vec<f64>) {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for e in &t.edges {
        if let EdgeGeometry::Segment(s) = &e.geometry {
            if s.a.x == s.b.x {
                xs.push(s.a.x);
            } else {
                ys.push(s.a.y);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    (xs, ys)
}

/// First-layer edges plus, for every first-layer cell meeting `target`, the
/// second layer built on `target` from the stream of that cell and clipped to
/// the cell.
pub fn build_nested(
    first: &TessSpec,
    second: &TessSpec,
    target: &Region,
    key: &StreamKey,
    opts: &BuildOptions,
) -> Result<Tessellation> {
    TessSpec::Nested { first: Box::new(first.clone()), second: Box::new(second.clone()) }.validate()?;
    let outer = first.build(target, &key.child(tag::FIRST_LAYER), opts)?;
    if !outer.certified {
        return Err(Error::Uncertified("nested first layer".into()));
    }
    let cells = outer.cells.clone().ok_or_else(|| Error::Unsupported("first layer without cells".into()))?;
    let extent = target.center().norm() + target.circumradius() + 1.0;
    let mg_in_mg = matches!(first, TessSpec::Manhattan { .. }) && matches!(second, TessSpec::Manhattan { .. });
    let mut edges: Vec<Edge> =
        outer.edges.iter().map(|e| Edge { id: 0, geometry: e.geometry.clone(), pair: e.pair }).collect();
    let mut mg_cells = Vec::new();
    for cell in &cells {
        let inner = second.build(target, &key.child_indexed(tag::CELL, cell.id as u64), opts)?;
        if !inner.certified {
            return Err(Error::Uncertified(format!("second layer in cell {}", cell.id)));
        }
        for e in &inner.edges {
            for piece in e.geometry.pieces(extent) {
                if let Some(s) = cell.polygon.clip_segment(&piece) {
                    edges.push(Edge { id: 0, geometry: EdgeGeometry::Segment(s), pair: None });
                }
            }
        }
        if mg_in_mg {
            let v = &cell.polygon.vertices;
            let (x, y) = ((v[0].x, v[2].x), (v[0].y, v[2].y));
            let (xs, ys) = axis_coords(&inner);
            mg_cells.push(NestedMgCell {
                x,
                y,
                vertical: xs.into_iter().filter(|&c| c > x.0 && c < x.1).collect(),
                horizontal: ys.into_iter().filter(|&c| c > y.0 && c < y.1).collect(),
            });
        }
    }
    for (id, e) in edges.iter_mut().enumerate() {
        e.id = id;
    }
    edges.retain(|e| e.geometry.meets(target));
    let nested_mg = mg_in_mg.then(|| {
        let (first_vertical, first_horizontal) = axis_coords(&outer);
        NestedMgInfo { window: target.bounding_box(), first_vertical, first_horizontal, cells: mg_cells }
    });
    Ok(Tessellation {
        edges,
        cells: Some(cells),
        generators: outer.generators,
        certified: true,
        window_radius_used: outer.window_radius_used,
        nested_mg,
        ..Tessellation::empty(TessKind::Nested, *target)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{BoxRegion, Disk};
    use crate::pointproc::{PointModel, PointSource};

    fn vt(lambda: f64) -> TessSpec {
        TessSpec::Voronoi { source: PointSource::new(PointModel::Poisson { lambda }) }
    }

    fn length(t: &Tessellation) -> f64 {
        t.edges.iter().map(|e| e.geometry.length_in(&t.target)).sum()
    }

    #[test]
    fn empty_second_layer_gives_first_layer() {
        let target = Region::Disk(Disk::centered(1.0));
        let key = StreamKey::new(4, 0);
        let opts = BuildOptions::default();
        let n = build_nested(&vt(1.0), &vt(0.0), &target, &key, &opts).unwrap();
        let f = vt(1.0).build(&target, &key.child(tag::FIRST_LAYER), &opts).unwrap();
        assert_eq!(n.edges.len(), f.edges.len());
        assert!((length(&n) - length(&f)).abs() < 1e-12);
    }

    #[test]
    fn mg_in_mg_records_axes() {
        let mg = |l: f64| TessSpec::Manhattan { lambda_v: l, lambda_h: l, palm: false };
        let target = Region::Box(BoxRegion::centered(1.0));
        let n = build_nested(&mg(2.0), &mg(3.0), &target, &StreamKey::new(9, 1), &BuildOptions::default()).unwrap();
        let info = n.nested_mg.unwrap();
        assert_eq!(info.cells.len(), (info.first_vertical.len() + 1) * (info.first_horizontal.len() + 1));
        let inner: usize = info.cells.iter().map(|c| c.vertical.len() + c.horizontal.len()).sum();
        assert_eq!(n.edges.len(), info.first_vertical.len() + info.first_horizontal.len() + inner);
    }
}
