//! Simulation and verification engine for planar random tessellations.
//!
//! The crate samples stationary point processes (Poisson, Cox, Widom–Rowlinson,
//! line and axis processes, Palm versions), builds Voronoi, Delaunay,
//! Johnson–Mehl, line, Manhattan-grid and nested tessellations restricted to a
//! target disk with stabilization certificates, measures total edge length and
//! edge/cell counts, estimates exponential moments by Monte Carlo and checks the
//! deterministic per-realization inequalities that bound those moments.

pub mod cli;
pub mod config;
pub mod error;
pub mod geom;
pub mod mc;
pub mod measure;
pub mod pointproc;
pub mod rng;
pub mod tess;
pub mod verify;

pub use error::{Error, Result};
pub use geom::{BoxRegion, Disk, LineRT, Point2, Polyline, Region, Segment};
pub use rng::StreamKey;
