//! Monte Carlo tracing of dilute seed molecules through a stationary,
//! voxelized buffer-gas flow field.
//!
//! The crate is organized along the pipeline a run goes through:
//!
//! - [`flowfield`]: ingest a scattered point cloud (or build an analytic
//!   field), quantize it onto cubic voxels, fill unsampled voxels by
//!   nearest-neighbour averaging, look up local gas state, compute vorticity.
//! - [`geometry`]: named cell regions (source disc, exit disc) and the
//!   azimuth/height wall chart used to classify where molecules end up.
//! - [`collision`]: local collision rate, collision-partner sampling and
//!   hard-sphere elastic scattering.
//! - [`tracer`]: molecule initialization, time stepping, trajectory
//!   termination and reproducible parallel ensembles.
//! - [`analysis`]: thermalization curves, extraction efficiency, wall
//!   contamination area and residence-time histograms.
//! - [`config`] and [`run`]: declarative run configuration and artifact
//!   output, driven by the `cryotrace` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod analysis;
pub mod collision;
pub mod config;
pub mod constants;
pub mod error;
pub mod flowfield;
pub mod geometry;
pub mod run;
pub mod tracer;

pub use error::{Error, Result};

/// Cartesian 3-vector in SI units.
pub type Vec3 = nalgebra::Vector3<f64>;
