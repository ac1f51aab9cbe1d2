//! Residence times in a rotating column of buffer gas.
//!
//! The gas rotates rigidly about the z-axis at Ω while drifting upward.
//! Molecules start from a disc standing in the rotation plane, so their
//! start heights, and with them their transit times, spread over more than
//! a revolution. Only molecules arriving under the off-axis exit in the top
//! face leave, so the histogram of exit times splits into peaks one
//! revolution `2π/Ω` apart.
//!
//! ```bash
//! cargo run --release --example residence_peaks -- [trajectories]
//! ```

use std::f64::consts::TAU;

use cryotrace::analysis::{residence_histogram, ResidenceBins};
use cryotrace::collision::{GasParams, SamplingMethod};
use cryotrace::flowfield::{generate_analytic, Aabb, AnalyticField, CellShape};
use cryotrace::geometry::{CellRegions, Disc};
use cryotrace::tracer::{TerminalClass, Tracer, TracerConfig};
use cryotrace::Vec3;

const OMEGA: f64 = 1e4;
const HEIGHT: f64 = 6e-3;
const HALF: f64 = 8e-3;
const VOXEL: f64 = 5e-4;

fn main() -> cryotrace::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(1500, |s| s.parse().expect("trajectory count"));

    let bounds = Aabb::new(Vec3::new(-HALF, -HALF, -1e-3), Vec3::new(HALF, HALF, HEIGHT))?;
    let field = AnalyticField::VortexAxial {
        axis_point: Vec3::zeros(),
        angular_velocity: OMEGA,
        axial_velocity: 3.0,
        number_density: 1e22,
        temperature: 4.5,
    };
    let grid = generate_analytic(&field, &CellShape::Box, VOXEL, &bounds)?;
    let regions = CellRegions::new(
        Disc::new(Vec3::new(3e-3, 0.0, 2e-3), Vec3::y(), 2e-3)?,
        Disc::new(Vec3::new(-4e-3, 0.0, HEIGHT), -Vec3::z(), 2.5e-3)?,
        HALF,
        VOXEL,
    )?;
    let config = TracerConfig {
        target_count: n,
        source_temperature: 4.5,
        master_seed: 8,
        ..TracerConfig::default()
    };
    let tracer = Tracer::new(&grid, &regions, GasParams::default(), SamplingMethod::Direct, &config)?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let (records, stats) = tracer.run_ensemble(workers)?;

    let exits: Vec<f64> = records
        .iter()
        .filter(|r| r.terminal_class == TerminalClass::Exit)
        .map(|r| r.residence_time())
        .collect();
    let period = TAU / OMEGA;
    println!(
        "{} accepted, {} discarded, {} exits, revolution period {:.3} ms",
        stats.accepted,
        stats.discarded,
        exits.len(),
        period * 1e3
    );

    let bins = ResidenceBins {
        bins: 64,
        max: Some(8.0 * period),
        ..ResidenceBins::default()
    };
    let Some(h) = residence_histogram(&exits, &bins) else {
        println!("no exits");
        return Ok(());
    };
    for (i, f) in h.fractions.iter().enumerate() {
        println!("{:7.3} ms {:6.3} {}", h.edges[i] * 1e3, f, "#".repeat((f * 300.0) as usize));
    }
    for p in &h.peaks {
        println!(
            "peak at {:.3} ms ({:.2} revolutions), prominence {:.4}",
            p.time * 1e3,
            p.time / period,
            p.prominence
        );
    }
    for w in h.peaks.windows(2) {
        println!("spacing {:.3} revolutions", (w[1].time - w[0].time) / period);
    }
    Ok(())
}
