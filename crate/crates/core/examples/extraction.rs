//! Extraction efficiency η for a spherical cell with an exit at the pole.
//!
//! With stagnant gas and molecules released at the centre, every wall
//! point is equally likely, so η is the area fraction of the polar cap
//! under the exit disc. A radial sink flow focused on the exit carries
//! nearly everything out.
//!
//! ```bash
//! cargo run --release --example extraction -- [trajectories]
//! ```

use cryotrace::analysis::{extraction_efficiency, median_coated_area, PixelSize};
use cryotrace::collision::{GasParams, SamplingMethod};
use cryotrace::flowfield::{generate_analytic, Aabb, AnalyticField, CellShape};
use cryotrace::geometry::{wall_chart, CellRegions, Disc};
use cryotrace::tracer::{TerminalClass, Tracer, TracerConfig};
use cryotrace::Vec3;

const RADIUS: f64 = 8e-3;
const EXIT_RADIUS: f64 = 3e-3;
const VOXEL: f64 = 5e-4;

fn main() -> cryotrace::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(2000, |s| s.parse().expect("trajectory count"));
    let density: f64 = args.get(1).map_or(7e20, |s| s.parse().expect("density"));

    let bounds = Aabb::new(Vec3::repeat(-RADIUS - VOXEL), Vec3::repeat(RADIUS + VOXEL))?;
    let shape = CellShape::Sphere {
        center: Vec3::zeros(),
        radius: RADIUS,
    };
    // The exit plane sits halfway down the cap so that the plane tolerance
    // covers the voxelized wall over the whole disc.
    let sag = RADIUS - (RADIUS * RADIUS - EXIT_RADIUS * EXIT_RADIUS).sqrt();
    let regions = CellRegions::new(
        Disc::new(Vec3::zeros(), Vec3::x(), 1e-4)?,
        Disc::new(Vec3::new(0.0, 0.0, RADIUS - sag / 2.0), -Vec3::z(), EXIT_RADIUS)?,
        RADIUS,
        sag / 2.0 + 1.5 * VOXEL,
    )?;
    let config = TracerConfig {
        target_count: n,
        source_temperature: 4.5,
        ..TracerConfig::default()
    };
    let params = GasParams::default();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());

    let cap = (1.0 - (1.0 - (EXIT_RADIUS / RADIUS).powi(2)).sqrt()) / 2.0;
    let fields = [
        (
            "stagnant",
            AnalyticField::Stagnant {
                number_density: density,
                temperature: 4.5,
            },
        ),
        (
            "radial sink",
            AnalyticField::RadialSink {
                focus: regions.exit.center,
                speed: 20.0,
                reference_distance: RADIUS,
                core_radius: 1e-3,
                number_density: density,
                temperature: 4.5,
            },
        ),
    ];
    for (name, field) in fields {
        let grid = generate_analytic(&field, &shape, VOXEL, &bounds)?;
        let tracer = Tracer::new(&grid, &regions, params, SamplingMethod::Direct, &config)?;
        let (records, stats) = tracer.run_ensemble(workers)?;
        let (eta, counts) = extraction_efficiency(&records);
        let hits: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.terminal_class == TerminalClass::Wall)
            .map(|r| wall_chart(&r.terminal.position))
            .collect();
        let area = median_coated_area(&hits, &PixelSize::default(), RADIUS);
        println!("{name}: {counts:?}, {} discarded", stats.discarded);
        println!(
            "  eta = {}  (cap fraction {cap:.4}),  A_1/2 = {}",
            eta.map_or("undefined".into(), |e| format!("{e:.4} ± {:.4}", counts.efficiency_std_error().unwrap())),
            area.map_or("undefined".into(), |a| format!("{:.2} mm²", a * 1e6))
        );
    }
    Ok(())
}
