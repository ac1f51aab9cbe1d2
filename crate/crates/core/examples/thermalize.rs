//! Thermalization of hot molecules in a stagnant 4.5 K helium bath,
//! compared with the closed-form exponential decay.
//!
//! ```bash
//! cargo run --release --example thermalize -- [trajectories] [direct|weighted]
//! ```

use cryotrace::analysis::{analytic_thermalization, ThermalizationAccumulator};
use cryotrace::collision::{GasParams, SamplingMethod};
use cryotrace::flowfield::{generate_analytic, Aabb, AnalyticField, CellShape};
use cryotrace::geometry::{CellRegions, Disc};
use cryotrace::tracer::{Tracer, TracerConfig};
use cryotrace::Vec3;

const T_HE: f64 = 4.5;
const K_MAX: u64 = 200;

fn main() -> cryotrace::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(10_000, |s| s.parse().expect("trajectory count"));
    let method = match args.next().as_deref() {
        Some("weighted") => SamplingMethod::weighted(),
        _ => SamplingMethod::Direct,
    };

    // Large enough that nobody reaches a wall within K_MAX collisions.
    let half = 4e-3;
    let bounds = Aabb::new(Vec3::repeat(-half), Vec3::repeat(half))?;
    let field = AnalyticField::Stagnant {
        number_density: 1e22,
        temperature: T_HE,
    };
    let grid = generate_analytic(&field, &CellShape::Box, 1e-3, &bounds)?;
    let regions = CellRegions::new(
        Disc::new(Vec3::zeros(), Vec3::x(), 1e-4)?,
        Disc::new(Vec3::new(0.0, 0.0, half), -Vec3::z(), 1e-3)?,
        half,
        1e-3,
    )?;
    let config = TracerConfig {
        max_collisions: K_MAX,
        record_stride: 1,
        target_count: n,
        source_temperature: 500.0,
        ..TracerConfig::default()
    };
    let params = GasParams::naphthalene_helium();
    let tracer = Tracer::new(&grid, &regions, params, method, &config)?;

    let mut acc = ThermalizationAccumulator::new(K_MAX);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let stats = tracer.run_ensemble_with(workers, |r| {
        acc.push(&r);
        Ok(())
    })?;
    let curve = acc.finish(&params);
    println!("{} trajectories ({}), {} attempts", stats.accepted, method.label(), stats.attempts);

    let t0 = curve.point(0).expect("K = 0 sampled").temperature;
    println!("T(0) = [{:.1}, {:.1}, {:.1}] K", t0[0], t0[1], t0[2]);
    println!("   K    T_x       T_y       T_z     model(T_y)  rel_y");
    for p in curve.points.iter().filter(|p| p.collisions % 10 == 0) {
        let model = analytic_thermalization(p.collisions as f64, t0[1], T_HE, &params);
        let rel = (p.temperature[1] - T_HE).abs() / (t0[1] - T_HE);
        println!(
            "{:4} {:9.3} {:9.3} {:9.3} {:9.3}  {:.2e}",
            p.collisions, p.temperature[0], p.temperature[1], p.temperature[2], model, rel
        );
    }
    let fit = curve.decay_exponent(1, T_HE, 10, 100).unwrap_or(f64::NAN);
    println!(
        "decay exponent (y, K 10..100): {fit:.5}, model {:.5}",
        params.thermalization_exponent()
    );
    match curve.first_below(1, T_HE, 0.01) {
        Some(k) => println!("T_y within 1% of the initial excess after {k} collisions"),
        None => println!("T_y never within 1% of the initial excess"),
    }
    Ok(())
}
