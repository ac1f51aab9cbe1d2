//! Mean free path of a molecule in buffer gas.
//!
//! Compares `λ_m = v_m / Γ(v = u)` with the textbook
//! `λ = 1 / (σ n sqrt(1 + m/m_He))` for several molecular masses; the ratio
//! is `sqrt((m + m_He)/m)`, close to one only for heavy molecules. Then
//! measures λ directly by tracing a thermal molecule through stagnant gas
//! and dividing the path length by the number of collisions.
//!
//! ```bash
//! cargo run --release --example mean_free_path -- [number_density_m3]
//! ```

use cryotrace::collision::{mean_free_path_check, mean_thermal_speed, GasParams, SamplingMethod};
use cryotrace::flowfield::{generate_analytic, Aabb, AnalyticField, CellShape};
use cryotrace::geometry::{CellRegions, Disc};
use cryotrace::tracer::{init_molecule, trajectory_rng, LocalGas, StepEvent, Tracer, TracerConfig};
use cryotrace::Vec3;

const T: f64 = 4.5;

fn main() -> cryotrace::Result<()> {
    let n: f64 = std::env::args()
        .nth(1)
        .map_or(1e21, |s| s.parse().expect("number density"));

    println!("n = {n:.2e} 1/m³, T = {T} K, σ = 1.2e-17 m²");
    println!("  m (amu)   λ_m (um)  λ_formula (um)   ratio   sqrt((m+m_He)/m)");
    for m in [4.0, 28.0, 128.0, 1000.0] {
        let params = GasParams::from_amu(1.2e-17, m, 4.0)?;
        let paths = mean_free_path_check(n, T, &params)?;
        println!(
            "{m:9.0} {:10.3} {:15.3} {:8.4} {:12.4}",
            paths.from_rate * 1e6,
            paths.formula * 1e6,
            paths.ratio(),
            ((m + 4.0) / m).sqrt()
        );
    }

    // Direct measurement: a box far larger than λ, molecule started in
    // equilibrium with the gas, restarted at the centre if it ever leaves.
    let params = GasParams::naphthalene_helium();
    let half = 0.05;
    let field = AnalyticField::Stagnant {
        number_density: n,
        temperature: T,
    };
    let bounds = Aabb::new(Vec3::repeat(-half), Vec3::repeat(half))?;
    let grid = generate_analytic(&field, &CellShape::Box, 0.01, &bounds)?;
    let regions = CellRegions::new(
        Disc::new(Vec3::zeros(), Vec3::x(), 1e-3)?,
        Disc::new(Vec3::new(0.0, 0.0, half), -Vec3::z(), 1e-2)?,
        half,
        0.01,
    )?;
    let config = TracerConfig::default();
    let tracer = Tracer::new(&grid, &regions, params, SamplingMethod::Direct, &config)?;
    let mut rng = trajectory_rng(1, 0);
    let mut state = init_molecule(&regions, T, &params, &mut rng);
    let mut local = LocalGas::at(&grid, &state.position).expect("source inside");
    let (mut path, mut speed_time, mut time) = (0.0, 0.0, 0.0);
    let mut collisions = 0u64;
    // Skip the first collisions: the injected direction is not isotropic.
    while collisions < 2_000_000 {
        let before = state;
        match tracer.step(&mut state, &mut local, &mut rng)? {
            StepEvent::Moved { dt, collided, .. } => {
                if state.collisions > 200 {
                    path += (state.position - before.position).norm();
                    speed_time += before.velocity.norm() * dt;
                    time += dt;
                    collisions += collided as u64;
                }
            }
            StepEvent::Left { .. } => {
                state.position = Vec3::zeros();
                local = LocalGas::at(&grid, &state.position).expect("centre inside");
            }
        }
    }
    let formula = mean_free_path_check(n, T, &params)?;
    println!("\ntraced naphthalene, {collisions} collisions:");
    println!("  path / collisions   = {:.3} um", path / collisions as f64 * 1e6);
    println!("  mean speed          = {:.2} m/s (v_m = {:.2} m/s)", speed_time / time, mean_thermal_speed(T, params.molecule_mass));
    println!("  λ_m                 = {:.3} um", formula.from_rate * 1e6);
    println!("  λ_formula           = {:.3} um", formula.formula * 1e6);
    Ok(())
}
