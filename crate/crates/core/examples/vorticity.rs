//! Vorticity `w = ∇ × u` of voxelized flow fields.
//!
//! Solid-body rotation gives `w = 2Ω` exactly, since finite differences are
//! exact for linear velocity profiles. A quadratic profile `u_z = s x²` has
//! `w_y = −2 s x`; the one-sided differences at the grid edges err by `s δ`,
//! so the worst-case error halves with the voxel size.
//!
//! ```bash
//! cargo run --release --example vorticity
//! ```

use cryotrace::flowfield::{generate_analytic, Aabb, AnalyticField, CellShape, FlowValues, VoxelGrid};
use cryotrace::Vec3;

fn main() -> cryotrace::Result<()> {
    let bounds = Aabb::new(Vec3::repeat(-4e-3), Vec3::repeat(4e-3))?;

    let omega = 1e4;
    let vortex = AnalyticField::VortexAxial {
        axis_point: Vec3::zeros(),
        angular_velocity: omega,
        axial_velocity: 3.0,
        number_density: 1e22,
        temperature: 4.5,
    };
    let grid = generate_analytic(&vortex, &CellShape::Box, 5e-4, &bounds)?;
    let w = grid.curl();
    let worst = w
        .values
        .iter()
        .flatten()
        .map(|c| (c - Vec3::new(0.0, 0.0, 2.0 * omega)).norm())
        .fold(0.0, f64::max);
    println!("vortex, Ω = {omega:.0} rad/s: max |w − 2Ω ẑ| = {worst:.2e} 1/s over {} voxels", grid.len());

    // Only the sphere's voxels are occupied; the curl stencil falls back to
    // one-sided differences at its staircase surface.
    let sphere = CellShape::Sphere {
        center: Vec3::zeros(),
        radius: 3.5e-3,
    };
    let grid = generate_analytic(&vortex, &sphere, 5e-4, &bounds)?;
    let w = grid.curl();
    println!(
        "vortex in a sphere: {} of {} voxels occupied, max |w| = {:.1} 1/s",
        grid.occupied_count(),
        grid.len(),
        w.max_norm()
    );

    let s = 1e6;
    println!("\nu_z = s x², s = {s:.0e} 1/(m s)");
    println!("   δ (um)   max |w_y + 2 s x|   ratio");
    let mut previous: Option<f64> = None;
    for delta in [1e-3, 5e-4, 2.5e-4, 1.25e-4] {
        let grid = VoxelGrid::from_fn(delta, &bounds, |r| {
            Some(FlowValues {
                velocity: Vec3::new(0.0, 0.0, s * r.x * r.x),
                number_density: 1e22,
                temperature: 4.5,
            })
        })?;
        let w = grid.curl();
        let err = (0..grid.len())
            .filter_map(|i| w.values[i].map(|c| (c.y + 2.0 * s * grid.voxel_center(i).x).abs()))
            .fold(0.0, f64::max);
        println!(
            "{:9.1} {:18.4e} {:>7}",
            delta * 1e6,
            err,
            previous.map_or("".into(), |p| format!("{:.3}", err / p))
        );
        previous = Some(err);
    }
    Ok(())
}
