//! Point cloud to voxel lookup table.
//!
//! Reads a CSV point cloud (`x,y,z,ux,uy,uz,n,T`, SI units), quantizes it
//! onto cubic voxels, fills the soft edges and writes the grid container.
//! Without an input file a synthetic cloud is generated: irregularly spaced
//! nodes of a dome-shaped cell with gas converging on an exit at the top,
//! the kind of export a CFD mesh produces.
//!
//! ```bash
//! cargo run --release --example voxelize_csv -- [cloud.csv] [voxel_m] [grid.json]
//! ```

use std::path::PathBuf;

use cryotrace::flowfield::io::{read_samples_path, write_grid_path, write_samples_path};
use cryotrace::flowfield::{Aabb, AnalyticField, CellShape, FieldMetadata, FlowSample, VoxelGrid};
use cryotrace::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RADIUS: f64 = 4e-3;

fn synthetic_cloud(count: usize) -> Vec<FlowSample> {
    let shape = CellShape::Dome {
        center: Vec3::zeros(),
        radius: RADIUS,
        cylinder_height: 3e-3,
    };
    let field = AnalyticField::RadialSink {
        focus: Vec3::new(0.0, RADIUS, 0.0),
        speed: 15.0,
        reference_distance: RADIUS,
        core_radius: 5e-4,
        number_density: 2e21,
        temperature: 4.5,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut samples = Vec::with_capacity(count);
    while samples.len() < count {
        let r = Vec3::new(
            rng.random_range(-RADIUS..RADIUS),
            rng.random_range(-3e-3..RADIUS),
            rng.random_range(-RADIUS..RADIUS),
        );
        if shape.contains(&r) {
            let v = field.values_at(&r);
            samples.push(FlowSample {
                position: r,
                velocity: v.velocity,
                number_density: v.number_density,
                temperature: v.temperature,
            });
        }
    }
    samples
}

fn main() -> cryotrace::Result<()> {
    let mut args = std::env::args().skip(1);
    let input = args.next().map(PathBuf::from);
    let voxel: f64 = args.next().map_or(5e-4, |s| s.parse().expect("voxel size in m"));
    let output = args
        .next()
        .map_or_else(|| std::env::temp_dir().join("cryotrace-dome-grid.json"), PathBuf::from);

    let samples = match &input {
        Some(path) => read_samples_path(path)?,
        None => {
            let samples = synthetic_cloud(40_000);
            let path = std::env::temp_dir().join("cryotrace-dome-cloud.csv");
            write_samples_path(&path, &samples)?;
            println!("wrote synthetic cloud to {}", path.display());
            samples
        }
    };

    // Bounds: the cloud's bounding box, padded by one voxel.
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for s in &samples {
        lo = lo.inf(&s.position);
        hi = hi.sup(&s.position);
    }
    let bounds = Aabb::new(lo - Vec3::repeat(voxel), hi + Vec3::repeat(voxel))?;

    let mut grid = VoxelGrid::voxelize(&samples, voxel, &bounds)?.with_metadata(FieldMetadata::labelled("dome cloud"));
    let occupied = grid.occupied_count();
    let filled = grid.fill_soft_edges()?;
    let [nx, ny, nz] = grid.dims();
    println!("{} samples -> {nx}x{ny}x{nz} voxels of {:.0} um", samples.len(), voxel * 1e6);
    println!(
        "occupied {occupied}, filled by soft edges {filled}, populated {}",
        grid.populated_count()
    );

    let mut per_voxel = vec![0u32; grid.len()];
    for s in &samples {
        if let Some(i) = grid.voxel_index(&s.position) {
            per_voxel[i] += 1;
        }
    }
    let sampled: Vec<u32> = per_voxel.into_iter().filter(|&c| c > 0).collect();
    println!(
        "samples per occupied voxel: min {}, mean {:.1}, max {}",
        sampled.iter().min().unwrap(),
        sampled.iter().sum::<u32>() as f64 / sampled.len() as f64,
        sampled.iter().max().unwrap()
    );

    for probe in [Vec3::zeros(), Vec3::new(0.0, 3.5e-3, 0.0), Vec3::new(3.9e-3, -2e-3, 0.0)] {
        let hit = grid.lookup(&probe);
        match hit.values {
            Some(v) => println!(
                "lookup {:?} mm: inside={} |u|={:.2} m/s n={:.3e} T={:.2} K",
                (probe * 1e3).as_slice(),
                hit.inside,
                v.velocity.norm(),
                v.number_density,
                v.temperature
            ),
            None => println!("lookup {:?} mm: outside the grid", (probe * 1e3).as_slice()),
        }
    }

    write_grid_path(&output, &grid)?;
    println!("grid written to {}", output.display());
    Ok(())
}
