//! Point-cloud CSV ingestion and the JSON grid container.
//!
//! # Point cloud
//!
//! Comma-separated with the header `x,y,z,ux,uy,uz,n,T`, SI units
//! (meters, m/s, 1/m³, K), one sample per row.
//!
//! # Grid container
//!
//! A single JSON object:
//!
//! | key                 | value                                                    |
//! |---------------------|----------------------------------------------------------|
//! | `format`            | `"cryotrace-voxel-grid"`                                 |
//! | `version`           | `1`                                                      |
//! | `origin_m`          | `[x, y, z]`, lower corner of voxel (0, 0, 0)             |
//! | `voxel_size_m`      | edge length δ                                            |
//! | `dims`              | `[nx, ny, nz]`                                           |
//! | `metadata`          | field provenance (throughput, heat load, angle, ...)     |
//! | `occupied`          | `nx·ny·nz` entries of 0/1, inside the simulation volume  |
//! | `populated`         | `nx·ny·nz` entries of 0/1, voxel carries field values    |
//! | `velocity_m_s`      | `3·nx·ny·nz` numbers, `ux, uy, uz` per voxel             |
//! | `number_density_m3` | `nx·ny·nz` numbers                                       |
//! | `temperature_k`     | `nx·ny·nz` numbers                                       |
//!
//! Voxels are listed x-fastest (`i + nx·(j + ny·k)`). Unpopulated voxels
//! store zeros in the value arrays.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Aabb, FieldMetadata, FlowSample, FlowValues, VoxelGrid};
use crate::{Error, Result, Vec3};

pub const CSV_HEADER: [&str; 8] = ["x", "y", "z", "ux", "uy", "uz", "n", "T"];
const GRID_FORMAT: &str = "cryotrace-voxel-grid";

#[derive(Debug, Deserialize, Serialize)]
struct CsvRow {
    x: f64,
    y: f64,
    z: f64,
    ux: f64,
    uy: f64,
    uz: f64,
    n: f64,
    #[serde(rename = "T")]
    t: f64,
}

/// Reads a point cloud from any CSV source. Rows are validated against
/// `n >= 0`, `T > 0` and finiteness; the error names the zero-based row.
pub fn read_samples<R: Read>(reader: R) -> Result<Vec<FlowSample>> {
    read_samples_named(reader, Path::new("<csv>"))
}

pub fn read_samples_path(path: impl AsRef<Path>) -> Result<Vec<FlowSample>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_samples_named(BufReader::new(file), path)
}

fn read_samples_named<R: Read>(reader: R, path: &Path) -> Result<Vec<FlowSample>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::invalid(format!(
            "{}: expected header {}, found {}",
            path.display(),
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (index, row) in rdr.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(csv_err)?;
        let sample = FlowSample {
            position: Vec3::new(row.x, row.y, row.z),
            velocity: Vec3::new(row.ux, row.uy, row.uz),
            number_density: row.n,
            temperature: row.t,
        };
        if !sample.is_valid() {
            return Err(Error::InvalidSample { index });
        }
        out.push(sample);
    }
    Ok(out)
}

pub fn write_samples<W: Write>(writer: W, samples: &[FlowSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let to_err = |source| Error::Csv {
        path: "<csv>".into(),
        source,
    };
    for s in samples {
        w.serialize(CsvRow {
            x: s.position.x,
            y: s.position.y,
            z: s.position.z,
            ux: s.velocity.x,
            uy: s.velocity.y,
            uz: s.velocity.z,
            n: s.number_density,
            t: s.temperature,
        })
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

#[derive(Serialize, Deserialize)]
struct GridContainer {
    format: String,
    version: u32,
    origin_m: [f64; 3],
    voxel_size_m: f64,
    dims: [usize; 3],
    metadata: FieldMetadata,
    occupied: Vec<u8>,
    populated: Vec<u8>,
    velocity_m_s: Vec<f64>,
    number_density_m3: Vec<f64>,
    temperature_k: Vec<f64>,
}

pub fn write_grid<W: Write>(writer: W, grid: &VoxelGrid) -> Result<()> {
    let len = grid.len();
    let mut c = GridContainer {
        format: GRID_FORMAT.into(),
        version: 1,
        origin_m: grid.origin().into(),
        voxel_size_m: grid.voxel_size(),
        dims: grid.dims(),
        metadata: grid.metadata().clone(),
        occupied: Vec::with_capacity(len),
        populated: Vec::with_capacity(len),
        velocity_m_s: Vec::with_capacity(3 * len),
        number_density_m3: Vec::with_capacity(len),
        temperature_k: Vec::with_capacity(len),
    };
    for idx in 0..len {
        let v = grid.values(idx);
        c.occupied.push(grid.is_occupied(idx) as u8);
        c.populated.push(v.is_some() as u8);
        let v = v.unwrap_or(FlowValues {
            velocity: Vec3::zeros(),
            number_density: 0.0,
            temperature: 0.0,
        });
        c.velocity_m_s.extend(v.velocity.iter());
        c.number_density_m3.push(v.number_density);
        c.temperature_k.push(v.temperature);
    }
    serde_json::to_writer(writer, &c)?;
    Ok(())
}

pub fn read_grid<R: Read>(reader: R) -> Result<VoxelGrid> {
    let c: GridContainer = serde_json::from_reader(reader)?;
    if c.format != GRID_FORMAT || c.version != 1 {
        return Err(Error::invalid(format!(
            "unsupported grid container {} v{}",
            c.format, c.version
        )));
    }
    let origin = Vec3::from(c.origin_m);
    let extent = Vec3::new(c.dims[0] as f64, c.dims[1] as f64, c.dims[2] as f64) * c.voxel_size_m;
    let mut grid = VoxelGrid::empty(c.voxel_size_m, &Aabb::new(origin, origin + extent)?)?;
    if grid.dims() != c.dims {
        return Err(Error::invalid("grid dims inconsistent with voxel size"));
    }
    let len = grid.len();
    if [c.occupied.len(), c.populated.len(), c.number_density_m3.len(), c.temperature_k.len()]
        .iter()
        .any(|&l| l != len)
        || c.velocity_m_s.len() != 3 * len
    {
        return Err(Error::invalid("grid array lengths do not match dims"));
    }
    for idx in 0..len {
        let values = (c.populated[idx] != 0).then(|| FlowValues {
            velocity: Vec3::new(
                c.velocity_m_s[3 * idx],
                c.velocity_m_s[3 * idx + 1],
                c.velocity_m_s[3 * idx + 2],
            ),
            number_density: c.number_density_m3[idx],
            temperature: c.temperature_k[idx],
        });
        if let Some(v) = values {
            if !v.is_valid() {
                return Err(Error::InvalidSample { index: idx });
            }
        }
        grid.set_voxel(idx, values, c.occupied[idx] != 0);
    }
    Ok(grid.with_metadata(c.metadata))
}

pub fn write_samples_path(path: impl AsRef<Path>, samples: &[FlowSample]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_samples(BufWriter::new(file), samples)
}

pub fn write_grid_path(path: impl AsRef<Path>, grid: &VoxelGrid) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_grid(&mut w, grid)?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_grid_path(path: impl AsRef<Path>) -> Result<VoxelGrid> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_grid(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_point_cloud() {
        let text = "x,y,z,ux,uy,uz,n,T\n0,0,0,1,2,3,1e22,4.5\n0.001, 0, 0, 0, 0, 0, 2e22, 5\n";
        let samples = read_samples(text.as_bytes()).unwrap();
        assert_eq!(samples.len(), 2);
        assert_eq!(samples[0].velocity, Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(samples[1].temperature, 5.0);
    }

    #[test]
    fn rejects_wrong_header_and_bad_rows() {
        assert!(read_samples("x,y,z,u,v,w,n,T\n".as_bytes()).is_err());
        let neg = "x,y,z,ux,uy,uz,n,T\n0,0,0,0,0,0,1,4\n0,0,0,0,0,0,-1,4\n";
        assert!(matches!(
            read_samples(neg.as_bytes()),
            Err(Error::InvalidSample { index: 1 })
        ));
        assert!(read_samples("x,y,z,ux,uy,uz,n,T\n0,0,0,0,0\n".as_bytes()).is_err());
    }

    #[test]
    fn grid_container_round_trips() {
        let samples = read_samples(
            "x,y,z,ux,uy,uz,n,T\n0.1,0.1,0.1,1,0,0,1e20,4.5\n0.9,0.9,0.9,0,2,0,3e20,6\n".as_bytes(),
        )
        .unwrap();
        let bounds = Aabb::new(Vec3::zeros(), Vec3::repeat(1.0)).unwrap();
        let mut grid = VoxelGrid::voxelize(&samples, 0.25, &bounds).unwrap();
        grid.fill_soft_edges().unwrap();
        grid.set_metadata(FieldMetadata {
            throughput_sccm: Some(26.0),
            label: "test".into(),
            ..FieldMetadata::default()
        });
        let mut buf = Vec::new();
        write_grid(&mut buf, &grid).unwrap();
        let back = read_grid(buf.as_slice()).unwrap();
        assert_eq!(back, grid);
    }
}
