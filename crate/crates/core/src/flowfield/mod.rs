//! Buffer-gas flow field: voxel lookup table built from scattered samples
//! or closed-form fields.
//!
//! A [`VoxelGrid`] stores, per cubic voxel, the mean flow velocity, number
//! density and temperature of the samples that fell into it. Voxels without
//! samples are filled by repeated nearest-neighbour averaging
//! ([`VoxelGrid::fill_soft_edges`]), which only supplies field values: the
//! inside/outside mask is fixed by the original samples.

mod analytic;
mod curl;
mod grid;
pub mod io;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

pub use analytic::{generate_analytic, AnalyticField, CellShape};
pub use curl::VectorField;
pub use grid::{Lookup, VoxelGrid};

/// One scattered data point of the buffer-gas flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample {
    pub position: Vec3,
    pub velocity: Vec3,
    /// Number density, 1/m³.
    pub number_density: f64,
    /// Temperature, K.
    pub temperature: f64,
}

impl FlowSample {
    pub fn is_valid(&self) -> bool {
        self.position.iter().all(|c| c.is_finite())
            && self.values().is_valid()
    }

    pub fn values(&self) -> FlowValues {
        FlowValues {
            velocity: self.velocity,
            number_density: self.number_density,
            temperature: self.temperature,
        }
    }
}

/// Local gas state stored in a voxel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowValues {
    pub velocity: Vec3,
    pub number_density: f64,
    pub temperature: f64,
}

impl FlowValues {
    pub fn is_valid(&self) -> bool {
        self.velocity.iter().all(|c| c.is_finite())
            && self.number_density.is_finite()
            && self.number_density >= 0.0
            && self.temperature.is_finite()
            && self.temperature > 0.0
    }
}

/// Axis-aligned bounding box, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    #[serde(rename = "min_m")]
    pub min: Vec3,
    #[serde(rename = "max_m")]
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self> {
        let ok = min.iter().chain(max.iter()).all(|c| c.is_finite())
            && (0..3).all(|a| max[a] > min[a]);
        if !ok {
            return Err(Error::invalid(format!(
                "bounds must be finite with max > min on every axis, got min {:?} max {:?}",
                min.as_slice(),
                max.as_slice()
            )));
        }
        Ok(Self { min, max })
    }

    /// Smallest box containing every sample position.
    pub fn enclosing(samples: &[FlowSample]) -> Option<Self> {
        let first = samples.first()?;
        let (mut min, mut max) = (first.position, first.position);
        for s in samples {
            min = min.inf(&s.position);
            max = max.sup(&s.position);
        }
        Some(Self { min, max })
    }

    pub fn contains(&self, r: &Vec3) -> bool {
        (0..3).all(|a| r[a] >= self.min[a] && r[a] <= self.max[a])
    }

    pub fn size(&self) -> Vec3 {
        self.max - self.min
    }
}

/// Provenance attached to a field. Never used by the physics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub throughput_sccm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat_load_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection_angle_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orifice_diameter_m: Option<f64>,
    #[serde(default)]
    pub label: String,
}

impl FieldMetadata {
    pub fn labelled(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Self::default()
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.throughput_sccm,
            self.heat_load_w,
            self.injection_angle_deg,
            self.orifice_diameter_m,
        ]
        .iter()
        .flatten()
        .all(|v| v.is_finite())
    }
}
