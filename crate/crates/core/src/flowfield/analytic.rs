use serde::{Deserialize, Serialize};

use super::{Aabb, FieldMetadata, FlowValues, VoxelGrid};
use crate::{Error, Result, Vec3};

/// Closed-form buffer-gas fields, used where no CFD export is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticField {
    /// Gas at rest.
    Stagnant {
        #[serde(rename = "number_density_m3")]
        number_density: f64,
        #[serde(rename = "temperature_k")]
        temperature: f64,
    },
    /// Constant flow velocity everywhere.
    Uniform {
        #[serde(rename = "velocity_m_s")]
        velocity: Vec3,
        #[serde(rename = "number_density_m3")]
        number_density: f64,
        #[serde(rename = "temperature_k")]
        temperature: f64,
    },
    /// Flow converging on `focus`. Speed is `speed` at `reference_distance`
    /// and grows as 1/d closer in, saturating inside `core_radius`.
    RadialSink {
        #[serde(rename = "focus_m")]
        focus: Vec3,
        #[serde(rename = "speed_m_s")]
        speed: f64,
        #[serde(rename = "reference_distance_m")]
        reference_distance: f64,
        #[serde(rename = "core_radius_m")]
        core_radius: f64,
        #[serde(rename = "number_density_m3")]
        number_density: f64,
        #[serde(rename = "temperature_k")]
        temperature: f64,
    },
    /// Solid-body rotation about an axis parallel to z through
    /// `axis_point` (its z component is ignored), plus constant axial flow.
    VortexAxial {
        #[serde(rename = "axis_point_m")]
        axis_point: Vec3,
        #[serde(rename = "angular_velocity_rad_s")]
        angular_velocity: f64,
        #[serde(rename = "axial_velocity_m_s")]
        axial_velocity: f64,
        #[serde(rename = "number_density_m3")]
        number_density: f64,
        #[serde(rename = "temperature_k")]
        temperature: f64,
    },
}

/// Which voxels (by centre) belong to the simulation volume.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CellShape {
    /// The whole bounding box.
    #[default]
    Box,
    Sphere {
        #[serde(rename = "center_m")]
        center: Vec3,
        #[serde(rename = "radius_m")]
        radius: f64,
    },
    /// Cylinder about the y axis capped by a hemisphere: the cylinder spans
    /// `center.y - cylinder_height ..= center.y`, the cap sits above.
    Dome {
        #[serde(rename = "center_m")]
        center: Vec3,
        #[serde(rename = "radius_m")]
        radius: f64,
        #[serde(rename = "cylinder_height_m")]
        cylinder_height: f64,
    },
}

impl CellShape {
    pub fn contains(&self, r: &Vec3) -> bool {
        match self {
            CellShape::Box => true,
            CellShape::Sphere { center, radius } => (r - center).norm_squared() <= radius * radius,
            CellShape::Dome {
                center,
                radius,
                cylinder_height,
            } => {
                let d = r - center;
                if d.y > 0.0 {
                    d.norm_squared() <= radius * radius
                } else {
                    d.y >= -cylinder_height && d.x * d.x + d.z * d.z <= radius * radius
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            CellShape::Box => true,
            CellShape::Sphere { center, radius } => {
                center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius > 0.0
            }
            CellShape::Dome {
                center,
                radius,
                cylinder_height,
            } => {
                center.iter().all(|c| c.is_finite())
                    && radius.is_finite()
                    && *radius > 0.0
                    && cylinder_height.is_finite()
                    && *cylinder_height >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid cell shape {self:?}")))
        }
    }
}

impl AnalyticField {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalyticField::Stagnant { .. } => "stagnant",
            AnalyticField::Uniform { .. } => "uniform",
            AnalyticField::RadialSink { .. } => "radial_sink",
            AnalyticField::VortexAxial { .. } => "vortex_axial",
        }
    }

    fn gas(&self) -> (f64, f64) {
        match *self {
            AnalyticField::Stagnant {
                number_density,
                temperature,
            }
            | AnalyticField::Uniform {
                number_density,
                temperature,
                ..
            }
            | AnalyticField::RadialSink {
                number_density,
                temperature,
                ..
            }
            | AnalyticField::VortexAxial {
                number_density,
                temperature,
                ..
            } => (number_density, temperature),
        }
    }

    /// Checks the parameters for this kind against the grid bounds.
    pub fn validate(&self, bounds: &Aabb) -> Result<()> {
        let (n, t) = self.gas();
        if !(n.is_finite() && n >= 0.0) {
            return Err(Error::invalid(format!("number density must be >= 0, got {n}")));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid(format!("temperature must be > 0, got {t}")));
        }
        let finite = |v: &Vec3| v.iter().all(|c| c.is_finite());
        match self {
            AnalyticField::Stagnant { .. } => Ok(()),
            AnalyticField::Uniform { velocity, .. } if finite(velocity) => Ok(()),
            AnalyticField::Uniform { .. } => Err(Error::invalid("uniform velocity must be finite")),
            AnalyticField::RadialSink {
                focus,
                speed,
                reference_distance,
                core_radius,
                ..
            } => {
                if !finite(focus) || !bounds.contains(focus) {
                    return Err(Error::invalid(format!(
                        "sink focus {:?} must lie inside the bounds",
                        focus.as_slice()
                    )));
                }
                if !(speed.is_finite() && *speed >= 0.0) {
                    return Err(Error::invalid("sink speed must be >= 0"));
                }
                if !(reference_distance.is_finite() && *reference_distance > 0.0) {
                    return Err(Error::invalid("sink reference distance must be > 0"));
                }
                if !(core_radius.is_finite() && *core_radius > 0.0) {
                    return Err(Error::invalid("sink core radius must be > 0"));
                }
                Ok(())
            }
            AnalyticField::VortexAxial {
                axis_point,
                angular_velocity,
                axial_velocity,
                ..
            } => {
                if finite(axis_point) && angular_velocity.is_finite() && axial_velocity.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("vortex parameters must be finite"))
                }
            }
        }
    }

    /// Closed-form gas state at `r`.
    pub fn values_at(&self, r: &Vec3) -> FlowValues {
        let (number_density, temperature) = self.gas();
        let velocity = match *self {
            AnalyticField::Stagnant { .. } => Vec3::zeros(),
            AnalyticField::Uniform { velocity, .. } => velocity,
            AnalyticField::RadialSink {
                focus,
                speed,
                reference_distance,
                core_radius,
                ..
            } => {
                let d = focus - r;
                let dist = d.norm();
                if dist == 0.0 {
                    Vec3::zeros()
                } else {
                    d / dist * (speed * reference_distance / dist.max(core_radius))
                }
            }
            AnalyticField::VortexAxial {
                axis_point,
                angular_velocity,
                axial_velocity,
                ..
            } => {
                let dx = r.x - axis_point.x;
                let dy = r.y - axis_point.y;
                Vec3::new(-angular_velocity * dy, angular_velocity * dx, axial_velocity)
            }
        };
        FlowValues {
            velocity,
            number_density,
            temperature,
        }
    }
}

/// Builds a fully populated grid from a closed-form field; voxels whose
/// centre lies in `shape` are marked occupied.
pub fn generate_analytic(
    field: &AnalyticField,
    shape: &CellShape,
    voxel_size: f64,
    bounds: &Aabb,
) -> Result<VoxelGrid> {
    field.validate(bounds)?;
    shape.validate()?;
    let mut grid = VoxelGrid::empty(voxel_size, bounds)?;
    for idx in 0..grid.len() {
        let c = grid.voxel_center(idx);
        grid.set_voxel(idx, Some(field.values_at(&c)), shape.contains(&c));
    }
    if grid.occupied_count() == 0 {
        return Err(Error::invalid("cell shape contains no voxel centre"));
    }
    Ok(grid.with_metadata(FieldMetadata::labelled(format!("analytic:{}", field.kind()))))
}

impl VoxelGrid {
    /// Grid populated by evaluating `f` at every voxel centre; voxels where
    /// `f` returns a value are marked occupied.
    pub fn from_fn(
        voxel_size: f64,
        bounds: &Aabb,
        mut f: impl FnMut(&Vec3) -> Option<FlowValues>,
    ) -> Result<VoxelGrid> {
        let mut grid = VoxelGrid::empty(voxel_size, bounds)?;
        for idx in 0..grid.len() {
            let c = grid.voxel_center(idx);
            let v = f(&c);
            if let Some(values) = v {
                if !values.is_valid() {
                    return Err(Error::invalid(format!(
                        "invalid field values {values:?} at {:?}",
                        c.as_slice()
                    )));
                }
            }
            grid.set_voxel(idx, v, v.is_some());
        }
        Ok(grid)
    }
}
