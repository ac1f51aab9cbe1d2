//! Named cell regions and terminal-position classification.
//!
//! Geometry proper (where the walls are) lives in the voxel occupancy mask.
//! This module only knows two discs, the molecule source and the exit
//! aperture, and maps wall hits onto an (azimuth, height) chart.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Flat circular region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disc {
    #[serde(rename = "center_m")]
    pub center: Vec3,
    /// Unit normal. For the source disc it points into the cell.
    pub normal: Vec3,
    #[serde(rename = "radius_m")]
    pub radius: f64,
}

impl Disc {
    /// Normalizes `normal`; rejects zero normals and non-positive radii.
    pub fn new(center: Vec3, normal: Vec3, radius: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len.is_finite() && len > 0.0) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(format!(
                "disc needs a finite centre and non-zero normal, got centre {:?} normal {:?}",
                center.as_slice(),
                normal.as_slice()
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("disc radius must be > 0, got {radius}")));
        }
        Ok(Self {
            center,
            normal: normal / len,
            radius,
        })
    }

    /// True if `r` is within `tolerance` of the disc plane and its in-plane
    /// distance from the centre is below the radius.
    pub fn contains(&self, r: &Vec3, tolerance: f64) -> bool {
        let d = r - self.center;
        let axial = d.dot(&self.normal);
        let radial_sq = d.norm_squared() - axial * axial;
        axial.abs() < tolerance && radial_sq < self.radius * self.radius
    }

    /// Two unit vectors spanning the disc plane.
    pub fn basis(&self) -> (Vec3, Vec3) {
        let n = self.normal;
        let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = n.cross(&helper).normalize();
        let e2 = n.cross(&e1);
        (e1, e2)
    }
}

/// Where a terminated molecule ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Exit,
    SourceDisc,
    Wall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRegions {
    pub source: Disc,
    pub exit: Disc,
    /// Wall radius used to turn chart pixels into physical area.
    #[serde(rename = "chart_radius_m")]
    pub chart_radius: f64,
    /// Distance from a disc plane still counted as on the disc. Defaults to
    /// the voxel size when built from a run configuration.
    #[serde(rename = "plane_tolerance_m")]
    pub plane_tolerance: f64,
}

impl CellRegions {
    pub fn new(source: Disc, exit: Disc, chart_radius: f64, plane_tolerance: f64) -> Result<Self> {
        let regions = Self {
            source: Disc::new(source.center, source.normal, source.radius)?,
            exit: Disc::new(exit.center, exit.normal, exit.radius)?,
            chart_radius,
            plane_tolerance,
        };
        regions.validate()?;
        Ok(regions)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chart_radius.is_finite() && self.chart_radius > 0.0) {
            return Err(Error::invalid("chart radius must be > 0"));
        }
        if !(self.plane_tolerance.is_finite() && self.plane_tolerance > 0.0) {
            return Err(Error::invalid("plane tolerance must be > 0"));
        }
        for d in [&self.source, &self.exit] {
            if (d.normal.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::invalid("disc normals must be unit length"));
            }
        }
        let gap = (self.source.center - self.exit.center).norm();
        if gap <= self.source.radius + self.exit.radius {
            return Err(Error::invalid(format!(
                "source disc (centre {:?}, r {}) and exit disc (centre {:?}, r {}) overlap",
                self.source.center.as_slice(),
                self.source.radius,
                self.exit.center.as_slice(),
                self.exit.radius
            )));
        }
        Ok(())
    }

    /// Regions of the spherical-dome cell: wall radius 8 mm, source disc of
    /// 2 mm radius on the equator at azimuth -130°, exit disc of 3 mm radius
    /// at azimuth 0° facing -z.
    pub fn dome_cell(plane_tolerance: f64) -> Self {
        let radius = 8e-3;
        let az = (-130.0f64).to_radians();
        let source_center = Vec3::new(radius * az.sin(), 0.0, radius * az.cos());
        Self {
            source: Disc {
                center: source_center,
                normal: -source_center.normalize(),
                radius: 2e-3,
            },
            exit: Disc {
                center: Vec3::new(0.0, 0.0, radius),
                normal: Vec3::new(0.0, 0.0, -1.0),
                radius: 3e-3,
            },
            chart_radius: radius,
            plane_tolerance,
        }
    }

    /// Classifies a terminal position. Total: every point maps to exactly
    /// one region, exit taking precedence.
    pub fn classify_terminal(&self, r: &Vec3) -> Region {
        if self.exit.contains(r, self.plane_tolerance) {
            Region::Exit
        } else if self.source.contains(r, self.plane_tolerance) {
            Region::SourceDisc
        } else {
            Region::Wall
        }
    }
}

/// Wall-chart coordinates of a point: azimuth `atan2(x, z)` in degrees,
/// in (-180, 180], and the height `y` in meters. The pole `x = z = 0` maps
/// to azimuth 0.
pub fn wall_chart(r: &Vec3) -> (f64, f64) {
    if r.x == 0.0 && r.z == 0.0 {
        return (0.0, r.y);
    }
    let az = r.x.atan2(r.z).to_degrees();
    (if az <= -180.0 { 180.0 } else { az }, r.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn regions() -> CellRegions {
        CellRegions::dome_cell(5e-4)
    }

    #[test]
    fn disc_centres_classify_as_their_region() {
        let r = regions();
        assert_eq!(r.classify_terminal(&r.exit.center), Region::Exit);
        assert_eq!(r.classify_terminal(&r.source.center), Region::SourceDisc);
        assert_eq!(r.classify_terminal(&Vec3::new(-8e-3, 0.0, 0.0)), Region::Wall);
        let (az, y) = wall_chart(&Vec3::new(-8e-3, 0.0, 0.0));
        assert_abs_diff_eq!(az, -90.0);
        assert_eq!(y, 0.0);
    }

    #[test]
    fn disc_membership_respects_plane_tolerance_and_radius() {
        let r = regions();
        let near = r.exit.center + Vec3::new(2.9e-3, 0.0, -4.9e-4);
        assert_eq!(r.classify_terminal(&near), Region::Exit);
        let off_plane = r.exit.center + Vec3::new(0.0, 0.0, 5.1e-4);
        assert_eq!(r.classify_terminal(&off_plane), Region::Wall);
        let off_rim = r.exit.center + Vec3::new(0.0, 3.01e-3, 0.0);
        assert_eq!(r.classify_terminal(&off_rim), Region::Wall);
    }

    #[test]
    fn chart_reference_points() {
        let rad = 8e-3;
        assert_eq!(wall_chart(&Vec3::new(0.0, 0.0, rad)), (0.0, 0.0));
        assert_abs_diff_eq!(wall_chart(&Vec3::new(rad, 0.0, 0.0)).0, 90.0);
        assert_abs_diff_eq!(wall_chart(&Vec3::new(0.0, 0.0, -rad)).0, 180.0);
        assert_abs_diff_eq!(wall_chart(&Vec3::new(-0.0, 0.0, -rad)).0, 180.0);
        assert_eq!(wall_chart(&Vec3::new(0.0, 2e-3, 0.0)), (0.0, 2e-3));
        let (az, _) = wall_chart(&regions().source.center);
        assert_abs_diff_eq!(az, -130.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_bad_discs_and_overlaps() {
        assert!(Disc::new(Vec3::zeros(), Vec3::zeros(), 1.0).is_err());
        assert!(Disc::new(Vec3::zeros(), Vec3::z(), 0.0).is_err());
        let d = Disc::new(Vec3::zeros(), Vec3::new(0.0, 0.0, 2.0), 1e-3).unwrap();
        assert_eq!(d.normal, Vec3::z());
        let other = Disc::new(Vec3::new(1.5e-3, 0.0, 0.0), Vec3::z(), 1e-3).unwrap();
        assert!(CellRegions::new(d, other, 8e-3, 5e-4).is_err());
    }

    #[test]
    fn basis_is_orthonormal() {
        for n in [Vec3::x(), Vec3::y(), Vec3::new(1.0, 2.0, -3.0).normalize()] {
            let d = Disc::new(Vec3::zeros(), n, 1.0).unwrap();
            let (a, b) = d.basis();
            assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(b.norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(a.dot(&b), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(a.dot(&d.normal), 0.0, epsilon = 1e-12);
        }
    }
}
