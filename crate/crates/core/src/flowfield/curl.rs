use super::VoxelGrid;
use crate::Vec3;

/// Per-voxel vector field on the layout of a [`VoxelGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub origin: Vec3,
    pub voxel_size: f64,
    pub dims: [usize; 3],
    /// `None` where the source grid had no value.
    pub values: Vec<Option<Vec3>>,
}

impl VectorField {
    pub fn get(&self, [i, j, k]: [usize; 3]) -> Option<Vec3> {
        self.values[i + self.dims[0] * (j + self.dims[1] * k)]
    }

    /// Largest magnitude over all defined voxels.
    pub fn max_norm(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|w| w.norm())
            .fold(0.0, f64::max)
    }
}

impl VoxelGrid {
    /// Vorticity `w = ∇×u` from finite differences of the stored velocity.
    ///
    /// Along each axis a central difference is used when both neighbours
    /// carry values, a one-sided difference when only one does, and zero
    /// when neither does.
    pub fn curl(&self) -> VectorField {
        let h = self.voxel_size();
        let values = (0..self.len())
            .map(|idx| {
                self.values(idx)?;
                let ijk = self.unravel(idx);
                // d[a] = ∂u/∂x_a
                let d: [Vec3; 3] = std::array::from_fn(|axis| self.derivative(idx, ijk, axis, h));
                Some(Vec3::new(
                    d[1].z - d[2].y,
                    d[2].x - d[0].z,
                    d[0].y - d[1].x,
                ))
            })
            .collect();
        VectorField {
            origin: self.origin(),
            voxel_size: h,
            dims: self.dims(),
            values,
        }
    }

    fn derivative(&self, idx: usize, ijk: [usize; 3], axis: usize, h: f64) -> Vec3 {
        let mut lo = [0isize; 3];
        let mut hi = [0isize; 3];
        lo[axis] = -1;
        hi[axis] = 1;
        let at = |off| {
            self.offset(ijk, off)
                .and_then(|nb| self.values(nb))
                .map(|v| v.velocity)
        };
        let here = self.values(idx).map(|v| v.velocity).unwrap_or_default();
        match (at(lo), at(hi)) {
            (Some(m), Some(p)) => (p - m) / (2.0 * h),
            (None, Some(p)) => (p - here) / h,
            (Some(m), None) => (here - m) / h,
            (None, None) => Vec3::zeros(),
        }
    }
}
