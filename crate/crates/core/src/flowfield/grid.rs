use std::cmp::Ordering;

use super::{Aabb, FieldMetadata, FlowSample, FlowValues};
use crate::{Error, Result, Vec3};

/// Offsets of the six face neighbours, in the fixed order used for every
/// neighbour reduction: -x, +x, -y, +y, -z, +z.
const FACE_NEIGHBOURS: [[isize; 3]; 6] = [
    [-1, 0, 0],
    [1, 0, 0],
    [0, -1, 0],
    [0, 1, 0],
    [0, 0, -1],
    [0, 0, 1],
];

/// Dense cubic-voxel lookup table of flow velocity, number density and
/// temperature.
///
/// Voxel `(i, j, k)` covers the half-open box
/// `[origin + (i, j, k)·δ, origin + (i+1, j+1, k+1)·δ)`, stored x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    origin: Vec3,
    voxel_size: f64,
    dims: [usize; 3],
    cells: Vec<Option<FlowValues>>,
    occupied: Vec<bool>,
    metadata: FieldMetadata,
}

/// Result of a point query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookup {
    /// Linear voxel index, `None` outside the grid bounds.
    pub voxel: Option<usize>,
    pub values: Option<FlowValues>,
    /// True when the containing voxel belongs to the simulation volume.
    pub inside: bool,
}

impl VoxelGrid {
    /// Empty grid covering `bounds` with cubic voxels of side `voxel_size`.
    pub fn empty(voxel_size: f64, bounds: &Aabb) -> Result<Self> {
        if !(voxel_size.is_finite() && voxel_size > 0.0) {
            return Err(Error::invalid(format!(
                "voxel size must be positive, got {voxel_size}"
            )));
        }
        let bounds = Aabb::new(bounds.min, bounds.max)?;
        let size = bounds.size();
        let mut dims = [0usize; 3];
        for a in 0..3 {
            // Tolerate round-off when the extent is an integer multiple of δ.
            let n = (size[a] / voxel_size - 1e-9).ceil().max(1.0);
            if n > 1e9 {
                return Err(Error::invalid("grid too large for voxel size"));
            }
            dims[a] = n as usize;
        }
        let len = dims[0]
            .checked_mul(dims[1])
            .and_then(|v| v.checked_mul(dims[2]))
            .filter(|&v| v <= 1 << 31)
            .ok_or_else(|| Error::invalid("grid too large for voxel size"))?;
        Ok(Self {
            origin: bounds.min,
            voxel_size,
            dims,
            cells: vec![None; len],
            occupied: vec![false; len],
            metadata: FieldMetadata::default(),
        })
    }

    /// Quantizes scattered samples onto the grid. Each voxel holding at least
    /// one sample stores the mean of its samples and is marked occupied.
    ///
    /// Means are accumulated over samples sorted by value, so the result does
    /// not depend on the order of `samples`.
    pub fn voxelize(samples: &[FlowSample], voxel_size: f64, bounds: &Aabb) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("flow sample list"));
        }
        let mut grid = Self::empty(voxel_size, bounds)?;
        let mut members: Vec<(usize, usize)> = Vec::with_capacity(samples.len());
        for (index, s) in samples.iter().enumerate() {
            if !s.is_valid() {
                return Err(Error::InvalidSample { index });
            }
            if !bounds.contains(&s.position) {
                return Err(Error::SampleOutOfBounds {
                    index,
                    position: [s.position.x, s.position.y, s.position.z],
                });
            }
            members.push((grid.clamped_index(&s.position), index));
        }
        members.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| sample_order(&samples[a.1], &samples[b.1]))
        });

        for group in members.chunk_by(|a, b| a.0 == b.0) {
            let voxel = group[0].0;
            let mut velocity = Vec3::zeros();
            let (mut n, mut t) = (0.0, 0.0);
            for &(_, i) in group {
                velocity += samples[i].velocity;
                n += samples[i].number_density;
                t += samples[i].temperature;
            }
            let count = group.len() as f64;
            grid.cells[voxel] = Some(FlowValues {
                velocity: velocity / count,
                number_density: n / count,
                temperature: t / count,
            });
            grid.occupied[voxel] = true;
        }
        Ok(grid)
    }

    /// Extends field values into unpopulated voxels: each pass gives every
    /// empty voxel with at least one populated face neighbour the mean of
    /// those neighbours, until nothing changes. The occupancy mask is left
    /// untouched. Returns the number of voxels filled.
    pub fn fill_soft_edges(&mut self) -> Result<usize> {
        if self.cells.iter().all(Option::is_none) {
            return Err(Error::EmptyInput("grid has no populated voxel"));
        }
        let mut queued = vec![false; self.cells.len()];
        let mut frontier = Vec::new();
        for idx in 0..self.cells.len() {
            if self.cells[idx].is_some() {
                self.queue_empty_neighbours(idx, &mut queued, &mut frontier);
            }
        }

        let mut filled = 0;
        while !frontier.is_empty() {
            frontier.sort_unstable();
            let updates: Vec<(usize, FlowValues)> = frontier
                .iter()
                .filter_map(|&idx| self.neighbour_mean(idx).map(|v| (idx, v)))
                .collect();
            for &(idx, values) in &updates {
                self.cells[idx] = Some(values);
            }
            filled += updates.len();
            frontier.clear();
            for &(idx, _) in &updates {
                self.queue_empty_neighbours(idx, &mut queued, &mut frontier);
            }
        }
        Ok(filled)
    }

    fn queue_empty_neighbours(&self, idx: usize, queued: &mut [bool], frontier: &mut Vec<usize>) {
        let ijk = self.unravel(idx);
        for off in FACE_NEIGHBOURS {
            if let Some(nb) = self.offset(ijk, off) {
                if self.cells[nb].is_none() && !queued[nb] {
                    queued[nb] = true;
                    frontier.push(nb);
                }
            }
        }
    }

    fn neighbour_mean(&self, idx: usize) -> Option<FlowValues> {
        let ijk = self.unravel(idx);
        let mut count = 0usize;
        let mut velocity = Vec3::zeros();
        let (mut n, mut t) = (0.0, 0.0);
        for off in FACE_NEIGHBOURS {
            if let Some(v) = self.offset(ijk, off).and_then(|nb| self.cells[nb]) {
                velocity += v.velocity;
                n += v.number_density;
                t += v.temperature;
                count += 1;
            }
        }
        (count > 0).then(|| {
            let c = count as f64;
            FlowValues {
                velocity: velocity / c,
                number_density: n / c,
                temperature: t / c,
            }
        })
    }

    /// Piecewise-constant point query.
    pub fn lookup(&self, r: &Vec3) -> Lookup {
        match self.voxel_index(r) {
            Some(idx) => Lookup {
                voxel: Some(idx),
                values: self.cells[idx],
                inside: self.occupied[idx],
            },
            None => Lookup {
                voxel: None,
                values: None,
                inside: false,
            },
        }
    }

    /// Linear index of the voxel containing `r`, half-open on every axis.
    #[inline]
    pub fn voxel_index(&self, r: &Vec3) -> Option<usize> {
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let f = (r[a] - self.origin[a]) / self.voxel_size;
            // NaN fails both comparisons and lands here as well.
            if !(f >= 0.0 && f < self.dims[a] as f64) {
                return None;
            }
            // truncation is floor for f >= 0; the signed cast is the cheap one
            ijk[a] = f as i64 as usize;
        }
        Some(self.ravel(ijk))
    }

    // Like `voxel_index` but maps points on the upper bounding face into the
    // last voxel layer; used only for samples already checked against bounds.
    fn clamped_index(&self, r: &Vec3) -> usize {
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let f = ((r[a] - self.origin[a]) / self.voxel_size).floor().max(0.0);
            ijk[a] = (f as usize).min(self.dims[a] - 1);
        }
        self.ravel(ijk)
    }

    #[inline]
    pub fn ravel(&self, [i, j, k]: [usize; 3]) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        [i, j, k]
    }

    /// Index of the voxel displaced by `off`, if it lies in the grid.
    pub fn offset(&self, ijk: [usize; 3], off: [isize; 3]) -> Option<usize> {
        let mut out = [0usize; 3];
        for a in 0..3 {
            let v = ijk[a] as isize + off[a];
            if v < 0 || v >= self.dims[a] as isize {
                return None;
            }
            out[a] = v as usize;
        }
        Some(self.ravel(out))
    }

    pub fn voxel_center(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.unravel(idx);
        self.origin
            + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * self.voxel_size
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn bounds(&self) -> Aabb {
        let extent = Vec3::new(
            self.dims[0] as f64,
            self.dims[1] as f64,
            self.dims[2] as f64,
        ) * self.voxel_size;
        Aabb {
            min: self.origin,
            max: self.origin + extent,
        }
    }

    #[inline]
    pub fn values(&self, idx: usize) -> Option<FlowValues> {
        self.cells[idx]
    }

    #[inline]
    pub fn is_occupied(&self, idx: usize) -> bool {
        self.occupied[idx]
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn populated_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn metadata(&self) -> &FieldMetadata {
        &self.metadata
    }

    pub fn set_metadata(&mut self, metadata: FieldMetadata) {
        self.metadata = metadata;
    }

    pub fn with_metadata(mut self, metadata: FieldMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    /// Writes one voxel directly. Used by analytic generators and decoders.
    pub(crate) fn set_voxel(&mut self, idx: usize, values: Option<FlowValues>, occupied: bool) {
        self.cells[idx] = values;
        self.occupied[idx] = occupied;
    }
}

fn sample_order(a: &FlowSample, b: &FlowSample) -> Ordering {
    let key = |s: &FlowSample| {
        [
            s.position.x,
            s.position.y,
            s.position.z,
            s.velocity.x,
            s.velocity.y,
            s.velocity.z,
            s.number_density,
            s.temperature,
        ]
    };
    key(a)
        .iter()
        .zip(key(b).iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(p: [f64; 3], u: [f64; 3], n: f64, t: f64) -> FlowSample {
        FlowSample {
            position: Vec3::from(p),
            velocity: Vec3::from(u),
            number_density: n,
            temperature: t,
        }
    }

    fn unit_bounds(n: f64) -> Aabb {
        Aabb::new(Vec3::zeros(), Vec3::repeat(n)).unwrap()
    }

    #[test]
    fn single_sample_is_stored_verbatim() {
        let s = sample([0.25, 0.25, 0.25], [1.0, 0.0, 0.0], 1e22, 4.5);
        let grid = VoxelGrid::voxelize(&[s], 0.5, &unit_bounds(1.0)).unwrap();
        let hit = grid.lookup(&Vec3::new(0.25, 0.25, 0.25));
        assert!(hit.inside);
        assert_eq!(hit.values.unwrap(), s.values());
        assert_eq!(grid.occupied_count(), 1);
    }

    #[test]
    fn two_samples_in_one_voxel_are_averaged() {
        let a = sample([0.1, 0.1, 0.1], [0.0; 3], 1e22, 4.5);
        let b = sample([0.4, 0.3, 0.2], [0.0; 3], 3e22, 4.5);
        let grid = VoxelGrid::voxelize(&[a, b], 0.5, &unit_bounds(1.0)).unwrap();
        let v = grid.lookup(&Vec3::repeat(0.25)).values.unwrap();
        assert_relative_eq!(v.number_density, 2e22, max_relative = 1e-15);
    }

    #[test]
    fn rejects_empty_and_invalid_samples() {
        assert!(matches!(
            VoxelGrid::voxelize(&[], 0.5, &unit_bounds(1.0)),
            Err(Error::EmptyInput(_))
        ));
        let good = sample([0.1; 3], [0.0; 3], 1.0, 1.0);
        let bad = sample([0.2; 3], [f64::NAN, 0.0, 0.0], 1.0, 1.0);
        assert!(matches!(
            VoxelGrid::voxelize(&[good, bad], 0.5, &unit_bounds(1.0)),
            Err(Error::InvalidSample { index: 1 })
        ));
        let cold = sample([0.2; 3], [0.0; 3], 1.0, 0.0);
        assert!(matches!(
            VoxelGrid::voxelize(&[cold], 0.5, &unit_bounds(1.0)),
            Err(Error::InvalidSample { index: 0 })
        ));
        let outside = sample([2.0; 3], [0.0; 3], 1.0, 1.0);
        assert!(matches!(
            VoxelGrid::voxelize(&[outside], 0.5, &unit_bounds(1.0)),
            Err(Error::SampleOutOfBounds { index: 0, .. })
        ));
        assert!(VoxelGrid::voxelize(&[good], 0.0, &unit_bounds(1.0)).is_err());
    }

    #[test]
    fn sample_on_upper_face_lands_in_last_layer() {
        let s = sample([1.0, 1.0, 1.0], [0.0; 3], 1.0, 1.0);
        let grid = VoxelGrid::voxelize(&[s], 0.5, &unit_bounds(1.0)).unwrap();
        assert_eq!(grid.dims(), [2, 2, 2]);
        assert!(grid.is_occupied(grid.ravel([1, 1, 1])));
    }

    #[test]
    fn lookup_uses_half_open_voxels() {
        let grid = VoxelGrid::empty(0.5, &unit_bounds(1.0)).unwrap();
        assert_eq!(grid.voxel_index(&Vec3::new(0.5, 0.0, 0.0)), Some(grid.ravel([1, 0, 0])));
        assert_eq!(grid.voxel_index(&Vec3::new(0.0, 0.0, 0.0)), Some(0));
        assert_eq!(grid.voxel_index(&Vec3::new(1.0, 0.2, 0.2)), None);
        assert_eq!(grid.voxel_index(&Vec3::new(-1e-12, 0.2, 0.2)), None);
        assert_eq!(grid.voxel_index(&Vec3::new(f64::NAN, 0.2, 0.2)), None);
        let miss = grid.lookup(&Vec3::new(5.0, 0.0, 0.0));
        assert!(!miss.inside && miss.values.is_none() && miss.voxel.is_none());
    }

    #[test]
    fn fill_copies_single_neighbour_and_averages_two() {
        // 3x1x1 row: populated ends, empty middle.
        let bounds = Aabb::new(Vec3::zeros(), Vec3::new(1.5, 0.5, 0.5)).unwrap();
        let a = sample([0.25, 0.25, 0.25], [1.0, 0.0, 0.0], 1.0, 4.0);
        let b = sample([1.25, 0.25, 0.25], [3.0, 0.0, 0.0], 1.0, 6.0);
        let mut grid = VoxelGrid::voxelize(&[a, b], 0.5, &bounds).unwrap();
        assert_eq!(grid.fill_soft_edges().unwrap(), 1);
        let mid = grid.values(1).unwrap();
        assert_relative_eq!(mid.temperature, 5.0);
        assert_relative_eq!(mid.velocity.x, 2.0);
        assert!(!grid.is_occupied(1));

        let bounds = Aabb::new(Vec3::zeros(), Vec3::new(1.0, 0.5, 0.5)).unwrap();
        let mut grid = VoxelGrid::voxelize(&[a], 0.5, &bounds).unwrap();
        grid.fill_soft_edges().unwrap();
        assert_eq!(grid.values(1).unwrap(), a.values());
    }

    #[test]
    fn fill_rejects_unpopulated_grid() {
        let mut grid = VoxelGrid::empty(0.5, &unit_bounds(1.0)).unwrap();
        assert!(grid.fill_soft_edges().is_err());
    }
}
