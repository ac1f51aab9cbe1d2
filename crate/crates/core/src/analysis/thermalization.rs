use serde::{Deserialize, Serialize};

use crate::collision::GasParams;
use crate::constants::BOLTZMANN;
use crate::tracer::TrajectoryRecord;

/// Below this many molecules a point is flagged as low-statistics.
pub const MIN_MOLECULES: u64 = 100;

/// Per-axis kinetic temperatures at one collision count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalPoint {
    pub collisions: u64,
    pub molecules: u64,
    /// `T_i = m Var(v_i) / k_B`, K, for i = x, y, z.
    #[serde(rename = "temperature_k")]
    pub temperature: [f64; 3],
    #[serde(rename = "std_error_k")]
    pub std_error: [f64; 3],
    #[serde(rename = "mean_velocity_m_s")]
    pub mean_velocity: [f64; 3],
    pub low_statistics: bool,
    /// True where the velocity spread vanished (T_i = 0).
    pub degenerate: [bool; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationCurve {
    /// How temperatures were obtained from the velocity ensemble.
    pub fit_method: String,
    pub points: Vec<ThermalPoint>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: [f64; 3],
    m2: [f64; 3],
}

impl Welford {
    fn push(&mut self, v: [f64; 3]) {
        self.n += 1;
        let n = self.n as f64;
        for ((x, mean), m2) in v.into_iter().zip(&mut self.mean).zip(&mut self.m2) {
            let d = x - *mean;
            *mean += d / n;
            *m2 += d * (x - *mean);
        }
    }
}

/// Streaming reduction of velocity samples per collision count, so that
/// large ensembles never need to be held in memory. Records must be pushed
/// in a fixed order for bit-reproducible output.
#[derive(Debug, Clone)]
pub struct ThermalizationAccumulator {
    max_collisions: u64,
    bins: Vec<Welford>,
}

impl ThermalizationAccumulator {
    /// Tracks collision counts `0..=max_collisions`.
    pub fn new(max_collisions: u64) -> Self {
        Self {
            max_collisions,
            bins: vec![Welford::default(); max_collisions as usize + 1],
        }
    }

    pub fn push(&mut self, record: &TrajectoryRecord) {
        for s in &record.samples {
            if s.collisions <= self.max_collisions {
                self.bins[s.collisions as usize].push(s.velocity.into());
            }
        }
    }

    pub fn finish(&self, params: &GasParams) -> ThermalizationCurve {
        let scale = params.molecule_mass / BOLTZMANN;
        let points = self
            .bins
            .iter()
            .enumerate()
            .filter(|(_, w)| w.n >= 2)
            .map(|(k, w)| {
                let n = w.n as f64;
                let temperature = w.m2.map(|m2| scale * m2 / (n - 1.0));
                ThermalPoint {
                    collisions: k as u64,
                    molecules: w.n,
                    temperature,
                    std_error: temperature.map(|t| t * (2.0 / (n - 1.0)).sqrt()),
                    mean_velocity: w.mean,
                    low_statistics: w.n < MIN_MOLECULES,
                    degenerate: temperature.map(|t| t <= 0.0),
                }
            })
            .collect();
        ThermalizationCurve {
            fit_method: "sample_variance".into(),
            points,
        }
    }
}

/// Per-axis temperatures versus collision count for `K <= max_collisions`.
/// Meaningful point-by-point only when records were sampled every collision.
pub fn thermalization_curve<'a>(
    records: impl IntoIterator<Item = &'a TrajectoryRecord>,
    params: &GasParams,
    max_collisions: u64,
) -> ThermalizationCurve {
    let mut acc = ThermalizationAccumulator::new(max_collisions);
    for r in records {
        acc.push(r);
    }
    acc.finish(params)
}

/// Temperature after `collisions` collisions with a buffer gas at
/// `buffer_temperature`, starting from `initial`:
/// `T(K) = T_b + (T_0 − T_b) exp(−2 K m m_b / (m + m_b)²)`.
pub fn analytic_thermalization(
    collisions: f64,
    initial: f64,
    buffer_temperature: f64,
    params: &GasParams,
) -> f64 {
    buffer_temperature
        + (initial - buffer_temperature) * (-collisions * params.thermalization_exponent()).exp()
}

impl ThermalizationCurve {
    pub fn point(&self, collisions: u64) -> Option<&ThermalPoint> {
        self.points
            .binary_search_by_key(&collisions, |p| p.collisions)
            .ok()
            .map(|i| &self.points[i])
    }

    /// `(K, |T_i(K) − T_b| / (T_i(0) − T_b))` for one axis (0 = x).
    pub fn relative_excess(&self, axis: usize, buffer_temperature: f64) -> Vec<(u64, f64)> {
        let Some(t0) = self.point(0).map(|p| p.temperature[axis]) else {
            return Vec::new();
        };
        let span = t0 - buffer_temperature;
        self.points
            .iter()
            .map(|p| (p.collisions, (p.temperature[axis] - buffer_temperature).abs() / span))
            .collect()
    }

    /// Least-squares slope of `−ln(relative excess)` against K over
    /// `k_min..=k_max`, i.e. the per-collision decay exponent.
    pub fn decay_exponent(
        &self,
        axis: usize,
        buffer_temperature: f64,
        k_min: u64,
        k_max: u64,
    ) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .relative_excess(axis, buffer_temperature)
            .into_iter()
            .filter(|&(k, r)| k >= k_min && k <= k_max && r > 0.0)
            .map(|(k, r)| (k as f64, r.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(-sxy / sxx)
    }

    /// First K at which the relative excess drops below `fraction`.
    pub fn first_below(&self, axis: usize, buffer_temperature: f64, fraction: f64) -> Option<u64> {
        self.relative_excess(axis, buffer_temperature)
            .into_iter()
            .find(|&(_, r)| r < fraction)
            .map(|(k, _)| k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracer::{MoleculeState, TerminalClass};
    use crate::Vec3;
    use approx::assert_relative_eq;

    fn record(velocities: &[[f64; 3]]) -> TrajectoryRecord {
        let samples: Vec<MoleculeState> = velocities
            .iter()
            .enumerate()
            .map(|(k, v)| MoleculeState {
                position: Vec3::zeros(),
                velocity: Vec3::from(*v),
                collisions: k as u64,
                time: k as f64,
            })
            .collect();
        TrajectoryRecord {
            index: 0,
            terminal: *samples.last().unwrap(),
            samples,
            last_inside: Vec3::zeros(),
            terminal_class: TerminalClass::CollisionCapReached,
        }
    }

    #[test]
    fn analytic_model_limits() {
        let p = GasParams::default();
        assert_eq!(analytic_thermalization(0.0, 500.0, 4.5, &p), 500.0);
        assert_relative_eq!(analytic_thermalization(1e5, 500.0, 4.5, &p), 4.5, max_relative = 1e-12);
    }

    #[test]
    fn identical_velocities_are_degenerate() {
        let recs: Vec<_> = (0..3).map(|_| record(&[[1.0, 2.0, 3.0]])).collect();
        let c = thermalization_curve(&recs, &GasParams::default(), 10);
        let p = c.point(0).unwrap();
        assert_eq!(p.temperature, [0.0; 3]);
        assert_eq!(p.degenerate, [true; 3]);
        assert!(p.low_statistics);
    }

    #[test]
    fn variance_subtracts_the_mean() {
        // v_x ∈ {10, 12}: sample variance 2, independent of the offset.
        let recs = vec![record(&[[10.0, 0.0, 0.0]]), record(&[[12.0, 0.0, 0.0]])];
        let p = GasParams::default();
        let c = thermalization_curve(&recs, &p, 0);
        assert_relative_eq!(
            c.point(0).unwrap().temperature[0],
            p.molecule_mass * 2.0 / BOLTZMANN,
            max_relative = 1e-12
        );
        assert_eq!(c.point(0).unwrap().mean_velocity[0], 11.0);
    }

    #[test]
    fn decay_exponent_of_exact_exponential() {
        let t_b = 4.5;
        let pts = (0..50)
            .map(|k| {
                let t = t_b + 300.0 * (-0.07 * k as f64).exp();
                ThermalPoint {
                    collisions: k,
                    molecules: 1000,
                    temperature: [t; 3],
                    std_error: [0.0; 3],
                    mean_velocity: [0.0; 3],
                    low_statistics: false,
                    degenerate: [false; 3],
                }
            })
            .collect();
        let c = ThermalizationCurve {
            fit_method: "test".into(),
            points: pts,
        };
        assert_relative_eq!(c.decay_exponent(1, t_b, 0, 49).unwrap(), 0.07, max_relative = 1e-10);
        // exp(-0.07 K) < 0.01 first at K = 66 > 49
        assert_eq!(c.first_below(1, t_b, 0.01), None);
        assert_eq!(c.first_below(1, t_b, 0.1), Some(33));
    }
}
