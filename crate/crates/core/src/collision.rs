//! Molecule/buffer-gas collisions: local rate, partner sampling and
//! hard-sphere elastic scattering.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{StandardNormal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::constants::{AMU, BOLTZMANN};
use crate::{Error, Result, Vec3};

/// Species constants of the traced molecule and the buffer gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    /// Hard-sphere scattering cross section, m².
    pub cross_section: f64,
    /// Traced molecule mass, kg.
    pub molecule_mass: f64,
    /// Buffer atom mass, kg.
    pub buffer_mass: f64,
}

impl GasParams {
    pub fn new(cross_section: f64, molecule_mass: f64, buffer_mass: f64) -> Result<Self> {
        let p = Self {
            cross_section,
            molecule_mass,
            buffer_mass,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_amu(cross_section: f64, molecule_amu: f64, buffer_amu: f64) -> Result<Self> {
        Self::new(cross_section, molecule_amu * AMU, buffer_amu * AMU)
    }

    /// Naphthalene (128 amu, σ = 1.2×10⁻¹⁷ m²) in helium (4 amu).
    pub fn naphthalene_helium() -> Self {
        Self {
            cross_section: 1.2e-17,
            molecule_mass: 128.0 * AMU,
            buffer_mass: 4.0 * AMU,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.cross_section) {
            return Err(Error::invalid(format!(
                "cross section must be > 0, got {}",
                self.cross_section
            )));
        }
        if !pos(self.molecule_mass) || !pos(self.buffer_mass) {
            return Err(Error::invalid("masses must be > 0"));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.molecule_mass + self.buffer_mass
    }

    /// Per-collision decay exponent of the temperature excess,
    /// `2 m m_b / (m + m_b)²`.
    pub fn thermalization_exponent(&self) -> f64 {
        2.0 * self.molecule_mass * self.buffer_mass / self.total_mass().powi(2)
    }
}

impl Default for GasParams {
    fn default() -> Self {
        Self::naphthalene_helium()
    }
}

/// Mean speed `sqrt(8 k T / (π m))` of a Maxwell-Boltzmann gas.
pub fn mean_thermal_speed(temperature: f64, mass: f64) -> f64 {
    (8.0 * BOLTZMANN * temperature / (PI * mass)).sqrt()
}

/// Collision rate of a molecule moving at `v` through buffer gas with flow
/// velocity `u`, density `n` and temperature `T`:
/// `Γ = σ n sqrt(|v − u|² + 8 k T / (π m_b))`.
pub fn collision_rate(
    v: &Vec3,
    u: &Vec3,
    number_density: f64,
    temperature: f64,
    params: &GasParams,
) -> Result<f64> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::invalid(format!(
            "temperature must be > 0, got {temperature}"
        )));
    }
    if !(number_density.is_finite() && number_density >= 0.0) {
        return Err(Error::invalid(format!(
            "number density must be >= 0, got {number_density}"
        )));
    }
    Ok(rate(v, u, number_density, temperature, params))
}

#[inline]
pub(crate) fn rate(v: &Vec3, u: &Vec3, n: f64, t: f64, params: &GasParams) -> f64 {
    let thermal_sq = 8.0 * BOLTZMANN * t / (PI * params.buffer_mass);
    params.cross_section * n * ((v - u).norm_squared() + thermal_sq).sqrt()
}

/// How the velocity of a collision partner is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplingMethod {
    /// Flow velocity plus a Maxwell-Boltzmann thermal velocity.
    #[default]
    Direct,
    /// Draw `candidates` thermal velocities and pick one with probability
    /// proportional to its speed relative to the molecule.
    Weighted {
        #[serde(default = "default_candidates")]
        candidates: u32,
    },
}

fn default_candidates() -> u32 {
    10
}

impl SamplingMethod {
    pub fn weighted() -> Self {
        SamplingMethod::Weighted {
            candidates: default_candidates(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SamplingMethod::Weighted { candidates: 0 } => {
                Err(Error::invalid("weighted sampling needs at least one candidate"))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SamplingMethod::Direct => "direct".into(),
            SamplingMethod::Weighted { candidates } => format!("weighted{candidates}"),
        }
    }
}

#[inline]
fn thermal_velocity<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Vec3 {
    Vec3::new(
        sigma * rng.sample::<f64, _>(StandardNormal),
        sigma * rng.sample::<f64, _>(StandardNormal),
        sigma * rng.sample::<f64, _>(StandardNormal),
    )
}

/// Velocity of a buffer atom selected as collision partner for a molecule
/// at `v` in gas flowing at `u` with temperature `T`.
///
/// Thermal components are zero-mean Gaussians with variance `k T / m_b`.
/// With one candidate the weighted method consumes the random stream
/// exactly like the direct method.
pub fn sample_partner<R: Rng + ?Sized>(
    v: &Vec3,
    u: &Vec3,
    temperature: f64,
    method: SamplingMethod,
    params: &GasParams,
    rng: &mut R,
) -> Vec3 {
    let sigma = (BOLTZMANN * temperature / params.buffer_mass).sqrt();
    match method {
        SamplingMethod::Direct => u + thermal_velocity(sigma, rng),
        SamplingMethod::Weighted { candidates } => {
            // Single-slot weighted reservoir: candidate i replaces the
            // current pick with probability w_i / Σ_{j<=i} w_j.
            let drift = u - v;
            let mut chosen = Vec3::zeros();
            let mut total = 0.0;
            for i in 0..candidates.max(1) {
                let th = thermal_velocity(sigma, rng);
                let w = (th + drift).norm();
                total += w;
                if i == 0 || (total > 0.0 && rng.random::<f64>() * total < w) {
                    chosen = th;
                }
            }
            u + chosen
        }
    }
}

/// Post-collision velocities for a hard-sphere encounter with the relative
/// velocity scattered into direction `direction` (unit vector) in the
/// centre-of-mass frame.
pub fn scatter_with_direction(
    v: &Vec3,
    partner: &Vec3,
    direction: &Vec3,
    params: &GasParams,
) -> (Vec3, Vec3) {
    let (m, mb) = (params.molecule_mass, params.buffer_mass);
    let total = m + mb;
    let cm = (v * m + partner * mb) / total;
    let g = (v - partner).norm();
    (
        cm + direction * (g * mb / total),
        cm - direction * (g * m / total),
    )
}

/// Isotropic hard-sphere scattering. Returns the molecule and partner
/// velocities after the collision.
pub fn scatter_pair<R: Rng + ?Sized>(
    v: &Vec3,
    partner: &Vec3,
    params: &GasParams,
    rng: &mut R,
) -> (Vec3, Vec3) {
    let dir: [f64; 3] = rng.sample(UnitSphere);
    scatter_with_direction(v, partner, &Vec3::from(dir), params)
}

/// Molecule velocity after an elastic collision with `partner`.
pub fn elastic_update<R: Rng + ?Sized>(
    v: &Vec3,
    partner: &Vec3,
    params: &GasParams,
    rng: &mut R,
) -> Vec3 {
    scatter_pair(v, partner, params, rng).0
}

/// Mean free path of a molecule co-moving with the flow, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFreePaths {
    /// `v_m / Γ(v = u)` with `v_m = sqrt(8 k T / (π m))`.
    pub from_rate: f64,
    /// `1 / (σ n sqrt(1 + m / m_b))`.
    pub formula: f64,
}

impl MeanFreePaths {
    pub fn ratio(&self) -> f64 {
        self.from_rate / self.formula
    }
}

pub fn mean_free_path_check(
    number_density: f64,
    temperature: f64,
    params: &GasParams,
) -> Result<MeanFreePaths> {
    if !(number_density.is_finite() && number_density > 0.0) {
        return Err(Error::invalid("number density must be > 0"));
    }
    let v = Vec3::zeros();
    let gamma = collision_rate(&v, &v, number_density, temperature, params)?;
    let vm = mean_thermal_speed(temperature, params.molecule_mass);
    Ok(MeanFreePaths {
        from_rate: vm / gamma,
        formula: 1.0
            / (params.cross_section
                * number_density
                * (1.0 + params.molecule_mass / params.buffer_mass).sqrt()),
    })
}
