//! Single-molecule propagation through a voxel grid.
//!
//! Each step advances the molecule ballistically for `Δt = p_c / Γ`, capped
//! so that it never moves more than half a voxel, then decides on a
//! collision with probability `Γ Δt` (which equals `p_c` whenever the cap
//! is inactive). A molecule whose step ends outside the simulation volume
//! terminates there and is classified by [`CellRegions`].

mod ensemble;

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::collision::{self, GasParams, SamplingMethod};
use crate::constants::BOLTZMANN;
use crate::flowfield::{FlowValues, VoxelGrid};
use crate::geometry::{CellRegions, Region};
use crate::{Error, Result, Vec3};

pub use ensemble::{trajectory_rng, EnsembleStats, TraceRng};

/// Kinematic state of one traced molecule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoleculeState {
    #[serde(rename = "position_m")]
    pub position: Vec3,
    #[serde(rename = "velocity_m_s")]
    pub velocity: Vec3,
    pub collisions: u64,
    #[serde(rename = "time_s")]
    pub time: f64,
}

impl MoleculeState {
    #[inline]
    fn is_finite(&self) -> bool {
        self.position.iter().chain(self.velocity.iter()).all(|c| c.is_finite())
            && self.time.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TracerConfig {
    /// Trajectories that terminate with at most this many collisions are
    /// discarded and replaced.
    pub collision_threshold: u64,
    /// Collision cap; reaching it ends the trajectory.
    pub max_collisions: u64,
    /// Collisions between recorded samples.
    pub record_stride: u64,
    /// Accepted trajectories per ensemble.
    pub target_count: usize,
    /// Collision probability per uncapped step.
    pub collision_probability: f64,
    #[serde(rename = "dt_max_s")]
    pub dt_max: f64,
    #[serde(rename = "source_temperature_k")]
    pub source_temperature: f64,
    pub master_seed: u64,
    /// Attempt budget per ensemble; defaults to `1000·target_count + 1000`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_attempts: Option<u64>,
}

impl Default for TracerConfig {
    fn default() -> Self {
        Self {
            collision_threshold: 10,
            max_collisions: 1_000_000_000,
            record_stride: 1000,
            target_count: 100_000,
            collision_probability: 0.1,
            dt_max: 1e-4,
            source_temperature: 500.0,
            master_seed: 0,
            max_attempts: None,
        }
    }
}

impl TracerConfig {
    pub fn validate(&self) -> Result<()> {
        let p = self.collision_probability;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!(
                "collision probability must be in (0, 1), got {p}"
            )));
        }
        if self.collision_threshold >= self.max_collisions {
            return Err(Error::invalid(format!(
                "collision threshold {} must be below the collision cap {}",
                self.collision_threshold, self.max_collisions
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record stride must be >= 1"));
        }
        if !(self.dt_max.is_finite() && self.dt_max > 0.0) {
            return Err(Error::invalid("dt_max must be > 0"));
        }
        if !(self.source_temperature.is_finite() && self.source_temperature > 0.0) {
            return Err(Error::invalid("source temperature must be > 0"));
        }
        if self.max_attempts == Some(0) {
            return Err(Error::invalid("max_attempts must be >= 1"));
        }
        Ok(())
    }

    pub fn attempt_budget(&self) -> u64 {
        self.max_attempts
            .unwrap_or_else(|| 1000u64.saturating_mul(self.target_count as u64).saturating_add(1000))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalClass {
    Exit,
    SourceDisc,
    Wall,
    CollisionCapReached,
}

impl From<Region> for TerminalClass {
    fn from(r: Region) -> Self {
        match r {
            Region::Exit => TerminalClass::Exit,
            Region::SourceDisc => TerminalClass::SourceDisc,
            Region::Wall => TerminalClass::Wall,
        }
    }
}

impl TerminalClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalClass::Exit => "exit",
            TerminalClass::SourceDisc => "source_disc",
            TerminalClass::Wall => "wall",
            TerminalClass::CollisionCapReached => "collision_cap",
        }
    }
}

/// An accepted trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    /// Attempt index the trajectory was drawn with.
    pub index: u64,
    /// States at every `record_stride` collisions, starting with K = 0.
    pub samples: Vec<MoleculeState>,
    /// State at termination. For volume exits this is the endpoint of the
    /// crossing step.
    pub terminal: MoleculeState,
    /// Last position inside the simulation volume.
    #[serde(rename = "last_inside_m")]
    pub last_inside: Vec3,
    pub terminal_class: TerminalClass,
}

impl TrajectoryRecord {
    /// Residence time τ, s.
    pub fn residence_time(&self) -> f64 {
        self.terminal.time
    }

    pub fn collisions(&self) -> u64 {
        self.terminal.collisions
    }

    /// Recorded samples followed by the terminal state.
    pub fn all_samples(&self) -> impl Iterator<Item = &MoleculeState> {
        self.samples.iter().chain(std::iter::once(&self.terminal))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryOutcome {
    Accepted(TrajectoryRecord),
    /// Terminated within the collision threshold; the caller re-initializes.
    Discarded { region: Region, collisions: u64 },
}

/// Outcome of a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepEvent {
    Moved {
        /// Γ at the start of the step, 1/s.
        rate: f64,
        dt: f64,
        collided: bool,
    },
    /// The step ended outside the volume; the state holds the endpoint.
    Left { last_inside: Vec3 },
}

/// Cached gas state of the voxel the molecule currently occupies.
///
/// Also caches Γ and Δt, which only change on a collision or a voxel
/// change. Rebuild it with [`LocalGas::at`] after modifying a molecule
/// state outside [`Tracer::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGas {
    pub voxel: usize,
    pub values: FlowValues,
    kinetics: Option<(f64, f64)>,
}

impl LocalGas {
    /// Gas state at `r`, or `None` if `r` is outside the simulation volume.
    pub fn at(grid: &VoxelGrid, r: &Vec3) -> Option<Self> {
        let voxel = grid.voxel_index(r).filter(|&i| grid.is_occupied(i))?;
        Some(Self {
            voxel,
            values: grid.values(voxel)?,
            kinetics: None,
        })
    }
}

/// Draws a freshly injected molecule: uniform position on the source disc,
/// Maxwell-Boltzmann speed at `source_temperature`, direction with density
/// ∝ cos²φ in the polar angle φ from the disc normal.
pub fn init_molecule<R: Rng + ?Sized>(
    regions: &CellRegions,
    source_temperature: f64,
    params: &GasParams,
    rng: &mut R,
) -> MoleculeState {
    let disc = &regions.source;
    let (e1, e2) = disc.basis();

    let rho = disc.radius * rng.random::<f64>().sqrt();
    let psi = TAU * rng.random::<f64>();
    let position = disc.center + (e1 * psi.cos() + e2 * psi.sin()) * rho;

    let sigma = (BOLTZMANN * source_temperature / params.molecule_mass).sqrt();
    let speed = Vec3::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
    )
    .norm()
        * sigma;

    // P(cos φ <= c) = c³ on the forward hemisphere.
    let cos_phi = rng.random::<f64>().cbrt();
    let sin_phi = (1.0 - cos_phi * cos_phi).max(0.0).sqrt();
    let alpha = TAU * rng.random::<f64>();
    let dir = disc.normal * cos_phi + (e1 * alpha.cos() + e2 * alpha.sin()) * sin_phi;

    MoleculeState {
        position,
        velocity: dir * speed,
        collisions: 0,
        time: 0.0,
    }
}

/// Everything a trajectory needs, borrowed for the duration of a run.
#[derive(Debug, Clone, Copy)]
pub struct Tracer<'a> {
    pub grid: &'a VoxelGrid,
    pub regions: &'a CellRegions,
    pub params: GasParams,
    pub method: SamplingMethod,
    pub config: &'a TracerConfig,
}

impl<'a> Tracer<'a> {
    pub fn new(
        grid: &'a VoxelGrid,
        regions: &'a CellRegions,
        params: GasParams,
        method: SamplingMethod,
        config: &'a TracerConfig,
    ) -> Result<Self> {
        params.validate()?;
        method.validate()?;
        config.validate()?;
        regions.validate()?;
        Ok(Self {
            grid,
            regions,
            params,
            method,
            config,
        })
    }

    /// Advances `state` by one time step. `local` must describe the voxel
    /// containing `state.position`; it is refreshed on voxel changes.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: &mut MoleculeState,
        local: &mut LocalGas,
        rng: &mut R,
    ) -> Result<StepEvent> {
        let (gamma, dt) = match local.kinetics {
            Some(k) => k,
            None => {
                let k = self.kinetics(&state.velocity, &local.values);
                local.kinetics = Some(k);
                k
            }
        };

        let last_inside = state.position;
        state.position += state.velocity * dt;
        state.time += dt;
        if !state.is_finite() {
            return Err(non_finite(state));
        }

        match self.grid.voxel_index(&state.position) {
            Some(idx) if self.grid.is_occupied(idx) => {
                if idx != local.voxel {
                    if let Some(values) = self.grid.values(idx) {
                        *local = LocalGas {
                            voxel: idx,
                            values,
                            kinetics: None,
                        };
                    }
                }
            }
            _ => return Ok(StepEvent::Left { last_inside }),
        }

        let collided = rng.random::<f64>() < gamma * dt;
        if collided {
            let gas = local.values;
            let partner = collision::sample_partner(
                &state.velocity,
                &gas.velocity,
                gas.temperature,
                self.method,
                &self.params,
                rng,
            );
            state.velocity = collision::elastic_update(&state.velocity, &partner, &self.params, rng);
            state.collisions += 1;
            local.kinetics = None;
            if !state.is_finite() {
                return Err(non_finite(state));
            }
        }
        Ok(StepEvent::Moved {
            rate: gamma,
            dt,
            collided,
        })
    }

    /// Collision rate and time step for velocity `v` in gas `gas`.
    fn kinetics(&self, v: &Vec3, gas: &FlowValues) -> (f64, f64) {
        let gamma = collision::rate(v, &gas.velocity, gas.number_density, gas.temperature, &self.params);
        let speed = v.norm();
        let mut dt = if gamma > 0.0 {
            self.config.collision_probability / gamma
        } else {
            f64::INFINITY
        };
        dt = dt.min(self.config.dt_max);
        if speed > 0.0 {
            dt = dt.min(0.5 * self.grid.voxel_size() / speed);
        }
        (gamma, dt)
    }

    /// Injects one molecule and follows it until it leaves the volume or
    /// reaches the collision cap.
    pub fn run_trajectory<R: Rng + ?Sized>(&self, index: u64, rng: &mut R) -> Result<TrajectoryOutcome> {
        let cfg = self.config;
        let mut state = init_molecule(self.regions, cfg.source_temperature, &self.params, rng);
        let Some(mut local) = LocalGas::at(self.grid, &state.position) else {
            return Ok(TrajectoryOutcome::Discarded {
                region: self.regions.classify_terminal(&state.position),
                collisions: 0,
            });
        };
        let mut samples = vec![state];
        loop {
            match self.step(&mut state, &mut local, rng)? {
                StepEvent::Left { last_inside } => {
                    let region = self.regions.classify_terminal(&state.position);
                    if state.collisions <= cfg.collision_threshold {
                        return Ok(TrajectoryOutcome::Discarded {
                            region,
                            collisions: state.collisions,
                        });
                    }
                    return Ok(TrajectoryOutcome::Accepted(TrajectoryRecord {
                        index,
                        samples,
                        terminal: state,
                        last_inside,
                        terminal_class: region.into(),
                    }));
                }
                StepEvent::Moved { collided: true, .. } => {
                    if state.collisions.is_multiple_of(cfg.record_stride) {
                        samples.push(state);
                    }
                    if state.collisions >= cfg.max_collisions {
                        return Ok(TrajectoryOutcome::Accepted(TrajectoryRecord {
                            index,
                            samples,
                            terminal: state,
                            last_inside: state.position,
                            terminal_class: TerminalClass::CollisionCapReached,
                        }));
                    }
                }
                StepEvent::Moved { .. } => {}
            }
        }
    }
}

fn non_finite(state: &MoleculeState) -> Error {
    Error::NonFiniteState {
        collisions: state.collisions,
        time: state.time,
        position: state.position.into(),
        velocity: state.velocity.into(),
    }
}
