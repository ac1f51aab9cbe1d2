//! Physical constants (CODATA 2018 exact / 2022 recommended values).

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Unified atomic mass unit, kg.
pub const AMU: f64 = 1.66053906892e-27;
