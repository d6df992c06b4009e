//! Physical constants (CODATA 2018) and unit conversions shared across modules.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Bohr magneton, J/T.
pub const BOHR_MAGNETON_J_PER_T: f64 = 9.274_010_078_3e-24;

/// Bohr magneton, J/G.
pub const BOHR_MAGNETON_J_PER_G: f64 = BOHR_MAGNETON_J_PER_T * 1e-4;

/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// Atomic mass constant, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Number density conversion, m⁻³ per cm⁻³.
pub const PER_CM3_TO_PER_M3: f64 = 1e6;
