//! Physical constants (SI).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass of a ⁸⁷Rb atom, kg.
pub const RB87_MASS: f64 = 86.909_180_527 * ATOMIC_MASS_UNIT;
