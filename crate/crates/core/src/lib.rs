//! Optical preparation of counter-rotating OAM superpositions and their
//! Raman transfer onto a three-component Bose-Einstein condensate.
//!
//! The pipeline runs in three stages:
//!
//! * [`optics_network`] pushes a pure `|ℓ⟩` beam through a Mach-Zehnder
//!   interferometer with a dove prism in one arm, yielding `t|ℓ⟩ + r|−ℓ⟩`
//!   on port 1 after post-selection.
//! * [`bec_dynamics`] integrates the projected amplitude equations for the
//!   non-rotating mode `α` and the vortex modes `β±` under a two-photon
//!   detuning schedule.
//! * [`mode_projection`] evaluates the condensate mode functions and Rabi
//!   profiles and recomputes the projected coefficients by quadrature.
//!
//! [`oam_modes`] evaluates Laguerre-Gaussian beams, [`render`] produces
//! density, phase and interference grids, and [`cli`] ties everything to
//! the `vortexsim` command line.

pub mod bec_dynamics;
pub mod cli;
pub mod config;
pub mod constants;
pub mod error;
pub mod export;
pub mod grid;
pub mod integrator;
pub mod mode_projection;
pub mod oam_modes;
pub mod optics_network;
pub mod quadrature;
pub mod render;

pub use error::{Error, Result};
pub use num_complex::Complex64;
