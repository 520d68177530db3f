//! Pseudo-spectral laboratory for the isothermal Korteweg capillary-fluid
//! system on periodic domains.
//!
//! The crate is organized bottom-up:
//!
//! - [`spectral`]: grids, fields, FFTs, Fourier-multiplier operators.
//! - [`littlewood_paley`]: dyadic blocks, Besov and Chemin-Lerner norms.
//! - [`linear`]: exact per-mode propagators for the linearized systems and
//!   the shell-energy decay checks.
//! - [`solver`]: nonlinear right-hand sides, the integrating-factor stepper,
//!   the Picard scheme and the effective-velocity change of variables.
//! - [`diagnostics`]: energy, blow-up monitors and integrability identities.
//! - [`illposed`]: lacunary data families and norm-growth sweeps.

pub mod diagnostics;
pub mod error;
pub mod illposed;
pub mod linear;
pub mod littlewood_paley;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Field, Grid, Spectrum, VectorField};

#[cfg(test)]
mod invariants;
