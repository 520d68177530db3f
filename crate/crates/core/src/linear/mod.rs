//! Exact per-mode solutions of the constant-coefficient linearized systems
//! and the shell-energy estimates built on them.
//!
//! Sign convention: on a mode `ξ ≠ 0` with unit direction `ξ̂`, the pair
//! `(q̂, y = i ξ̂·û)` obeys the real system
//! `q̂' = −|ξ| y`, `y' = |ξ|(c|ξ|² + d) q̂ − (a + b)|ξ|² y`, so the block has
//! trace `−(a+b)|ξ|²` and determinant `|ξ|²(c|ξ|² + d)`. Velocity components
//! orthogonal to `ξ` decay at rate `a|ξ|²`.

mod energy;
mod propagator;
mod solve;

pub use energy::{
    alpha_boundary, fits_json, mode_energy, mode_energy_with, shell_energies, shell_table_csv,
    verify_decay, DecayFit, EnergyParts, EnergyWeights, ModeEnergy, DECAY_C_CAP,
};
pub use propagator::{
    eigenvalues2, expm2, longitudinal_matrix, mode_matrix, LinearCoeffs, Propagator, StepOperator,
};
pub(crate) use propagator::Symbol;
pub(crate) use solve::{duhamel, ModalState};
pub use solve::{
    aggregate_estimate, divergence_block, divergence_subsystem, solve_linear, AggregateEstimate,
    DivergenceTrajectory, Forcing, LinearTrajectory, SmoothingConstant,
};

#[cfg(test)]
mod tests;
