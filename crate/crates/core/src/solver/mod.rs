//! Nonlinear solvers for the log-density system
//! `∂_t q + u·∇q + div u = 0`,
//! `∂_t u + u·∇u − āΔu − b̄∇div u − μ̄D(u)∇q − λ̄ div u ∇q + ∇F(q) = c̄(∇Δq + ½∇|∇q|²)`
//! and the effective-velocity system in `(ρ, v)`, plus the capillary tensor.

mod capillary;
mod imex;
mod params;
mod picard;
mod system;

pub use capillary::{capillary_force, laplacian_identity_residual, pressure_gradient, CapillaryForm};
pub use imex::{calibrate_dt, run_15, run_15_observed, run_17, step_imex, Run, RunOptions, Termination, DEFAULT_CFL};
pub use params::{Normalization, OperatorScales, PhysParams, PressureLaw, VACUUM_FLOOR};
pub use picard::{picard_iterate, PicardOptions, PicardReport, PicardStep, TransportSplit};
pub use system::{
    effective_velocity, inverse_effective_velocity, rhs_system_1_5, rhs_system_1_7, smooth_data,
    State, StateV,
};
