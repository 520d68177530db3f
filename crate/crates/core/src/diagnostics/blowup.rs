//! Continuation-criterion quantities of the density.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_norm, BesovSpec, DyadicPartition};
use crate::solver::VACUUM_FLOOR;
use crate::spectral::Field;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlowupReport {
    pub t: f64,
    /// `‖1/ρ − 1‖_{Ḃ⁰_{N+ε,1}}`
    pub inv_rho_besov: f64,
    /// `‖1/√ρ − 1‖_{L¹}`
    pub inv_sqrt_l1: f64,
    /// `‖√ρ − 1‖_{L¹}`
    pub sqrt_l1: f64,
    /// `‖ln ρ‖_{L^∞}`
    pub q_linf: f64,
    pub rho_min: f64,
    /// Set when `ρ` is below the vacuum floor; the first four fields are
    /// then infinite.
    pub vacuum: bool,
}

pub fn blowup_monitor(rho: &Field, t: f64, eps: f64, part: &DyadicPartition) -> Result<BlowupReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if rho.grid() != part.grid() {
        return Err(Error::GridMismatch);
    }
    let rho_min = rho.min();
    if !(rho_min >= VACUUM_FLOOR) {
        return Ok(BlowupReport {
            t,
            inv_rho_besov: f64::INFINITY,
            inv_sqrt_l1: f64::INFINITY,
            sqrt_l1: f64::INFINITY,
            q_linf: f64::INFINITY,
            rho_min,
            vacuum: true,
        });
    }
    let dim = rho.grid().dim() as f64;
    let spec = BesovSpec::homogeneous(0.0, dim + eps, 1.0);
    Ok(BlowupReport {
        t,
        inv_rho_besov: besov_norm(&rho.map(|r| 1.0 / r - 1.0), &spec, part)?,
        inv_sqrt_l1: rho.map(|r| 1.0 / r.sqrt() - 1.0).norm_lp(1.0),
        sqrt_l1: rho.map(|r| r.sqrt() - 1.0).norm_lp(1.0),
        q_linf: rho.map(f64::ln).norm_linf(),
        rho_min,
        vacuum: false,
    })
}
