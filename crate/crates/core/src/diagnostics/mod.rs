//! Monitors evaluated on solver states: energy balance, continuation
//! quantities, the weighted `L^p` energy of the effective velocity and the
//! density regularity transfer.

mod blowup;
mod energy;
mod integrability;

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

pub use blowup::{blowup_monitor, BlowupReport};
pub use energy::{
    dissipation_rate, energy_dissipation_check, EnergyMonitor, orlicz_equivalence, potential_by_quadrature,
    relative_potential, total_energy, DissipationCheck, EnergyReport, OrliczReport, ORLICZ_DELTA,
};
pub use integrability::{
    integrability_gain, interpolation_fit, pointwise_identity_residual, regularity_transfer_check,
    weighted_lp_energy, weighted_terms, GainRow, InterpolationFit, InterpolationRow,
    TransferReport, WeightedBalance, WeightedTerms,
};

/// One JSON object per line.
pub fn write_json_lines<T: Serialize, W: Write>(rows: &[T], mut w: W) -> Result<()> {
    for row in rows {
        let line = serde_json::to_string(row).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn energy_csv<W: Write>(series: &[EnergyReport], mut w: W) -> Result<()> {
    writeln!(w, "t,kinetic,potential,capillary,dissipation_integral,total")?;
    for r in series {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.t,
            r.kinetic,
            r.potential,
            r.capillary,
            r.dissipation_integral,
            r.total()
        )?;
    }
    Ok(())
}

pub fn blowup_csv<W: Write>(series: &[BlowupReport], mut w: W) -> Result<()> {
    writeln!(w, "t,inv_rho_besov,inv_sqrt_l1,sqrt_l1,q_linf,rho_min,vacuum")?;
    for r in series {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.t, r.inv_rho_besov, r.inv_sqrt_l1, r.sqrt_l1, r.q_linf, r.rho_min, r.vacuum
        )?;
    }
    Ok(())
}
