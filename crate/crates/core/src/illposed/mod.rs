//! Lacunary initial data whose velocity divergence stays bounded in
//! `B^{N/2−1}_{2,r}` for `r > 1` but not in `B^{N/2−1}_{2,1}`, and the growth
//! of the density they produce in short time.

mod family;
mod growth;

use std::io::Write;

use crate::error::Result;

pub use family::{FamilyMember, FamilyNorms, IllposedFamily};
pub use growth::{
    measure_density_growth, measure_linear_growth, DensityGrowthRow, HorizonRule, LinearGrowthRow,
};

/// Least-squares `y ≈ slope·ln n + intercept`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn log_fit(ns: &[i32], ys: &[f64]) -> Result<LogFit> {
    if ns.len() != ys.len() || ns.len() < 3 {
        return Err(crate::error::Error::InvalidArgument("log fit needs at least 3 matched points".into()));
    }
    let m = ns.len() as f64;
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let (xm, ym) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ym).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LogFit { slope, intercept, r_squared })
}

pub fn linear_growth_csv<W: Write>(rows: &[LinearGrowthRow], mut w: W) -> Result<()> {
    writeln!(w, "n,t_n,div_l1_linf")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.n, r.t_n, r.div_l1_linf)?;
    }
    Ok(())
}

pub fn density_growth_csv<W: Write>(rows: &[DensityGrowthRow], mut w: W) -> Result<()> {
    writeln!(w, "n,t_n,dt,q_linf_max,div_integral_max,transport_integral_max,termination")?;
    for r in rows {
        let term = match r.termination {
            crate::solver::Termination::Completed => "completed",
            crate::solver::Termination::Vacuum { .. } => "vacuum",
            crate::solver::Termination::NonFinite { .. } => "nan",
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.n, r.t_n, r.dt, r.q_linf_max, r.div_integral_max, r.transport_integral_max, term
        )?;
    }
    Ok(())
}

pub fn norms_csv<W: Write>(rows: &[(i32, FamilyNorms)], mut w: W) -> Result<()> {
    writeln!(w, "n,b2r,b21,zeta_partial,harmonic_partial")?;
    for (n, r) in rows {
        writeln!(w, "{},{},{},{},{}", n, r.b2r, r.b21, r.zeta_partial, r.harmonic_partial)?;
    }
    Ok(())
}
