//! Self-checks of the dyadic machinery: Bernstein bounds, gradient
//! equivalence, and the heat-semigroup smoothing estimate.

use serde::Serialize;

use super::besov::{block_table_spectral, chemin_lerner_from_tables, graded_times};
use super::{BesovSpec, ChemLernerSpec, DyadicPartition, ANNULUS_INNER, ANNULUS_OUTER};
use crate::error::{Error, Result};
use crate::spectral::{gradient, Field, Spectrum};

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinRow {
    pub l: i32,
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

/// `‖∇Δ_l f‖_{L²} / ‖Δ_l f‖_{L²}` against `[(3/4)2^l, (8/3)2^l]` for every
/// block carrying energy.
pub fn bernstein_ratios(f: &Field, part: &DyadicPartition) -> Result<Vec<BernsteinRow>> {
    if f.grid() != part.grid() {
        return Err(Error::GridMismatch);
    }
    let s = f.forward();
    let grad: Vec<Spectrum> = (0..f.grid().dim()).map(|a| s.derivative(a)).collect();
    let plain = block_table_spectral(std::slice::from_ref(&s), 2.0, true, part);
    let derived = block_table_spectral(&grad, 2.0, true, part);
    let mut rows = Vec::new();
    for (i, &l) in plain.levels.iter().enumerate() {
        let base = plain.norms[i];
        if base <= 1e-14 * (1.0 + s.energy().sqrt()) {
            continue;
        }
        let ratio = derived.norms[i] / base;
        let scale = 2f64.powi(l);
        let (lower, upper) = (ANNULUS_INNER * scale, ANNULUS_OUTER * scale);
        rows.push(BernsteinRow {
            l,
            ratio,
            lower,
            upper,
            holds: ratio >= lower * (1.0 - 1e-12) && ratio <= upper * (1.0 + 1e-12),
        });
    }
    Ok(rows)
}

/// `‖∇f‖_{Ḃ^{s-1}_{2,r}} / ‖f‖_{Ḃ^s_{2,r}}`
pub fn gradient_equivalence_ratio(
    f: &Field,
    s: f64,
    r: f64,
    part: &DyadicPartition,
) -> Result<f64> {
    let grad = gradient(f);
    let lhs = super::besov_norm_components(
        grad.components(),
        &BesovSpec::homogeneous(s - 1.0, 2.0, r),
        part,
    )?;
    let rhs = super::besov_norm(f, &BesovSpec::homogeneous(s, 2.0, r), part)?;
    Ok(lhs / rhs)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatReport {
    pub data_norm: f64,
    /// `‖u‖_{L̃^∞_T(B^s)}`
    pub sup_norm: f64,
    /// `‖u‖_{L̃^1_T(B^{s+2})}`
    pub integrated_norm: f64,
    pub c_sup: f64,
    pub c_integrated: f64,
}

/// Solves `∂_t u = μΔu` exactly per mode and measures the smoothing
/// estimate `‖u‖_{L̃^ρ_T(B^{s+2/ρ})} ≤ C ‖u_0‖_{B^s}` for `ρ ∈ {1, ∞}`.
pub fn heat_semigroup_check(
    u0: &Field,
    mu: f64,
    t_end: f64,
    spec: &BesovSpec,
    part: &DyadicPartition,
) -> Result<HeatReport> {
    if !(mu > 0.0 && t_end > 0.0) {
        return Err(Error::InvalidArgument("heat check needs mu, T > 0".into()));
    }
    if u0.grid() != part.grid() {
        return Err(Error::GridMismatch);
    }
    spec.validate()?;
    let g = *u0.grid();
    let s0 = u0.forward();
    let kmax = g.max_wavenumber();
    let t_first = (1e-3 / (mu * kmax * kmax)).min(t_end * 1e-3);
    let times = graded_times(t_end, t_first, 1500);
    let tables: Vec<_> = times
        .iter()
        .map(|&t| {
            let st = s0.apply_real(|j| {
                let xi = g.wavevector(j);
                (-mu * (xi[0] * xi[0] + xi[1] * xi[1]) * t).exp()
            });
            block_table_spectral(std::slice::from_ref(&st), spec.p, spec.homogeneous, part)
        })
        .collect();
    let data_norm = tables[0].besov(spec.s, spec.r);
    let sup_norm = chemin_lerner_from_tables(
        &times,
        &tables,
        &ChemLernerSpec {
            besov: *spec,
            rho: f64::INFINITY,
        },
    )?;
    let integrated_norm = chemin_lerner_from_tables(
        &times,
        &tables,
        &ChemLernerSpec {
            besov: spec.with_s(spec.s + 2.0),
            rho: 1.0,
        },
    )?;
    let ratio = |x: f64| if data_norm > 0.0 { x / data_norm } else { 0.0 };
    Ok(HeatReport {
        data_norm,
        sup_norm,
        integrated_norm,
        c_sup: ratio(sup_norm),
        c_integrated: ratio(integrated_norm),
    })
}
