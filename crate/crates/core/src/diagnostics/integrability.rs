//! Weighted `L^p` energy of the effective velocity, the resulting
//! integrability gain, and the density regularity transfer.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::littlewood_paley::{
    block_table, chemin_lerner_from_tables, BesovSpec, ChemLernerSpec, DyadicPartition,
};
use crate::solver::{PhysParams, StateV};
use crate::spectral::{gradient, jacobian, Field, VectorField};

/// `Σ_{i,j,k} v_j v_k ∂_i v_j ∂_i v_k` and `Σ_i (Σ_j v_j ∂_i v_j)²`.
fn identity_sides(v: &VectorField) -> (Field, Field) {
    let jac = jacobian(v);
    let dim = jac.len();
    let g = *v.grid();
    let mut lhs = Field::zeros(g);
    let mut rhs = Field::zeros(g);
    for i in 0..dim {
        let mut inner = Field::zeros(g);
        for j in 0..dim {
            inner = inner.add(&v.component(j).mul(&jac[j][i]));
            for k in 0..dim {
                let t = v.component(j).mul(v.component(k)).mul(&jac[j][i]).mul(&jac[k][i]);
                lhs = lhs.add(&t);
            }
        }
        rhs = rhs.add(&inner.mul(&inner));
    }
    (lhs, rhs)
}

/// Largest pointwise gap between the two sides of
/// `Σ v_j v_k ∂_i v_j ∂_i v_k = Σ_i (Σ_j v_j ∂_i v_j)²`, relative to their size.
pub fn pointwise_identity_residual(v: &VectorField) -> f64 {
    let (lhs, rhs) = identity_sides(v);
    let scale = lhs.norm_linf().max(rhs.norm_linf());
    if scale == 0.0 {
        0.0
    } else {
        lhs.sub(&rhs).norm_linf() / scale
    }
}

/// Terms of `(1/p) d/dt∫ρ|v|^p + μ̄∫ρ|v|^{p−2}|∇v|²
/// + μ̄(p−2)∫ρ|v|^{p−4}Σ_i(Σ_j v_j∂_iv_j)² + ∫|v|^{p−2}v·∇P = 0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeightedTerms {
    pub t: f64,
    /// `(1/p)∫ρ|v|^p`
    pub weighted: f64,
    pub gradient: f64,
    pub cross: f64,
    pub pressure: f64,
}

pub fn weighted_terms(state: &StateV, p: f64, params: &PhysParams) -> Result<WeightedTerms> {
    if !(p >= 2.0) {
        return Err(Error::InvalidArgument(format!("p must be >= 2, got {p}")));
    }
    let v = &state.v;
    let rho = &state.rho;
    let speed2 = v.dot(v);
    let pow = |e: f64| speed2.map(|s| if s > 0.0 { s.powf(e / 2.0) } else if e == 0.0 { 1.0 } else { 0.0 });
    let jac = jacobian(v);
    let mut grad2 = Field::zeros(*v.grid());
    for row in &jac {
        for d in row {
            grad2 = grad2.add(&d.mul(d));
        }
    }
    let (_, cross_density) = identity_sides(v);
    let press = gradient(&rho.map(|r| params.pressure.pressure(r)));
    let vp = v.dot(&press);
    Ok(WeightedTerms {
        t: state.t,
        weighted: rho.inner(&pow(p)) / p,
        gradient: params.mu_bar * rho.mul(&pow(p - 2.0)).inner(&grad2),
        cross: if p == 2.0 {
            0.0
        } else {
            params.mu_bar * (p - 2.0) * rho.mul(&pow(p - 4.0)).inner(&cross_density)
        },
        pressure: pow(p - 2.0).inner(&vp),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeightedBalance {
    pub t: f64,
    /// `(1/p) d/dt ∫ρ|v|^p` by finite differences.
    pub lhs_rate: f64,
    pub gradient: f64,
    pub cross: f64,
    pub pressure: f64,
    pub residual: f64,
    /// Largest of the four terms in absolute value.
    pub scale: f64,
}

/// Balance of the weighted `L^p` energy at every snapshot of a trajectory
/// with constant spacing; centered differences inside, one-sided at the ends.
pub fn weighted_lp_energy(trajectory: &[StateV], p: f64, params: &PhysParams) -> Result<Vec<WeightedBalance>> {
    if trajectory.len() < 3 {
        return Err(Error::InvalidArgument("need at least three snapshots".into()));
    }
    let terms = trajectory
        .iter()
        .map(|s| weighted_terms(s, p, params))
        .collect::<Result<Vec<_>>>()?;
    let n = terms.len();
    let rate = |k: usize| {
        let (a, b) = match k {
            0 => (0, 1),
            k if k == n - 1 => (n - 2, n - 1),
            k => (k - 1, k + 1),
        };
        (terms[b].weighted - terms[a].weighted) / (terms[b].t - terms[a].t)
    };
    Ok((0..n)
        .map(|k| {
            let w = &terms[k];
            let lhs_rate = rate(k);
            let residual = lhs_rate + w.gradient + w.cross + w.pressure;
            let scale = [lhs_rate, w.gradient, w.cross, w.pressure]
                .iter()
                .fold(0.0f64, |m, x| m.max(x.abs()));
            WeightedBalance {
                t: w.t,
                lhs_rate,
                gradient: w.gradient,
                cross: w.cross,
                pressure: w.pressure,
                residual,
                scale,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GainRow {
    pub p: f64,
    /// `sup_t ‖ρ^{1/p} v‖_{L^p}`
    pub sup_norm: f64,
}

pub fn integrability_gain(trajectory: &[StateV], p_list: &[f64]) -> Result<Vec<GainRow>> {
    if p_list.iter().any(|&p| !(p >= 1.0 && p.is_finite())) {
        return Err(Error::InvalidArgument("p must lie in [1, ∞)".into()));
    }
    Ok(p_list
        .iter()
        .map(|&p| {
            let sup_norm = trajectory
                .iter()
                .map(|s| {
                    let speed = s.v.magnitude();
                    s.rho.map(|r| r.powf(1.0 / p)).mul(&speed).norm_lp(p)
                })
                .fold(0.0, f64::max);
            GainRow { p, sup_norm }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InterpolationRow {
    pub linf: f64,
    /// `‖f‖_{Ḃ¹_{p,∞}}`
    pub besov: f64,
    pub l2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpolationFit {
    pub rows: Vec<InterpolationRow>,
    pub alpha: f64,
    /// Smallest `C` with `‖f‖_∞ ≤ C‖f‖^{1−α}_{Ḃ¹_{p,∞}}‖f‖^α_{L²}` on every row.
    pub constant: f64,
    /// Largest over smallest ratio; 1 for an exact power law.
    pub spread: f64,
}

impl InterpolationFit {
    pub fn holds(&self) -> bool {
        self.alpha > 0.0 && self.alpha < 1.0 && self.constant.is_finite()
    }
}

/// Least-squares fit of `α` in `‖f‖_∞ ≲ ‖f‖^{1−α}_{Ḃ¹_{p,∞}}‖f‖^α_{L²}` over a
/// family of fields.
pub fn interpolation_fit(family: &[Field], p: f64, part: &DyadicPartition) -> Result<InterpolationFit> {
    let spec = BesovSpec::homogeneous(1.0, p, f64::INFINITY);
    let rows = family
        .iter()
        .map(|f| {
            Ok(InterpolationRow {
                linf: f.norm_linf(),
                besov: crate::littlewood_paley::besov_norm(f, &spec, part)?,
                l2: f.norm_l2(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let usable: Vec<&InterpolationRow> = rows.iter().filter(|r| r.linf > 0.0 && r.besov > 0.0 && r.l2 > 0.0).collect();
    if usable.len() < 2 {
        return Err(Error::InvalidArgument("interpolation fit needs two nonzero fields".into()));
    }
    // ln(‖f‖_∞/‖f‖_2) = (1 − α) ln(‖f‖_B/‖f‖_2) + ln C
    let xs: Vec<f64> = usable.iter().map(|r| (r.besov / r.l2).ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|r| (r.linf / r.l2).ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("interpolation family does not vary".into()));
    }
    let alpha = 1.0 - sxy / sxx;
    let ratios: Vec<f64> = usable
        .iter()
        .map(|r| r.linf / (r.besov.powf(1.0 - alpha) * r.l2.powf(alpha)))
        .collect();
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    let floor = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(InterpolationFit {
        rows,
        alpha,
        constant,
        spread: constant / floor,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    /// `‖ρ − ρ̄‖_{L̃^∞_T(Ḃ¹_{p,∞})}`
    pub density_norm: f64,
    /// `‖ρ₀ − ρ̄‖_{Ḃ¹_{p,∞}}`
    pub data_norm: f64,
    /// `‖ρv‖_{L̃^∞_T(Ḃ⁰_{p,∞})}`
    pub momentum_norm: f64,
    /// `density_norm / (data_norm + momentum_norm)`
    pub constant: f64,
    /// `sup_t ‖ρ − ρ̄‖_{L^∞}` and `sup_t ‖ρ − ρ̄‖_{L²}`
    pub density_linf: f64,
    pub density_l2: f64,
    /// Interpolation fitted on the snapshots, absent when they do not vary.
    pub interpolation: Option<InterpolationFit>,
}

/// Heat-type bound of the density perturbation by its data and the momentum,
/// and the `L^∞` interpolation along the trajectory.
pub fn regularity_transfer_check(
    trajectory: &[StateV],
    p: f64,
    params: &PhysParams,
    part: &DyadicPartition,
) -> Result<TransferReport> {
    if trajectory.len() < 2 {
        return Err(Error::InvalidArgument("need at least two snapshots".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
    }
    let times: Vec<f64> = trajectory.iter().map(|s| s.t).collect();
    let pert: Vec<Field> = trajectory.iter().map(|s| s.rho.map(|r| r - params.rho_ref)).collect();
    let qt = pert
        .iter()
        .map(|f| block_table(std::slice::from_ref(f), p, true, part))
        .collect::<Result<Vec<_>>>()?;
    let mt = trajectory
        .iter()
        .map(|s| block_table(s.momentum().components(), p, true, part))
        .collect::<Result<Vec<_>>>()?;
    let sup = |s: f64| ChemLernerSpec {
        besov: BesovSpec::homogeneous(s, p, f64::INFINITY),
        rho: f64::INFINITY,
    };
    let density_norm = chemin_lerner_from_tables(&times, &qt, &sup(1.0))?;
    let momentum_norm = chemin_lerner_from_tables(&times, &mt, &sup(0.0))?;
    let data_norm = qt[0].besov(1.0, f64::INFINITY);
    let denom = data_norm + momentum_norm;
    let interpolation = interpolation_fit(&pert, p, part).ok();
    Ok(TransferReport {
        density_norm,
        data_norm,
        momentum_norm,
        constant: if denom > 0.0 { density_norm / denom } else { 0.0 },
        density_linf: pert.iter().map(Field::norm_linf).fold(0.0, f64::max),
        density_l2: pert.iter().map(Field::norm_l2).fold(0.0, f64::max),
        interpolation,
    })
}
