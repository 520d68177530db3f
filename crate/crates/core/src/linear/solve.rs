use serde::Serialize;

use super::propagator::{expm2, LinearCoeffs, Propagator, StepOperator};
use crate::error::{Error, Result};
use crate::littlewood_paley::{
    block_table_spectral, chemin_lerner_from_tables, lr_sum, BesovSpec, ChemLernerSpec,
    DyadicPartition,
};
use crate::spectral::{Field, Grid, Spectrum, VectorField};

/// Source term of a linear problem: absent, or sampled on a time grid that
/// starts at 0 and covers the integration window. Between samples it is
/// interpolated linearly.
#[derive(Clone, Debug)]
pub enum Forcing<T> {
    Zero,
    Sampled(Vec<(f64, T)>),
}

impl<T> Forcing<T> {
    fn times(&self) -> Option<Vec<f64>> {
        match self {
            Forcing::Zero => None,
            Forcing::Sampled(s) => Some(s.iter().map(|(t, _)| *t).collect()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearTrajectory {
    pub times: Vec<f64>,
    pub q: Vec<Field>,
    pub u: Vec<VectorField>,
    /// Forcings evaluated at `times` (zero fields when absent).
    pub f: Vec<Field>,
    pub g: Vec<VectorField>,
}

impl LinearTrajectory {
    pub fn grid(&self) -> &Grid {
        self.q[0].grid()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn is_forced(&self) -> bool {
        self.f.iter().any(|f| f.norm_linf() > 0.0) || self.g.iter().any(|g| g.norm_linf() > 0.0)
    }
}

/// `(q̂, û)` with the linear-combination helpers Duhamel sums need.
#[derive(Clone, Debug)]
pub(crate) struct ModalState {
    pub q: Spectrum,
    pub u: Vec<Spectrum>,
}

impl ModalState {
    pub fn from_fields(q: &Field, u: &VectorField) -> Self {
        Self {
            q: q.forward(),
            u: u.components().iter().map(Field::forward).collect(),
        }
    }

    pub fn to_fields(&self) -> (Field, VectorField) {
        (
            self.q.inverse(),
            VectorField::from_components(self.u.iter().map(Spectrum::inverse).collect()),
        )
    }

    /// `self + c·other`
    pub fn axpy(&self, c: f64, other: &Self) -> Self {
        Self {
            q: self.q.add(&other.q.scale(c)),
            u: self
                .u
                .iter()
                .zip(&other.u)
                .map(|(a, b)| a.add(&b.scale(c)))
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            q: self.q.scale(c),
            u: self.u.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn propagate(&self, op: &StepOperator<'_>) -> Self {
        let (q, u) = op.apply(&self.q, &self.u);
        Self { q, u }
    }

    pub fn evolve(&self, prop: &Propagator, t: f64) -> Self {
        let (q, u) = prop.evolve(t, &self.q, &self.u);
        Self { q, u }
    }
}

fn check_forcing_times(times: &[f64], t_end: f64) -> Result<()> {
    let tol = 1e-12 * t_end.max(1.0);
    if times.len() < 2 || times[0].abs() > tol || *times.last().unwrap() < t_end - tol {
        return Err(Error::InvalidArgument(
            "forcing samples must start at 0 and reach T".into(),
        ));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("forcing times must increase strictly".into()));
    }
    Ok(())
}

pub(crate) fn check_sample_times(sample_times: &[f64], t_end: f64) -> Result<()> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be positive, got {t_end}")));
    }
    if sample_times.is_empty() {
        return Err(Error::InvalidArgument("no sample times".into()));
    }
    let tol = 1e-12 * t_end;
    for &t in sample_times {
        if !(-tol..=t_end + tol).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "sample time {t} outside [0, {t_end}]"
            )));
        }
    }
    if sample_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("sample times must be sorted".into()));
    }
    Ok(())
}

/// Exact homogeneous flow plus trapezoid Duhamel on the forcing samples:
/// `w_{k+1} = E(h)w_k + h/2 (E(h)f_k + f_{k+1})`.
pub(crate) fn duhamel(
    prop: &Propagator,
    w0: &ModalState,
    forcing: Option<(&[f64], &[ModalState])>,
    sample_times: &[f64],
) -> Vec<ModalState> {
    let Some((ft, fv)) = forcing else {
        return sample_times.iter().map(|&t| w0.evolve(prop, t)).collect();
    };
    let mut out = Vec::with_capacity(sample_times.len());
    let mut k = 0;
    let mut w = w0.clone();
    for &s in sample_times {
        while k + 1 < ft.len() && ft[k + 1] <= s {
            let h = ft[k + 1] - ft[k];
            let pushed = w.axpy(0.5 * h, &fv[k]).evolve(prop, h);
            w = pushed.axpy(0.5 * h, &fv[k + 1]);
            k += 1;
        }
        let delta = s - ft[k];
        if delta <= 0.0 || k + 1 >= ft.len() {
            out.push(w.clone());
            continue;
        }
        let theta = delta / (ft[k + 1] - ft[k]);
        let f_s = fv[k].scale(1.0 - theta).axpy(theta, &fv[k + 1]);
        let pushed = w.axpy(0.5 * delta, &fv[k]).evolve(prop, delta);
        out.push(pushed.axpy(0.5 * delta, &f_s));
    }
    out
}

fn interpolate<T: Clone>(
    samples: &[(f64, T)],
    t: f64,
    lerp: impl Fn(&T, &T, f64) -> T,
) -> T {
    let i = samples.partition_point(|(s, _)| *s <= t);
    if i == 0 {
        return samples[0].1.clone();
    }
    if i >= samples.len() {
        return samples[samples.len() - 1].1.clone();
    }
    let (t0, a) = &samples[i - 1];
    let (t1, b) = &samples[i];
    lerp(a, b, (t - t0) / (t1 - t0))
}

/// Solves the constant-coefficient linear system from `(q0, u0)` with
/// sources `(F, G)` and returns the state at each of `sample_times`.
pub fn solve_linear(
    q0: &Field,
    u0: &VectorField,
    f: &Forcing<Field>,
    g: &Forcing<VectorField>,
    coeffs: &LinearCoeffs,
    t_end: f64,
    sample_times: &[f64],
) -> Result<LinearTrajectory> {
    if q0.grid() != u0.grid() {
        return Err(Error::GridMismatch);
    }
    check_sample_times(sample_times, t_end)?;
    let grid = *q0.grid();
    let prop = Propagator::new(grid, coeffs)?;
    let forcing_times = match (f.times(), g.times()) {
        (None, None) => None,
        (Some(a), None) | (None, Some(a)) => Some(a),
        (Some(a), Some(b)) => {
            if a != b {
                return Err(Error::InvalidArgument(
                    "F and G must share their sample times".into(),
                ));
            }
            Some(a)
        }
    };
    let zero_f = Field::zeros(grid);
    let zero_g = VectorField::zeros(grid);
    let f_at = |i: usize| match f {
        Forcing::Zero => zero_f.clone(),
        Forcing::Sampled(s) => s[i].1.clone(),
    };
    let g_at = |i: usize| match g {
        Forcing::Zero => zero_g.clone(),
        Forcing::Sampled(s) => s[i].1.clone(),
    };
    let w0 = ModalState::from_fields(q0, u0);
    let states = match &forcing_times {
        None => duhamel(&prop, &w0, None, sample_times),
        Some(times) => {
            check_forcing_times(times, t_end)?;
            let mut samples = Vec::with_capacity(times.len());
            for i in 0..times.len() {
                let (fi, gi) = (f_at(i), g_at(i));
                if fi.grid() != &grid || gi.grid() != &grid {
                    return Err(Error::GridMismatch);
                }
                samples.push(ModalState::from_fields(&fi, &gi));
            }
            duhamel(&prop, &w0, Some((times, &samples)), sample_times)
        }
    };
    let (q, u): (Vec<Field>, Vec<VectorField>) = states.iter().map(ModalState::to_fields).unzip();
    let (fs, gs) = match &forcing_times {
        None => (
            vec![zero_f.clone(); sample_times.len()],
            vec![zero_g.clone(); sample_times.len()],
        ),
        Some(_) => sample_times
            .iter()
            .map(|&t| {
                let fv = match f {
                    Forcing::Zero => zero_f.clone(),
                    Forcing::Sampled(s) => interpolate(s, t, |a, b, th| a.scale(1.0 - th).axpy(th, b)),
                };
                let gv = match g {
                    Forcing::Zero => zero_g.clone(),
                    Forcing::Sampled(s) => interpolate(s, t, |a, b, th| a.scale(1.0 - th).axpy(th, b)),
                };
                (fv, gv)
            })
            .unzip(),
    };
    Ok(LinearTrajectory {
        times: sample_times.to_vec(),
        q,
        u,
        f: fs,
        g: gs,
    })
}

fn starts_at_zero(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::InvalidArgument("trajectory must be sampled at t = 0".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct AggregateEstimate {
    /// `‖(∇q,u)‖_{L̃¹(B^{N/2+1+s})} + ‖(∇q,u)‖_{L̃^∞(B^{N/2−1+s})}`
    pub lhs: f64,
    /// `‖(∇q0,u0)‖_{B^{N/2−1+s}} + ‖(∇F,G)‖_{L̃¹(B^{N/2−1+s})}`
    pub rhs: f64,
    pub ratio: f64,
}

fn gradient_and_vector(q: &Field, u: &VectorField) -> Vec<Spectrum> {
    let qs = q.forward();
    let mut out: Vec<Spectrum> = (0..q.grid().dim()).map(|a| qs.derivative(a)).collect();
    out.extend(u.components().iter().map(Field::forward));
    out
}

/// Aggregate smoothing estimate for a linear trajectory in homogeneous
/// `B_{2,r}` norms at regularity offset `s`.
pub fn aggregate_estimate(
    traj: &LinearTrajectory,
    s: f64,
    r: f64,
    part: &DyadicPartition,
) -> Result<AggregateEstimate> {
    if traj.grid() != part.grid() {
        return Err(Error::GridMismatch);
    }
    starts_at_zero(&traj.times)?;
    let half = traj.grid().dim() as f64 / 2.0;
    let tables: Vec<_> = (0..traj.len())
        .map(|i| block_table_spectral(&gradient_and_vector(&traj.q[i], &traj.u[i]), 2.0, true, part))
        .collect();
    let forcing: Vec<_> = (0..traj.len())
        .map(|i| block_table_spectral(&gradient_and_vector(&traj.f[i], &traj.g[i]), 2.0, true, part))
        .collect();
    let spec = |reg: f64, rho: f64| ChemLernerSpec {
        besov: BesovSpec::homogeneous(reg, 2.0, r),
        rho,
    };
    let lhs = chemin_lerner_from_tables(&traj.times, &tables, &spec(half + 1.0 + s, 1.0))?
        + chemin_lerner_from_tables(&traj.times, &tables, &spec(half - 1.0 + s, f64::INFINITY))?;
    let data = lr_sum(tables[0].weighted(half - 1.0 + s), r);
    let rhs = data + chemin_lerner_from_tables(&traj.times, &forcing, &spec(half - 1.0 + s, 1.0))?;
    Ok(AggregateEstimate {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
    })
}

/// Trajectory of the scalar pair `(c, v) = (Δ ln ρ, div u)`.
#[derive(Clone, Debug)]
pub struct DivergenceTrajectory {
    pub times: Vec<f64>,
    pub c: Vec<Field>,
    pub v: Vec<Field>,
    pub kappa: f64,
}

/// Generator of `∂_t c = −Δv`, `∂_t v = νΔv + κΔc` at `|ξ|² = k2`, with
/// `ν = 2μ + λ`, acting on `(ĉ, v̂)`.
pub fn divergence_block(k2: f64, nu: f64, kappa: f64) -> [[f64; 2]; 2] {
    [[0.0, k2], [-kappa * k2, -nu * k2]]
}

/// Exact per-mode solution of the divergence subsystem.
pub fn divergence_subsystem(
    c0: &Field,
    v0: &Field,
    mu: f64,
    lambda: f64,
    kappa: f64,
    t_end: f64,
    sample_times: &[f64],
) -> Result<DivergenceTrajectory> {
    if c0.grid() != v0.grid() {
        return Err(Error::GridMismatch);
    }
    let nu = 2.0 * mu + lambda;
    if !(mu > 0.0 && nu > 0.0 && kappa > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "divergence subsystem needs μ > 0, 2μ + λ > 0, κ > 0; got {mu}, {lambda}, {kappa}"
        )));
    }
    check_sample_times(sample_times, t_end)?;
    let grid = *c0.grid();
    let (cs, vs) = (c0.forward(), v0.forward());
    let k2: Vec<f64> = (0..grid.nodes())
        .map(|j| {
            let xi = grid.wavevector(j);
            xi[0] * xi[0] + xi[1] * xi[1]
        })
        .collect();
    let mut c = Vec::with_capacity(sample_times.len());
    let mut v = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let mut ct = cs.clone();
        let mut vt = vs.clone();
        {
            let (cm, vm) = (ct.modes_mut(), vt.modes_mut());
            for j in 0..grid.nodes() {
                let e = expm2(divergence_block(k2[j], nu, kappa), t);
                let (a, b) = (cm[j], vm[j]);
                cm[j] = a * e[0][0] + b * e[0][1];
                vm[j] = a * e[1][0] + b * e[1][1];
            }
        }
        c.push(ct.inverse());
        v.push(vt.inverse());
    }
    Ok(DivergenceTrajectory {
        times: sample_times.to_vec(),
        c,
        v,
        kappa,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothingConstant {
    /// `‖v‖_{L̃^∞(B^s)} + ‖v‖_{L̃¹(B^{s+2})}`
    pub lhs: f64,
    /// `‖v_0‖_{B^s} + √κ ‖c_0‖_{B^s}`
    pub data: f64,
    pub constant: f64,
}

impl DivergenceTrajectory {
    /// Empirical constant of the smoothing estimate for `v` in homogeneous
    /// `B^s_{2,r}`. The data norm carries the initial `c` as well, since it
    /// feeds `v` through the coupling.
    pub fn smoothing_constant(&self, s: f64, r: f64, part: &DyadicPartition) -> Result<SmoothingConstant> {
        starts_at_zero(&self.times)?;
        let table = |f: &Field| block_table_spectral(std::slice::from_ref(&f.forward()), 2.0, true, part);
        let tables: Vec<_> = self.v.iter().map(table).collect();
        let spec = BesovSpec::homogeneous(s, 2.0, r);
        let lhs = chemin_lerner_from_tables(
            &self.times,
            &tables,
            &ChemLernerSpec {
                besov: spec,
                rho: f64::INFINITY,
            },
        )? + chemin_lerner_from_tables(
            &self.times,
            &tables,
            &ChemLernerSpec {
                besov: spec.with_s(s + 2.0),
                rho: 1.0,
            },
        )?;
        let data = tables[0].besov(s, r) + self.kappa.sqrt() * table(&self.c[0]).besov(s, r);
        Ok(SmoothingConstant {
            lhs,
            data,
            constant: if data > 0.0 { lhs / data } else { 0.0 },
        })
    }
}
