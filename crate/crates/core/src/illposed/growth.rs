use serde::{Deserialize, Serialize};

use super::family::FamilyMember;
use crate::error::{Error, Result};
use crate::linear::{LinearCoeffs, Propagator};
use crate::littlewood_paley::graded_times;
use crate::solver::{run_15_observed, PhysParams, RunOptions, State, Termination};
use crate::spectral::{divergence, gradient, Field, Spectrum};

/// Horizon `t_n` attached to member `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum HorizonRule {
    /// `t_n = c·2^{−n}`
    Geometric { c: f64 },
    /// `t_n = c/n`
    Harmonic { c: f64 },
}

impl Default for HorizonRule {
    fn default() -> Self {
        HorizonRule::Harmonic { c: 1.0 / 16.0 }
    }
}

impl HorizonRule {
    pub fn horizon(&self, n: i32) -> f64 {
        match *self {
            HorizonRule::Geometric { c } => c * 2f64.powi(-n),
            HorizonRule::Harmonic { c } => c / n as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = match *self {
            HorizonRule::Geometric { c } | HorizonRule::Harmonic { c } => c,
        };
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon constant must be positive, got {c}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LinearGrowthRow {
    pub n: i32,
    pub t_n: f64,
    /// `‖div u_L‖_{L¹_{t_n}(L^∞)}`
    pub div_l1_linf: f64,
}

/// Samples per horizon; graded toward `t = 0` where the top shell decays.
const GROWTH_SAMPLES: usize = 600;

/// `∫₀^{t_n} ‖div u_L(t)‖_{L^∞} dt` for the free linear flow, trapezoid rule.
pub fn measure_linear_growth(member: &FamilyMember, t_n: f64, coeffs: &LinearCoeffs) -> Result<LinearGrowthRow> {
    if !(t_n > 0.0 && t_n.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {t_n}")));
    }
    let grid = *member.q0.grid();
    let prop = Propagator::new(grid, coeffs)?;
    let q = member.q0.forward();
    let u: Vec<Spectrum> = member.u0.components().iter().map(Field::forward).collect();
    let kmax = grid.max_wavenumber();
    let t_first = (1e-3 / (coeffs.a * kmax * kmax)).min(1e-3 * t_n);
    let times = graded_times(t_n, t_first, GROWTH_SAMPLES);
    let sup: Vec<f64> = times
        .iter()
        .map(|&t| {
            let (_, ut) = prop.evolve(t, &q, &u);
            let div = ut
                .iter()
                .enumerate()
                .fold(Spectrum::zeros(grid), |acc, (a, s)| acc.add(&s.derivative(a)));
            div.inverse().norm_linf()
        })
        .collect();
    let div_l1_linf = times
        .windows(2)
        .zip(sup.windows(2))
        .map(|(t, s)| 0.5 * (t[1] - t[0]) * (s[0] + s[1]))
        .sum();
    Ok(LinearGrowthRow {
        n: member.n,
        t_n,
        div_l1_linf,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DensityGrowthRow {
    pub n: i32,
    pub t_n: f64,
    pub dt: f64,
    /// `sup_{t≤t_n} ‖qⁿ(t)‖_{L^∞}`
    pub q_linf_max: f64,
    /// `sup_{t≤t_n} ‖∫₀ᵗ div uⁿ‖_{L^∞}`
    pub div_integral_max: f64,
    /// `sup_{t≤t_n} ‖∫₀ᵗ uⁿ·∇qⁿ‖_{L^∞}`
    pub transport_integral_max: f64,
    pub termination: Termination,
}

/// Smallest number of steps per horizon.
const MIN_STEPS: f64 = 200.0;

/// Runs the nonlinear log-density system on one member up to `t_n` and
/// splits `q(t) − q₀ = −∫div u − ∫u·∇q` pointwise.
pub fn measure_density_growth(member: &FamilyMember, t_n: f64, params: &PhysParams) -> Result<DensityGrowthRow> {
    let state = State::new(member.q0.clone(), member.u0.clone(), 0.0)?;
    let dt = crate::solver::calibrate_dt(&state, params, t_n, crate::solver::DEFAULT_CFL).min(t_n / MIN_STEPS);
    let opts = RunOptions::new(t_n).with_dt(dt).with_record_every(usize::MAX);
    let grid = *member.q0.grid();
    let mut prev: Option<(f64, Field, Field)> = None;
    let mut div_int = Field::zeros(grid);
    let mut tr_int = Field::zeros(grid);
    let (mut q_max, mut div_max, mut tr_max) = (0.0f64, 0.0f64, 0.0f64);
    let run = run_15_observed(&state, params, &opts, |s| {
        let div = divergence(&s.u);
        let tr = s.u.dot(&gradient(&s.q));
        if let Some((t0, d0, r0)) = &prev {
            let h = 0.5 * (s.t - t0);
            div_int = div_int.add(&d0.add(&div).scale(h));
            tr_int = tr_int.add(&r0.add(&tr).scale(h));
        }
        q_max = q_max.max(s.q.norm_linf());
        div_max = div_max.max(div_int.norm_linf());
        tr_max = tr_max.max(tr_int.norm_linf());
        prev = Some((s.t, div, tr));
    })?;
    Ok(DensityGrowthRow {
        n: member.n,
        t_n,
        dt: run.dt,
        q_linf_max: q_max,
        div_integral_max: div_max,
        transport_integral_max: tr_max,
        termination: run.termination,
    })
}
