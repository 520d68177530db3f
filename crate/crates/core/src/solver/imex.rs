//! Integrating-factor Runge-Kutta stepping: the stiff linear part is
//! propagated exactly, the dealiased residual explicitly (Heun).

use serde::Serialize;

use super::params::PhysParams;
use super::system::{
    effective_velocity_unchecked, modal_15, modal_17, EffectiveSystem, LogDensitySystem,
    SplitSystem, State, StateV,
};
use crate::error::{Error, Result};
use crate::linear::{ModalState, Propagator, StepOperator};
use crate::spectral::gradient;

pub const DEFAULT_CFL: f64 = 0.4;

#[derive(Clone, Debug, Serialize)]
pub struct RunOptions {
    pub t_end: f64,
    pub cfl: f64,
    /// Overrides the CFL step when set.
    pub dt: Option<f64>,
    /// Keep every n-th state; the initial and final states are always kept.
    pub record_every: usize,
}

impl RunOptions {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            cfl: DEFAULT_CFL,
            dt: None,
            record_every: 1,
        }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt: Some(dt), ..self }
    }

    pub fn with_record_every(self, record_every: usize) -> Self {
        Self { record_every, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::InvalidArgument("cfl must be positive".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
            }
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    Vacuum { t: f64, rho_min: f64 },
    NonFinite { t: f64 },
}

#[derive(Clone, Debug)]
pub struct Run<S> {
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<S>,
    pub termination: Termination,
}

impl<S> Run<S> {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    /// Last state reached before termination.
    pub fn last_valid(&self) -> &S {
        self.snapshots.last().expect("a run keeps its initial state")
    }
}

/// `C·min(Δx/max|u|, Δx/((μ̄+|λ̄|+c̄)·max|∇q|))`, capped at `T/16`.
pub fn calibrate_dt(state: &State, params: &PhysParams, t_end: f64, cfl: f64) -> f64 {
    let dx = state.grid().dx();
    let umax = state.u.norm_linf();
    let gmax = gradient(&state.q).norm_linf();
    let s = params.scales();
    let coupling = params.mu_bar + params.lambda_bar.abs() + s.cap;
    let mut dt = t_end / 16.0;
    if umax > 0.0 {
        dt = dt.min(cfl * dx / umax);
    }
    if gmax > 0.0 {
        dt = dt.min(cfl * dx / (coupling * gmax));
    }
    dt
}

fn heun(sys: &impl SplitSystem, op: &StepOperator<'_>, w: &ModalState) -> Result<ModalState> {
    let h = op.h();
    let a = sys.residual(w)?;
    let pred = w.axpy(h, &a).propagate(op);
    let b = sys.residual(&pred)?;
    Ok(w.axpy(0.5 * h, &a).propagate(op).axpy(0.5 * h, &b))
}

/// One step of size `dt` for the log-density system.
pub fn step_imex(state: &State, params: &PhysParams, dt: f64) -> Result<State> {
    params.validate(state.grid().dim())?;
    let sys = LogDensitySystem {
        grid: *state.grid(),
        params: *params,
    };
    let prop = Propagator::from_symbol(sys.grid(), sys.symbol());
    let w = heun(&sys, &prop.step_operator(dt), &modal_15(state))?;
    let (q, u) = w.to_fields();
    State::new(q, u, state.t + dt)
}

fn classify(err: Error, t: f64) -> std::result::Result<Termination, Error> {
    match err {
        Error::Vacuum { rho_min, .. } => Ok(Termination::Vacuum { t, rho_min }),
        Error::NonFinite(_) | Error::NonFiniteState { .. } => Ok(Termination::NonFinite { t }),
        e => Err(e),
    }
}

fn drive<S>(
    sys: &impl SplitSystem,
    w0: ModalState,
    t0: f64,
    dt: f64,
    opts: &RunOptions,
    mut wrap: impl FnMut(&ModalState, f64) -> Result<S>,
    mut observe: impl FnMut(&S),
) -> Result<Run<S>> {
    let steps = (opts.t_end / dt).ceil().max(1.0) as usize;
    let h = opts.t_end / steps as f64;
    let prop = Propagator::from_symbol(sys.grid(), sys.symbol());
    let op = prop.step_operator(h);
    let first = wrap(&w0, t0)?;
    observe(&first);
    let mut snapshots = vec![first];
    let mut w = w0;
    for n in 1..=steps {
        let t = t0 + n as f64 * h;
        let next = heun(sys, &op, &w).and_then(|w1| wrap(&w1, t).map(|s| (w1, s)));
        match next {
            Ok((w1, s)) => {
                w = w1;
                observe(&s);
                if n % opts.record_every == 0 || n == steps {
                    snapshots.push(s);
                }
            }
            Err(e) => {
                let termination = classify(e, t)?;
                if (n - 1) % opts.record_every != 0 {
                    snapshots.push(wrap(&w, t - h)?);
                }
                return Ok(Run {
                    dt: h,
                    steps: n - 1,
                    snapshots,
                    termination,
                });
            }
        }
    }
    Ok(Run {
        dt: h,
        steps,
        snapshots,
        termination: Termination::Completed,
    })
}

/// Runs the log-density system to `t_end` with a fixed number of steps.
pub fn run_15(state: &State, params: &PhysParams, opts: &RunOptions) -> Result<Run<State>> {
    run_15_observed(state, params, opts, |_| {})
}

/// As [`run_15`], calling `observe` on every accepted state.
pub fn run_15_observed(
    state: &State,
    params: &PhysParams,
    opts: &RunOptions,
    observe: impl FnMut(&State),
) -> Result<Run<State>> {
    opts.validate()?;
    params.validate(state.grid().dim())?;
    let dt = opts
        .dt
        .unwrap_or_else(|| calibrate_dt(state, params, opts.t_end, opts.cfl));
    let sys = LogDensitySystem {
        grid: *state.grid(),
        params: *params,
    };
    drive(&sys, modal_15(state), state.t, dt, opts, |w, t| {
        let (q, u) = w.to_fields();
        State::new(q, u, t)
    }, observe)
}

/// Runs the effective-velocity system to `t_end`.
pub fn run_17(state: &StateV, params: &PhysParams, opts: &RunOptions) -> Result<Run<StateV>> {
    opts.validate()?;
    params.validate_effective(state.grid().dim())?;
    let dt = match opts.dt {
        Some(dt) => dt,
        None => {
            let s15 = super::system::inverse_effective_velocity(state, params)?;
            calibrate_dt(&s15, params, opts.t_end, opts.cfl)
        }
    };
    let sys = EffectiveSystem {
        grid: *state.grid(),
        params: *params,
    };
    let rho_ref = params.rho_ref;
    drive(&sys, modal_17(state, rho_ref), state.t, dt, opts, |w, t| {
        effective_velocity_unchecked(w, rho_ref, t)
    }, |_| {})
}
