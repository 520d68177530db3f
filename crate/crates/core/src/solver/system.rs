//! Right-hand sides of the log-density system and of the effective-velocity
//! system, split into an exact linear symbol and a dealiased residual.

use super::capillary::check_floor;
use super::params::{PhysParams, VACUUM_FLOOR};
use crate::error::{Error, Result};
use crate::linear::{ModalState, Symbol};
use crate::littlewood_paley::DyadicPartition;
use crate::spectral::{gradient, Field, Grid, Spectrum, VectorField};

/// `(q = ln ρ, u, t)`
#[derive(Clone, Debug)]
pub struct State {
    pub q: Field,
    pub u: VectorField,
    pub t: f64,
}

/// `(ρ, v, t)` with `v = u + (κ/μ̄)∇ln ρ`.
#[derive(Clone, Debug)]
pub struct StateV {
    pub rho: Field,
    pub v: VectorField,
    pub t: f64,
}

impl State {
    pub fn new(q: Field, u: VectorField, t: f64) -> Result<Self> {
        if q.grid() != u.grid() {
            return Err(Error::GridMismatch);
        }
        if !q.is_finite() || !u.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        Ok(Self { q, u, t })
    }

    pub fn grid(&self) -> &Grid {
        self.q.grid()
    }

    pub fn rho(&self) -> Field {
        self.q.map(f64::exp)
    }
}

impl StateV {
    pub fn new(rho: Field, v: VectorField, t: f64) -> Result<Self> {
        if rho.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        if !rho.is_finite() || !v.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        check_floor(&rho)?;
        Ok(Self { rho, v, t })
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// Momentum `m = ρv`.
    pub fn momentum(&self) -> VectorField {
        self.v.mul_scalar(&self.rho)
    }
}

/// Splits `∂_t w = Lw + N(w)` for the integrating-factor stepper.
pub(crate) trait SplitSystem {
    fn grid(&self) -> Grid;
    fn symbol(&self) -> Symbol;
    fn residual(&self, w: &ModalState) -> Result<ModalState>;
}

fn dealiased(f: &Field) -> Spectrum {
    f.forward().dealias()
}

fn check_finite(m: &ModalState) -> Result<()> {
    let finite = |s: &Spectrum| s.modes().iter().all(|c| c.re.is_finite() && c.im.is_finite());
    if finite(&m.q) && m.u.iter().all(finite) {
        Ok(())
    } else {
        Err(Error::NonFinite("nonlinear residual"))
    }
}

/// Log-density system in the variables `(q, u)`.
pub(crate) struct LogDensitySystem {
    pub grid: Grid,
    pub params: PhysParams,
}

impl SplitSystem for LogDensitySystem {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn symbol(&self) -> Symbol {
        let c = self.params.linear_coeffs();
        Symbol {
            e: 0.0,
            a: c.a,
            b: c.b,
            c: c.c,
            d: c.d,
        }
    }

    fn residual(&self, w: &ModalState) -> Result<ModalState> {
        let dim = self.grid.dim();
        let p = &self.params;
        let scales = p.scales();
        let d = p.sound_speed_sq();
        let qs = w.q.dealias();
        let us: Vec<Spectrum> = w.u.iter().map(Spectrum::dealias).collect();
        let q = qs.inverse();
        if !(q.min() >= VACUUM_FLOOR.ln()) {
            return Err(Error::Vacuum {
                rho_min: q.min().exp(),
                floor: VACUUM_FLOOR,
            });
        }
        let gq: Vec<Field> = (0..dim).map(|a| qs.derivative(a).inverse()).collect();
        let u: Vec<Field> = us.iter().map(Spectrum::inverse).collect();
        // jac[i][j] = ∂_j u_i
        let jac: Vec<Vec<Field>> = us
            .iter()
            .map(|s| (0..dim).map(|j| s.derivative(j).inverse()).collect())
            .collect();
        let div = (0..dim).fold(Field::zeros(self.grid), |acc, i| acc.add(&jac[i][i]));

        let mut transport = Field::zeros(self.grid);
        for a in 0..dim {
            transport = transport.add(&u[a].mul(&gq[a]));
        }
        let nq = dealiased(&transport).scale(-1.0);

        let grad_sq = (0..dim).fold(Field::zeros(self.grid), |acc, a| acc.add(&gq[a].mul(&gq[a])));
        let grad_sq_hat = dealiased(&grad_sq);
        // F(q) − d q, the pressure beyond its linearization; zero for a linear law
        let excess_hat = match p.pressure {
            super::params::PressureLaw::Linear { .. } => None,
            law => Some(dealiased(&q.map(|v| law.potential(v) - d * v))),
        };
        let nu = (0..dim)
            .map(|j| {
                let mut acc = Field::zeros(self.grid);
                for i in 0..dim {
                    acc = acc.sub(&u[i].mul(&jac[j][i]));
                    acc = acc.add(&jac[i][j].add(&jac[j][i]).mul(&gq[i]).scale(p.mu_bar));
                }
                acc = acc.add(&div.mul(&gq[j]).scale(p.lambda_bar));
                let mut s = dealiased(&acc).add(&grad_sq_hat.derivative(j).scale(0.5 * scales.cap));
                if let Some(ex) = &excess_hat {
                    s = s.add(&ex.derivative(j).scale(-1.0));
                }
                s
            })
            .collect();
        let out = ModalState { q: nq, u: nu };
        check_finite(&out)?;
        Ok(out)
    }
}

/// Effective-velocity system in the variables `(s = ρ/ρ̄ − 1, v)`.
pub(crate) struct EffectiveSystem {
    pub grid: Grid,
    pub params: PhysParams,
}

impl SplitSystem for EffectiveSystem {
    fn grid(&self) -> Grid {
        self.grid
    }

    fn symbol(&self) -> Symbol {
        self.params.effective_symbol()
    }

    fn residual(&self, w: &ModalState) -> Result<ModalState> {
        let dim = self.grid.dim();
        let p = &self.params;
        let d = p.sound_speed_sq();
        let ss = w.q.dealias();
        let vs: Vec<Spectrum> = w.u.iter().map(Spectrum::dealias).collect();
        let s = ss.inverse();
        let rho_min = p.rho_ref * (1.0 + s.min());
        if !(rho_min >= VACUUM_FLOOR) {
            return Err(Error::Vacuum {
                rho_min,
                floor: VACUUM_FLOOR,
            });
        }
        let one_plus = s.map(|x| 1.0 + x);
        let gs: Vec<Field> = (0..dim).map(|a| ss.derivative(a).inverse()).collect();
        // ∇ ln ρ = ∇s / (1 + s)
        let gq: Vec<Field> = gs.iter().map(|g| g.zip_map(&one_plus, |a, b| a / b)).collect();
        let v: Vec<Field> = vs.iter().map(Spectrum::inverse).collect();
        let shift = p.kappa / p.mu_bar;
        let u: Vec<Field> = (0..dim).map(|a| v[a].axpy(-shift, &gq[a])).collect();
        // jac[j][i] = ∂_i v_j
        let jac: Vec<Vec<Field>> = vs
            .iter()
            .map(|sp| (0..dim).map(|i| sp.derivative(i).inverse()).collect())
            .collect();

        let mut ns = Spectrum::zeros(self.grid);
        for a in 0..dim {
            ns = ns.add(&dealiased(&s.mul(&v[a])).derivative(a).scale(-1.0));
        }
        let law = p.pressure;
        let rho_ref = p.rho_ref;
        // −P'(ρ)∇s/(1+s) + d∇s
        let pressure_weight = one_plus.map(|x| d - law.slope(rho_ref * x) / x);
        let nv = (0..dim)
            .map(|j| {
                let mut acc = gs[j].mul(&pressure_weight);
                for i in 0..dim {
                    acc = acc.sub(&u[i].mul(&jac[j][i]));
                    acc = acc.add(&gq[i].mul(&jac[j][i]).scale(p.mu_bar));
                }
                dealiased(&acc)
            })
            .collect();
        let out = ModalState { q: ns, u: nv };
        check_finite(&out)?;
        Ok(out)
    }
}

/// `Lw + N(w)` as fields.
pub(crate) fn full_rhs(sys: &impl SplitSystem, w: &ModalState) -> Result<(Field, VectorField)> {
    let n = sys.residual(w)?;
    let sym = sys.symbol();
    let g = sys.grid();
    let dim = g.dim();
    let lap = |s: &Spectrum| s.laplacian();
    let div = (0..dim).fold(Spectrum::zeros(g), |acc, a| acc.add(&w.u[a].derivative(a)));
    let dq = lap(&w.q).scale(sym.e).add(&div.scale(-1.0)).add(&n.q);
    let lap_q = lap(&w.q);
    let du = (0..dim)
        .map(|j| {
            lap(&w.u[j])
                .scale(sym.a)
                .add(&div.derivative(j).scale(sym.b))
                .add(&lap_q.derivative(j).scale(sym.c))
                .add(&w.q.derivative(j).scale(-sym.d))
                .add(&n.u[j])
                .inverse()
        })
        .collect();
    Ok((dq.inverse(), VectorField::new(du)?))
}

pub(crate) fn modal_15(state: &State) -> ModalState {
    ModalState::from_fields(&state.q, &state.u)
}

pub(crate) fn modal_17(state: &StateV, rho_ref: f64) -> ModalState {
    ModalState::from_fields(&state.rho.map(|r| r / rho_ref - 1.0), &state.v)
}

pub(crate) fn effective_velocity_unchecked(w: &ModalState, rho_ref: f64, t: f64) -> Result<StateV> {
    let (s, v) = w.to_fields();
    StateV::new(s.map(|x| rho_ref * (1.0 + x)), v, t)
}

/// `(∂_t q, ∂_t u)` of the log-density system.
pub fn rhs_system_1_5(state: &State, params: &PhysParams) -> Result<(Field, VectorField)> {
    params.validate(state.grid().dim())?;
    let sys = LogDensitySystem {
        grid: *state.grid(),
        params: *params,
    };
    full_rhs(&sys, &modal_15(state))
}

/// `(∂_t ρ, ∂_t v)` of the effective-velocity system.
pub fn rhs_system_1_7(state: &StateV, params: &PhysParams) -> Result<(Field, VectorField)> {
    params.validate_effective(state.grid().dim())?;
    check_floor(&state.rho)?;
    let sys = EffectiveSystem {
        grid: *state.grid(),
        params: *params,
    };
    let (ds, dv) = full_rhs(&sys, &modal_17(state, params.rho_ref))?;
    Ok((ds.scale(params.rho_ref), dv))
}

/// `(q, u) ↦ (e^q, u + (κ/μ̄)∇q)`
pub fn effective_velocity(state: &State, params: &PhysParams) -> Result<StateV> {
    let rho = state.rho();
    check_floor(&rho)?;
    let shift = params.kappa / params.mu_bar;
    let v = state.u.axpy(shift, &gradient(&state.q));
    StateV::new(rho, v, state.t)
}

/// `(ρ, v) ↦ (ln ρ, v − (κ/μ̄)∇ln ρ)`
pub fn inverse_effective_velocity(state: &StateV, params: &PhysParams) -> Result<State> {
    check_floor(&state.rho)?;
    let q = state.rho.map(f64::ln);
    let shift = params.kappa / params.mu_bar;
    let u = state.v.axpy(-shift, &gradient(&q));
    State::new(q, u, state.t)
}

/// `S_n f`; levels above the finest resolved shell give `f` back.
pub fn smooth_data(f: &Field, n: i32, part: &DyadicPartition) -> Result<Field> {
    if n > part.j_max() {
        if f.grid() != part.grid() {
            return Err(Error::GridMismatch);
        }
        return Ok(f.clone());
    }
    part.low_cutoff(f, n)
}
