//! Total energy, its dissipation balance and the Orlicz-type potential.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{Normalization, PhysParams, PressureLaw, State, VACUUM_FLOOR};
use crate::spectral::{divergence, gradient, jacobian, Field};

/// `Π(s) − Π(ρ̄) − Π'(ρ̄)(s − ρ̄)` with `Π'(ρ̄) = 0`, i.e. the relative
/// internal energy density for `P(s) = sΠ'(s) − Π(s)`.
pub fn relative_potential(law: &PressureLaw, rho_ref: f64, s: f64) -> f64 {
    match *law {
        PressureLaw::Linear { k } => k * (s * (s / rho_ref).ln() - s + rho_ref),
        PressureLaw::Gamma { a, gamma } => {
            let base = rho_ref.powf(gamma - 1.0);
            a / (gamma - 1.0) * (s.powf(gamma) - rho_ref * base - gamma * base * (s - rho_ref))
        }
    }
}

/// `Π(s) = s(∫_{ρ̄}^s P(z)/z² dz − P(ρ̄)/ρ̄)` by quadrature, for checking the
/// closed forms.
pub fn potential_by_quadrature(law: &PressureLaw, rho_ref: f64, s: f64) -> f64 {
    let panels = 4000;
    let h = (s - rho_ref) / panels as f64;
    let f = |z: f64| law.pressure(z) / (z * z);
    let mut acc = f(rho_ref) + f(s);
    for i in 1..panels {
        let z = rho_ref + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(z);
    }
    s * (acc * h / 3.0 - law.pressure(rho_ref) / rho_ref)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyReport {
    pub t: f64,
    /// `∫½ρ|u|²`
    pub kinetic: f64,
    /// `∫Π(ρ) − Π(ρ̄)`
    pub potential: f64,
    /// `∫½κ(ρ)|∇ρ|²`
    pub capillary: f64,
    /// `∫₀ᵗ∫ ½μ(ρ)|D(u)|² + λ(ρ)(div u)²`, zero for a single snapshot.
    pub dissipation_integral: f64,
}

impl EnergyReport {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential + self.capillary
    }
}

fn check_density(rho: &Field) -> Result<()> {
    let rho_min = rho.min();
    if !(rho_min >= VACUUM_FLOOR) {
        return Err(Error::Vacuum {
            rho_min,
            floor: VACUUM_FLOOR,
        });
    }
    Ok(())
}

pub fn total_energy(state: &State, params: &PhysParams) -> Result<EnergyReport> {
    let rho = state.rho();
    check_density(&rho)?;
    let kinetic = 0.5 * rho.inner(&state.u.dot(&state.u));
    let potential = rho
        .map(|s| relative_potential(&params.pressure, params.rho_ref, s))
        .integral();
    // κ(ρ)|∇ρ|² = κρ|∇q|²
    let gq = gradient(&state.q);
    let capillary = 0.5 * params.kappa * rho.inner(&gq.dot(&gq));
    Ok(EnergyReport {
        t: state.t,
        kinetic,
        potential,
        capillary,
        dissipation_integral: 0.0,
    })
}

/// `∫ ½μ̄ρ|∇u + ᵗ∇u|² + λ̄ρ(div u)²`
pub fn dissipation_rate(state: &State, params: &PhysParams) -> f64 {
    let rho = state.rho();
    let jac = jacobian(&state.u);
    let dim = jac.len();
    let mut d2 = Field::zeros(*state.grid());
    for i in 0..dim {
        for j in 0..dim {
            let s = jac[i][j].add(&jac[j][i]);
            d2 = d2.add(&s.mul(&s));
        }
    }
    let div = divergence(&state.u);
    0.5 * params.mu_bar * rho.inner(&d2) + params.lambda_bar * rho.inner(&div.mul(&div))
}

#[derive(Clone, Debug, Serialize)]
pub struct DissipationCheck {
    pub e0: f64,
    pub series: Vec<EnergyReport>,
    /// `max_t E(t) + D(t) − E(0)`; positive values violate the inequality.
    pub worst_margin: f64,
}

impl DissipationCheck {
    pub fn relative_violation(&self) -> f64 {
        if self.e0 > 0.0 {
            self.worst_margin.max(0.0) / self.e0
        } else {
            self.worst_margin.max(0.0)
        }
    }
}

/// Energy balance along a trajectory of the physically normalized system;
/// the dissipation integral uses the trapezoid rule over the snapshots.
pub fn energy_dissipation_check(trajectory: &[State], params: &PhysParams) -> Result<DissipationCheck> {
    if trajectory.len() < 2 {
        return Err(Error::InvalidArgument("need at least two snapshots".into()));
    }
    let mut monitor = EnergyMonitor::new(params)?;
    for s in trajectory {
        let rep = monitor.observe(s)?;
        monitor.record(rep);
    }
    Ok(monitor.finish())
}

/// Streaming form of [`energy_dissipation_check`], fed one state at a time
/// (e.g. from a solver observer, so the integral sees every step).
#[derive(Clone, Debug)]
pub struct EnergyMonitor {
    params: PhysParams,
    integral: f64,
    prev: Option<(f64, f64)>,
    e0: f64,
    worst_margin: f64,
    series: Vec<EnergyReport>,
}

impl EnergyMonitor {
    pub fn new(params: &PhysParams) -> Result<Self> {
        if params.normalization != Normalization::Physical {
            return Err(Error::InvalidArgument(
                "the energy balance holds for the physical normalization only".into(),
            ));
        }
        Ok(Self {
            params: *params,
            integral: 0.0,
            prev: None,
            e0: 0.0,
            worst_margin: f64::NEG_INFINITY,
            series: Vec::new(),
        })
    }

    /// Adds a state; the first one fixes `E(0)`.
    pub fn observe(&mut self, s: &State) -> Result<EnergyReport> {
        let mut rep = total_energy(s, &self.params)?;
        let rate = dissipation_rate(s, &self.params);
        match self.prev {
            Some((t0, r0)) => self.integral += 0.5 * (s.t - t0) * (rate + r0),
            None => self.e0 = rep.total(),
        }
        self.prev = Some((s.t, rate));
        rep.dissipation_integral = self.integral;
        self.worst_margin = self.worst_margin.max(rep.total() + self.integral - self.e0);
        Ok(rep)
    }

    /// Keeps a report in the returned series.
    pub fn record(&mut self, rep: EnergyReport) {
        self.series.push(rep);
    }

    pub fn finish(self) -> DissipationCheck {
        DissipationCheck {
            e0: self.e0,
            series: self.series,
            worst_margin: self.worst_margin,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrliczReport {
    pub gamma: f64,
    pub delta: f64,
    /// `min (Π(ρ) − Π(1)) / comparison` over nodes with `ρ ≠ 1`.
    pub nu: f64,
    /// `max` of the same ratio.
    pub c: f64,
    pub potential_integral: f64,
    pub comparison_integral: f64,
}

/// Threshold between the quadratic and the `γ`-power regime.
pub const ORLICZ_DELTA: f64 = 0.5;

/// Compares `Π(ρ) − Π(1)` for `P = ρ^γ` with `|ρ−1|²` (when `|ρ−1| ≤ δ`)
/// and `|ρ−1|^γ` (otherwise).
pub fn orlicz_equivalence(rho: &Field, gamma: f64) -> Result<OrliczReport> {
    if !(gamma >= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must be >= 1, got {gamma}")));
    }
    if !(rho.min() > 0.0) {
        return Err(Error::Vacuum {
            rho_min: rho.min(),
            floor: 0.0,
        });
    }
    let j = |s: f64| {
        let d = s - 1.0;
        if d.abs() < 1e-3 {
            // Taylor expansion; the closed form cancels catastrophically here
            d * d * (gamma / 2.0 + gamma * (gamma - 2.0) * d / 6.0 + gamma * (gamma - 2.0) * (gamma - 3.0) * d * d / 24.0)
        } else if gamma == 1.0 {
            s * s.ln() - s + 1.0
        } else {
            (s.powf(gamma) - 1.0 - gamma * d) / (gamma - 1.0)
        }
    };
    let cmp = |s: f64| {
        let d = (s - 1.0).abs();
        if d <= ORLICZ_DELTA {
            d * d
        } else {
            d.powf(gamma)
        }
    };
    let (mut nu, mut c) = (f64::INFINITY, 0.0f64);
    for &s in rho.values() {
        if s != 1.0 {
            let r = j(s) / cmp(s);
            nu = nu.min(r);
            c = c.max(r);
        }
    }
    if nu.is_infinite() {
        nu = 0.0;
    }
    Ok(OrliczReport {
        gamma,
        delta: ORLICZ_DELTA,
        nu,
        c,
        potential_integral: rho.map(j).integral(),
        comparison_integral: rho.map(cmp).integral(),
    })
}
