use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{LinearCoeffs, Symbol};

/// Smallest density a state may reach before a run is stopped.
pub const VACUUM_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum PressureLaw {
    /// `P(ρ) = Kρ`
    Linear { k: f64 },
    /// `P(ρ) = aρ^γ`, `γ > 1`
    Gamma { a: f64, gamma: f64 },
}

impl PressureLaw {
    pub fn pressure(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::Linear { k } => k * rho,
            PressureLaw::Gamma { a, gamma } => a * rho.powf(gamma),
        }
    }

    /// `P'(ρ)`
    pub fn slope(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::Linear { k } => k,
            PressureLaw::Gamma { a, gamma } => a * gamma * rho.powf(gamma - 1.0),
        }
    }

    /// Potential `F(q)` with `∇F = P'(ρ)∇q` for `q = ln ρ`, `F(0) = 0`.
    pub fn potential(&self, q: f64) -> f64 {
        match *self {
            PressureLaw::Linear { k } => k * q,
            PressureLaw::Gamma { a, gamma } => {
                a * gamma / (gamma - 1.0) * ((gamma - 1.0) * q).exp_m1()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            PressureLaw::Linear { k } => k >= 0.0 && k.is_finite(),
            PressureLaw::Gamma { a, gamma } => a >= 0.0 && gamma > 1.0 && (a + gamma).is_finite(),
        };
        if !ok {
            return Err(Error::InvalidArgument(format!("bad pressure law {self:?}")));
        }
        Ok(())
    }
}

/// How the viscous and capillary operators of the log-density system are
/// scaled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Divided physical model: `μ̄(Δu + ∇div u) + λ̄∇div u` and `κ(∇Δq + ½∇|∇q|²)`.
    /// Energy balance and the effective-velocity change of variables hold.
    #[default]
    Physical,
    /// Unit Laplacian, no grad-div term, unit capillarity.
    Display,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    /// Viscosity slope in `μ(ρ) = μ̄ρ`.
    pub mu_bar: f64,
    /// Second viscosity slope in `λ(ρ) = λ̄ρ`.
    pub lambda_bar: f64,
    /// Capillarity in `κ(ρ) = κ/ρ`.
    pub kappa: f64,
    pub pressure: PressureLaw,
    /// Reference density `ρ̄`.
    #[serde(default = "one")]
    pub rho_ref: f64,
    #[serde(default)]
    pub normalization: Normalization,
}

fn one() -> f64 {
    1.0
}

/// Coefficients of the linear operators in the log-density momentum
/// equation: `āΔu + b̄∇div u + c̄∇Δq`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OperatorScales {
    pub visc: f64,
    pub grad_div: f64,
    pub cap: f64,
}

impl PhysParams {
    pub fn new(mu_bar: f64, lambda_bar: f64, kappa: f64, pressure: PressureLaw) -> Self {
        Self {
            mu_bar,
            lambda_bar,
            kappa,
            pressure,
            rho_ref: 1.0,
            normalization: Normalization::Physical,
        }
    }

    /// Parameters for which the effective velocity `v = u + μ̄∇ln ρ` closes:
    /// `κ = μ̄²`, `λ̄ = 0`.
    pub fn effective(mu_bar: f64, pressure: PressureLaw) -> Self {
        Self::new(mu_bar, 0.0, mu_bar * mu_bar, pressure)
    }

    pub fn with_normalization(self, normalization: Normalization) -> Self {
        Self {
            normalization,
            ..self
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.mu_bar > 0.0) || !self.mu_bar.is_finite() {
            return Err(Error::InvalidArgument(format!("mu_bar must be positive, got {}", self.mu_bar)));
        }
        if !(2.0 * self.mu_bar + dim as f64 * self.lambda_bar >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need 2 mu_bar + {dim} lambda_bar >= 0, got mu_bar = {}, lambda_bar = {}",
                self.mu_bar, self.lambda_bar
            )));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !(self.rho_ref > 0.0) || !self.rho_ref.is_finite() {
            return Err(Error::InvalidArgument(format!("rho_ref must be positive, got {}", self.rho_ref)));
        }
        self.pressure.validate()
    }

    /// The effective-velocity system additionally needs `κ = μ̄²`.
    pub fn validate_effective(&self, dim: usize) -> Result<()> {
        self.validate(dim)?;
        let target = self.mu_bar * self.mu_bar;
        if (self.kappa - target).abs() > 1e-12 * target {
            return Err(Error::InvalidArgument(format!(
                "effective velocity needs kappa = mu_bar^2, got kappa = {} and mu_bar^2 = {target}",
                self.kappa
            )));
        }
        Ok(())
    }

    pub fn scales(&self) -> OperatorScales {
        match self.normalization {
            Normalization::Physical => OperatorScales {
                visc: self.mu_bar,
                grad_div: self.mu_bar + self.lambda_bar,
                cap: self.kappa,
            },
            Normalization::Display => OperatorScales {
                visc: 1.0,
                grad_div: 0.0,
                cap: 1.0,
            },
        }
    }

    /// Pressure linearization `P'(ρ̄)`.
    pub fn sound_speed_sq(&self) -> f64 {
        self.pressure.slope(self.rho_ref)
    }

    /// Linearization of the log-density system about `ρ̄`, pressure included.
    pub fn linear_coeffs(&self) -> LinearCoeffs {
        let s = self.scales();
        LinearCoeffs {
            a: s.visc,
            b: s.grad_div,
            c: s.cap,
            d: self.sound_speed_sq(),
        }
    }

    /// Same without pressure (the operator the Picard scheme inverts).
    pub fn pressureless_coeffs(&self) -> LinearCoeffs {
        LinearCoeffs {
            d: 0.0,
            ..self.linear_coeffs()
        }
    }

    /// Linearization of the effective-velocity system about `(ρ̄, 0)` in the
    /// variables `(ρ/ρ̄ − 1, v)`.
    pub(crate) fn effective_symbol(&self) -> Symbol {
        Symbol {
            e: self.kappa / self.mu_bar,
            a: self.mu_bar,
            b: 0.0,
            c: 0.0,
            d: self.sound_speed_sq(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_gradient_matches_pressure_slope() {
        for law in [
            PressureLaw::Linear { k: 2.5 },
            PressureLaw::Gamma { a: 1.3, gamma: 1.4 },
            PressureLaw::Gamma { a: 1.0, gamma: 2.0 },
        ] {
            for q in [-0.7, 0.0, 0.3, 1.1] {
                let h = 1e-6;
                let fd = (law.potential(q + h) - law.potential(q - h)) / (2.0 * h);
                assert!((fd - law.slope(q.exp())).abs() < 1e-7, "{law:?} q={q}");
            }
            assert_eq!(law.potential(0.0), 0.0);
        }
    }

    #[test]
    fn validation() {
        let p = PhysParams::new(1.0, -1.0, 1.0, PressureLaw::Linear { k: 1.0 });
        assert!(p.validate(2).is_ok());
        assert!(p.validate(1).is_ok());
        let p = PhysParams::new(1.0, -1.5, 1.0, PressureLaw::Linear { k: 1.0 });
        assert!(p.validate(2).is_err());
        assert!(PhysParams::new(1.0, 0.0, 0.0, PressureLaw::Linear { k: 1.0 }).validate(1).is_err());
        assert!(PhysParams::new(1.0, 0.0, 1.0, PressureLaw::Gamma { a: 1.0, gamma: 1.0 })
            .validate(1)
            .is_err());
        assert!(PhysParams::new(0.5, 0.0, 1.0, PressureLaw::Linear { k: 1.0 })
            .validate_effective(1)
            .is_err());
        assert!(PhysParams::effective(0.5, PressureLaw::Linear { k: 1.0 })
            .validate_effective(1)
            .is_ok());
    }

    #[test]
    fn normalizations() {
        let p = PhysParams::new(0.5, 0.2, 0.7, PressureLaw::Linear { k: 3.0 });
        let c = p.linear_coeffs();
        assert_eq!((c.a, c.b, c.c, c.d), (0.5, 0.7, 0.7, 3.0));
        let c = p.with_normalization(Normalization::Display).linear_coeffs();
        assert_eq!((c.a, c.b, c.c, c.d), (1.0, 0.0, 1.0, 3.0));
        assert_eq!(p.pressureless_coeffs().d, 0.0);
    }
}
