//! Capillary force `div K` for `κ(ρ) = κ/ρ` and the pressure term.

use serde::{Deserialize, Serialize};

use super::params::{PhysParams, VACUUM_FLOOR};
use crate::error::{Error, Result};
use crate::spectral::{derivative, gradient, hessian, laplacian, Field, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapillaryForm {
    /// `∇(ρκ(ρ)Δρ + ½(κ(ρ) + ρκ'(ρ))|∇ρ|²) − div(κ(ρ)∇ρ⊗∇ρ)`
    General,
    /// `κρ(∇Δ ln ρ + ½∇|∇ ln ρ|²)`
    LogForm,
    /// `κ div(ρ ∇∇ ln ρ)`
    DivergenceForm,
}

pub(crate) fn check_floor(rho: &Field) -> Result<()> {
    let rho_min = rho.min();
    if !(rho_min >= VACUUM_FLOOR) {
        return Err(Error::Vacuum {
            rho_min,
            floor: VACUUM_FLOOR,
        });
    }
    Ok(())
}

pub fn capillary_force(rho: &Field, form: CapillaryForm, kappa: f64) -> Result<VectorField> {
    check_floor(rho)?;
    let dim = rho.grid().dim();
    let comps = match form {
        CapillaryForm::General => {
            let kap = rho.map(|r| kappa / r);
            let dkap = rho.map(|r| -kappa / (r * r));
            let grad = gradient(rho);
            let grad_sq = grad.dot(&grad);
            let lap = laplacian(rho);
            let scalar = rho
                .mul(&kap)
                .mul(&lap)
                .add(&kap.add(&rho.mul(&dkap)).mul(&grad_sq).scale(0.5));
            (0..dim)
                .map(|j| {
                    // (div(κ ∇ρ⊗∇ρ))_j = Σ_i ∂_i(κ ∂_iρ ∂_jρ)
                    let mut flux = Field::zeros(*rho.grid());
                    for i in 0..dim {
                        let t = kap.mul(grad.component(i)).mul(grad.component(j));
                        flux = flux.add(&derivative(&t, i));
                    }
                    derivative(&scalar, j).sub(&flux)
                })
                .collect()
        }
        CapillaryForm::LogForm => {
            let q = rho.map(f64::ln);
            let gq = gradient(&q);
            let half_sq = gq.dot(&gq).scale(0.5);
            let lap = laplacian(&q);
            (0..dim)
                .map(|j| {
                    derivative(&lap, j)
                        .add(&derivative(&half_sq, j))
                        .mul(rho)
                        .scale(kappa)
                })
                .collect()
        }
        CapillaryForm::DivergenceForm => {
            let q = rho.map(f64::ln);
            let h = hessian(&q);
            (0..dim)
                .map(|j| {
                    let mut acc = Field::zeros(*rho.grid());
                    for (i, row) in h.iter().enumerate() {
                        acc = acc.add(&derivative(&rho.mul(&row[j]), i));
                    }
                    acc.scale(kappa)
                })
                .collect()
        }
    };
    VectorField::new(comps)
}

/// Pointwise `Δρ − ρΔ ln ρ − |∇ρ|²/ρ`.
pub fn laplacian_identity_residual(rho: &Field) -> Result<Field> {
    check_floor(rho)?;
    let q = rho.map(f64::ln);
    let grad = gradient(rho);
    let grad_sq = grad.dot(&grad);
    Ok(laplacian(rho)
        .sub(&rho.mul(&laplacian(&q)))
        .sub(&grad_sq.zip_map(rho, |g, r| g / r)))
}

/// `∇F(ρ)` with `F' = P'/ρ` expressed through `q = ln ρ`.
pub fn pressure_gradient(q: &Field, params: &PhysParams) -> VectorField {
    let law = params.pressure;
    gradient(&q.map(|v| law.potential(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::params::PressureLaw;
    use crate::spectral::random::bandlimited_field;
    use crate::spectral::Grid;

    fn max_rel(a: &VectorField, b: &VectorField) -> f64 {
        a.sub(b).norm_linf() / a.norm_linf().max(b.norm_linf())
    }

    #[test]
    fn constant_density_has_no_force() {
        let g = Grid::periodic(2, 16).unwrap();
        for form in [CapillaryForm::General, CapillaryForm::LogForm, CapillaryForm::DivergenceForm] {
            let f = capillary_force(&Field::constant(g, 1.7), form, 0.3).unwrap();
            assert!(f.norm_linf() < 1e-13);
        }
    }

    #[test]
    fn forms_agree_on_sine_density() {
        let g = Grid::periodic(1, 256).unwrap();
        let rho = Field::from_fn(g, |x| 1.0 + 0.1 * x[0].sin());
        let a = capillary_force(&rho, CapillaryForm::General, 0.8).unwrap();
        let b = capillary_force(&rho, CapillaryForm::LogForm, 0.8).unwrap();
        let c = capillary_force(&rho, CapillaryForm::DivergenceForm, 0.8).unwrap();
        assert!(max_rel(&a, &b) < 1e-8 && max_rel(&a, &c) < 1e-8 && max_rel(&b, &c) < 1e-8);
        assert!(laplacian_identity_residual(&rho).unwrap().norm_linf() < 1e-9);
    }

    #[test]
    fn forms_agree_on_random_2d_density() {
        let g = Grid::periodic(2, 128).unwrap();
        let rho = bandlimited_field(g, 3, 0.15, 4).map(|v| 1.0 + v);
        let a = capillary_force(&rho, CapillaryForm::General, 1.0).unwrap();
        let b = capillary_force(&rho, CapillaryForm::LogForm, 1.0).unwrap();
        let c = capillary_force(&rho, CapillaryForm::DivergenceForm, 1.0).unwrap();
        let (ab, ac) = (max_rel(&a, &b), max_rel(&a, &c));
        assert!(ab < 1e-8 && ac < 1e-8, "{ab:e} {ac:e}");
    }

    #[test]
    fn vacuum_rejected() {
        let g = Grid::periodic(1, 16).unwrap();
        let rho = Field::from_fn(g, |x| 0.5 + 0.5 * x[0].sin());
        assert!(matches!(
            capillary_force(&rho, CapillaryForm::LogForm, 1.0),
            Err(Error::Vacuum { .. })
        ));
    }

    #[test]
    fn pressure_gradients() {
        let g = Grid::periodic(1, 64).unwrap();
        let zero = pressure_gradient(&Field::zeros(g), &PhysParams::new(1.0, 0.0, 1.0, PressureLaw::Linear { k: 2.0 }));
        assert_eq!(zero.norm_linf(), 0.0);
        let q = Field::from_fn(g, |x| x[0].sin());
        let lin = pressure_gradient(&q, &PhysParams::new(1.0, 0.0, 1.0, PressureLaw::Linear { k: 2.0 }));
        let exact = Field::from_fn(g, |x| 2.0 * x[0].cos());
        assert!(lin.component(0).sub(&exact).norm_linf() < 1e-12);
        // γ = 2, a = 1: ∇F = (1/ρ)∇P = 2∇ρ
        let params = PhysParams::new(1.0, 0.0, 1.0, PressureLaw::Gamma { a: 1.0, gamma: 2.0 });
        let q = Field::from_fn(g, |x| 0.2 * x[0].cos());
        let rho = q.map(f64::exp);
        let via_formula = pressure_gradient(&q, &params);
        let via_pressure = gradient(&rho.map(|r| r * r)).mul_scalar(&rho.map(|r| 1.0 / r));
        assert!(via_formula.sub(&via_pressure).norm_linf() < 1e-10);
        assert!(via_formula.sub(&gradient(&rho).scale(2.0)).norm_linf() < 1e-10);
    }
}
