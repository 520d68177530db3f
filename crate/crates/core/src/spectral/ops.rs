//! Fourier-multiplier differential operators and the Helmholtz projectors.
//!
//! Odd derivatives use [`Grid::odd_wavevector`] (Nyquist component zeroed);
//! the Laplacian keeps the full symbol `-|ξ|²`. `Δ^{-1}` maps the zero mode
//! to zero.

use num_complex::Complex64;

use super::{Field, Grid, Spectrum, VectorField};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn forward_transform(f: &Field) -> Result<Spectrum> {
    if !f.is_finite() {
        return Err(Error::NonFinite("forward_transform input"));
    }
    Ok(f.forward())
}

pub fn inverse_transform(s: &Spectrum) -> Field {
    s.inverse()
}

impl Spectrum {
    pub fn derivative(&self, axis: usize) -> Spectrum {
        let g = *self.grid();
        self.apply(|j| I * g.odd_wavevector(j)[axis])
    }

    pub fn laplacian(&self) -> Spectrum {
        let g = *self.grid();
        self.apply_real(|j| {
            let xi = g.wavevector(j);
            -(xi[0] * xi[0] + xi[1] * xi[1])
        })
    }

    pub fn inverse_laplacian(&self) -> Spectrum {
        let g = *self.grid();
        self.apply_real(|j| {
            let xi = g.wavevector(j);
            let k2 = xi[0] * xi[0] + xi[1] * xi[1];
            if k2 == 0.0 {
                0.0
            } else {
                -1.0 / k2
            }
        })
    }
}

pub fn derivative(f: &Field, axis: usize) -> Field {
    f.forward().derivative(axis).inverse()
}

pub fn gradient(f: &Field) -> VectorField {
    let s = f.forward();
    VectorField::from_components(
        (0..f.grid().dim())
            .map(|a| s.derivative(a).inverse())
            .collect(),
    )
}

pub fn divergence(u: &VectorField) -> Field {
    spectral_divergence(u).inverse()
}

pub(crate) fn spectral_divergence(u: &VectorField) -> Spectrum {
    let mut acc = Spectrum::zeros(*u.grid());
    for (a, c) in u.components().iter().enumerate() {
        acc = acc.add(&c.forward().derivative(a));
    }
    acc
}

pub fn laplacian(f: &Field) -> Field {
    f.forward().laplacian().inverse()
}

pub fn vector_laplacian(u: &VectorField) -> VectorField {
    u.map_components(laplacian)
}

/// Scalar curl `∂_x u_y − ∂_y u_x` of a 2D field; zero in 1D.
pub fn curl(u: &VectorField) -> Field {
    let g = *u.grid();
    if g.dim() == 1 {
        return Field::zeros(g);
    }
    derivative(u.component(1), 0).sub(&derivative(u.component(0), 1))
}

/// Jacobian `J[i][j] = ∂_j u_i`.
pub fn jacobian(u: &VectorField) -> Vec<Vec<Field>> {
    let dim = u.grid().dim();
    u.components()
        .iter()
        .map(|c| {
            let s = c.forward();
            (0..dim).map(|j| s.derivative(j).inverse()).collect()
        })
        .collect()
}

/// Hessian `H[i][j] = ∂_i ∂_j f`, built from odd-derivative symbols on
/// both axes so that mixed and repeated derivatives share one convention.
pub fn hessian(f: &Field) -> Vec<Vec<Field>> {
    let dim = f.grid().dim();
    let s = f.forward();
    (0..dim)
        .map(|i| {
            let di = s.derivative(i);
            (0..dim).map(|j| di.derivative(j).inverse()).collect()
        })
        .collect()
}

fn potential_symbol(g: &Grid, j: usize) -> Option<[f64; 2]> {
    let xi = g.odd_wavevector(j);
    let k2 = xi[0] * xi[0] + xi[1] * xi[1];
    (k2 > 0.0).then(|| [xi[0] / k2.sqrt(), xi[1] / k2.sqrt()])
}

/// Potential (curl-free) part `Q u = Δ^{-1} ∇ div u`.
pub fn project_q(u: &VectorField) -> VectorField {
    let g = *u.grid();
    let dim = g.dim();
    let spectra: Vec<Spectrum> = u.components().iter().map(Field::forward).collect();
    let mut out: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); g.nodes()]; dim];
    for j in 0..g.nodes() {
        if let Some(e) = potential_symbol(&g, j) {
            let mut along = Complex64::default();
            for a in 0..dim {
                along += spectra[a].modes()[j] * e[a];
            }
            for a in 0..dim {
                out[a][j] = along * e[a];
            }
        }
    }
    VectorField::from_components(
        out.into_iter()
            .map(|m| Spectrum::new(g, m).expect("mode count").inverse())
            .collect(),
    )
}

/// Solenoidal part `P u = u − Q u`.
pub fn project_p(u: &VectorField) -> VectorField {
    u.sub(&project_q(u))
}
