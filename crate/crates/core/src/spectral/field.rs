use num_complex::Complex64;

use super::fft::transform_in_place;
use super::Grid;
use crate::error::{Error, Result};

/// Real samples of a scalar function, one per grid node.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.nodes(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field samples"));
        }
        Ok(Self { grid, values })
    }

    /// Builds a field without the finiteness check; callers that step
    /// solvers inspect [`is_finite`](Self::is_finite) themselves.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.nodes());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.nodes()],
        }
    }

    /// Samples `f` at the node coordinates (second coordinate is 0 in 1D).
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.nodes()).map(|i| f(grid.coords(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Field) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c * other`
    pub fn axpy(&self, c: f64, other: &Field) -> Self {
        self.zip_map(other, |a, b| a + c * b)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Rectangle-rule integral over the periodic cell.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_lp(2.0)
    }

    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete `L^p` norm `(Σ |f|^p ΔV)^{1/p}`; `p = ∞` gives the max.
    pub fn norm_lp(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.norm_linf();
        }
        let dv = self.grid.cell_volume();
        if p == 2.0 {
            return (self.values.iter().map(|v| v * v).sum::<f64>() * dv).sqrt();
        }
        if p == 1.0 {
            return self.values.iter().map(|v| v.abs()).sum::<f64>() * dv;
        }
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * dv).powf(1.0 / p)
    }

    pub fn inner(&self, other: &Field) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    pub fn forward(&self) -> Spectrum {
        let mut modes: Vec<Complex64> =
            self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform_in_place(&self.grid, &mut modes, true);
        Spectrum {
            grid: self.grid,
            modes,
        }
    }
}

/// Vector field with `dim` components on a common grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    components: Vec<Field>,
}

impl VectorField {
    pub fn new(components: Vec<Field>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidArgument("vector field needs components".into()));
        };
        let grid = *first.grid();
        if components.len() != grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} components, got {}",
                grid.dim(),
                components.len()
            )));
        }
        if components.iter().any(|c| *c.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components })
    }

    pub(crate) fn from_components(components: Vec<Field>) -> Self {
        debug_assert!(!components.is_empty());
        Self { components }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            components: (0..grid.dim()).map(|_| Field::zeros(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[Field] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &Field {
        &self.components[axis]
    }

    pub fn into_components(self) -> Vec<Field> {
        self.components
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(Field::is_finite)
    }

    pub fn map_components(&self, f: impl Fn(&Field) -> Field) -> Self {
        Self::from_components(self.components.iter().map(f).collect())
    }

    pub fn zip_components(&self, other: &Self, f: impl Fn(&Field, &Field) -> Field) -> Self {
        Self::from_components(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_components(other, Field::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_components(other, Field::sub)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_components(|f| f.scale(c))
    }

    pub fn axpy(&self, c: f64, other: &Self) -> Self {
        self.zip_components(other, |a, b| a.axpy(c, b))
    }

    /// Multiplies every component by a scalar field.
    pub fn mul_scalar(&self, s: &Field) -> Self {
        self.map_components(|f| f.mul(s))
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &Self) -> Field {
        let mut acc = Field::zeros(*self.grid());
        for (a, b) in self.components.iter().zip(&other.components) {
            acc = acc.zip_map(&a.mul(b), |x, y| x + y);
        }
        acc
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Field {
        self.dot(self).map(f64::sqrt)
    }

    pub fn norm_linf(&self) -> f64 {
        self.components
            .iter()
            .map(Field::norm_linf)
            .fold(0.0, f64::max)
    }

    /// `(Σ_i ‖f_i‖²_{L²})^{1/2}`
    pub fn norm_l2(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.norm_l2().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `L^p` norm of the pointwise magnitude.
    pub fn norm_lp(&self, p: f64) -> f64 {
        self.magnitude().norm_lp(p)
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }
}

/// Unnormalized Fourier coefficients of a real field.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    modes: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, modes: Vec<Complex64>) -> Result<Self> {
        if modes.len() != grid.nodes() {
            return Err(Error::InvalidArgument(format!(
                "expected {} modes, got {}",
                grid.nodes(),
                modes.len()
            )));
        }
        Ok(Self { grid, modes })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            modes: vec![Complex64::default(); grid.nodes()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    pub fn modes_mut(&mut self) -> &mut [Complex64] {
        &mut self.modes
    }

    pub fn into_modes(self) -> Vec<Complex64> {
        self.modes
    }

    /// Inverse transform, dividing by the node count; the imaginary part
    /// (round-off for conjugate-symmetric spectra) is discarded.
    pub fn inverse(&self) -> Field {
        let mut data = self.modes.clone();
        transform_in_place(&self.grid, &mut data, false);
        let scale = 1.0 / self.grid.nodes() as f64;
        Field::from_raw(self.grid, data.iter().map(|c| c.re * scale).collect())
    }

    /// Multiplies mode `j` by `m(j)`.
    pub fn apply(&self, m: impl Fn(usize) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            modes: self
                .modes
                .iter()
                .enumerate()
                .map(|(j, &c)| c * m(j))
                .collect(),
        }
    }

    pub fn apply_real(&self, m: impl Fn(usize) -> f64) -> Self {
        self.apply(|j| Complex64::new(m(j), 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            modes: self
                .modes
                .iter()
                .zip(&other.modes)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            modes: self.modes.iter().map(|a| a * c).collect(),
        }
    }

    /// `‖f‖²_{L²}` recovered from the coefficients (Parseval).
    pub fn energy(&self) -> f64 {
        let nodes = self.grid.nodes() as f64;
        self.modes.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.volume()
            / (nodes * nodes)
    }

    /// Zeroes modes outside the 2/3-rule band.
    pub fn dealias(&self) -> Self {
        let g = self.grid;
        self.apply_real(|j| if g.in_dealias_band(j) { 1.0 } else { 0.0 })
    }

    pub fn max_conjugate_asymmetry(&self) -> f64 {
        let g = self.grid;
        let mut worst: f64 = 0.0;
        for (j, c) in self.modes.iter().enumerate() {
            let k = g.mode_index(j);
            let mirror = g.join([g.unsigned_index(-k[0]), g.unsigned_index(-k[1])]);
            worst = worst.max((c - self.modes[mirror].conj()).norm());
        }
        worst
    }
}
