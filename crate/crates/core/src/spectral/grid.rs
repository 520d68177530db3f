use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic lattice `[0, L)^dim` with `n` nodes per axis.
///
/// Samples are stored row-major: for `dim = 2` the flat index of node
/// `(i0, i1)` is `i0 * n + i1`, axis 0 varying slowest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be > 0, got {length}")));
        }
        Ok(Self { dim, n, length })
    }

    /// Grid of side `2π`, the common case where wavenumbers are integers.
    pub fn periodic(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nodes(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Smallest nonzero wavenumber `2π / L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed integer wavenumber of a 1D index, in `[-n/2, n/2)`.
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Inverse of [`signed_index`](Self::signed_index).
    pub fn unsigned_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Per-axis 1D indices of a flat node/mode index.
    pub fn split(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.n, flat % self.n],
        }
    }

    pub fn join(&self, idx: [usize; 2]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[0] * self.n + idx[1],
        }
    }

    /// Integer wavevector of a flat mode index (unused axes are zero).
    pub fn mode_index(&self, flat: usize) -> [i64; 2] {
        let [a, b] = self.split(flat);
        match self.dim {
            1 => [self.signed_index(a), 0],
            _ => [self.signed_index(a), self.signed_index(b)],
        }
    }

    /// Physical wavevector `2π k / L` of a flat mode index.
    pub fn wavevector(&self, flat: usize) -> [f64; 2] {
        let k = self.mode_index(flat);
        let f = self.fundamental();
        [k[0] as f64 * f, k[1] as f64 * f]
    }

    /// Wavevector used for odd derivatives: the Nyquist component is zeroed.
    pub fn odd_wavevector(&self, flat: usize) -> [f64; 2] {
        let idx = self.split(flat);
        let mut xi = self.wavevector(flat);
        for axis in 0..self.dim {
            if self.is_nyquist(idx[axis]) {
                xi[axis] = 0.0;
            }
        }
        xi
    }

    pub fn wavenumber_norm(&self, flat: usize) -> f64 {
        let xi = self.wavevector(flat);
        (xi[0] * xi[0] + xi[1] * xi[1]).sqrt()
    }

    /// Largest resolved wavenumber magnitude, `|ξ|` at the Nyquist corner.
    pub fn max_wavenumber(&self) -> f64 {
        (self.dim as f64).sqrt() * (self.n / 2) as f64 * self.fundamental()
    }

    /// Physical coordinates of a flat node index.
    pub fn coords(&self, flat: usize) -> [f64; 2] {
        let [a, b] = self.split(flat);
        let dx = self.dx();
        match self.dim {
            1 => [a as f64 * dx, 0.0],
            _ => [a as f64 * dx, b as f64 * dx],
        }
    }

    /// True when every axis index of the mode is within the 2/3-rule band.
    pub fn in_dealias_band(&self, flat: usize) -> bool {
        let cutoff = (self.n / 3) as i64;
        let k = self.mode_index(flat);
        k[..self.dim].iter().all(|k| k.abs() <= cutoff)
    }

    /// Same lattice with a different physical side length.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.dim, self.n, length)
    }
}
