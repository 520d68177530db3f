use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, Spectrum, VectorField};

/// Inner radius of the annulus carrying `φ`.
pub const ANNULUS_INNER: f64 = 3.0 / 4.0;
/// Outer radius of the annulus carrying `φ`; also twice the radius of the
/// ball carrying `χ`.
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;
/// Radius of the ball carrying `χ`.
pub const BALL_RADIUS: f64 = 4.0 / 3.0;

pub const MIN_SHELLS: usize = 4;

/// C^∞ bump in `log2 |ξ|`, positive exactly on the open annulus.
fn theta(r: f64) -> f64 {
    if r <= ANNULUS_INNER || r >= ANNULUS_OUTER {
        return 0.0;
    }
    let s = r.log2();
    let a = ANNULUS_INNER.log2();
    let b = ANNULUS_OUTER.log2();
    (-1.0 / ((s - a) * (b - s))).exp()
}

/// Radial dyadic profile `φ(r) = θ(r) / Σ_k θ(2^{-k} r)`.
pub fn phi(r: f64) -> f64 {
    let t = theta(r);
    if t == 0.0 {
        return 0.0;
    }
    let s = r.log2();
    let lo = (s - ANNULUS_OUTER.log2()).floor() as i32;
    let hi = (s - ANNULUS_INNER.log2()).ceil() as i32;
    let total: f64 = (lo..=hi).map(|k| theta(r * 2f64.powi(-k))).sum();
    t / total
}

/// Low-frequency profile `χ = 1 − Σ_{l≥0} φ(2^{-l}·)`, supported in `B(0, 4/3)`.
pub fn chi(r: f64) -> f64 {
    if r >= BALL_RADIUS {
        0.0
    } else {
        // for r < 4/3 only the l = 0 term of the sum can be nonzero
        1.0 - phi(r)
    }
}

/// Smooth dyadic decomposition resolved on a particular grid.
///
/// Blocks `j_min..=j_max` are the ones carrying at least one nonzero grid
/// wavenumber; below the fundamental frequency no homogeneous block exists,
/// so homogeneous sums range over these shells only.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    /// `φ(2^{-l}|ξ|)` per mode, indexed by `l - j_min`.
    weights: Vec<Vec<f64>>,
    /// `χ(|ξ|)` per mode (non-homogeneous block `l = -1`).
    low: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PartitionDefect {
    /// `max |Σ_l φ(2^{-l}ξ) − 1|` over nonzero resolved modes.
    pub homogeneous: f64,
    /// `max |χ(ξ) + Σ_{l≥0} φ(2^{-l}ξ) − 1|` over all resolved modes.
    pub inhomogeneous: f64,
}

pub fn build_partition(grid: &Grid) -> Result<DyadicPartition> {
    let r_min = grid.fundamental();
    let r_max = grid.max_wavenumber();
    let j_min = (r_min.log2() - ANNULUS_OUTER.log2()).floor() as i32 + 1;
    let j_max = (r_max.log2() - ANNULUS_INNER.log2()).ceil() as i32 - 1;
    let shells = (j_max - j_min + 1).max(0) as usize;
    if shells < MIN_SHELLS {
        return Err(Error::TooFewShells {
            found: shells,
            required: MIN_SHELLS,
        });
    }
    let norms: Vec<f64> = (0..grid.nodes()).map(|j| grid.wavenumber_norm(j)).collect();
    let weights = (j_min..=j_max)
        .map(|l| {
            let scale = 2f64.powi(-l);
            norms.iter().map(|&r| phi(r * scale)).collect()
        })
        .collect();
    let low = norms.iter().map(|&r| chi(r)).collect();
    Ok(DyadicPartition {
        grid: *grid,
        j_min,
        j_max,
        weights,
        low,
    })
}

impl DyadicPartition {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn shells(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    fn check_level(&self, l: i32) -> Result<()> {
        if l < self.j_min || l > self.j_max {
            return Err(Error::BlockOutOfRange {
                l,
                min: self.j_min,
                max: self.j_max,
            });
        }
        Ok(())
    }

    fn check_grid(&self, g: &Grid) -> Result<()> {
        if *g != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Multiplier of the homogeneous block `l` (must be in range).
    pub fn block_weights(&self, l: i32) -> &[f64] {
        &self.weights[(l - self.j_min) as usize]
    }

    /// Multiplier of the non-homogeneous block `l ≥ -1`; `None` when the
    /// block carries no resolved mode.
    pub fn inhomogeneous_weights(&self, l: i32) -> Option<&[f64]> {
        match l {
            -1 => Some(&self.low),
            l if l >= 0 && l >= self.j_min && l <= self.j_max => Some(self.block_weights(l)),
            _ => None,
        }
    }

    /// Levels of the non-homogeneous decomposition present on this grid.
    pub fn inhomogeneous_levels(&self) -> Vec<i32> {
        std::iter::once(-1)
            .chain((self.j_min.max(0))..=self.j_max)
            .collect()
    }

    pub fn defect(&self) -> PartitionDefect {
        let mut hom: f64 = 0.0;
        let mut inhom: f64 = 0.0;
        for j in 0..self.grid.nodes() {
            let total: f64 = self.weights.iter().map(|w| w[j]).sum();
            let upper: f64 = self
                .levels()
                .filter(|&l| l >= 0)
                .map(|l| self.block_weights(l)[j])
                .sum();
            inhom = inhom.max((self.low[j] + upper - 1.0).abs());
            if j != 0 {
                hom = hom.max((total - 1.0).abs());
            }
        }
        PartitionDefect {
            homogeneous: hom,
            inhomogeneous: inhom,
        }
    }

    /// `Δ_l f`
    pub fn block(&self, f: &Field, l: i32) -> Result<Field> {
        self.check_grid(f.grid())?;
        self.check_level(l)?;
        Ok(self.block_spectrum(&f.forward(), l).inverse())
    }

    pub(crate) fn block_spectrum(&self, s: &Spectrum, l: i32) -> Spectrum {
        let w = self.block_weights(l);
        s.apply_real(|j| w[j])
    }

    pub fn block_vector(&self, u: &VectorField, l: i32) -> Result<VectorField> {
        let comps = u
            .components()
            .iter()
            .map(|c| self.block(c, l))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }

    /// `‖Σ_l Δ_l f − (f − f̄)‖_{L^∞}`, relative to `‖f‖_{L^∞}`.
    pub fn reconstruction_defect(&self, f: &Field) -> Result<f64> {
        let mut acc = Field::zeros(*f.grid());
        for l in self.levels() {
            acc = acc.add(&self.block(f, l)?);
        }
        let mean = f.mean();
        let scale = f.norm_linf().max(f64::MIN_POSITIVE);
        Ok(acc.zip_map(f, |a, v| a - (v - mean)).norm_linf() / scale)
    }

    /// `S_l f = f̂(0) + Σ_{j_min ≤ k ≤ l−1} Δ_k f`, i.e. the multiplier
    /// `χ(2^{-l}ξ)`. Valid for `j_min ≤ l ≤ j_max + 1`; the upper end is the
    /// identity.
    pub fn low_cutoff(&self, f: &Field, l: i32) -> Result<Field> {
        self.check_grid(f.grid())?;
        if l < self.j_min || l > self.j_max + 1 {
            return Err(Error::BlockOutOfRange {
                l,
                min: self.j_min,
                max: self.j_max + 1,
            });
        }
        let s = f.forward();
        let below: Vec<f64> = (0..self.grid.nodes())
            .map(|j| {
                if j == 0 {
                    1.0
                } else {
                    (self.j_min..l).map(|k| self.block_weights(k)[j]).sum()
                }
            })
            .collect();
        Ok(s.apply_real(|j| below[j]).inverse())
    }
}
