use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_norm_components, BesovSpec, DyadicPartition, ANNULUS_INNER, ANNULUS_OUTER};
use crate::spectral::{Field, Grid, Spectrum, VectorField};

/// Lacunary data `Qu₀ⁿ = Σ_{l=first}^{n} a_l ∇ψ_l`, `a_l = 2^{−l(N/2−1)}/l`,
/// with `ψ_l` a coherent packet of every wavevector on which block `l` is
/// the only nonzero block, normalized by `‖∇ψ_l‖_{L²} = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IllposedFamily {
    pub dim: usize,
    /// Third Besov index of the uniform bound, `1 < r < ∞`.
    pub r: f64,
    pub first_shell: i32,
    /// Amplitude of the fixed density perturbation `q₀ = ε cos(x₁ − x_c)`.
    pub q_amplitude: f64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub n: i32,
    pub q0: Field,
    pub u0: VectorField,
    /// Point where every packet peaks.
    pub center: [f64; 2],
    pub norms: FamilyNorms,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FamilyNorms {
    /// `‖Qu₀ⁿ‖_{B^{N/2−1}_{2,r}}`
    pub b2r: f64,
    /// `‖Qu₀ⁿ‖_{B^{N/2−1}_{2,1}}`
    pub b21: f64,
    /// `(Σ l^{−r})^{1/r}` over the shells present.
    pub zeta_partial: f64,
    /// `Σ 1/l` over the shells present.
    pub harmonic_partial: f64,
}

impl IllposedFamily {
    pub fn new(dim: usize, r: f64, seed: u64) -> Self {
        Self {
            dim,
            r,
            first_shell: 1,
            q_amplitude: 1e-2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {}", self.dim)));
        }
        if !(self.r > 1.0 && self.r.is_finite()) {
            return Err(Error::InvalidArgument(format!("need 1 < r < ∞, got {}", self.r)));
        }
        if self.first_shell < 1 {
            return Err(Error::InvalidArgument("first shell must be at least 1".into()));
        }
        Ok(())
    }

    pub fn amplitude(&self, l: i32) -> f64 {
        2f64.powf(-(l as f64) * (self.dim as f64 / 2.0 - 1.0)) / l as f64
    }

    /// Smallest `2π`-periodic grid resolving member `n` inside the 2/3
    /// dealiasing band.
    pub fn member_grid(&self, n: i32) -> Result<Grid> {
        Grid::periodic(self.dim, 1usize << (n.max(self.first_shell) + 3) as u32)
    }

    pub fn center(&self, grid: &Grid) -> [f64; 2] {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let l = grid.length();
        let c = [rng.random::<f64>() * l, rng.random::<f64>() * l];
        if self.dim == 1 {
            [c[0], 0.0]
        } else {
            c
        }
    }

    pub fn build(&self, n: i32, part: &DyadicPartition) -> Result<FamilyMember> {
        self.validate()?;
        let grid = *part.grid();
        if grid.dim() != self.dim {
            return Err(Error::InvalidArgument("family and grid dimension differ".into()));
        }
        if n < self.first_shell {
            return Err(Error::InvalidArgument(format!(
                "member {n} below the first shell {}",
                self.first_shell
            )));
        }
        if n > part.j_max() - 2 {
            return Err(Error::BlockOutOfRange {
                l: n,
                min: self.first_shell,
                max: part.j_max() - 2,
            });
        }
        let center = self.center(&grid);
        let mut potential = Spectrum::zeros(grid);
        for l in self.first_shell..=n {
            let packet = packet_spectrum(&grid, l, center)?;
            potential = potential.add(&packet.scale(self.amplitude(l)));
        }
        let u0 = VectorField::new(
            (0..self.dim)
                .map(|a| potential.derivative(a).inverse())
                .collect(),
        )?;
        let q0 = Field::from_fn(grid, |x| self.q_amplitude * (x[0] - center[0]).cos());
        let norms = self.norms(n, &u0, part)?;
        Ok(FamilyMember {
            n,
            q0,
            u0,
            center,
            norms,
        })
    }

    fn norms(&self, n: i32, u0: &VectorField, part: &DyadicPartition) -> Result<FamilyNorms> {
        let s = self.dim as f64 / 2.0 - 1.0;
        let b2r = besov_norm_components(u0.components(), &BesovSpec::homogeneous(s, 2.0, self.r), part)?;
        let b21 = besov_norm_components(u0.components(), &BesovSpec::homogeneous(s, 2.0, 1.0), part)?;
        let ls = self.first_shell..=n;
        Ok(FamilyNorms {
            b2r,
            b21,
            zeta_partial: ls.clone().map(|l| (l as f64).powf(-self.r)).sum::<f64>().powf(1.0 / self.r),
            harmonic_partial: ls.map(|l| 1.0 / l as f64).sum(),
        })
    }
}

/// `ψ_l = c Σ cos(ξ·(x − x_c))` over one representative of each `±ξ` pair
/// seen by block `l` alone, with `‖∇ψ_l‖_{L²} = 1`.
fn packet_spectrum(grid: &Grid, l: i32, center: [f64; 2]) -> Result<Spectrum> {
    // block l is alone on 2^l·[ANNULUS_OUTER/2, 2·ANNULUS_INNER]
    let lo = 2f64.powi(l) * ANNULUS_OUTER / 2.0;
    let hi = 2f64.powi(l) * 2.0 * ANNULUS_INNER;
    let mut spec = Spectrum::zeros(*grid);
    let mut grad_sq = 0.0;
    let nodes = grid.nodes() as f64;
    let modes = spec.modes_mut();
    for j in 0..grid.nodes() {
        let idx = grid.mode_index(j);
        let representative = idx[0] > 0 || (idx[0] == 0 && idx[1] > 0);
        let r = grid.wavenumber_norm(j);
        if !representative || r < lo || r > hi || !grid.in_dealias_band(j) {
            continue;
        }
        let xi = grid.wavevector(j);
        let phase = -(xi[0] * center[0] + xi[1] * center[1]);
        let c = num_complex::Complex64::from_polar(0.5 * nodes, phase);
        modes[j] = c;
        let mirror = grid.join([grid.unsigned_index(-idx[0]), grid.unsigned_index(-idx[1])]);
        modes[mirror] = c.conj();
        grad_sq += r * r * grid.volume() / 2.0;
    }
    if grad_sq == 0.0 {
        return Err(Error::InvalidArgument(format!("no wavevector isolates shell {l}")));
    }
    Ok(spec.scale(1.0 / grad_sq.sqrt()))
}
