//! Seeded band-limited random fields.
//!
//! Coefficients are drawn in a canonical wavevector order that depends only
//! on `kmax` and the dimension, so the same seed produces the same continuum
//! function on every grid that resolves it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Field, Grid, Spectrum};

/// Random real field with integer wavevectors `0 < |k_i| ≤ kmax` (zero mean),
/// scaled so that its root-mean-square value equals `rms`.
pub fn bandlimited_field(grid: Grid, kmax: usize, rms: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bandlimited_with(grid, kmax, rms, &mut rng)
}

pub fn bandlimited_with(grid: Grid, kmax: usize, rms: f64, rng: &mut impl Rng) -> Field {
    assert!(
        (kmax as i64) < (grid.n() / 2) as i64,
        "kmax {kmax} not resolved by n = {}",
        grid.n()
    );
    let k = kmax as i64;
    let mut coeffs: Vec<([i64; 2], Complex64)> = Vec::new();
    let second = if grid.dim() == 2 { k } else { 0 };
    for a in -k..=k {
        for b in -second..=second {
            // one representative per conjugate pair
            if a < 0 || (a == 0 && b <= 0) {
                continue;
            }
            let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            coeffs.push(([a, b], c));
        }
    }
    let power: f64 = 2.0 * coeffs.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>();
    let scale = if power > 0.0 { rms / power.sqrt() } else { 0.0 };
    let nodes = grid.nodes() as f64;
    let mut spec = Spectrum::zeros(grid);
    let modes = spec.modes_mut();
    for ([a, b], c) in coeffs {
        let c = c * scale * nodes;
        let idx = grid.join([grid.unsigned_index(a), grid.unsigned_index(b)]);
        let mirror = grid.join([grid.unsigned_index(-a), grid.unsigned_index(-b)]);
        modes[idx] = c;
        modes[mirror] = c.conj();
    }
    spec.inverse()
}

/// Single Fourier mode `cos(ξ·x + phase)` normalized to unit `L²` norm.
pub fn single_mode(grid: Grid, k: [i64; 2], phase: f64) -> Field {
    let f = grid.fundamental();
    let raw = Field::from_fn(grid, |x| (f * (k[0] as f64 * x[0] + k[1] as f64 * x[1]) + phase).cos());
    let norm = raw.norm_l2();
    raw.scale(1.0 / norm)
}
