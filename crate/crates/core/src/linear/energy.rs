//! Shell energies with a `∇q·u` coupling and fitted exponential decay.

use serde::Serialize;

use super::propagator::LinearCoeffs;
use super::solve::LinearTrajectory;
use crate::error::{Error, Result};
use crate::littlewood_paley::DyadicPartition;
use crate::spectral::{gradient, Field, VectorField};

/// Largest `C` tolerated when fitting the forced decay inequality.
pub const DECAY_C_CAP: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyWeights {
    pub alpha: f64,
    pub kappa_bar: f64,
    /// Weight of `‖q_l‖²`; the pressure coefficient when `d > 0`.
    pub pressure: f64,
}

impl EnergyWeights {
    /// `α = min(a, c)/8`, `κ̄ = c`, pressure weight `d`.
    pub fn for_coeffs(c: &LinearCoeffs) -> Self {
        Self {
            alpha: c.a.min(c.c) / 8.0,
            kappa_bar: c.c,
            pressure: c.d,
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeEnergy {
    pub l: i32,
    pub alpha: f64,
    pub k: f64,
    /// Square root of the uncoupled energy `‖u_l‖² + κ̄‖∇q_l‖² (+ d‖q_l‖²)`.
    pub base: f64,
}

/// The quadratic pieces `‖u‖², ‖∇q‖², ‖q‖², ∫∇q·u`.
#[derive(Clone, Copy, Debug)]
pub struct EnergyParts {
    pub uu: f64,
    pub gg: f64,
    pub qq: f64,
    pub cross: f64,
}

impl EnergyParts {
    pub fn new(q: &Field, u: &VectorField) -> Result<Self> {
        if q.grid() != u.grid() {
            return Err(Error::GridMismatch);
        }
        let gq = gradient(q);
        Ok(Self {
            uu: u.inner(u),
            gg: gq.inner(&gq),
            qq: q.inner(q),
            cross: gq.inner(u),
        })
    }

    pub fn base(&self, w: &EnergyWeights) -> f64 {
        self.uu + w.kappa_bar * self.gg + w.pressure * self.qq
    }

    pub fn coupled(&self, w: &EnergyWeights) -> f64 {
        self.base(w) + 2.0 * w.alpha * self.cross
    }

    /// `½k² ≤ base ≤ (3/2)k²`
    pub fn sandwich_holds(&self, w: &EnergyWeights) -> bool {
        let (k2, base) = (self.coupled(w), self.base(w));
        let slack = 1e-12 * base;
        0.5 * k2 <= base + slack && base <= 1.5 * k2 + slack
    }
}

/// Largest `α` keeping the sandwich on this data, by bisection;
/// `f64::INFINITY` when the coupling integral vanishes.
pub fn alpha_boundary(parts: &EnergyParts, w: &EnergyWeights) -> f64 {
    if parts.cross == 0.0 || parts.base(w) == 0.0 {
        return f64::INFINITY;
    }
    let holds = |a: f64| parts.sandwich_holds(&w.with_alpha(a));
    let mut hi = 1.0;
    while holds(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    lo
}

/// Coupled shell energy `k_l` with `κ̄` and `α` (no pressure weight).
pub fn mode_energy(
    l: i32,
    q_l: &Field,
    u_l: &VectorField,
    alpha: f64,
    kappa_bar: f64,
) -> Result<ModeEnergy> {
    mode_energy_with(
        l,
        q_l,
        u_l,
        &EnergyWeights {
            alpha,
            kappa_bar,
            pressure: 0.0,
        },
    )
}

/// Coupled shell energy; rejects `α` when the sandwich with the uncoupled
/// energy fails.
pub fn mode_energy_with(
    l: i32,
    q_l: &Field,
    u_l: &VectorField,
    w: &EnergyWeights,
) -> Result<ModeEnergy> {
    if !(w.alpha >= 0.0 && w.kappa_bar > 0.0 && w.pressure >= 0.0) {
        return Err(Error::InvalidArgument(format!("bad energy weights {w:?}")));
    }
    let parts = EnergyParts::new(q_l, u_l)?;
    if !parts.sandwich_holds(w) {
        return Err(Error::EquivalenceViolation {
            alpha: w.alpha,
            boundary: alpha_boundary(&parts, w),
        });
    }
    Ok(ModeEnergy {
        l,
        alpha: w.alpha,
        k: parts.coupled(w).max(0.0).sqrt(),
        base: parts.base(w).sqrt(),
    })
}

/// `k_l` along a trajectory.
pub fn shell_energies(
    traj: &LinearTrajectory,
    l: i32,
    w: &EnergyWeights,
    part: &DyadicPartition,
) -> Result<Vec<ModeEnergy>> {
    (0..traj.len())
        .map(|i| {
            let q = part.block(&traj.q[i], l)?;
            let u = part.block_vector(&traj.u[i], l)?;
            mode_energy_with(l, &q, &u, w)
        })
        .collect()
}

/// `‖∇F_l‖ + ‖G_l‖` along a trajectory.
fn forcing_magnitudes(traj: &LinearTrajectory, l: i32, part: &DyadicPartition) -> Result<Vec<f64>> {
    (0..traj.len())
        .map(|i| {
            let f = part.block(&traj.f[i], l)?;
            let g = part.block_vector(&traj.g[i], l)?;
            Ok(gradient(&f).norm_l2() + g.norm_l2())
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub l: i32,
    /// Largest `K` such that
    /// `k_l(t) ≤ e^{−K4^l t}k_l(0) + C∫₀ᵗ e^{−K4^l(t−τ)}(‖∇F_l‖+‖G_l‖)dτ`
    /// at every sample; `+∞` for identically zero data.
    pub k_fit: f64,
    /// Smallest `C` at `k_fit` (0 when unforced).
    pub c_fit: f64,
    /// Largest signed excess of `k_l` over the fitted bound, relative to
    /// `max k_l`: ≤ 0 when the inequality holds, near 0 when it is tight.
    pub residual: f64,
    /// Whether some `K > 0` works.
    pub holds: bool,
}

/// `∫₀^{t_i} e^{−λ(t_i−τ)} φ(τ) dτ` for piecewise-linear `φ`, exactly.
fn exp_convolution(times: &[f64], phi: &[f64], lambda: f64) -> Vec<f64> {
    let mut out = vec![0.0; times.len()];
    for i in 1..times.len() {
        let h = times[i] - times[i - 1];
        let x = lambda * h;
        // ∫₀^h e^{−λ(h−s)} ds and ∫₀^h e^{−λ(h−s)} s/h ds
        let (w0, w1) = if x < 1e-4 {
            (
                h * (1.0 - x / 2.0 + x * x / 6.0),
                h * (0.5 - x / 6.0 + x * x / 24.0),
            )
        } else {
            let em = -(-x).exp_m1();
            (em / lambda, h * (x - em) / (x * x))
        };
        out[i] = (-x).exp() * out[i - 1] + phi[i - 1] * w0 + (phi[i] - phi[i - 1]) * w1;
    }
    out
}

fn min_constant(times: &[f64], k: &[f64], phi: &[f64], rate: f64) -> f64 {
    let conv = exp_convolution(times, phi, rate);
    let mut c: f64 = 0.0;
    for i in 1..times.len() {
        let excess = k[i] - (-rate * times[i]).exp() * k[0];
        if excess <= 0.0 {
            continue;
        }
        if conv[i] <= 0.0 {
            return f64::INFINITY;
        }
        c = c.max(excess / conv[i]);
    }
    c
}

/// Fits the decay inequality for shell `l` on a linear trajectory whose
/// first sample is the initial time.
pub fn verify_decay(
    l: i32,
    traj: &LinearTrajectory,
    w: &EnergyWeights,
    part: &DyadicPartition,
) -> Result<DecayFit> {
    if traj.len() < 3 {
        return Err(Error::InvalidArgument(
            "decay fit needs at least 3 samples".into(),
        ));
    }
    let t0 = traj.times[0];
    let times: Vec<f64> = traj.times.iter().map(|t| t - t0).collect();
    let k: Vec<f64> = shell_energies(traj, l, w, part)?.iter().map(|e| e.k).collect();
    let phi = forcing_magnitudes(traj, l, part)?;
    let scale = 4f64.powi(l);
    let k_max = k.iter().copied().fold(0.0, f64::max);
    let forced = phi.iter().any(|&p| p > 0.0);
    if k_max == 0.0 {
        return Ok(DecayFit {
            l,
            k_fit: f64::INFINITY,
            c_fit: 0.0,
            residual: 0.0,
            holds: true,
        });
    }
    let residual = |kf: f64, cf: f64| {
        let rate = kf * scale;
        let conv = exp_convolution(&times, &phi, rate);
        (0..times.len())
            .map(|i| k[i] - (-rate * times[i]).exp() * k[0] - cf * conv[i])
            .fold(f64::NEG_INFINITY, f64::max)
            / k_max
    };
    if !forced {
        let mut kf = f64::INFINITY;
        for i in 1..times.len() {
            if times[i] <= 0.0 {
                continue;
            }
            let ratio = if k[i] > 0.0 {
                (k[0] / k[i]).ln() / (scale * times[i])
            } else {
                f64::INFINITY
            };
            kf = kf.min(ratio);
        }
        let holds = kf > 0.0;
        return Ok(DecayFit {
            l,
            k_fit: kf,
            c_fit: 0.0,
            residual: if kf.is_finite() { residual(kf, 0.0) } else { 0.0 },
            holds,
        });
    }
    let c_of = |kf: f64| min_constant(&times, &k, &phi, kf * scale);
    let tiny = 1e-12;
    if c_of(tiny) > DECAY_C_CAP {
        return Ok(DecayFit {
            l,
            k_fit: 0.0,
            c_fit: c_of(tiny),
            residual: residual(tiny, DECAY_C_CAP),
            holds: false,
        });
    }
    let mut lo = tiny;
    let mut hi = 1.0;
    while c_of(hi) <= DECAY_C_CAP {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if c_of(mid) <= DECAY_C_CAP {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    let c_fit = c_of(lo);
    Ok(DecayFit {
        l,
        k_fit: lo,
        c_fit,
        residual: residual(lo, c_fit),
        holds: true,
    })
}

/// CSV rows `t,shell,k_l,q_l2,u_l2` for the given shells.
pub fn shell_table_csv(
    traj: &LinearTrajectory,
    levels: &[i32],
    w: &EnergyWeights,
    part: &DyadicPartition,
) -> Result<String> {
    let mut out = String::from("t,shell,k_l,q_l2,u_l2\n");
    for (i, &t) in traj.times.iter().enumerate() {
        for &l in levels {
            let q = part.block(&traj.q[i], l)?;
            let u = part.block_vector(&traj.u[i], l)?;
            let e = mode_energy_with(l, &q, &u, w)?;
            out.push_str(&format!("{t},{l},{},{},{}\n", e.k, q.norm_l2(), u.norm_l2()));
        }
    }
    Ok(out)
}

/// JSON summary of per-shell fits.
pub fn fits_json(fits: &[DecayFit]) -> String {
    let rows: Vec<serde_json::Value> = fits
        .iter()
        .map(|f| {
            serde_json::json!({
                "shell": f.l,
                "K": if f.k_fit.is_finite() { serde_json::json!(f.k_fit) } else { serde_json::json!("inf") },
                "C": f.c_fit,
                "residual": f.residual,
                "holds": f.holds,
            })
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("plain values serialize")
}
