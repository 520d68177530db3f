use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, Spectrum};

/// Constant coefficients of
/// `∂_t q + div u = F`, `∂_t u − aΔu − b∇div u − c∇Δq + d∇q = G`.
/// `d = 0` is the pressureless system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl LinearCoeffs {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let coeffs = Self { a, b, c, d };
        coeffs.validate()?;
        Ok(coeffs)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c, d } = *self;
        if !(a > 0.0 && a + b > 0.0 && c > 0.0 && d >= 0.0) || !(a + b + c + d).is_finite() {
            return Err(Error::InvalidArgument(format!(
                "linear coefficients need a > 0, a + b > 0, c > 0, d >= 0; got {self:?}"
            )));
        }
        Ok(())
    }

    pub(crate) fn symbol(&self) -> Symbol {
        Symbol {
            e: 0.0,
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
        }
    }
}

/// `∂_t s = eΔs − div w`, `∂_t w = aΔw + b∇div w + c∇Δs − d∇s`.
///
/// Covers both linearized systems: the log-density one (`e = 0`) and the
/// effective-velocity one (`e = κ/μ̄`, `c = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Symbol {
    pub e: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// `exp(tM)` for a real 2×2 matrix, row-major.
///
/// With `τ = tr M / 2`, `N = M − τI` and `δ = τ² − det M` one has `N² = δI`,
/// so `exp(tM) = e^{τt}(C(t) I + S(t) N)` with `C = cosh(√δ t)`,
/// `S = sinh(√δ t)/√δ`. The defective case `δ = 0` reduces to
/// `e^{τt}(I + tN)`; near it a short series is used.
pub fn expm2(m: [[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
    let tau = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let delta = tau * tau - det;
    let x = delta * t * t;
    let (c, s) = if x.abs() < 1e-6 {
        let e = (tau * t).exp();
        (
            e * (1.0 + x / 2.0 + x * x / 24.0),
            e * t * (1.0 + x / 6.0 + x * x / 120.0),
        )
    } else if delta > 0.0 {
        // split into the two real exponentials to avoid cosh overflow
        let r = delta.sqrt();
        let hi = ((tau + r) * t).exp();
        let lo = ((tau - r) * t).exp();
        (0.5 * (hi + lo), (hi - lo) / (2.0 * r))
    } else {
        let w = (-delta).sqrt();
        let e = (tau * t).exp();
        (e * (w * t).cos(), e * (w * t).sin() / w)
    };
    [
        [c + s * (m[0][0] - tau), s * m[0][1]],
        [s * m[1][0], c + s * (m[1][1] - tau)],
    ]
}

/// Eigenvalues of a real 2×2 matrix.
pub fn eigenvalues2(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tau = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let root = Complex64::new(tau * tau - det, 0.0).sqrt();
    [tau + root, tau - root]
}

/// ODE generator for `(q̂, û_1, …, û_N)` at wavevector `ξ` (length 1 or 2).
///
/// `q̂' = −i ξ·û`, `û' = −a|ξ|²û − b ξ(ξ·û) − i ξ (c|ξ|² + d) q̂`.
pub fn mode_matrix(xi: &[f64], coeffs: &LinearCoeffs) -> Vec<Vec<Complex64>> {
    let dim = xi.len();
    let k2: f64 = xi.iter().map(|x| x * x).sum();
    let i = Complex64::i();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim + 1]; dim + 1];
    for j in 0..dim {
        m[0][j + 1] = -i * xi[j];
        m[j + 1][0] = -i * xi[j] * (coeffs.c * k2 + coeffs.d);
        m[j + 1][j + 1] -= coeffs.a * k2;
        for l in 0..dim {
            m[j + 1][l + 1] -= coeffs.b * xi[j] * xi[l];
        }
    }
    m
}

/// Real 2×2 generator of `(q̂, i ξ̂·û)` on a mode with `|ξ|² = k2` and
/// first-derivative magnitude `kt`; transverse velocity decays at `−a k2`.
pub(crate) fn longitudinal_block(sym: &Symbol, k2: f64, kt: f64) -> [[f64; 2]; 2] {
    [
        [-sym.e * k2, -kt],
        [kt * (sym.c * k2 + sym.d), -(sym.a * k2 + sym.b * kt * kt)],
    ]
}

pub fn longitudinal_matrix(k: f64, coeffs: &LinearCoeffs) -> [[f64; 2]; 2] {
    longitudinal_block(&coeffs.symbol(), k * k, k)
}

#[derive(Clone, Copy, Debug)]
struct ModeGeometry {
    k2: f64,
    kt: f64,
    unit: [f64; 2],
}

#[derive(Clone, Copy, Debug)]
struct ModeStep {
    long: [[f64; 2]; 2],
    trans: f64,
}

/// Exact solution operator of a constant-coefficient symbol on one grid.
///
/// First derivatives use the grid's odd wavevector (zero Nyquist), matching
/// the spectral operators, so propagated real fields stay real.
#[derive(Clone, Debug)]
pub struct Propagator {
    grid: Grid,
    sym: Symbol,
    modes: Vec<ModeGeometry>,
}

/// `exp(hL)` tabulated per mode for a fixed step `h`.
#[derive(Clone, Debug)]
pub struct StepOperator<'a> {
    prop: &'a Propagator,
    h: f64,
    steps: Vec<ModeStep>,
}

impl Propagator {
    pub fn new(grid: Grid, coeffs: &LinearCoeffs) -> Result<Self> {
        coeffs.validate()?;
        Ok(Self::from_symbol(grid, coeffs.symbol()))
    }

    pub(crate) fn from_symbol(grid: Grid, sym: Symbol) -> Self {
        let modes = (0..grid.nodes())
            .map(|j| {
                let xi = grid.wavevector(j);
                let odd = grid.odd_wavevector(j);
                let kt = (odd[0] * odd[0] + odd[1] * odd[1]).sqrt();
                let unit = if kt > 0.0 {
                    [odd[0] / kt, odd[1] / kt]
                } else {
                    [0.0, 0.0]
                };
                ModeGeometry {
                    k2: xi[0] * xi[0] + xi[1] * xi[1],
                    kt,
                    unit,
                }
            })
            .collect();
        Self { grid, sym, modes }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn mode_step(&self, g: &ModeGeometry, t: f64) -> ModeStep {
        ModeStep {
            long: expm2(longitudinal_block(&self.sym, g.k2, g.kt), t),
            trans: (-self.sym.a * g.k2 * t).exp(),
        }
    }

    /// Tabulates `exp(hL)` for repeated application.
    pub fn step_operator(&self, h: f64) -> StepOperator<'_> {
        StepOperator {
            prop: self,
            h,
            steps: self.modes.iter().map(|g| self.mode_step(g, h)).collect(),
        }
    }

    /// `exp(tL)(q̂, û)`.
    pub fn evolve(&self, t: f64, q: &Spectrum, u: &[Spectrum]) -> (Spectrum, Vec<Spectrum>) {
        let steps: Vec<ModeStep> = self.modes.iter().map(|g| self.mode_step(g, t)).collect();
        apply_steps(&self.modes, &steps, q, u)
    }

    /// Largest eigenvalue real part over modes with a nonzero first
    /// derivative (the mean and pure Nyquist modes are excluded); negative
    /// means every such mode decays.
    pub fn spectral_abscissa(&self) -> f64 {
        self.modes
            .iter()
            .filter(|g| g.kt > 0.0)
            .map(|g| {
                let ev = eigenvalues2(longitudinal_block(&self.sym, g.k2, g.kt));
                let long = ev[0].re.max(ev[1].re);
                if self.grid.dim() > 1 {
                    long.max(-self.sym.a * g.k2)
                } else {
                    long
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl StepOperator<'_> {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn apply(&self, q: &Spectrum, u: &[Spectrum]) -> (Spectrum, Vec<Spectrum>) {
        apply_steps(&self.prop.modes, &self.steps, q, u)
    }
}

fn apply_steps(
    modes: &[ModeGeometry],
    steps: &[ModeStep],
    q: &Spectrum,
    u: &[Spectrum],
) -> (Spectrum, Vec<Spectrum>) {
    let dim = u.len();
    let mut qo = q.clone();
    let mut uo: Vec<Spectrum> = u.to_vec();
    let i = Complex64::i();
    let qm = qo.modes_mut();
    let mut um: Vec<&mut [Complex64]> = uo.iter_mut().map(|s| s.modes_mut()).collect();
    for (j, (g, st)) in modes.iter().zip(steps).enumerate() {
        let mut w = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            w += um[a][j] * g.unit[a];
        }
        let y = i * w;
        let q0 = qm[j];
        let q1 = q0 * st.long[0][0] + y * st.long[0][1];
        let y1 = q0 * st.long[1][0] + y * st.long[1][1];
        let w1 = -i * y1;
        for a in 0..dim {
            let transverse = um[a][j] - w * g.unit[a];
            um[a][j] = transverse * st.trans + w1 * g.unit[a];
        }
        qm[j] = q1;
    }
    (qo, uo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::bandlimited_field;

    fn mat_exp_series(m: [[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
        // scaling and squaring with a long Taylor series
        let s = 6;
        let h = t / 2f64.powi(s);
        let mut e = [[1.0, 0.0], [0.0, 1.0]];
        let mut term = [[1.0, 0.0], [0.0, 1.0]];
        for k in 1..30 {
            let mut next = [[0.0; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    next[r][c] = (term[r][0] * m[0][c] + term[r][1] * m[1][c]) * h / k as f64;
                }
            }
            term = next;
            for r in 0..2 {
                for c in 0..2 {
                    e[r][c] += term[r][c];
                }
            }
        }
        for _ in 0..s {
            let mut sq = [[0.0; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    sq[r][c] = e[r][0] * e[0][c] + e[r][1] * e[1][c];
                }
            }
            e = sq;
        }
        e
    }

    #[test]
    fn expm_matches_series_in_all_regimes() {
        let cases = [
            [[-1.0, 2.0], [0.5, -3.0]],  // real distinct
            [[-1.0, -1.0], [2.0, -1.0]], // complex
            [[0.0, 1.0], [-1.0, -2.0]],  // defective, double −1
            [[-2.0, 1.0], [0.0, -2.0]],  // Jordan block
            [[0.0, 0.0], [0.0, 0.0]],
        ];
        for m in cases {
            for t in [0.0, 0.3, 1.7] {
                let a = expm2(m, t);
                let b = mat_exp_series(m, t);
                for r in 0..2 {
                    for c in 0..2 {
                        assert!((a[r][c] - b[r][c]).abs() < 1e-10, "{m:?} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn stiff_block_does_not_overflow() {
        let m = longitudinal_matrix(1e3, &LinearCoeffs::new(1.0, 1.0, 1.0, 0.0).unwrap());
        let e = expm2(m, 1.0);
        assert!(e.iter().flatten().all(|v| v.is_finite() && v.abs() < 1.0));
    }

    #[test]
    fn zero_wavevector_gives_zero_generator() {
        let c = LinearCoeffs::new(1.0, 0.5, 2.0, 1.0).unwrap();
        let m = mode_matrix(&[0.0, 0.0], &c);
        assert!(m.iter().flatten().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn unit_coefficients_give_damped_rotation() {
        let c = LinearCoeffs::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let ev = eigenvalues2(longitudinal_matrix(1.0, &c));
        let m = longitudinal_matrix(1.0, &c);
        assert!((m[0][0] + m[1][1] + 2.0).abs() < 1e-15);
        assert!((m[0][0] * m[1][1] - m[0][1] * m[1][0] - 2.0).abs() < 1e-15);
        for z in ev {
            assert!((z.re + 1.0).abs() < 1e-14 && (z.im.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn full_matrix_has_transverse_eigenvector() {
        let c = LinearCoeffs::new(0.7, 0.4, 1.3, 0.2).unwrap();
        let xi = [0.6, -1.1];
        let m = mode_matrix(&xi, &c);
        // (0, ξ⊥) is an eigenvector with eigenvalue −a|ξ|²
        let v = [0.0, 1.1, 0.6];
        let k2 = xi[0] * xi[0] + xi[1] * xi[1];
        for r in 0..3 {
            let mv: Complex64 = (0..3).map(|c| m[r][c] * v[c]).sum();
            assert!((mv - Complex64::new(-c.a * k2 * v[r], 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenvalues_strictly_stable_across_sweep() {
        let grid = [0.5, 1.0, 2.0];
        for &a in &grid {
            for &b in &[0.0, 0.5, 1.0, 2.0] {
                for &c in &grid {
                    for &d in &[0.0, 1.0] {
                        let co = LinearCoeffs::new(a, b, c, d).unwrap();
                        for e in -30..=30 {
                            let k = 2f64.powf(e as f64 / 3.0);
                            for z in eigenvalues2(longitudinal_matrix(k, &co)) {
                                assert!(z.re < 0.0, "{co:?} k={k}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn propagator_semigroup_and_reality() {
        let g = Grid::periodic(2, 32).unwrap();
        let c = LinearCoeffs::new(1.0, 0.5, 1.0, 1.0).unwrap();
        let p = Propagator::new(g, &c).unwrap();
        let q = bandlimited_field(g, 10, 1.0, 1).forward();
        let u: Vec<Spectrum> = (0..2)
            .map(|s| bandlimited_field(g, 10, 1.0, 2 + s).forward())
            .collect();
        let (q1, u1) = p.evolve(0.03, &q, &u);
        let (q2, u2) = p.evolve(0.05, &q1, &u1);
        let (qd, ud) = p.evolve(0.08, &q, &u);
        let diff = |a: &Spectrum, b: &Spectrum| a.inverse().sub(&b.inverse()).norm_linf();
        assert!(diff(&q2, &qd) < 1e-10);
        for k in 0..2 {
            assert!(diff(&u2[k], &ud[k]) < 1e-10);
            assert!(ud[k].max_conjugate_asymmetry() < 1e-12);
        }
        let op = p.step_operator(0.08);
        let (qs, _) = op.apply(&q, &u);
        assert!(diff(&qs, &qd) < 1e-14);
        assert!(p.spectral_abscissa() < 0.0);
    }
}
