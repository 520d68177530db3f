//! Fixed-point iteration `(q̄ⁿ, ūⁿ) = L⁻¹(F_{n−1}, G_{n−1})` around the free
//! pressureless flow `(q_L, u_L)`.

use serde::Serialize;

use super::params::PhysParams;
use super::system::{LogDensitySystem, SplitSystem, State};
use crate::error::{Error, Result};
use crate::linear::{duhamel, ModalState, Propagator};
use crate::littlewood_paley::{
    block_table_spectral, chemin_lerner_from_tables, BesovSpec, ChemLernerSpec, DyadicPartition,
};
use crate::spectral::{Field, Spectrum, VectorField};

/// Gaps this far below the free-flow norm are indistinguishable from roundoff.
const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct PicardOptions {
    pub t_end: f64,
    pub iterations: usize,
    /// Uniform time samples on which the iterates are represented.
    pub time_steps: usize,
}

impl PicardOptions {
    pub fn new(t_end: f64, iterations: usize) -> Self {
        Self {
            t_end,
            iterations,
            time_steps: 200,
        }
    }
}

/// The four transport pieces `u_L·∇q_L`, `ū·∇q_L`, `u_L·∇q̄`, `ū·∇q̄`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct TransportSplit {
    pub free_free: f64,
    pub bar_free: f64,
    pub free_bar: f64,
    pub bar_bar: f64,
}

#[derive(Clone, Debug)]
pub struct PicardStep {
    pub n: usize,
    /// `‖(q̄ⁿ − q̄ⁿ⁻¹, ūⁿ − ūⁿ⁻¹)‖_{F_T}`
    pub gap: f64,
    /// `gapₙ / gapₙ₋₁`, absent when either gap is at the roundoff floor.
    pub ratio: Option<f64>,
    /// `‖(q̄ⁿ, ūⁿ)‖_{F_T}`
    pub size: f64,
    /// `L¹_T L²` norms of the four transport pieces of `F_{n−1}`.
    pub transport: TransportSplit,
    /// `(qⁿ, uⁿ)` at `T`.
    pub state: State,
}

#[derive(Clone, Debug)]
pub struct PicardReport {
    pub times: Vec<f64>,
    /// `‖(q_L, u_L)‖_{F_T}`
    pub free_norm: f64,
    pub floor: f64,
    pub steps: Vec<PicardStep>,
    /// False when the gap grew over three consecutive iterations.
    pub contracted: bool,
    /// Full trajectory of the last iterate.
    pub trajectory: Vec<State>,
}

impl PicardReport {
    pub fn last(&self) -> Option<&PicardStep> {
        self.steps.last()
    }
}

/// `‖(q, u)‖_{F_T}`: `q ∈ L̃^∞(B^{N/2}) ∩ L̃^1(B^{N/2+2})`,
/// `u ∈ L̃^∞(B^{N/2−1}) ∩ L̃^1(B^{N/2+1})`, all with `p = 2`, `r = ∞`.
fn ft_norm(times: &[f64], w: &[ModalState], part: &DyadicPartition) -> Result<f64> {
    let half = part.grid().dim() as f64 / 2.0;
    let qt: Vec<_> = w
        .iter()
        .map(|m| block_table_spectral(std::slice::from_ref(&m.q), 2.0, true, part))
        .collect();
    let ut: Vec<_> = w
        .iter()
        .map(|m| block_table_spectral(&m.u, 2.0, true, part))
        .collect();
    let cl = |tables: &[_], s: f64, rho: f64| {
        chemin_lerner_from_tables(
            times,
            tables,
            &ChemLernerSpec {
                besov: BesovSpec::homogeneous(s, 2.0, f64::INFINITY),
                rho,
            },
        )
    };
    Ok(cl(&qt, half, f64::INFINITY)?
        + cl(&qt, half + 2.0, 1.0)?
        + cl(&ut, half - 1.0, f64::INFINITY)?
        + cl(&ut, half + 1.0, 1.0)?)
}

fn transport(u: &[Field], q: &Spectrum) -> Field {
    u.iter()
        .enumerate()
        .fold(Field::zeros(*q.grid()), |acc, (a, ua)| acc.add(&ua.mul(&q.derivative(a).inverse())))
}

fn time_l1(times: &[f64], series: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(series.windows(2))
        .map(|(t, s)| 0.5 * (t[1] - t[0]) * (s[0] + s[1]))
        .sum()
}

/// Sources `(F, G)` of one iterate and the sizes of the transport pieces.
fn sources(
    sys: &LogDensitySystem,
    free: &ModalState,
    bar: &ModalState,
) -> Result<(ModalState, [f64; 4])> {
    let d = sys.params.sound_speed_sq();
    let free_d = ModalState {
        q: free.q.dealias(),
        u: free.u.iter().map(Spectrum::dealias).collect(),
    };
    let bar_d = ModalState {
        q: bar.q.dealias(),
        u: bar.u.iter().map(Spectrum::dealias).collect(),
    };
    let ul: Vec<Field> = free_d.u.iter().map(Spectrum::inverse).collect();
    let ub: Vec<Field> = bar_d.u.iter().map(Spectrum::inverse).collect();
    let pieces = [
        transport(&ul, &free_d.q),
        transport(&ub, &free_d.q),
        transport(&ul, &bar_d.q),
        transport(&ub, &bar_d.q),
    ];
    let sizes = [0, 1, 2, 3].map(|i| pieces[i].norm_l2());
    let total = pieces.iter().skip(1).fold(pieces[0].clone(), |acc, p| acc.add(p));
    let f = total.forward().dealias().scale(-1.0);
    let full = free.axpy(1.0, bar);
    // the residual carries −(∇F − d∇q); the Picard source carries all of −∇F
    let n = sys.residual(&full)?;
    let g = n
        .u
        .iter()
        .enumerate()
        .map(|(j, s)| s.add(&full.q.dealias().derivative(j).scale(-d)))
        .collect();
    Ok((ModalState { q: f, u: g }, sizes))
}

/// Iterates the scheme from `(q0, u0)` (smooth the data first with
/// [`super::smooth_data`] if needed).
pub fn picard_iterate(
    q0: &Field,
    u0: &VectorField,
    params: &PhysParams,
    opts: &PicardOptions,
    part: &DyadicPartition,
) -> Result<PicardReport> {
    let grid = *q0.grid();
    if u0.grid() != &grid || part.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    params.validate(grid.dim())?;
    if !(opts.t_end > 0.0 && opts.t_end.is_finite()) || opts.time_steps == 0 {
        return Err(Error::InvalidArgument("picard needs T > 0 and at least one time step".into()));
    }
    let sys = LogDensitySystem {
        grid,
        params: *params,
    };
    let prop = Propagator::new(grid, &params.pressureless_coeffs())?;
    let m = opts.time_steps;
    let times: Vec<f64> = (0..=m).map(|k| opts.t_end * k as f64 / m as f64).collect();
    let w0 = ModalState::from_fields(q0, u0);
    let free = duhamel(&prop, &w0, None, &times);
    let free_norm = ft_norm(&times, &free, part)?;
    let floor = ROUNDOFF_FLOOR * free_norm.max(f64::MIN_POSITIVE);
    let zero = w0.scale(0.0);

    let to_state = |w: &ModalState, t: f64| {
        let (q, u) = w.to_fields();
        State::new(q, u, t)
    };
    let mut bar: Vec<ModalState> = vec![zero.clone(); times.len()];
    let mut steps: Vec<PicardStep> = Vec::new();
    let mut growth = 0;
    let mut contracted = true;
    for n in 1..=opts.iterations {
        let mut forcing = Vec::with_capacity(times.len());
        let mut split = vec![[0.0; 4]; times.len()];
        for (k, (fr, br)) in free.iter().zip(&bar).enumerate() {
            let (src, sizes) = sources(&sys, fr, br)?;
            forcing.push(src);
            split[k] = sizes;
        }
        let piece = |i: usize| time_l1(&times, &split.iter().map(|s| s[i]).collect::<Vec<_>>());
        let next = duhamel(&prop, &zero, Some((&times, &forcing)), &times);
        let delta: Vec<ModalState> = next.iter().zip(&bar).map(|(a, b)| a.axpy(-1.0, b)).collect();
        let gap = ft_norm(&times, &delta, part)?;
        let size = ft_norm(&times, &next, part)?;
        let ratio = match steps.last() {
            Some(prev) if prev.gap > floor && gap > floor => Some(gap / prev.gap),
            _ => None,
        };
        if !gap.is_finite() {
            return Err(Error::NonFinite("picard iterate"));
        }
        growth = if ratio.is_some_and(|r| r > 1.0) { growth + 1 } else { 0 };
        let state = to_state(&free[m].axpy(1.0, &next[m]), opts.t_end)?;
        steps.push(PicardStep {
            n,
            gap,
            ratio,
            size,
            transport: TransportSplit {
                free_free: piece(0),
                bar_free: piece(1),
                free_bar: piece(2),
                bar_bar: piece(3),
            },
            state,
        });
        bar = next;
        if growth >= 3 {
            contracted = false;
            break;
        }
    }
    let trajectory = free
        .iter()
        .zip(&bar)
        .zip(&times)
        .map(|((f, b), &t)| to_state(&f.axpy(1.0, b), t))
        .collect::<Result<Vec<_>>>()?;
    Ok(PicardReport {
        times,
        free_norm,
        floor,
        steps,
        contracted,
        trajectory,
    })
}
