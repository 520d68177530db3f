use serde::{Deserialize, Serialize};

use super::DyadicPartition;
use crate::error::{Error, Result};
use crate::spectral::{Field, Spectrum};

/// Exponent in `[1, ∞]`; `f64::INFINITY` encodes `∞`.
pub type Exponent = f64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: Exponent,
    pub r: Exponent,
    pub homogeneous: bool,
}

impl BesovSpec {
    pub fn homogeneous(s: f64, p: Exponent, r: Exponent) -> Self {
        Self {
            s,
            p,
            r,
            homogeneous: true,
        }
    }

    pub fn inhomogeneous(s: f64, p: Exponent, r: Exponent) -> Self {
        Self {
            s,
            p,
            r,
            homogeneous: false,
        }
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.r >= 1.0) || !self.s.is_finite() {
            return Err(Error::InvalidArgument(format!("bad Besov indices {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChemLernerSpec {
    pub besov: BesovSpec,
    /// Time exponent in `[1, ∞]`.
    pub rho: Exponent,
}

/// Unweighted block norms `‖Δ_l f‖_{L^p}` of one snapshot.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockTable {
    pub p: Exponent,
    pub homogeneous: bool,
    pub levels: Vec<i32>,
    pub norms: Vec<f64>,
}

/// `‖Σ_i |Δ_l f_i|²‖^{1/2}_{L^p}`-style block norms of a multi-component
/// field (a scalar is a one-element slice).
///
/// For `p = 2` the norms come from Parseval without inverse transforms.
pub fn block_table(
    components: &[Field],
    p: Exponent,
    homogeneous: bool,
    part: &DyadicPartition,
) -> Result<BlockTable> {
    for c in components {
        if c.grid() != part.grid() {
            return Err(Error::GridMismatch);
        }
    }
    let spectra: Vec<Spectrum> = components.iter().map(Field::forward).collect();
    Ok(block_table_spectral(&spectra, p, homogeneous, part))
}

pub(crate) fn block_table_spectral(
    spectra: &[Spectrum],
    p: Exponent,
    homogeneous: bool,
    part: &DyadicPartition,
) -> BlockTable {
    let levels: Vec<i32> = if homogeneous {
        part.levels().collect()
    } else {
        part.inhomogeneous_levels()
    };
    let grid = *part.grid();
    let nodes = grid.nodes() as f64;
    let norms = levels
        .iter()
        .map(|&l| {
            let w = if homogeneous {
                part.block_weights(l)
            } else {
                part.inhomogeneous_weights(l).expect("level present")
            };
            if p == 2.0 {
                let e: f64 = spectra
                    .iter()
                    .map(|s| {
                        s.modes()
                            .iter()
                            .zip(w)
                            .map(|(c, w)| c.norm_sqr() * w * w)
                            .sum::<f64>()
                    })
                    .sum();
                (e * grid.volume()).sqrt() / nodes
            } else {
                let blocks: Vec<Field> = spectra
                    .iter()
                    .map(|s| s.apply_real(|j| w[j]).inverse())
                    .collect();
                magnitude_lp(&blocks, p)
            }
        })
        .collect();
    BlockTable {
        p,
        homogeneous,
        levels,
        norms,
    }
}

fn magnitude_lp(components: &[Field], p: Exponent) -> f64 {
    if components.len() == 1 {
        return components[0].norm_lp(p);
    }
    let mut sq = Field::zeros(*components[0].grid());
    for c in components {
        sq = sq.zip_map(c, |a, b| a + b * b);
    }
    sq.map(f64::sqrt).norm_lp(p)
}

/// `ℓ^r` aggregate of a sequence; `r = ∞` is the supremum.
pub fn lr_sum(values: impl IntoIterator<Item = f64>, r: Exponent) -> f64 {
    if r.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else if r == 1.0 {
        values.into_iter().sum()
    } else {
        values.into_iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

impl BlockTable {
    /// Besov aggregate `‖(2^{ls} ‖Δ_l f‖_{L^p})_l‖_{ℓ^r}` for regularity `s`.
    pub fn besov(&self, s: f64, r: Exponent) -> f64 {
        lr_sum(self.weighted(s), r)
    }

    pub fn weighted(&self, s: f64) -> impl Iterator<Item = f64> + '_ {
        self.levels
            .iter()
            .zip(&self.norms)
            .map(move |(&l, &n)| 2f64.powf(l as f64 * s) * n)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockRow {
    pub l: i32,
    pub block_norm: f64,
    pub weighted: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub spec: BesovSpec,
    pub value: f64,
    /// Homogeneous sums only range over the shells the grid resolves.
    pub shells: (i32, i32),
    pub per_block_table: Vec<BlockRow>,
}

pub fn besov_norm(f: &Field, spec: &BesovSpec, part: &DyadicPartition) -> Result<f64> {
    besov_norm_components(std::slice::from_ref(f), spec, part)
}

pub fn besov_norm_components(
    components: &[Field],
    spec: &BesovSpec,
    part: &DyadicPartition,
) -> Result<f64> {
    spec.validate()?;
    Ok(block_table(components, spec.p, spec.homogeneous, part)?.besov(spec.s, spec.r))
}

pub fn besov_report(f: &Field, spec: &BesovSpec, part: &DyadicPartition) -> Result<NormReport> {
    spec.validate()?;
    let table = block_table(std::slice::from_ref(f), spec.p, spec.homogeneous, part)?;
    let per_block_table = table
        .levels
        .iter()
        .zip(&table.norms)
        .zip(table.weighted(spec.s))
        .map(|((&l, &block_norm), weighted)| BlockRow {
            l,
            block_norm,
            weighted,
        })
        .collect();
    Ok(NormReport {
        spec: *spec,
        value: table.besov(spec.s, spec.r),
        shells: (part.j_min(), part.j_max()),
        per_block_table,
    })
}

impl NormReport {
    /// Per-block table as CSV (`l,block_norm,weighted`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,block_norm,weighted\n");
        for row in &self.per_block_table {
            out.push_str(&format!("{},{},{}\n", row.l, row.block_norm, row.weighted));
        }
        out
    }
}

/// Composite trapezoid `(∫ g^ρ dt)^{1/ρ}`; `ρ = ∞` is the sample maximum.
pub fn time_lebesgue(times: &[f64], values: &[f64], rho: Exponent) -> f64 {
    if rho.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(rho) + v[1].powf(rho)))
        .sum();
    integral.powf(1.0 / rho)
}

fn check_times(times: &[f64], samples: usize) -> Result<()> {
    if times.len() != samples {
        return Err(Error::InvalidArgument("one time per snapshot required".into()));
    }
    if times.len() < 2 {
        return Err(Error::InvalidArgument("at least two time samples required".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("time samples must be strictly increasing".into()));
    }
    Ok(())
}

/// `‖u‖_{L̃^ρ_T(B^s_{p,r})}` from per-snapshot block tables.
pub fn chemin_lerner_from_tables(
    times: &[f64],
    tables: &[BlockTable],
    spec: &ChemLernerSpec,
) -> Result<f64> {
    check_times(times, tables.len())?;
    spec.besov.validate()?;
    let levels = &tables[0].levels;
    let per_block = levels.iter().enumerate().map(|(i, &l)| {
        let series: Vec<f64> = tables.iter().map(|t| t.norms[i]).collect();
        2f64.powf(l as f64 * spec.besov.s) * time_lebesgue(times, &series, spec.rho)
    });
    Ok(lr_sum(per_block, spec.besov.r))
}

/// `‖u‖_{L^ρ_T(B^s_{p,r})}`: Besov norm first, then time.
pub fn lebesgue_besov_from_tables(
    times: &[f64],
    tables: &[BlockTable],
    spec: &ChemLernerSpec,
) -> Result<f64> {
    check_times(times, tables.len())?;
    let series: Vec<f64> = tables
        .iter()
        .map(|t| t.besov(spec.besov.s, spec.besov.r))
        .collect();
    Ok(time_lebesgue(times, &series, spec.rho))
}

/// Chemin-Lerner norm of a scalar trajectory `[(t, f(t))]`.
pub fn chemin_lerner_norm(
    trajectory: &[(f64, Field)],
    spec: &ChemLernerSpec,
    part: &DyadicPartition,
) -> Result<f64> {
    let times: Vec<f64> = trajectory.iter().map(|(t, _)| *t).collect();
    check_times(&times, trajectory.len())?;
    let tables = trajectory
        .iter()
        .map(|(_, f)| block_table(std::slice::from_ref(f), spec.besov.p, spec.besov.homogeneous, part))
        .collect::<Result<Vec<_>>>()?;
    chemin_lerner_from_tables(&times, &tables, spec)
}

/// Time grid on `[0, T]`: zero followed by `count` geometrically spaced
/// points from `t_first` to `T`, suited to dyadically decaying blocks.
pub fn graded_times(t_end: f64, t_first: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && t_first > 0.0 && t_first < t_end);
    let ratio = (t_end / t_first).powf(1.0 / (count - 1) as f64);
    let mut times = Vec::with_capacity(count + 1);
    times.push(0.0);
    for k in 0..count {
        times.push(t_first * ratio.powi(k as i32));
    }
    *times.last_mut().unwrap() = t_end;
    times
}
