//! Versioned TOML experiment configuration.

use std::path::{Path, PathBuf};

use korteweg_core::illposed::HorizonRule;
use korteweg_core::littlewood_paley::build_partition;
use korteweg_core::solver::PhysParams;
use korteweg_core::Grid;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "simulate-1.5")]
    Simulate15,
    #[serde(rename = "simulate-1.7")]
    Simulate17,
    #[serde(rename = "picard")]
    Picard,
    #[serde(rename = "linear-verify")]
    LinearVerify,
    #[serde(rename = "divergence-subsystem")]
    DivergenceSubsystem,
    #[serde(rename = "blowup-scan")]
    BlowupScan,
    #[serde(rename = "illposed-sweep")]
    IllposedSweep,
    #[serde(rename = "lp-selftest")]
    LpSelftest,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Simulate15 => "simulate-1.5",
            Experiment::Simulate17 => "simulate-1.7",
            Experiment::Picard => "picard",
            Experiment::LinearVerify => "linear-verify",
            Experiment::DivergenceSubsystem => "divergence-subsystem",
            Experiment::BlowupScan => "blowup-scan",
            Experiment::IllposedSweep => "illposed-sweep",
            Experiment::LpSelftest => "lp-selftest",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.dim, self.n, self.length).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    /// Fixed step; the CFL estimate is used when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Keep every n-th step as a snapshot.
    #[serde(default = "one_usize")]
    pub snapshot_every: usize,
}

fn default_cfl() -> f64 {
    korteweg_core::solver::DEFAULT_CFL
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    GaussianBump,
    TwoPhaseInterface,
    LacunaryFamily,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Preset(PresetConfig),
    Files(FileConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetConfig {
    pub preset: PresetName,
    /// Relative density perturbation (or field RMS for `random`).
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Bump radius or interface width, in units of the box length.
    #[serde(default = "default_width")]
    pub width: f64,
    /// Velocity amplitude: RMS for `random`, a `sin` profile along the
    /// first axis for the bump and the interface.
    #[serde(default)]
    pub velocity: f64,
    /// Member index of the lacunary family.
    #[serde(default = "default_member")]
    pub member: i32,
    /// Largest wavenumber of the `random` preset.
    #[serde(default = "default_kmax")]
    pub kmax: usize,
}

fn default_amplitude() -> f64 {
    0.1
}
fn default_width() -> f64 {
    0.1
}
fn default_member() -> i32 {
    4
}
fn default_kmax() -> usize {
    8
}

/// Field files in the binary layout of `korteweg_core::spectral::io`,
/// relative to the config file: the density `ρ` and one file per velocity
/// component (`v` for `simulate-1.7`, `u` otherwise).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub density: PathBuf,
    pub velocity: Vec<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_time_steps")]
    pub time_steps: usize,
    /// Apply `S_level` to the data first.
    #[serde(default)]
    pub smooth_level: Option<i32>,
}

fn default_iterations() -> usize {
    10
}
fn default_time_steps() -> usize {
    200
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            iterations: default_iterations(),
            time_steps: default_time_steps(),
            smooth_level: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearConfig {
    /// Number of output samples in `[0, T]`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Weight `α` of the cross term; `min(a, c)/8` when absent.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Regularity indices at which the smoothing constants are measured.
    #[serde(default = "default_regularities")]
    pub regularities: Vec<f64>,
}

fn default_samples() -> usize {
    101
}
fn default_regularities() -> Vec<f64> {
    vec![-0.5, 0.0, 0.5]
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            alpha: None,
            regularities: default_regularities(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupConfig {
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_k_max() -> u32 {
    10
}
fn default_eps() -> f64 {
    0.5
}

impl Default for BlowupConfig {
    fn default() -> Self {
        Self {
            k_max: default_k_max(),
            eps: default_eps(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IllposedConfig {
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_n_min")]
    pub n_min: i32,
    #[serde(default = "default_n_max")]
    pub n_max: i32,
    #[serde(default)]
    pub horizon: HorizonRule,
    /// Also run the nonlinear solver on every member.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "default_q_amplitude")]
    pub q_amplitude: f64,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_r() -> f64 {
    2.0
}
fn default_n_min() -> i32 {
    4
}
fn default_n_max() -> i32 {
    12
}
fn yes() -> bool {
    true
}
fn default_q_amplitude() -> f64 {
    1e-2
}
fn default_workers() -> usize {
    4
}

impl Default for IllposedConfig {
    fn default() -> Self {
        Self {
            r: default_r(),
            n_min: default_n_min(),
            n_max: default_n_max(),
            horizon: HorizonRule::default(),
            nonlinear: true,
            q_amplitude: default_q_amplitude(),
            workers: default_workers(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestConfig {
    /// Random fields for the Bernstein check.
    #[serde(default = "default_fields")]
    pub fields: usize,
}

fn default_fields() -> usize {
    100
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            fields: default_fields(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub grid: GridConfig,
    pub params: PhysParams,
    pub time: TimeConfig,
    #[serde(default)]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub picard: PicardConfig,
    #[serde(default)]
    pub linear: LinearConfig,
    #[serde(default)]
    pub blowup: BlowupConfig,
    #[serde(default)]
    pub illposed: IllposedConfig,
    #[serde(default)]
    pub selftest: SelftestConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "config schema version {} not supported (expected {SCHEMA_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    /// Reads the file and makes relative field paths absolute.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(InitialConfig::Files(f)) = &mut cfg.initial {
            f.density = base.join(&f.density);
            for v in &mut f.velocity {
                *v = base.join(&*v);
            }
        }
        Ok(cfg)
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let grid = self.grid.grid()?;
        build_partition(&grid).map_err(|e| CliError::Config(e.to_string()))?;
        let params = &self.params;
        match self.experiment {
            Experiment::Simulate17 => params.validate_effective(grid.dim()),
            _ => params.validate(grid.dim()),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;
        let t = &self.time;
        if !(t.t_end > 0.0 && t.t_end.is_finite()) {
            return bad(format!("t_end must be positive, got {}", t.t_end));
        }
        if t.dt.is_some_and(|dt| !(dt > 0.0 && dt.is_finite())) || !(t.cfl > 0.0) || t.snapshot_every == 0 {
            return bad("dt, cfl and snapshot_every must be positive".into());
        }
        match &self.initial {
            Some(InitialConfig::Files(f)) => {
                if f.velocity.len() != grid.dim() {
                    return bad(format!("need {} velocity files, got {}", grid.dim(), f.velocity.len()));
                }
                for p in std::iter::once(&f.density).chain(&f.velocity) {
                    if !p.is_file() {
                        return bad(format!("field file {} does not exist", p.display()));
                    }
                }
            }
            Some(InitialConfig::Preset(p)) => {
                if !(p.amplitude.is_finite() && p.width > 0.0 && p.velocity.is_finite()) {
                    return bad("preset amplitude, width and velocity must be finite, width positive".into());
                }
                if p.preset == PresetName::Random && 2 * p.kmax >= grid.n() {
                    return bad(format!("kmax {} too large for n = {}", p.kmax, grid.n()));
                }
            }
            None => {}
        }
        let needs_data = matches!(
            self.experiment,
            Experiment::Simulate15
                | Experiment::Simulate17
                | Experiment::Picard
                | Experiment::LinearVerify
                | Experiment::DivergenceSubsystem
        );
        if needs_data && self.initial.is_none() {
            return bad(format!("{} needs an [initial] table", self.experiment.name()));
        }
        if self.experiment == Experiment::Picard && (self.picard.iterations == 0 || self.picard.time_steps == 0) {
            return bad("picard iterations and time_steps must be positive".into());
        }
        if self.linear.samples < 3 {
            return bad("linear.samples must be at least 3".into());
        }
        if self.blowup.k_max == 0 || !(self.blowup.eps > 0.0) {
            return bad("blowup.k_max and blowup.eps must be positive".into());
        }
        let il = &self.illposed;
        if self.experiment == Experiment::IllposedSweep {
            if !(il.r > 1.0 && il.r.is_finite()) || il.n_min < 1 || il.n_max < il.n_min || il.workers == 0 {
                return bad("illposed needs 1 < r < ∞, 1 ≤ n_min ≤ n_max, workers ≥ 1".into());
            }
            if il.n_max > 20 {
                return bad(format!("illposed.n_max = {} exceeds 20", il.n_max));
            }
            il.horizon.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        if self.experiment == Experiment::LpSelftest && self.selftest.fields == 0 {
            return bad("selftest.fields must be positive".into());
        }
        Ok(())
    }
}
