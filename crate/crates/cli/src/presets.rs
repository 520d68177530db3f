//! Initial data: named presets or field files.

use korteweg_core::illposed::IllposedFamily;
use korteweg_core::littlewood_paley::build_partition;
use korteweg_core::solver::{effective_velocity, PhysParams, State};
use korteweg_core::spectral::io::{load_binary, load_csv};
use korteweg_core::spectral::random::bandlimited_field;
use korteweg_core::{Field, Grid, VectorField};

use crate::config::{ExperimentConfig, InitialConfig, PresetConfig, PresetName};
use crate::error::CliError;

/// `x − c` wrapped into `[−L/2, L/2)`.
fn wrapped(x: f64, c: f64, l: f64) -> f64 {
    (x - c + 0.5 * l).rem_euclid(l) - 0.5 * l
}

fn density(grid: Grid, p: &PresetConfig, rho_ref: f64, seed: u64) -> Result<Field, CliError> {
    let l = grid.length();
    let dim = grid.dim();
    let c = 0.5 * l;
    let w = p.width * l;
    let a = p.amplitude;
    let rho = match p.preset {
        PresetName::GaussianBump => Field::from_fn(grid, |x| {
            let r2: f64 = (0..dim).map(|i| wrapped(x[i], c, l).powi(2)).sum();
            rho_ref * (1.0 + a * (-0.5 * r2 / (w * w)).exp())
        }),
        // a slab of the denser phase between L/4 and 3L/4 along the first axis
        PresetName::TwoPhaseInterface => Field::from_fn(grid, |x| {
            let d = wrapped(x[0], c, l).abs() - 0.25 * l;
            rho_ref * (1.0 + 0.5 * a * (1.0 - (d / w).tanh()))
        }),
        PresetName::Random => {
            let f = bandlimited_field(grid, p.kmax, a, seed);
            f.map(|v| rho_ref * v.exp())
        }
        PresetName::LacunaryFamily => {
            let m = lacunary(grid, p, seed)?;
            m.0.map(|q| rho_ref * q.exp())
        }
    };
    if rho.min() <= 0.0 {
        return Err(CliError::Config(format!("preset density reaches {} ≤ 0", rho.min())));
    }
    Ok(rho)
}

fn lacunary(grid: Grid, p: &PresetConfig, seed: u64) -> Result<(Field, VectorField), CliError> {
    let mut fam = IllposedFamily::new(grid.dim(), 2.0, seed);
    fam.q_amplitude = p.amplitude;
    let part = build_partition(&grid)?;
    let m = fam.build(p.member, &part)?;
    Ok((m.q0, m.u0.scale(p.velocity)))
}

fn velocity(grid: Grid, p: &PresetConfig, seed: u64) -> Result<VectorField, CliError> {
    let dim = grid.dim();
    let k = grid.fundamental();
    let comps = match p.preset {
        PresetName::Random => (0..dim)
            .map(|i| bandlimited_field(grid, p.kmax, p.velocity, seed.wrapping_add(1 + i as u64)))
            .collect(),
        PresetName::LacunaryFamily => return Ok(lacunary(grid, p, seed)?.1),
        _ => (0..dim)
            .map(|i| {
                if i == 0 {
                    Field::from_fn(grid, |x| p.velocity * (k * x[0]).sin())
                } else {
                    Field::zeros(grid)
                }
            })
            .collect(),
    };
    Ok(VectorField::new(comps)?)
}

/// Log-density state `(ln ρ, u)`.
pub fn initial_state(cfg: &ExperimentConfig) -> Result<State, CliError> {
    let grid = cfg.grid.grid()?;
    match cfg.initial.as_ref() {
        Some(InitialConfig::Preset(p)) => {
            let rho = density(grid, p, cfg.params.rho_ref, cfg.seed)?;
            Ok(State::new(rho.map(f64::ln), velocity(grid, p, cfg.seed)?, 0.0)?)
        }
        Some(InitialConfig::Files(f)) => {
            let (rho, u) = read_files(grid, f)?;
            if rho.min() <= 0.0 {
                return Err(CliError::Config("density file is not positive".into()));
            }
            Ok(State::new(rho.map(f64::ln), u, 0.0)?)
        }
        None => Err(CliError::Config("no initial data".into())),
    }
}

/// `(ρ, v)` for `simulate-1.7`: presets go through the change of variables.
pub fn initial_effective(cfg: &ExperimentConfig, params: &PhysParams) -> Result<korteweg_core::solver::StateV, CliError> {
    let grid = cfg.grid.grid()?;
    match cfg.initial.as_ref() {
        Some(InitialConfig::Files(f)) => {
            let (rho, v) = read_files(grid, f)?;
            Ok(korteweg_core::solver::StateV::new(rho, v, 0.0)?)
        }
        Some(InitialConfig::Preset(p)) => {
            let rho = density(grid, p, cfg.params.rho_ref, cfg.seed)?;
            let s = State::new(rho.map(f64::ln), velocity(grid, p, cfg.seed)?, 0.0)?;
            Ok(effective_velocity(&s, params)?)
        }
        None => Err(CliError::Config("no initial data".into())),
    }
}

fn read_files(grid: Grid, f: &crate::config::FileConfig) -> Result<(Field, VectorField), CliError> {
    let load = |p: &std::path::Path| -> Result<Field, CliError> {
        let is_csv = p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let field = if is_csv { load_csv(p) } else { load_binary(p) };
        let field = field.map_err(|e| match e {
            korteweg_core::Error::NonFinite(_) => CliError::NonFinite(format!("{}: {e}", p.display())),
            _ => CliError::Config(format!("{}: {e}", p.display())),
        })?;
        if field.grid() != &grid {
            return Err(CliError::Config(format!("{} is on a different grid", p.display())));
        }
        Ok(field)
    };
    let d = load(&f.density)?;
    let v = f.velocity.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    Ok((d, VectorField::new(v)?))
}
