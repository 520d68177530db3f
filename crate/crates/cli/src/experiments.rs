//! One driver per experiment tag.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use korteweg_core::diagnostics::{
    blowup_csv, blowup_monitor, energy_csv, weighted_lp_energy, write_json_lines, EnergyMonitor,
};
use korteweg_core::illposed::{
    density_growth_csv, linear_growth_csv, log_fit, measure_density_growth, measure_linear_growth, norms_csv,
    DensityGrowthRow, IllposedFamily, LinearGrowthRow,
};
use korteweg_core::linear::{
    divergence_subsystem, fits_json, shell_table_csv, solve_linear, verify_decay, EnergyWeights, Forcing,
};
use korteweg_core::littlewood_paley::{
    bernstein_ratios, build_partition, gradient_equivalence_ratio, heat_semigroup_check, BesovSpec,
    DyadicPartition,
};
use korteweg_core::solver::{
    picard_iterate, run_15, run_15_observed, run_17, smooth_data, Normalization, PhysParams, PicardOptions, RunOptions, State,
    StateV, Termination,
};
use korteweg_core::spectral::random::bandlimited_field;
use korteweg_core::spectral::{divergence, laplacian, project_p};
use korteweg_core::{Field, Grid};
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig, InitialConfig};
use crate::error::CliError;
use crate::output::{Manifest, RunDir, StateKind, TerminationRecord};
use crate::presets::{initial_effective, initial_state};

/// Runs the configured experiment into `dir` and writes the manifest.
pub fn execute(cfg: &ExperimentConfig, dir: RunDir) -> Result<Manifest, CliError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Simulate15 => simulate_15(cfg, dir),
        Experiment::Simulate17 => simulate_17(cfg, dir),
        Experiment::Picard => picard(cfg, dir),
        Experiment::LinearVerify => linear_verify(cfg, dir),
        Experiment::DivergenceSubsystem => divergence_run(cfg, dir),
        Experiment::BlowupScan => blowup_scan(cfg, dir),
        Experiment::IllposedSweep => illposed_sweep(cfg, dir),
        Experiment::LpSelftest => lp_selftest(cfg, dir),
    }
}

fn run_options(cfg: &ExperimentConfig) -> RunOptions {
    let t = &cfg.time;
    let mut opts = RunOptions::new(t.t_end).with_record_every(t.snapshot_every);
    opts.cfl = t.cfl;
    if let Some(dt) = t.dt {
        opts = opts.with_dt(dt);
    }
    opts
}

fn partition(grid: &Grid) -> Result<DyadicPartition, CliError> {
    Ok(build_partition(grid)?)
}

fn velocity_names(dim: usize, base: &str) -> Vec<String> {
    (0..dim).map(|i| format!("{base}{i}")).collect()
}

fn snapshot_vector(dir: &mut RunDir, t: f64, scalar: (&str, &Field), base: &str, comps: &[Field]) -> Result<(), CliError> {
    let names = velocity_names(comps.len(), base);
    let mut fields = vec![scalar];
    fields.extend(names.iter().map(String::as_str).zip(comps));
    dir.snapshot(t, &fields)
}

fn simulate_15(cfg: &ExperimentConfig, mut dir: RunDir) -> Result<Manifest, CliError> {
    let params = cfg.params;
    let state = initial_state(cfg)?;
    let part = partition(state.grid())?;
    // the dissipation integral sees every step, the CSV keeps the snapshot cadence
    let mut energy = (params.normalization == Normalization::Physical)
        .then(|| EnergyMonitor::new(&params))
        .transpose()?;
    let mut energy_err = None;
    let mut unrecorded = None;
    let (mut seen, every) = (0usize, cfg.time.snapshot_every);
    let run = run_15_observed(&state, &params, &run_options(cfg), |s| {
        if let (Some(m), None) = (energy.as_mut(), &energy_err) {
            match m.observe(s) {
                Ok(rep) if seen % every == 0 => {
                    m.record(rep);
                    unrecorded = None;
                }
                Ok(rep) => unrecorded = Some(rep),
                Err(e) => energy_err = Some(e),
            }
        }
        seen += 1;
    })?;
    if let (Some(m), Some(rep)) = (energy.as_mut(), unrecorded) {
        m.record(rep);
    }
    for s in &run.snapshots {
        snapshot_vector(&mut dir, s.t, ("q", &s.q), "u", s.u.components())?;
    }
    let monitors = run
        .snapshots
        .iter()
        .map(|s| blowup_monitor(&s.rho(), s.t, cfg.blowup.eps, &part))
        .collect::<Result<Vec<_>, _>>()?;
    dir.with("blowup.csv", |w| blowup_csv(&monitors, w))?;
    let mut summary = json!({
        "dt": run.dt,
        "steps": run.steps,
        "snapshots": run.snapshots.len(),
        "t_final": run.last_valid().t,
    });
    if let (Some(m), None) = (energy, energy_err) {
        let check = m.finish();
        dir.with("energy.csv", |w| energy_csv(&check.series, w))?;
        summary["energy_initial"] = json!(check.e0);
        summary["energy_relative_violation"] = json!(check.relative_violation());
    }
    let mass: Vec<f64> = run.snapshots.iter().map(|s| s.rho().integral()).collect();
    summary["mass_relative_drift"] = json!(max_relative_drift(&mass));
    dir.finish(cfg, (&run.termination).into(), Some(StateKind::LogDensity), summary)
}

fn max_relative_drift(xs: &[f64]) -> f64 {
    let x0 = xs[0];
    xs.iter().map(|x| ((x - x0) / x0).abs()).fold(0.0, f64::max)
}

fn simulate_17(cfg: &ExperimentConfig, mut dir: RunDir) -> Result<Manifest, CliError> {
    let params = cfg.params;
    let state = initial_effective(cfg, &params)?;
    let part = partition(state.grid())?;
    let run = run_17(&state, &params, &run_options(cfg))?;
    for s in &run.snapshots {
        snapshot_vector(&mut dir, s.t, ("rho", &s.rho), "v", s.v.components())?;
    }
    let monitors = run
        .snapshots
        .iter()
        .map(|s| blowup_monitor(&s.rho, s.t, cfg.blowup.eps, &part))
        .collect::<Result<Vec<_>, _>>()?;
    dir.with("blowup.csv", |w| blowup_csv(&monitors, w))?;
    let mass: Vec<f64> = run.snapshots.iter().map(|s| s.rho.integral()).collect();
    let mut csv = String::from("t,mass\n");
    for (s, m) in run.snapshots.iter().zip(&mass) {
        csv.push_str(&format!("{},{}\n", s.t, m));
    }
    dir.text("mass.csv", &csv)?;
    let mut summary = json!({
        "dt": run.dt,
        "steps": run.steps,
        "snapshots": run.snapshots.len(),
        "t_final": run.last_valid().t,
        "mass_relative_drift": max_relative_drift(&mass),
    });
    // the balance uses centred differences between snapshots, so it only
    // means something when every step is kept
    if cfg.time.snapshot_every == 1 && run.snapshots.len() >= 3 {
        let balance = weighted_lp_energy(&run.snapshots, 4.0, &params)?;
        dir.with("weighted_l4.jsonl", |w| write_json_lines(&balance, w))?;
        let worst = balance.iter().map(|b| (b.residual / b.scale).abs()).fold(0.0, f64::max);
        summary["weighted_l4_relative_residual"] = json!(worst);
    }
    dir.finish(cfg, (&run.termination).into(), Some(StateKind::Effective), summary)
}

fn picard(cfg: &ExperimentConfig, mut dir: RunDir) -> Result<Manifest, CliError> {
    let params = cfg.params;
    let mut state = initial_state(cfg)?;
    let part = partition(state.grid())?;
    if let Some(level) = cfg.picard.smooth_level {
        let u = state.u.map_components(|c| smooth_data(c, level, &part).expect("grid checked"));
        state = State::new(smooth_data(&state.q, level, &part)?, u, 0.0)?;
    }
    let mut opts = PicardOptions::new(cfg.time.t_end, cfg.picard.iterations);
    opts.time_steps = cfg.picard.time_steps;
    let report = picard_iterate(&state.q, &state.u, &params, &opts, &part)?;
    let mut csv = String::from("n,gap,ratio,size,free_free,bar_free,free_bar,bar_bar\n");
    for s in &report.steps {
        let ratio = s.ratio.map(|r| r.to_string()).unwrap_or_default();
        let t = &s.transport;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.n, s.gap, ratio, s.size, t.free_free, t.bar_free, t.free_bar, t.bar_bar
        ));
    }
    dir.text("picard.csv", &csv)?;
    for (i, s) in report.trajectory.iter().enumerate() {
        if i % cfg.time.snapshot_every == 0 || i + 1 == report.trajectory.len() {
            snapshot_vector(&mut dir, s.t, ("q", &s.q), "u", s.u.components())?;
        }
    }
    let reference = run_15(&state, &params, &run_options(cfg).with_record_every(usize::MAX))?;
    let last = report.last().map(|s| &s.state).unwrap_or(&state);
    let imex = reference.last_valid();
    let diff = last
        .q
        .sub(&imex.q)
        .norm_linf()
        .max(last.u.sub(&imex.u).norm_linf());
    let ratios_below_one = report.steps.iter().skip(1).all(|s| s.ratio.is_none_or(|r| r < 1.0));
    let summary = json!({
        "free_norm": report.free_norm,
        "floor": report.floor,
        "contracted": report.contracted,
        "ratios_below_one_from_second": ratios_below_one,
        "imex_sup_difference": diff,
        "imex_dt": reference.dt,
    });
    let term = if reference.completed() {
        TerminationRecord::completed()
    } else {
        (&reference.termination).into()
    };
    dir.finish(cfg, term, Some(StateKind::LogDensity), summary)
}

fn sample_times(t_end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}

fn linear_verify(cfg: &ExperimentConfig, mut dir: RunDir) -> Result<Manifest, CliError> {
    let state = initial_state(cfg)?;
    let grid = *state.grid();
    let part = partition(&grid)?;
    let coeffs = cfg.params.linear_coeffs();
    let q0 = state.q.map(|q| q - cfg.params.rho_ref.ln());
    let times = sample_times(cfg.time.t_end, cfg.linear.samples);
    let traj = solve_linear(&q0, &state.u, &Forcing::Zero, &Forcing::Zero, &coeffs, cfg.time.t_end, &times)?;
    let mut weights = EnergyWeights::for_coeffs(&coeffs);
    if let Some(a) = cfg.linear.alpha {
        weights = weights.with_alpha(a);
    }
    let levels: Vec<i32> = part.levels().collect();
    let fits = levels
        .iter()
        .map(|&l| verify_decay(l, &traj, &weights, &part))
        .collect::<Result<Vec<_>, _>>()?;
    dir.text("decay.json", &(fits_json(&fits) + "\n"))?;
    dir.text("shells.csv", &shell_table_csv(&traj, &levels, &weights, &part)?)?;
    // the solenoidal part only diffuses: P u(t) = e^{aΔt} P u₀
    let pu0 = project_p(&state.u).components().iter().map(Field::forward).collect::<Vec<_>>();
    let mut transverse: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let pu = project_p(&traj.u[i]);
        for (a, s) in pu0.iter().enumerate() {
            let exact = s
                .apply_real(|j| {
                    let xi = grid.wavevector(j);
                    (-coeffs.a * (xi[0] * xi[0] + xi[1] * xi[1]) * t).exp()
                })
                .inverse();
            transverse = transverse.max(pu.components()[a].sub(&exact).norm_linf());
        }
        if i % cfg.time.snapshot_every == 0 || i + 1 == times.len() {
            snapshot_vector(&mut dir, t, ("q", &traj.q[i]), "u", traj.u[i].components())?;
        }
    }
    let summary = json!({
        "coeffs": coeffs,
        "weights": weights,
        "all_shells_decay": fits.iter().all(|f| f.holds),
        "min_k_fit": fits.iter().map(|f| f.k_fit).fold(f64::INFINITY, f64::min),
        "transverse_sup_error": transverse,
    });
    dir.finish(cfg, TerminationRecord::completed(), Some(StateKind::LogDensity), summary)
}

fn divergence_run(cfg: &ExperimentConfig, mut dir: RunDir) -> Result<Manifest, CliError> {
    let state = initial_state(cfg)?;
    let part = partition(state.grid())?;
    let p = &cfg.params;
    let c0 = laplacian(&state.q);
    let v0 = divergence(&state.u);
    let times = sample_times(cfg.time.t_end, cfg.linear.samples);
    let traj = divergence_subsystem(&c0, &v0, p.mu_bar, p.lambda_bar, p.kappa, cfg.time.t_end, &times)?;
    let constants = cfg
        .linear
        .regularities
        .iter()
        .map(|&s| traj.smoothing_constant(s, 1.0, &part).map(|c| json!({"s": s, "r": 1.0, "constant": c})))
        .collect::<Result<Vec<_>, _>>()?;
    dir.json("smoothing.json", &constants)?;
    let mut csv = String::from("t,c_l2,v_l2\n");
    for (i, &t) in times.iter().enumerate() {
        csv.push_str(&format!("{t},{},{}\n", traj.c[i].norm_l2(), traj.v[i].norm_l2()));
        if i % cfg.time.snapshot_every == 0 || i + 1 == times.len() {
            dir.snapshot(t, &[("c", &traj.c[i]), ("v", &traj.v[i])])?;
        }
    }
    dir.text("norms.csv", &csv)?;
    let summary = json!({ "smoothing": constants });
    dir.finish(cfg, TerminationRecord::completed(), Some(StateKind::Divergence), summary)
}

/// `ρ_k = ρ̄(1 − (1 − 2^{−k})b)` with a smooth bump `b`, `max b = 1`.
pub fn vacuum_family(grid: Grid, rho_ref: f64, width: f64, k_max: u32) -> Vec<Field> {
    let l = grid.length();
    let w = width * l;
    let dim = grid.dim();
    (1..=k_max)
        .map(|k| {
            let depth = 1.0 - 2f64.powi(-(k as i32));
            Field::from_fn(grid, |x| {
                let r2: f64 = (0..dim).map(|i| (x[i] - 0.5 * l).powi(2)).sum();
                rho_ref * (1.0 - depth * (-0.5 * r2 / (w * w)).exp())
            })
        })
        .collect()
}

fn blowup_scan(cfg: &ExperimentConfig, mut dir: RunDir) -> Result<Manifest, CliError> {
    let grid = cfg.grid.grid()?;
    let part = partition(&grid)?;
    let width = match &cfg.initial {
        Some(InitialConfig::Preset(p)) => p.width,
        _ => 0.1,
    };
    let family = vacuum_family(grid, cfg.params.rho_ref, width, cfg.blowup.k_max);
    let rows = family
        .iter()
        .enumerate()
        .map(|(i, rho)| blowup_monitor(rho, (i + 1) as f64, cfg.blowup.eps, &part))
        .collect::<Result<Vec<_>, _>>()?;
    // the `t` column holds k for the family table
    dir.with("vacuum_family.csv", |w| blowup_csv(&rows, w))?;
    let monotone = rows.windows(2).all(|w| w[1].inv_rho_besov > w[0].inv_rho_besov);
    let mut summary = json!({
        "family_monotone": monotone,
        "family_inv_rho_besov": rows.iter().map(|r| r.inv_rho_besov).collect::<Vec<_>>(),
    });
    let mut term = TerminationRecord::completed();
    if cfg.initial.is_some() {
        let state = initial_state(cfg)?;
        let run = run_15(&state, &cfg.params, &run_options(cfg))?;
        let monitors = run
            .snapshots
            .iter()
            .map(|s| blowup_monitor(&s.rho(), s.t, cfg.blowup.eps, &part))
            .collect::<Result<Vec<_>, _>>()?;
        dir.with("run_blowup.csv", |w| blowup_csv(&monitors, w))?;
        summary["run_max_inv_rho_besov"] = json!(monitors.iter().map(|m| m.inv_rho_besov).fold(0.0, f64::max));
        summary["run_min_rho"] = json!(monitors.iter().map(|m| m.rho_min).fold(f64::INFINITY, f64::min));
        term = (&run.termination).into();
    }
    dir.finish(cfg, term, None, summary)
}

struct SweepRow {
    n: i32,
    norms: korteweg_core::illposed::FamilyNorms,
    linear: LinearGrowthRow,
    density: Option<DensityGrowthRow>,
}

fn illposed_sweep(cfg: &ExperimentConfig, mut dir: RunDir) -> Result<Manifest, CliError> {
    let il = &cfg.illposed;
    let mut fam = IllposedFamily::new(cfg.grid.dim, il.r, cfg.seed);
    fam.q_amplitude = il.q_amplitude;
    let params = cfg.params;
    let coeffs = params.linear_coeffs();
    let ns: Vec<i32> = (il.n_min..=il.n_max).collect();
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<SweepRow, CliError>>>> = ns.iter().map(|_| Mutex::new(None)).collect();
    let work = |n: i32| -> Result<SweepRow, CliError> {
        let grid = fam.member_grid(n)?;
        let part = build_partition(&grid)?;
        let member = fam.build(n, &part)?;
        let t_n = il.horizon.horizon(n);
        let linear = measure_linear_growth(&member, t_n, &coeffs)?;
        let density = if il.nonlinear {
            Some(measure_density_growth(&member, t_n, &params)?)
        } else {
            None
        };
        Ok(SweepRow {
            n,
            norms: member.norms,
            linear,
            density,
        })
    };
    // largest members first so the slow ones overlap
    std::thread::scope(|scope| {
        for _ in 0..il.workers.min(ns.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= ns.len() {
                    break;
                }
                let k = ns.len() - 1 - i;
                let row = work(ns[k]);
                *slots[k].lock().unwrap() = Some(row);
            });
        }
    });
    let rows = slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("every slot is filled"))
        .collect::<Result<Vec<_>, _>>()?;
    let norms: Vec<_> = rows.iter().map(|r| (r.n, r.norms)).collect();
    dir.with("norms.csv", |w| norms_csv(&norms, w))?;
    let linear: Vec<_> = rows.iter().map(|r| r.linear).collect();
    dir.with("linear_growth.csv", |w| linear_growth_csv(&linear, w))?;
    let b21: Vec<f64> = rows.iter().map(|r| r.norms.b21).collect();
    let fit = if ns.len() >= 3 { Some(log_fit(&ns, &b21)?) } else { None };
    let zeta_dev = rows
        .iter()
        .map(|r| (r.norms.b2r / r.norms.zeta_partial - 1.0).abs())
        .fold(0.0, f64::max);
    let strictly_increasing = |xs: &[f64]| xs.windows(2).all(|w| w[1] > w[0]);
    let div: Vec<f64> = linear.iter().map(|r| r.div_l1_linf).collect();
    let mut summary = json!({
        "b2r_zeta_max_deviation": zeta_dev,
        "b21_log_fit": fit,
        "linear_growth_increasing": strictly_increasing(&div),
    });
    let mut term = TerminationRecord::completed();
    if il.nonlinear {
        let density: Vec<_> = rows.iter().filter_map(|r| r.density).collect();
        dir.with("density_growth.csv", |w| density_growth_csv(&density, w))?;
        let q: Vec<f64> = density.iter().map(|r| r.q_linf_max).collect();
        summary["q_linf_increasing"] = json!(strictly_increasing(&q));
        summary["transport_integral_max"] =
            json!(density.iter().map(|r| r.transport_integral_max).fold(0.0, f64::max));
        if let Some(bad) = density.iter().find(|r| r.termination != Termination::Completed) {
            term = (&bad.termination).into();
        }
    }
    dir.finish(cfg, term, None, summary)
}

fn lp_selftest(cfg: &ExperimentConfig, mut dir: RunDir) -> Result<Manifest, CliError> {
    let grid = cfg.grid.grid()?;
    let part = partition(&grid)?;
    let defect = part.defect();
    let kmax = grid.n() / 4;
    let mut csv = String::from("field,l,ratio,lower,upper,holds\n");
    let (mut recon, mut all_hold) = (0.0f64, true);
    let mut equiv = (f64::INFINITY, 0.0f64);
    for i in 0..cfg.selftest.fields {
        let f = bandlimited_field(grid, kmax, 1.0, cfg.seed.wrapping_add(i as u64));
        recon = recon.max(part.reconstruction_defect(&f)?);
        for r in bernstein_ratios(&f, &part)? {
            all_hold &= r.holds;
            csv.push_str(&format!("{i},{},{},{},{},{}\n", r.l, r.ratio, r.lower, r.upper, r.holds));
        }
        let e = gradient_equivalence_ratio(&f, 0.5, 2.0, &part)?;
        equiv = (equiv.0.min(e), equiv.1.max(e));
    }
    dir.text("bernstein.csv", &csv)?;
    let u0 = bandlimited_field(grid, kmax, 1.0, cfg.seed);
    let heat = heat_semigroup_check(&u0, 1.0, cfg.time.t_end, &BesovSpec::homogeneous(0.0, 2.0, 1.0), &part)?;
    dir.json("heat.json", &heat)?;
    let summary = json!({
        "j_min": part.j_min(),
        "j_max": part.j_max(),
        "partition_defect": defect,
        "reconstruction_defect": recon,
        "bernstein_all_hold": all_hold,
        "gradient_equivalence_range": [equiv.0, equiv.1],
        "heat": heat,
    });
    dir.finish(cfg, TerminationRecord::completed(), None, summary)
}

/// Differences between two runs, one CSV row per snapshot and variable.
pub fn compare(a: &std::path::Path, b: &std::path::Path) -> Result<String, CliError> {
    let (ma, da) = Manifest::load(a)?;
    let (mb, db) = Manifest::load(b)?;
    let incompatible = |m: String| Err(CliError::Config(format!("incompatible runs: {m}")));
    if ma.config.grid != mb.config.grid {
        return incompatible("different grids".into());
    }
    if ma.snapshots.len() != mb.snapshots.len() {
        return incompatible(format!("{} vs {} snapshots", ma.snapshots.len(), mb.snapshots.len()));
    }
    let (Some(ka), Some(kb)) = (ma.state_kind, mb.state_kind) else {
        return incompatible("runs without snapshots".into());
    };
    let t_scale = ma.config.time.t_end.abs().max(1.0);
    let mut out = String::from("index,t,variable,sup_diff,l2_diff\n");
    for (sa, sb) in ma.snapshots.iter().zip(&mb.snapshots) {
        if (sa.t - sb.t).abs() > 1e-9 * t_scale {
            return incompatible(format!("snapshot {} at t = {} vs {}", sa.index, sa.t, sb.t));
        }
        let fa = load_kind(&da, &sa.fields, ka, kb, &ma.config.params, sa.t)?;
        let fb = load_kind(&db, &sb.fields, kb, ka, &mb.config.params, sb.t)?;
        for ((name, x), (_, y)) in fa.iter().zip(&fb) {
            let d = x.sub(y);
            out.push_str(&format!("{},{},{},{},{}\n", sa.index, sa.t, name, d.norm_linf(), d.norm_l2()));
        }
    }
    Ok(out)
}

/// Loads a snapshot, converting log-density variables to effective ones
/// when the other run is an effective-velocity run.
fn load_kind(
    dir: &std::path::Path,
    files: &std::collections::BTreeMap<String, String>,
    kind: StateKind,
    other: StateKind,
    params: &PhysParams,
    t: f64,
) -> Result<Vec<(String, Field)>, CliError> {
    let load = |name: &str| -> Result<Field, CliError> {
        let rel = files
            .get(name)
            .ok_or_else(|| CliError::Config(format!("snapshot lacks variable {name}")))?;
        Manifest::load_field(dir, rel)
    };
    let dim = files.len() - 1;
    let vector = |base: &str| -> Result<Vec<Field>, CliError> {
        velocity_names(dim, base).iter().map(|n| load(n)).collect()
    };
    let named = |scalar: &str, s: Field, base: &str, v: Vec<Field>| {
        let mut out = vec![(scalar.to_string(), s)];
        out.extend(velocity_names(dim, base).into_iter().zip(v));
        out
    };
    match (kind, other) {
        (a, b) if a == b => {
            let mut names: Vec<&String> = files.keys().collect();
            names.sort();
            names.into_iter().map(|n| Ok((n.clone(), load(n)?))).collect()
        }
        (StateKind::LogDensity, StateKind::Effective) => {
            let u = korteweg_core::VectorField::new(vector("u")?)?;
            let s = korteweg_core::solver::effective_velocity(&State::new(load("q")?, u, t)?, params)?;
            Ok(named("rho", s.rho, "v", s.v.into_components()))
        }
        (StateKind::Effective, StateKind::LogDensity) => {
            let v = korteweg_core::VectorField::new(vector("v")?)?;
            let s = StateV::new(load("rho")?, v, t)?;
            Ok(named("rho", s.rho, "v", s.v.into_components()))
        }
        _ => Err(CliError::Config(format!("cannot compare {kind:?} with {other:?} runs"))),
    }
}
