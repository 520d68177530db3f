//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured quantities, then asserts.
//!
//! The tests share a lock so each wall-clock runtime is measured alone.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use korteweg_core::diagnostics::{
    blowup_monitor, energy_csv, energy_dissipation_check, interpolation_fit, pointwise_identity_residual,
    weighted_lp_energy, write_json_lines,
};
use korteweg_core::illposed::{
    density_growth_csv, linear_growth_csv, log_fit, measure_density_growth, measure_linear_growth, norms_csv,
    HorizonRule, IllposedFamily,
};
use korteweg_core::linear::{
    alpha_boundary, solve_linear, verify_decay, EnergyParts, EnergyWeights, Forcing, LinearCoeffs,
};
use korteweg_core::littlewood_paley::{bernstein_ratios, build_partition, graded_times};
use korteweg_core::solver::{
    capillary_force, effective_velocity, laplacian_identity_residual, picard_iterate, run_15, run_17,
    CapillaryForm, Normalization, PhysParams, PicardOptions, PressureLaw, RunOptions, State, Termination,
};
use korteweg_core::spectral::io::write_binary;
use korteweg_core::spectral::random::bandlimited_field;
use korteweg_core::spectral::{laplacian, project_p};
use korteweg_core::{Field, Grid, VectorField};

static SERIAL: Mutex<()> = Mutex::new(());

struct Outcome {
    id: u32,
    name: &'static str,
    checks: Vec<(String, bool)>,
    budget: Option<Duration>,
    started: Instant,
}

impl Outcome {
    fn new(id: u32, name: &'static str, budget: Option<Duration>) -> Self {
        Self {
            id,
            name,
            checks: Vec::new(),
            budget,
            started: Instant::now(),
        }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    /// Prints the verdict past the test harness capture, then asserts.
    fn finish(mut self) {
        let elapsed = self.started.elapsed();
        if let Some(b) = self.budget {
            self.check(format!("runtime {:.1}s < {}s", elapsed.as_secs_f64(), b.as_secs()), elapsed < b);
        }
        let ok = self.checks.iter().all(|c| c.1);
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        let detail: Vec<&str> = self.checks.iter().map(|c| c.0.as_str()).collect();
        let line = format!(
            "{} criterion {:>2} {}: {}",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            detail.join("; ")
        );
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
        assert!(ok, "criterion {} failed: {}", self.id, failed.join("; "));
    }
}

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn random_vector(g: Grid, kmax: usize, amp: f64, seed: u64) -> VectorField {
    VectorField::new((0..g.dim()).map(|a| bandlimited_field(g, kmax, amp, seed + a as u64)).collect()).unwrap()
}

fn random_state(g: Grid, kmax: usize, amp: f64, seed: u64) -> State {
    State::new(bandlimited_field(g, kmax, amp, seed), random_vector(g, kmax, amp, seed + 100), 0.0).unwrap()
}

fn linear(k: f64) -> PressureLaw {
    PressureLaw::Linear { k }
}

fn rel_gap(a: &VectorField, b: &VectorField) -> f64 {
    a.sub(b).norm_linf() / a.norm_linf().max(b.norm_linf())
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn fmt_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", items.join(" "))
}

#[test]
fn criterion_01_littlewood_paley() {
    let _g = serial();
    let mut o = Outcome::new(1, "Littlewood-Paley soundness", Some(Duration::from_secs(10)));
    let (mut defect, mut recon): (f64, f64) = (0.0, 0.0);
    let (mut rows, mut bad) = (0usize, 0usize);
    for dim in [1, 2] {
        let g = Grid::periodic(dim, 256).unwrap();
        let part = build_partition(&g).unwrap();
        let d = part.defect();
        defect = defect.max(d.homogeneous).max(d.inhomogeneous);
        for seed in 0..50u64 {
            let kmax = 4 + (seed as usize * 7) % 80;
            let f = bandlimited_field(g, kmax, 1.0, 1000 * dim as u64 + seed);
            recon = recon.max(part.reconstruction_defect(&f).unwrap());
            for r in bernstein_ratios(&f, &part).unwrap() {
                rows += 1;
                bad += usize::from(!r.holds);
            }
        }
    }
    o.check(format!("partition defect {defect:.1e} < 1e-10"), defect < 1e-10);
    o.check(format!("reconstruction defect {recon:.1e} < 1e-10"), recon < 1e-10);
    o.check(format!("Bernstein {}/{rows} blocks in bounds over 100 fields", rows - bad), bad == 0 && rows > 0);
    o.finish();
}

#[test]
fn criterion_02_linear_theory() {
    let _g = serial();
    let mut o = Outcome::new(2, "linear theory", Some(Duration::from_secs(60)));
    let g = Grid::periodic(2, 32).unwrap();
    let part = build_partition(&g).unwrap();
    let times = graded_times(1.0, 1e-4, 150);
    let q0 = bandlimited_field(g, 10, 1.0, 1);
    let u0 = random_vector(g, 10, 1.0, 2);
    let pu0 = project_p(&u0);
    let vals = [0.5, 1.0, 2.0];
    let (mut transverse, mut k_min, mut shells, mut sets): (f64, f64, usize, usize) = (0.0, f64::INFINITY, 0, 0);
    let mut decay_ok = true;
    for &a in &vals {
        for &b in &vals {
            for &c in &vals {
                for d in [0.0, 1.0] {
                    let coeffs = LinearCoeffs::new(a, b, c, d).unwrap();
                    sets += 1;
                    let tr = solve_linear(&q0, &u0, &Forcing::Zero, &Forcing::Zero, &coeffs, 1.0, &times).unwrap();
                    for (i, &t) in times.iter().enumerate().step_by(15) {
                        let pu = project_p(&tr.u[i]);
                        for (ax, comp) in pu0.components().iter().enumerate() {
                            let exact = comp
                                .forward()
                                .apply_real(|j| {
                                    let xi = g.wavevector(j);
                                    (-a * (xi[0] * xi[0] + xi[1] * xi[1]) * t).exp()
                                })
                                .inverse();
                            transverse = transverse.max(pu.component(ax).sub(&exact).norm_linf());
                        }
                    }
                    let w = EnergyWeights::for_coeffs(&coeffs);
                    for l in part.levels() {
                        let fit = verify_decay(l, &tr, &w, &part).unwrap();
                        shells += 1;
                        decay_ok &= fit.holds && fit.k_fit > 0.0;
                        k_min = k_min.min(fit.k_fit);
                    }
                }
            }
        }
    }
    o.check(format!("transverse sup error {transverse:.1e} < 1e-10"), transverse < 1e-10);
    o.check(format!("K > 0 on {shells} shells over {sets} coefficient sets (min K {k_min:.3e})"), decay_ok);
    let c = LinearCoeffs::new(0.5, 1.0, 2.0, 1.0).unwrap();
    let w = EnergyWeights::for_coeffs(&c);
    let mut held = 0;
    let mut margin = f64::INFINITY;
    for seed in 0..50u64 {
        let l = 1 + (seed % 3) as i32;
        let q = part.block(&bandlimited_field(g, 12, 1.0, 300 + seed), l).unwrap();
        let u = part.block_vector(&random_vector(g, 12, 1.0, 600 + 2 * seed), l).unwrap();
        let parts = EnergyParts::new(&q, &u).unwrap();
        held += usize::from(parts.sandwich_holds(&w));
        margin = margin.min(alpha_boundary(&parts, &w) / w.alpha);
    }
    o.check(format!("sandwich holds on {held}/50 shell states (alpha headroom x{margin:.2})"), held == 50);
    o.finish();
}

#[test]
fn criterion_03_capillary_tensor() {
    let _g = serial();
    let mut o = Outcome::new(3, "capillary tensor", Some(Duration::from_secs(30)));
    let (mut forms, mut identity): (f64, f64) = (0.0, 0.0);
    for seed in 0..20u64 {
        let dim = 1 + (seed % 2) as usize;
        let g = Grid::periodic(dim, 256).unwrap();
        let kmax = 2 + (seed % 5) as usize;
        let rho = bandlimited_field(g, kmax, 0.2, 40 + seed).map(|x| 1.3 * x.exp());
        let f: Vec<VectorField> = [CapillaryForm::General, CapillaryForm::LogForm, CapillaryForm::DivergenceForm]
            .iter()
            .map(|&form| capillary_force(&rho, form, 0.7).unwrap())
            .collect();
        forms = forms.max(rel_gap(&f[0], &f[1])).max(rel_gap(&f[0], &f[2])).max(rel_gap(&f[1], &f[2]));
        let res = laplacian_identity_residual(&rho).unwrap().norm_linf();
        identity = identity.max(res / laplacian(&rho).norm_linf());
    }
    o.check(format!("three-form relative discrepancy {forms:.1e} < 1e-8"), forms < 1e-8);
    o.check(format!("Laplacian identity relative residual {identity:.1e} < 1e-9"), identity < 1e-9);
    o.finish();
}

#[test]
fn criterion_04_nonlinear_solver() {
    let _g = serial();
    let mut o = Outcome::new(4, "nonlinear solver", Some(Duration::from_secs(300)));
    let g = Grid::periodic(1, 256).unwrap();

    let p = PhysParams::new(0.5, 0.0, 0.25, linear(1.0));
    let s = random_state(g, 3, 0.3, 4);
    let end = |dt: f64| {
        let r = run_15(&s, &p, &RunOptions::new(0.1).with_dt(dt).with_record_every(usize::MAX)).unwrap();
        assert!(r.completed());
        r.last_valid().clone()
    };
    let dt = 0.005;
    let reference = end(dt / 8.0);
    let err = |x: &State| x.q.sub(&reference.q).norm_linf() + x.u.sub(&reference.u).norm_linf();
    let (e1, e2) = (err(&end(dt)), err(&end(dt / 2.0)));
    // the dt/8 reference carries its own O(dt²) error
    let order = ((e1 / e2) * (1.0 - 1.0 / 64.0) / (1.0 - 1.0 / 16.0)).log2();
    o.check(format!("Richardson order {order:.3} in 2.0 +- 0.2"), (order - 2.0).abs() < 0.2);

    let p = PhysParams::new(0.5, 0.1, 0.3, linear(1.0));
    let run = run_15(&random_state(g, 4, 0.1, 7), &p, &RunOptions::new(0.5).with_dt(5e-4)).unwrap();
    let check = energy_dissipation_check(&run.snapshots, &p).unwrap();
    let v = check.relative_violation();
    o.check(format!("energy inequality violation {v:.1e} E(0) < 1e-5 E(0)"), run.completed() && v < 1e-5);

    let p = PhysParams::effective(1.0, linear(1.0));
    let sv = effective_velocity(&random_state(g, 4, 0.1, 8), &p).unwrap();
    let run = run_17(&sv, &p, &RunOptions::new(0.1).with_dt(5e-4)).unwrap();
    let drift = run
        .snapshots
        .windows(2)
        .map(|w| (w[1].rho.mean() - w[0].rho.mean()).abs())
        .fold(0.0, f64::max);
    o.check(
        format!("mean-density drift {drift:.1e} per step < 1e-10 over {} steps", run.steps),
        run.completed() && drift < 1e-10,
    );
    o.finish();
}

#[test]
fn criterion_05_effective_velocity_equivalence() {
    let _g = serial();
    let mut o = Outcome::new(5, "effective-velocity equivalence", Some(Duration::from_secs(300)));
    let g = Grid::periodic(1, 256).unwrap();
    let p = PhysParams::effective(0.8, linear(1.0));
    let s = random_state(g, 4, 0.05, 12);
    let opts = RunOptions::new(0.1).with_dt(2e-4).with_record_every(50);
    let a = run_15(&s, &p, &opts).unwrap();
    let b = run_17(&effective_velocity(&s, &p).unwrap(), &p, &opts).unwrap();
    let mut worst: f64 = 0.0;
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        let xv = effective_velocity(x, &p).unwrap();
        worst = worst.max(xv.rho.sub(&y.rho).norm_linf()).max(xv.v.sub(&y.v).norm_linf());
    }
    let ok = a.completed() && b.completed() && a.snapshots.len() == b.snapshots.len();
    o.check(
        format!(
            "kappa = mu^2 = {:.2}, sup difference {worst:.1e} < 1e-5 over {} snapshots",
            p.kappa,
            a.snapshots.len()
        ),
        ok && worst < 1e-5,
    );
    o.finish();
}

#[test]
fn criterion_06_picard() {
    let _g = serial();
    let mut o = Outcome::new(6, "Picard scheme", Some(Duration::from_secs(300)));
    let g = Grid::periodic(1, 128).unwrap();
    let part = build_partition(&g).unwrap();
    let p = PhysParams::new(1.0, 0.0, 1.0, linear(1.0));
    let s = random_state(g, 6, 1e-3, 5);
    let rep = picard_iterate(&s.q, &s.u, &p, &PicardOptions::new(0.1, 10), &part).unwrap();
    let ratios: Vec<f64> = rep.steps[1..].iter().filter_map(|st| st.ratio).collect();
    let below = rep.steps[1..].iter().all(|st| st.ratio.is_none_or(|r| r < 1.0));
    o.check(
        format!("gap ratios from iterate 2 below 1 (max {:.3e}, {} measured)", ratios.iter().fold(0.0f64, |m, &r| m.max(r)), ratios.len()),
        below && !ratios.is_empty() && rep.steps.len() == 10,
    );
    let imex = run_15(&s, &p, &RunOptions::new(0.1).with_dt(1e-3)).unwrap();
    let (end, last) = (imex.last_valid(), &rep.last().unwrap().state);
    let diff = last.q.sub(&end.q).norm_linf() + last.u.sub(&end.u).norm_linf();
    o.check(format!("10th iterate vs IMEX {diff:.1e} < 1e-5"), diff < 1e-5);
    o.finish();
}

#[test]
fn criterion_07_illposedness() {
    let _g = serial();
    let mut o = Outcome::new(7, "ill-posedness mechanism", Some(Duration::from_secs(900)));
    let fam = IllposedFamily::new(1, 2.0, 3);
    let params = PhysParams::new(1.0, 0.0, 1.0, linear(1.0)).with_normalization(Normalization::Display);
    let coeffs = params.linear_coeffs();
    let rule = HorizonRule::default();
    let ns: Vec<i32> = (4..=12).collect();
    let (mut zeta_dev, mut b21, mut div, mut q_max, mut transport) = (0.0f64, vec![], vec![], vec![], vec![]);
    let mut completed = true;
    for &n in &ns {
        let part = build_partition(&fam.member_grid(n).unwrap()).unwrap();
        let m = fam.build(n, &part).unwrap();
        let t_n = rule.horizon(n);
        zeta_dev = zeta_dev.max((m.norms.b2r / m.norms.zeta_partial - 1.0).abs());
        b21.push(m.norms.b21);
        div.push(measure_linear_growth(&m, t_n, &coeffs).unwrap().div_l1_linf);
        let row = measure_density_growth(&m, t_n, &params).unwrap();
        completed &= matches!(row.termination, Termination::Completed);
        q_max.push(row.q_linf_max);
        transport.push(row.transport_integral_max);
    }
    o.check(format!("B2,2 vs zeta partial sums max deviation {:.1e} <= 10%", zeta_dev), zeta_dev <= 0.1);
    let fit = log_fit(&ns, &b21).unwrap();
    o.check(
        format!("B2,1 = {:.3} ln n + {:.3}, R^2 {:.5} > 0.99", fit.slope, fit.intercept, fit.r_squared),
        fit.slope > 0.0 && fit.r_squared > 0.99,
    );
    o.check(format!("linear div integral increasing {}", fmt_list(&div)), strictly_increasing(&div));
    o.check(
        format!("nonlinear q running max increasing {}", fmt_list(&q_max)),
        completed && strictly_increasing(&q_max),
    );
    let bound = fam.q_amplitude;
    let t_max = transport.iter().copied().fold(0.0, f64::max);
    o.check(format!("transport integral max {t_max:.2e} < {bound:.0e}"), t_max < bound);
    o.finish();
}

#[test]
fn criterion_08_integrability_identities() {
    let _g = serial();
    let mut o = Outcome::new(8, "integrability identities", Some(Duration::from_secs(120)));
    let g2 = Grid::periodic(2, 64).unwrap();
    let pointwise = (0..10u64)
        .map(|seed| pointwise_identity_residual(&random_vector(g2, 8, 1.0, 70 + 3 * seed)))
        .fold(0.0, f64::max);
    o.check(format!("pointwise identity {pointwise:.1e} < 1e-12"), pointwise < 1e-12);

    let g = Grid::periodic(1, 128).unwrap();
    let p = PhysParams::effective(0.6, PressureLaw::Gamma { a: 1.0, gamma: 2.0 });
    let s = effective_velocity(&random_state(g, 3, 0.2, 23), &p).unwrap();
    let run = run_17(&s, &p, &RunOptions::new(0.1).with_dt(2e-4)).unwrap();
    let rows = weighted_lp_energy(&run.snapshots, 4.0, &p).unwrap();
    let weighted = rows[1..rows.len() - 1]
        .iter()
        .map(|r| r.residual.abs() / r.scale)
        .fold(0.0, f64::max);
    o.check(format!("weighted L4 identity residual {weighted:.1e} < 1e-4"), run.completed() && weighted < 1e-4);

    let g = Grid::periodic(1, 2048).unwrap();
    let part = build_partition(&g).unwrap();
    let c = std::f64::consts::PI;
    let family: Vec<Field> = (0..10)
        .map(|i| {
            let w = 0.08 * 5f64.powf(i as f64 / 9.0);
            Field::from_fn(g, |x| {
                let y = (x[0] - c) / w;
                (-0.5 * y * y).exp() * (1.0 + 0.2 * (1.7 * y + 0.4).sin())
            })
        })
        .collect();
    let fit = interpolation_fit(&family, 4.0, &part).unwrap();
    o.check(
        format!("interpolation alpha {:.3} in (0,1), C {:.3} on 10 members", fit.alpha, fit.constant),
        fit.holds(),
    );
    o.finish();
}

#[test]
fn criterion_09_blowup_monitor() {
    let _g = serial();
    let mut o = Outcome::new(9, "blow-up monitor", Some(Duration::from_secs(60)));
    let g = Grid::periodic(1, 1024).unwrap();
    let part = build_partition(&g).unwrap();
    let c = std::f64::consts::PI;
    let family: Vec<f64> = (1..=10)
        .map(|k| {
            let depth = 1.0 - 2f64.powi(-k);
            let rho = Field::from_fn(g, |x| 1.0 - depth * (-0.5 * ((x[0] - c) / 0.6).powi(2)).exp());
            blowup_monitor(&rho, 0.0, 0.5, &part).unwrap().inv_rho_besov
        })
        .collect();
    o.check(
        format!("min rho = 2^-k, inv_rho_besov increasing {}", fmt_list(&family)),
        strictly_increasing(&family),
    );

    let g = Grid::periodic(1, 256).unwrap();
    let part = build_partition(&g).unwrap();
    let p = PhysParams::new(0.5, 0.0, 0.25, linear(1.0));
    let q0 = Field::from_fn(g, |x| (1.0 + 0.4 * (-0.5 * ((x[0] - c) / 0.5).powi(2)).exp()).ln());
    let u0 = VectorField::new(vec![Field::from_fn(g, |x| 0.2 * x[0].sin())]).unwrap();
    let run = run_15(&State::new(q0, u0, 0.0).unwrap(), &p, &RunOptions::new(1.0).with_dt(1e-3).with_record_every(20))
        .unwrap();
    let series: Vec<f64> = run
        .snapshots
        .iter()
        .map(|s| blowup_monitor(&s.rho(), s.t, 0.5, &part).unwrap().inv_rho_besov)
        .collect();
    let (first, peak) = (series[0], series.iter().copied().fold(0.0, f64::max));
    o.check(
        format!("bounded run: max {peak:.4} <= 1.5 x initial {first:.4} over {} snapshots", series.len()),
        run.completed() && peak.is_finite() && peak <= 1.5 * first,
    );
    o.finish();
}

fn artifacts() -> Vec<u8> {
    let mut out = Vec::new();
    let g = Grid::periodic(1, 128).unwrap();
    let p = PhysParams::new(0.5, 0.1, 0.3, linear(1.0));
    let run = run_15(&random_state(g, 6, 0.1, 77), &p, &RunOptions::new(0.05).with_record_every(10)).unwrap();
    energy_csv(&energy_dissipation_check(&run.snapshots, &p).unwrap().series, &mut out).unwrap();
    for s in &run.snapshots {
        write_binary(&s.q, &mut out).unwrap();
    }
    let fam = IllposedFamily::new(1, 2.0, 5);
    let params = p.with_normalization(Normalization::Display);
    let (mut norms, mut lin, mut dens) = (vec![], vec![], vec![]);
    for n in 4..=6 {
        let m = fam.build(n, &build_partition(&fam.member_grid(n).unwrap()).unwrap()).unwrap();
        norms.push((n, m.norms));
        lin.push(measure_linear_growth(&m, 0.01, &params.linear_coeffs()).unwrap());
        dens.push(measure_density_growth(&m, 0.01, &params).unwrap());
    }
    norms_csv(&norms, &mut out).unwrap();
    linear_growth_csv(&lin, &mut out).unwrap();
    density_growth_csv(&dens, &mut out).unwrap();
    write_json_lines(&dens, &mut out).unwrap();
    out
}

#[test]
fn criterion_10_determinism() {
    let _g = serial();
    let mut o = Outcome::new(10, "determinism", None);
    let (a, b) = (artifacts(), artifacts());
    o.check(format!("two runs give byte-identical CSV/JSON/binary output ({} bytes)", a.len()), a == b);
    o.finish();
}
