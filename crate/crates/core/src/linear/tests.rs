use std::f64::consts::PI;

use super::*;
use crate::littlewood_paley::{build_partition, graded_times};
use crate::spectral::random::bandlimited_field;
use crate::spectral::{divergence, gradient, laplacian, project_p, Field, Grid, VectorField};

fn uniform(t_end: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|i| t_end * i as f64 / count as f64).collect()
}

fn random_vector(g: Grid, kmax: usize, seed: u64) -> VectorField {
    VectorField::new(
        (0..g.dim())
            .map(|a| bandlimited_field(g, kmax, 1.0, seed + a as u64))
            .collect(),
    )
    .unwrap()
}

fn unit() -> LinearCoeffs {
    LinearCoeffs::new(1.0, 1.0, 1.0, 1.0).unwrap()
}

#[test]
fn rejects_bad_coefficients_and_times() {
    assert!(LinearCoeffs::new(0.0, 1.0, 1.0, 0.0).is_err());
    assert!(LinearCoeffs::new(1.0, -1.0, 1.0, 0.0).is_err());
    assert!(LinearCoeffs::new(1.0, 0.0, 1.0, -0.5).is_err());
    let g = Grid::periodic(1, 16).unwrap();
    let (q, u) = (Field::zeros(g), VectorField::zeros(g));
    let r = solve_linear(&q, &u, &Forcing::Zero, &Forcing::Zero, &unit(), 1.0, &[0.5, 1.5]);
    assert!(r.is_err());
    let r = solve_linear(&q, &u, &Forcing::Zero, &Forcing::Zero, &unit(), 1.0, &[-0.1]);
    assert!(r.is_err());
}

#[test]
fn zero_data_stays_zero() {
    let g = Grid::periodic(2, 16).unwrap();
    let tr = solve_linear(
        &Field::zeros(g),
        &VectorField::zeros(g),
        &Forcing::Zero,
        &Forcing::Zero,
        &unit(),
        1.0,
        &uniform(1.0, 4),
    )
    .unwrap();
    assert!(tr.q.iter().all(|q| q.norm_linf() == 0.0));
    assert!(tr.u.iter().all(|u| u.norm_linf() == 0.0));
}

#[test]
fn solenoidal_data_is_pure_heat_flow() {
    let g = Grid::periodic(2, 32).unwrap();
    let c = LinearCoeffs::new(0.7, 0.3, 1.5, 1.0).unwrap();
    let u0 = project_p(&random_vector(g, 8, 4));
    let times = uniform(0.5, 5);
    let tr = solve_linear(&Field::zeros(g), &u0, &Forcing::Zero, &Forcing::Zero, &c, 0.5, &times).unwrap();
    for (i, &t) in times.iter().enumerate() {
        assert!(tr.q[i].norm_linf() < 1e-12);
        // each mode decays like e^{−a|ξ|²t}
        let exact = VectorField::new(
            u0.components()
                .iter()
                .map(|f| {
                    f.forward()
                        .apply_real(|j| {
                            let xi = g.wavevector(j);
                            (-c.a * (xi[0] * xi[0] + xi[1] * xi[1]) * t).exp()
                        })
                        .inverse()
                })
                .collect(),
        )
        .unwrap();
        assert!(tr.u[i].sub(&exact).norm_linf() < 1e-10);
    }
}

#[test]
fn unit_coefficients_rotate_and_decay() {
    // q̂(t)/q̂(0) = e^{−t}(cos t + sin t) for the modes |ξ| = 1 when u0 = 0
    let g = Grid::periodic(1, 16).unwrap();
    let q0 = Field::from_fn(g, |x| x[0].cos());
    let times = uniform(6.0, 60);
    let tr = solve_linear(&q0, &VectorField::zeros(g), &Forcing::Zero, &Forcing::Zero, &unit(), 6.0, &times)
        .unwrap();
    for (i, &t) in times.iter().enumerate() {
        let amp = tr.q[i].inner(&q0) / q0.inner(&q0);
        let envelope = 2f64.sqrt() * (-t).exp() * (t + PI / 4.0).sin();
        assert!((amp - envelope).abs() < 1e-6, "t={t}");
    }
}

#[test]
fn semigroup_property() {
    let g = Grid::periodic(1, 64).unwrap();
    let q0 = bandlimited_field(g, 20, 1.0, 3);
    let u0 = random_vector(g, 20, 5);
    let c = LinearCoeffs::new(1.0, 0.5, 2.0, 1.0).unwrap();
    let (t1, t2) = (0.013, 0.021);
    let a = solve_linear(&q0, &u0, &Forcing::Zero, &Forcing::Zero, &c, t1, &[t1]).unwrap();
    let b = solve_linear(&a.q[0], &a.u[0], &Forcing::Zero, &Forcing::Zero, &c, t2, &[t2]).unwrap();
    let d = solve_linear(&q0, &u0, &Forcing::Zero, &Forcing::Zero, &c, t1 + t2, &[t1 + t2]).unwrap();
    assert!(b.q[0].sub(&d.q[0]).norm_linf() < 1e-10);
    assert!(b.u[0].sub(&d.u[0]).norm_linf() < 1e-10);
}

#[test]
fn uncoupled_energy_decays_without_forcing() {
    let g = Grid::periodic(2, 32).unwrap();
    let p = build_partition(&g).unwrap();
    let c = LinearCoeffs::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let q0 = bandlimited_field(g, 10, 1.0, 8);
    let u0 = random_vector(g, 10, 9);
    let times = uniform(0.2, 40);
    let tr = solve_linear(&q0, &u0, &Forcing::Zero, &Forcing::Zero, &c, 0.2, &times).unwrap();
    let w = EnergyWeights::for_coeffs(&c).with_alpha(0.0);
    for l in 1..=3 {
        let e = shell_energies(&tr, l, &w, &p).unwrap();
        for pair in e.windows(2) {
            assert!(pair[1].k <= pair[0].k * (1.0 + 1e-12), "shell {l}");
        }
    }
}

#[test]
fn mode_energy_basics() {
    let g = Grid::periodic(1, 32).unwrap();
    let z = mode_energy(2, &Field::zeros(g), &VectorField::zeros(g), 0.1, 1.0).unwrap();
    assert_eq!(z.k, 0.0);
    let q = bandlimited_field(g, 6, 1.0, 1);
    let u = random_vector(g, 6, 2);
    let e = mode_energy(2, &q, &u, 0.0, 1.7).unwrap();
    let direct = u.inner(&u) + 1.7 * gradient(&q).inner(&gradient(&q));
    assert!((e.k * e.k - direct).abs() < 1e-12 * direct);
    assert!(matches!(
        mode_energy(2, &q, &u, 1e3, 1.7),
        Err(crate::Error::EquivalenceViolation { .. })
    ));
}

#[test]
fn bisection_matches_closed_form_boundary() {
    let g = Grid::periodic(1, 64).unwrap();
    let p = build_partition(&g).unwrap();
    for seed in 0..10 {
        let q = p.block(&bandlimited_field(g, 30, 1.0, seed), 3).unwrap();
        let u = p.block_vector(&random_vector(g, 30, seed + 100), 3).unwrap();
        let parts = EnergyParts::new(&q, &u).unwrap();
        let w = EnergyWeights {
            alpha: 0.0,
            kappa_bar: 1.3,
            pressure: 0.0,
        };
        let base = parts.base(&w);
        // αX ≤ base/2 and αX ≥ −base/6
        let exact = if parts.cross > 0.0 {
            base / (2.0 * parts.cross)
        } else {
            base / (6.0 * -parts.cross)
        };
        let found = alpha_boundary(&parts, &w);
        assert!((found - exact).abs() < 1e-9 * exact, "{found} {exact}");
    }
}

#[test]
fn default_alpha_sandwich_on_random_shells() {
    let g = Grid::periodic(2, 32).unwrap();
    let p = build_partition(&g).unwrap();
    let c = LinearCoeffs::new(0.5, 1.0, 2.0, 1.0).unwrap();
    let w = EnergyWeights::for_coeffs(&c);
    for seed in 0..50 {
        let l = 1 + (seed % 3) as i32;
        let q = p.block(&bandlimited_field(g, 12, 1.0, seed), l).unwrap();
        let u = p.block_vector(&random_vector(g, 12, 1000 + seed), l).unwrap();
        let parts = EnergyParts::new(&q, &u).unwrap();
        assert!(parts.sandwich_holds(&w));
        assert!(alpha_boundary(&parts, &w) > w.alpha);
    }
}

#[test]
fn decay_fit_on_zero_data_is_infinite() {
    let g = Grid::periodic(1, 32).unwrap();
    let p = build_partition(&g).unwrap();
    let tr = solve_linear(
        &Field::zeros(g),
        &VectorField::zeros(g),
        &Forcing::Zero,
        &Forcing::Zero,
        &unit(),
        1.0,
        &uniform(1.0, 4),
    )
    .unwrap();
    let fit = verify_decay(2, &tr, &EnergyWeights::for_coeffs(&unit()), &p).unwrap();
    assert!(fit.k_fit.is_infinite() && fit.holds);
    let short = solve_linear(
        &Field::zeros(g),
        &VectorField::zeros(g),
        &Forcing::Zero,
        &Forcing::Zero,
        &unit(),
        1.0,
        &[0.0, 1.0],
    )
    .unwrap();
    assert!(verify_decay(2, &short, &EnergyWeights::for_coeffs(&unit()), &p).is_err());
}

#[test]
fn transverse_decay_rate_is_exact() {
    let g = Grid::periodic(2, 64).unwrap();
    let p = build_partition(&g).unwrap();
    let c = LinearCoeffs::new(0.8, 0.5, 1.0, 1.0).unwrap();
    let u0 = VectorField::new(vec![Field::from_fn(g, |x| (12.0 * x[1]).cos()), Field::zeros(g)]).unwrap();
    let times = uniform(0.05, 20);
    let tr = solve_linear(&Field::zeros(g), &u0, &Forcing::Zero, &Forcing::Zero, &c, 0.05, &times).unwrap();
    let fit = verify_decay(3, &tr, &EnergyWeights::for_coeffs(&c), &p).unwrap();
    let rate = c.a * 144.0;
    assert!((fit.k_fit * 64.0 - rate).abs() < 1e-9 * rate, "{fit:?}");
}

#[test]
fn longitudinal_decay_rate_tracks_eigenvalues() {
    let g = Grid::periodic(1, 64).unwrap();
    let p = build_partition(&g).unwrap();
    for c in [unit(), LinearCoeffs::new(0.5, 0.0, 2.0, 0.0).unwrap()] {
        let q0 = Field::from_fn(g, |x| (12.0 * x[0]).cos());
        let times = graded_times(0.5, 1e-4, 400);
        let tr = solve_linear(&q0, &VectorField::zeros(g), &Forcing::Zero, &Forcing::Zero, &c, 0.5, &times)
            .unwrap();
        let fit = verify_decay(3, &tr, &EnergyWeights::for_coeffs(&c), &p).unwrap();
        let ev = eigenvalues2(longitudinal_matrix(12.0, &c));
        let sigma = -ev[0].re.max(ev[1].re);
        let rate = fit.k_fit * 64.0;
        assert!(fit.holds && rate > 0.0);
        // the coupled energy cannot decay faster than the slowest eigenmode
        assert!(rate <= sigma * (1.0 + 1e-6), "{rate} vs {sigma}");
    }
}

#[test]
fn forced_steady_state_balances() {
    let g = Grid::periodic(2, 64).unwrap();
    let p = build_partition(&g).unwrap();
    let c = LinearCoeffs::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let gf = VectorField::new(vec![Field::from_fn(g, |x| (12.0 * x[1]).cos()), Field::zeros(g)]).unwrap();
    let t_end = 0.2;
    let times = uniform(t_end, 800);
    let forcing = Forcing::Sampled(times.iter().map(|&t| (t, gf.clone())).collect());
    let tr = solve_linear(&Field::zeros(g), &VectorField::zeros(g), &Forcing::Zero, &forcing, &c, t_end, &times)
        .unwrap();
    // Duhamel oracle for a constant transverse source
    let lambda = c.a * 144.0;
    let last = tr.u.last().unwrap();
    let exact = gf.scale((1.0 - (-lambda * t_end).exp()) / lambda);
    assert!(last.sub(&exact).norm_linf() < 1e-3 * exact.norm_linf());
    let fit = verify_decay(3, &tr, &EnergyWeights::for_coeffs(&c), &p).unwrap();
    assert!(fit.holds && fit.k_fit > 0.0);
    let g_l = p.block_vector(&gf, 3).unwrap().norm_l2();
    let balance = fit.c_fit / (fit.k_fit * 64.0) * g_l;
    let k_end = last.norm_l2();
    assert!((k_end / balance - 1.0).abs() < 0.1, "{k_end} vs {balance}");
}

#[test]
fn divergence_subsystem_cases() {
    let g = Grid::periodic(1, 32).unwrap();
    let times = uniform(2.0, 20);
    let z = divergence_subsystem(&Field::zeros(g), &Field::zeros(g), 1.0, 0.0, 1.0, 2.0, &times).unwrap();
    assert!(z.v.iter().all(|v| v.norm_linf() == 0.0));
    // double eigenvalue −1: v(t) = e^{−t}(1 − t) v0 when c0 = 0
    let v0 = Field::from_fn(g, |x| x[0].cos());
    let tr = divergence_subsystem(&Field::zeros(g), &v0, 1.0, 0.0, 1.0, 2.0, &times).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let exact = v0.scale((-t).exp() * (1.0 - t));
        assert!(tr.v[i].sub(&exact).norm_linf() < 1e-12);
    }
    let m = divergence_block(1.0, 2.0, 1.0);
    for z in eigenvalues2(m) {
        assert!((z.re + 1.0).abs() < 1e-12 && z.im.abs() < 1e-12);
    }
    // initial c is the Laplacian of the log-density
    let q0 = bandlimited_field(g, 6, 0.2, 3);
    let c0 = laplacian(&q0);
    let tr = divergence_subsystem(&c0, &v0, 1.0, 0.0, 1.0, 2.0, &times).unwrap();
    assert!(tr.c[0].sub(&divergence(&gradient(&q0))).norm_linf() < 1e-12 * c0.norm_linf().max(1.0));
}

#[test]
fn divergence_smoothing_constant_is_resolution_stable() {
    let constants: Vec<f64> = [64, 128]
        .iter()
        .map(|&n| {
            let g = Grid::periodic(1, n).unwrap();
            let p = build_partition(&g).unwrap();
            let v0 = bandlimited_field(g, 20, 1.0, 5);
            let times = graded_times(1.0, 1e-5, 600);
            let tr = divergence_subsystem(&Field::zeros(g), &v0, 1.0, 0.0, 1.0, 1.0, &times).unwrap();
            tr.smoothing_constant(0.0, 1.0, &p).unwrap().constant
        })
        .collect();
    assert!(constants.iter().all(|c| c.is_finite() && *c > 0.0));
    assert!((constants[0] / constants[1] - 1.0).abs() < 0.05, "{constants:?}");
}

#[test]
fn aggregate_estimate_is_resolution_stable() {
    let ratios: Vec<f64> = [128, 256]
        .iter()
        .map(|&n| {
            let g = Grid::periodic(1, n).unwrap();
            let p = build_partition(&g).unwrap();
            let q0 = bandlimited_field(g, 30, 0.1, 21);
            let u0 = random_vector(g, 30, 22);
            let c = LinearCoeffs::new(1.0, 1.0, 1.0, 0.0).unwrap();
            let times = graded_times(0.5, 1e-5, 500);
            let tr = solve_linear(&q0, &u0, &Forcing::Zero, &Forcing::Zero, &c, 0.5, &times).unwrap();
            aggregate_estimate(&tr, 0.0, 2.0, &p).unwrap().ratio
        })
        .collect();
    assert!((ratios[0] / ratios[1] - 1.0).abs() < 0.3, "{ratios:?}");
}

#[test]
fn exports_are_well_formed() {
    let g = Grid::periodic(1, 32).unwrap();
    let p = build_partition(&g).unwrap();
    let c = unit();
    let q0 = bandlimited_field(g, 6, 1.0, 1);
    let tr = solve_linear(&q0, &VectorField::zeros(g), &Forcing::Zero, &Forcing::Zero, &c, 0.1, &uniform(0.1, 3))
        .unwrap();
    let w = EnergyWeights::for_coeffs(&c);
    let csv = shell_table_csv(&tr, &[1, 2], &w, &p).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 2);
    let fits: Vec<DecayFit> = [1, 2].iter().map(|&l| verify_decay(l, &tr, &w, &p).unwrap()).collect();
    let json: serde_json::Value = serde_json::from_str(&fits_json(&fits)).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
}
