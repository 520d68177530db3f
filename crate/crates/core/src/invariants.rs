//! Property tests over the public API.

use crate::illposed::IllposedFamily;
use crate::linear::{LinearCoeffs, Propagator};
use crate::littlewood_paley::{besov_norm, build_partition, BesovSpec};
use crate::solver::{
    capillary_force, effective_velocity, inverse_effective_velocity, run_17, step_imex, CapillaryForm, PhysParams,
    PressureLaw, RunOptions, State,
};
use crate::spectral::random::bandlimited_field;
use crate::{Field, Grid, Spectrum, VectorField};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = Grid> {
    (1usize..=2, prop::sample::select(vec![32usize, 64])).prop_map(|(d, n)| Grid::periodic(d, n).unwrap())
}

fn vector(g: Grid, kmax: usize, amp: f64, seed: u64) -> VectorField {
    VectorField::new((0..g.dim()).map(|a| bandlimited_field(g, kmax, amp, seed + 7 * a as u64)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(g in grid(), seed in any::<u64>()) {
        let f = bandlimited_field(g, g.n() / 2 - 1, 1.0, seed);
        let back = f.forward().inverse();
        prop_assert!(back.sub(&f).norm_linf() < 1e-12);
    }

    #[test]
    fn blocks_sum_to_mean_free_part(g in grid(), kmax in 1usize..16, seed in any::<u64>()) {
        let part = build_partition(&g).unwrap();
        prop_assert!(part.defect().homogeneous < 1e-12);
        let f = bandlimited_field(g, kmax, 1.0, seed).map(|x| x + 0.5);
        prop_assert!(part.reconstruction_defect(&f).unwrap() < 1e-12);
    }

    #[test]
    fn besov_norm_is_homogeneous(g in grid(), seed in any::<u64>(), lam in -5.0f64..5.0, s in -1.0f64..2.0) {
        let part = build_partition(&g).unwrap();
        let f = bandlimited_field(g, 10, 1.0, seed);
        let spec = BesovSpec::homogeneous(s, 2.0, 1.0);
        let a = besov_norm(&f.scale(lam), &spec, &part).unwrap();
        let b = lam.abs() * besov_norm(&f, &spec, &part).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn propagator_is_a_semigroup(
        g in grid(),
        seed in any::<u64>(),
        coeffs in (0.3f64..2.0, 0.0f64..2.0, 0.3f64..2.0, 0.0f64..2.0),
        t1 in 0.0f64..0.05,
        t2 in 0.0f64..0.05,
    ) {
        let c = LinearCoeffs::new(coeffs.0, coeffs.1, coeffs.2, coeffs.3).unwrap();
        let prop = Propagator::new(g, &c).unwrap();
        let q = bandlimited_field(g, 8, 1.0, seed).forward();
        let u: Vec<Spectrum> = vector(g, 8, 1.0, seed ^ 1).components().iter().map(Field::forward).collect();
        let (q1, u1) = prop.evolve(t1, &q, &u);
        let (q2, u2) = prop.evolve(t2, &q1, &u1);
        let (q3, u3) = prop.evolve(t1 + t2, &q, &u);
        prop_assert!(q2.inverse().sub(&q3.inverse()).norm_linf() < 1e-10);
        for (a, b) in u2.iter().zip(&u3) {
            prop_assert!(a.inverse().sub(&b.inverse()).norm_linf() < 1e-10);
        }
    }

    #[test]
    fn effective_velocity_inverts(g in grid(), seed in any::<u64>(), mu in 0.2f64..2.0, amp in 0.0f64..0.5) {
        let p = PhysParams::effective(mu, PressureLaw::Linear { k: 1.0 });
        let s = State::new(bandlimited_field(g, 6, amp, seed), vector(g, 6, amp, seed ^ 3), 0.0).unwrap();
        let back = inverse_effective_velocity(&effective_velocity(&s, &p).unwrap(), &p).unwrap();
        prop_assert!(back.q.sub(&s.q).norm_linf() < 1e-12);
        prop_assert!(back.u.sub(&s.u).norm_linf() < 1e-12);
    }

    #[test]
    fn capillary_forms_agree(dim in 1usize..=2, seed in any::<u64>(), kappa in 0.1f64..3.0) {
        // the forms agree up to truncation error, so ρ must be resolved
        let g = Grid::periodic(dim, 128).unwrap();
        let rho = bandlimited_field(g, 3, 0.2, seed).map(|x| x.exp());
        let a = capillary_force(&rho, CapillaryForm::General, kappa).unwrap();
        for form in [CapillaryForm::LogForm, CapillaryForm::DivergenceForm] {
            let b = capillary_force(&rho, form, kappa).unwrap();
            prop_assert!(a.sub(&b).norm_linf() <= 1e-8 * a.norm_linf().max(1e-300));
        }
    }

    #[test]
    fn constant_states_are_fixed(g in grid(), q in -1.0f64..1.0, dt in 1e-4f64..1e-2) {
        let p = PhysParams::new(1.0, 0.3, 0.5, PressureLaw::Gamma { a: 1.0, gamma: 1.4 });
        let s = State::new(Field::constant(g, q), VectorField::zeros(g), 0.0).unwrap();
        let next = step_imex(&s, &p, dt).unwrap();
        prop_assert!(next.q.sub(&s.q).norm_linf() < 1e-14);
        prop_assert!(next.u.norm_linf() < 1e-14);
    }

    #[test]
    fn effective_system_keeps_mass(g in grid(), seed in any::<u64>(), amp in 0.0f64..0.2) {
        let p = PhysParams::effective(1.0, PressureLaw::Linear { k: 1.0 });
        let s = State::new(bandlimited_field(g, 4, amp, seed), vector(g, 4, amp, seed ^ 5), 0.0).unwrap();
        let sv = effective_velocity(&s, &p).unwrap();
        let run = run_17(&sv, &p, &RunOptions::new(0.01).with_dt(1e-3)).unwrap();
        prop_assert!(run.completed());
        prop_assert!((run.last_valid().rho.mean() - sv.rho.mean()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lacunary_norms_match_partial_sums(r in 1.1f64..6.0, n in 3i32..8, seed in any::<u64>()) {
        let fam = IllposedFamily::new(1, r, seed);
        let part = build_partition(&fam.member_grid(n).unwrap()).unwrap();
        let m = fam.build(n, &part).unwrap();
        prop_assert!((m.norms.b2r / m.norms.zeta_partial - 1.0).abs() < 1e-8);
        prop_assert!((m.norms.b21 / m.norms.harmonic_partial - 1.0).abs() < 1e-8);
        prop_assert!(m.norms.b2r <= m.norms.b21 * (1.0 + 1e-12));
    }
}
