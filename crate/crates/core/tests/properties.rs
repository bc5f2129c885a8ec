use proptest::prelude::*;
use sveuler::diagnostics::{c_max, d_max, energy_spectrum, richardson_extrapolate, structure_function, KernelKind, RGrid};
use sveuler::ensemble::aggregate;
use sveuler::spectral::{
    leray_project, nonlinear_term, random_divergence_free, random_field, velocity_from_vorticity, vorticity_from_velocity,
    Transform,
};
use sveuler::theory::{check_envelope, sublinear_envelope};
use sveuler::{GridSpec, MultiplierMode, SolverConfig, SvOperator};

fn field_params() -> impl Strategy<Value = (usize, f64, u64)> {
    (2usize..10, 0.5f64..3.0, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leray_projection_is_idempotent_and_solenoidal((n, decay, seed) in field_params()) {
        let g = GridSpec::new(n).unwrap();
        let p = leray_project(&random_field(g, 2, n, decay, seed)).unwrap();
        prop_assert!(p.divergence_defect() <= 1e-14);
        prop_assert!(leray_project(&p).unwrap().distance(&p) <= 1e-14 * p.norm());
    }

    #[test]
    fn vorticity_round_trip((n, decay, seed) in field_params()) {
        let g = GridSpec::new(n).unwrap();
        let u = random_divergence_free(g, n, decay, seed);
        let back = velocity_from_vorticity(&vorticity_from_velocity(&u).unwrap()).unwrap();
        prop_assert!(back.distance(&u) <= 1e-13 * u.norm());
    }

    #[test]
    fn transform_round_trip((n, decay, seed) in field_params()) {
        let g = GridSpec::new(n).unwrap();
        let u = random_divergence_free(g, n, decay, seed);
        let mut t = Transform::new(g);
        let m = g.n_phys() * g.n_phys();
        let (mut a, mut b) = (vec![0.0; m], vec![0.0; m]);
        t.to_physical_pair(u.component(0), u.component(1), &mut a, &mut b);
        let mut back = u.clone();
        let (o1, o2) = back.split_vector_mut();
        t.to_spectral_pair(&a, &b, o1, o2);
        prop_assert!(back.distance(&u) <= 1e-13 * u.norm());
        // point values agree with direct summation
        let i = (seed % m as u64) as usize;
        let (x1, x2) = ((i / g.n_phys()) as f64 / g.n_phys() as f64, (i % g.n_phys()) as f64 / g.n_phys() as f64);
        prop_assert!((u.eval(0, x1, x2) - a[i]).abs() <= 1e-12 * (1.0 + u.norm()));
    }

    #[test]
    fn advection_conserves_energy_and_invariants((n, decay, seed) in field_params()) {
        let g = GridSpec::new(n).unwrap();
        let u = random_divergence_free(g, n, decay, seed);
        let nl = nonlinear_term(&u).unwrap();
        let work: f64 = u.coeffs().iter().zip(nl.coeffs()).map(|(a, b)| (a.conj() * b).re).sum();
        let scale = u.norm_sq() * (1.0 + u.norm()) * (2.0 * std::f64::consts::PI * n as f64);
        prop_assert!(work.abs() <= 1e-12 * scale, "work {work}");
        prop_assert!(nl.divergence_defect() <= 1e-12 * (1.0 + nl.norm()));
        prop_assert!(nl.reality_defect() <= 1e-12 * (1.0 + nl.norm()));
    }

    #[test]
    fn one_step_dissipates(n in 4usize..12, eps in 0.01f64..0.2, seed in any::<u64>(), ns_like in any::<bool>()) {
        let mode = if ns_like { MultiplierMode::NavierStokesLike } else { MultiplierMode::SpectralViscosity };
        let cfg = SolverConfig::new(n, eps, mode, 1.0);
        let mut op = SvOperator::new(&cfg).unwrap();
        let u = random_divergence_free(GridSpec::new(n).unwrap(), n, 1.5, seed);
        let dt = op.stable_dt(&u);
        let next = op.step(&u, dt, 0.0).unwrap();
        prop_assert!(next.norm_sq() <= u.norm_sq() * (1.0 + 1e-12));
        prop_assert!(next.divergence_defect() <= 1e-12 * next.norm());
        prop_assert_eq!(next.mean_defect(), 0.0);
    }

    #[test]
    fn structure_function_is_monotone_and_homogeneous((n, decay, seed) in field_params(), s in 0.1f64..10.0) {
        let g = GridSpec::new(n).unwrap();
        let u = random_divergence_free(g, n, decay, seed);
        let r = RGrid::for_resolution(n);
        let t = structure_function(&u, &r, KernelKind::Numerical);
        prop_assert!(t.s2.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-14)));
        prop_assert!(t.s2[t.s2.len() - 1] <= 2f64.sqrt() * u.norm() * (1.0 + 1e-12));
        let mut v = u.clone();
        v.scale(s);
        let tv = structure_function(&v, &r, KernelKind::Numerical);
        prop_assert!((c_max(&tv, 0.5) - s * c_max(&t, 0.5)).abs() <= 1e-12 * s * c_max(&t, 0.5));
        let (e, ev) = (energy_spectrum(&u), energy_spectrum(&v));
        prop_assert!((d_max(&ev, 2.0) - s * s * d_max(&e, 2.0)).abs() <= 1e-12 * s * s * d_max(&e, 2.0));
        prop_assert!((e.total() - 0.5 * u.norm_sq()).abs() <= 1e-12 * u.norm_sq());
    }

    #[test]
    fn aggregate_bounds(values in prop::collection::vec(-1e3f64..1e3, 1..40)) {
        let s = aggregate(&values).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.mean >= lo - 1e-9 && s.mean <= hi + 1e-9);
        prop_assert!(s.std >= 0.0 && s.std <= (hi - lo) + 1e-9);
        prop_assert!((s.mc_error * (values.len() as f64).sqrt() - s.std).abs() <= 1e-9);
    }

    #[test]
    fn richardson_reproduces_quadratics(c in -5.0f64..5.0, c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, n in 16usize..256) {
        let pts: Vec<(f64, f64)> = [n, 2 * n, 4 * n].iter().map(|&k| {
            let d = 1.0 / k as f64;
            (d, c + c1 * d + c2 * d * d)
        }).collect();
        prop_assert!((richardson_extrapolate(&pts).unwrap() - c).abs() <= 1e-10 * (1.0 + c.abs() + c1.abs() + c2.abs()));
    }

    #[test]
    fn envelope_properties(a in 0.0f64..5.0, p in 1.0f64..3.0, k_max in 50usize..300) {
        let sups: Vec<f64> = (0..=k_max).map(|k| a * (1.0 + k as f64).powf(-p)).collect();
        let env = sublinear_envelope(&sups).unwrap();
        let report = check_envelope(&env, &sups);
        prop_assert!(report.all_hold() && report.decays, "{report:?}");
    }
}
