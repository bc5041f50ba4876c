mod common;

use common::*;
use trajlind::lindblad::*;
use trajlind::matcore::{paulis::*, *};
use trajlind::Error;

fn dephasing(g: f64) -> LindbladModel {
    LindbladModel::new(CMat::zeros(2, 2), vec![z().scale_real(g.sqrt())]).unwrap()
}

fn depolarizing(g: f64) -> LindbladModel {
    let s = (g / 2.0).sqrt();
    LindbladModel::new(CMat::zeros(2, 2), vec![x().scale_real(s), y().scale_real(s), z().scale_real(s)]).unwrap()
}

fn amplitude_damping() -> LindbladModel {
    LindbladModel::new(CMat::zeros(2, 2), vec![lowering()]).unwrap()
}

#[test]
fn liouvillian_matches_direct_action() {
    let mut r = rng(31);
    for (d, m) in [(2, 1), (2, 3), (4, 2)] {
        let model = random_admissible(&mut r, d, m, 0.8);
        let l = liouvillian(&model);
        for rho in basis_matrices(d) {
            let got = l.apply(&rho).unwrap();
            assert!(got.max_abs_diff(&apply_lindbladian(&model, &rho)) < 1e-13);
            assert!(got.trace().norm() < 1e-13);
        }
    }
}

#[test]
fn constraint_reports() {
    let rep = check_constraint(&dephasing(0.7), ADMISSIBILITY_TOL);
    assert!((rep.gamma - 0.7).abs() < 1e-15 && rep.residual < 1e-12 && rep.admissible);
    let rep = check_constraint(&amplitude_damping(), ADMISSIBILITY_TOL);
    assert!((rep.gamma - 0.5).abs() < 1e-15 && (rep.residual - 0.5).abs() < 1e-12 && !rep.admissible);
    let rep = check_constraint(&depolarizing(0.4), ADMISSIBILITY_TOL);
    assert!((rep.gamma - 0.6).abs() < 1e-15 && rep.residual < 1e-15);
    let rep = check_constraint(&LindbladModel::hamiltonian_only(x()).unwrap(), ADMISSIBILITY_TOL);
    assert!(rep.gamma == 0.0 && rep.admissible);
}

#[test]
fn representation_freedoms_leave_generator_unchanged() {
    let mut r = rng(32);
    for (d, m) in [(2, 2), (4, 3)] {
        let model = random_admissible(&mut r, d, m, 1.3);
        let base = liouvillian(&model);
        for _ in 0..50 {
            let u = random_unitary(&mut r, m);
            let mixed = unitary_mix(&model, &u).unwrap();
            assert!(liouvillian(&mixed).max_abs_diff(&base) < 1e-10);
            assert!(check_constraint(&mixed, ADMISSIBILITY_TOL).residual < 1e-12);

            let a: Vec<C64> = (0..m).map(|_| gaussian(&mut r)).collect();
            let shifted = inhomogeneous_transform(&model, &a, gaussian(&mut r).re).unwrap();
            assert!(liouvillian(&shifted).max_abs_diff(&base) < 1e-10);
        }
    }
}

#[test]
fn transform_examples() {
    let deph = dephasing(1.0);
    let shifted = inhomogeneous_transform(&deph, &[C64::new(0.0, 0.5)], 0.0).unwrap();
    assert!(liouvillian(&shifted).max_abs_diff(&liouvillian(&deph)) < 1e-12);
    let same = inhomogeneous_transform(&deph, &[C64::new(0.0, 0.0)], 0.0).unwrap();
    assert_eq!(same, deph);
    assert!(matches!(inhomogeneous_transform(&deph, &[], 0.0), Err(Error::Shape(_))));

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let two = LindbladModel::new(CMat::zeros(2, 2), vec![z(), CMat::identity(2)]).unwrap();
    let hadamard = CMat::from_real(2, 2, &[h, h, h, -h]).unwrap();
    let mixed = unitary_mix(&two, &hadamard).unwrap();
    assert!(liouvillian(&mixed).max_abs_diff(&liouvillian(&two)) < 1e-12);
    assert!(matches!(unitary_mix(&two, &CMat::identity(2).scale_real(2.0)), Err(Error::InvalidInput(_))));
}

#[test]
fn amplitude_damping_has_no_admissible_shift_on_grid() {
    let ad = amplitude_damping();
    let base = liouvillian(&ad);
    let mut best = f64::INFINITY;
    for i in 0..=80 {
        for j in 0..=80 {
            let a = C64::new(-2.0 + 0.05 * i as f64, -2.0 + 0.05 * j as f64);
            let t = inhomogeneous_transform(&ad, &[a], 0.0).unwrap();
            best = best.min(check_constraint(&t, ADMISSIBILITY_TOL).residual);
            if i % 20 == 0 && j % 20 == 0 {
                assert!(liouvillian(&t).max_abs_diff(&base) < 1e-10);
            }
        }
    }
    // ‖L†L − ΓI‖ = √(¼ + |a|²) for L = |0⟩⟨1| + aI.
    assert!((best - 0.5).abs() < 1e-12, "{best}");
}

#[test]
fn effective_hamiltonian_decay_is_state_independent_in_class() {
    let mut r = rng(33);
    let model = random_admissible(&mut r, 4, 2, 0.9);
    for tau in [0.1, 1.0] {
        let prop = no_jump_propagator(&model, tau).unwrap();
        for _ in 0..20 {
            let psi = random_state(&mut r, 4);
            let n: f64 = prop.matvec(&psi).iter().map(|z| z.norm_sqr()).sum();
            assert!((n - (-0.9 * tau).exp()).abs() < 1e-10);
        }
    }
    let heff = effective_hamiltonian(&dephasing(0.3));
    assert!(heff.max_abs_diff(&CMat::identity(2).scale(C64::new(0.0, -0.15))) < 1e-15);
    // Outside the class |0⟩ does not decay under amplitude damping.
    let prop = no_jump_propagator(&amplitude_damping(), 3.0).unwrap();
    let out = prop.matvec(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    assert!((out[0].norm() - 1.0).abs() < 1e-14);
}

#[test]
fn dephasing_coherence_is_an_eigenvector() {
    let l = liouvillian(&dephasing(0.5));
    let e01 = CMat::unit(2, 0, 1);
    assert!(l.apply(&e01).unwrap().max_abs_diff(&e01.scale_real(-1.0)) < 1e-15);
}

#[test]
fn propagators_are_cptp() {
    let mut r = rng(34);
    for model in [dephasing(1.0), depolarizing(0.4), random_admissible(&mut r, 4, 3, 1.0)] {
        for t in [0.1, 1.0, 5.0] {
            let p = SuperOp::new(model.dim(), expm(&liouvillian(&model).matrix().scale_real(t)).unwrap()).unwrap();
            let (min_eig, tp) = cptp_residuals(&p).unwrap();
            assert!(min_eig > -1e-9 && tp < 1e-10, "t={t}: {min_eig} {tp}");
        }
    }
}

#[test]
fn channel_form_reconstructs_generator() {
    let mut r = rng(35);
    for model in [dephasing(0.3), depolarizing(0.4), random_admissible(&mut r, 4, 2, 2.0)] {
        let form = decompose_channel_form(&model).unwrap();
        let mut completeness = CMat::zeros(model.dim(), model.dim());
        for k in &form.kraus {
            completeness = &completeness + &(&k.dagger() * k);
        }
        assert!(completeness.max_abs_diff(&CMat::identity(model.dim())) < 1e-10);
        assert!(form.generator(model.hamiltonian()).max_abs_diff(&liouvillian(&model)) < 1e-10);
    }
}

#[test]
fn depolarizing_channel_form_on_basis() {
    let form = decompose_channel_form(&depolarizing(0.4)).unwrap();
    assert!((form.gamma - 0.6).abs() < 1e-15);
    let r = form.channel().unwrap();
    for rho in basis_matrices(2) {
        let want = (&CMat::identity(2).scale(rho.trace() * 2.0) - &rho).scale_real(1.0 / 3.0);
        assert!(r.apply(&rho).unwrap().max_abs_diff(&want) < 1e-14);
    }
}

#[test]
fn induced_generator_matches_partial_trace_of_derivative() {
    let mut r = rng(36);
    for omega in [CMat::unit(2, 0, 0), random_density(&mut r, 2)] {
        let k = random_admissible(&mut r, 4, 3, 1.7);
        let induced = induced_subsystem_generator(&k, &omega).unwrap();
        let rep = check_constraint(&induced, ADMISSIBILITY_TOL);
        assert!(rep.admissible && (rep.gamma - 1.7).abs() < 1e-10);
        let lk = liouvillian(&k);
        let li = liouvillian(&induced);
        for rho in basis_matrices(2) {
            let big = lk.apply(&omega.kron(&rho)).unwrap();
            let want = partial_trace(&big, (2, 2), Keep::Second).unwrap();
            assert!(li.apply(&rho).unwrap().max_abs_diff(&want) < 1e-10);
        }
    }
}

#[test]
fn induced_generator_of_local_dephasing() {
    let k = LindbladModel::new(CMat::zeros(4, 4), vec![CMat::identity(2).kron(&z())]).unwrap();
    let mut r = rng(37);
    let omega = random_density(&mut r, 2);
    let induced = induced_subsystem_generator(&k, &omega).unwrap();
    assert!(liouvillian(&induced).max_abs_diff(&liouvillian(&dephasing(1.0))) < 1e-10);
    assert!(matches!(induced_subsystem_generator(&amplitude_damping_pair(), &omega), Err(Error::ConstraintViolation(_))));
}

fn amplitude_damping_pair() -> LindbladModel {
    LindbladModel::new(CMat::zeros(4, 4), vec![CMat::identity(2).kron(&lowering())]).unwrap()
}

#[test]
fn phi_is_cptp_across_grid() {
    let mut r = rng(38);
    let models = [dephasing(1.0), depolarizing(0.4), {
        let m = random_admissible(&mut r, 4, 2, 0.7);
        LindbladModel::new(CMat::zeros(4, 4), m.jumps().to_vec()).unwrap()
    }];
    for model in &models {
        for t in [1e-3, 0.1, 0.5, 1.0, 10.0] {
            let (min_eig, tp) = cptp_residuals(&extract_phi(model, t).unwrap()).unwrap();
            assert!(min_eig > -1e-9 && tp < 1e-9, "t={t}: {min_eig} {tp}");
        }
    }
}

#[test]
fn phi_tends_to_jump_channel_for_small_t() {
    let model = depolarizing(0.4);
    let phi = extract_phi(&model, 1e-6).unwrap();
    let r = decompose_channel_form(&model).unwrap().channel().unwrap();
    assert!(phi.max_abs_diff(&r) < 1e-4);
}

#[test]
fn depolarizing_semigroup_closed_form() {
    let model = depolarizing(0.4);
    let mut r = rng(39);
    let rho = random_density(&mut r, 2);
    let half = CMat::identity(2).scale_real(0.5);
    let p = SuperOp::new(2, expm(liouvillian(&model).matrix()).unwrap()).unwrap();
    let want = &half + &(&rho - &half).scale_real((-4.0 * 0.6 / 3.0f64).exp());
    assert!(p.apply(&rho).unwrap().max_abs_diff(&want) < 1e-10);
    assert!(cptp_residuals(&extract_phi(&model, 1.0).unwrap()).unwrap().0 > -1e-9);
}

#[test]
fn extreme_channels() {
    for p in [0.25, 0.5, 0.75] {
        let k = vec![
            CMat::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0f64 - p).sqrt()]).unwrap(),
            CMat::from_real(2, 2, &[0.0, p.sqrt(), 0.0, 0.0]).unwrap(),
        ];
        assert!(is_extreme_channel(&k).unwrap());
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!(!is_extreme_channel(&[CMat::identity(2).scale_real(h), z().scale_real(h)]).unwrap());
    let mut r = rng(40);
    // Generic 2-Kraus channels on a qubit are extreme; 3 Kraus ops never are (9 > 4).
    assert!(is_extreme_channel(&random_kraus(&mut r, 2, 2)).unwrap());
    assert!(!is_extreme_channel(&random_kraus(&mut r, 2, 3)).unwrap());
}

#[test]
fn json_model_roundtrip_through_file_format() {
    let mut r = rng(41);
    let model = random_admissible(&mut r, 4, 2, 1.0);
    let back = model_from_json(&model_to_json(&model)).unwrap();
    assert!(liouvillian(&back).max_abs_diff(&liouvillian(&model)) < 1e-15);
}
