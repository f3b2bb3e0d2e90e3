mod common;

use lqu_core::entanglement::concurrence_wootters;
use lqu_core::linalg::{commutator, frobenius, hermiticity_residual, kron, max_abs, CMatrix};
use lqu_core::linear_response::{build_w1_driven, rho1_driven, spectral_function, DriveSpec};
use lqu_core::lqu::{build_w1_general, lqu_exact, lqu_perturbative};
use lqu_core::random::{
    random_density_matrix, random_full_rank_state, random_traceless_hermitian, random_unitary, rng, StateRng,
};
use lqu_core::sqrt_perturbation::{exact_sqrt, perturbative_sqrt};
use lqu_core::state::{
    boltzmann_weights, eig_hermitian, partial_trace_b, thermal_state, DensityMatrix, Hamiltonian, PerturbationMatrix,
    SpectralData,
};
use lqu_core::su_algebra::{bloch_vector, build_generators, BlochSource};
use proptest::prelude::*;
use rand::Rng;

fn random_hamiltonian(d1: usize, d2: usize, r: &mut StateRng) -> Hamiltonian {
    let h = random_traceless_hermitian(d1 * d2, r).scale(2.0);
    Hamiltonian::new(h, d1, d2).unwrap()
}

/// Local unitary `U_A ⊗ U_B`.
fn local_unitary(d1: usize, d2: usize, r: &mut StateRng) -> CMatrix {
    kron(&random_unitary(d1, r), &random_unitary(d2, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bloch_vector_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut r = rng(seed);
        let gen = build_generators(3).unwrap();
        let x = random_density_matrix(3, 2, &mut r).into_data();
        let y = random_density_matrix(3, 2, &mut r).into_data();
        let combo = x.scale(a) + y.scale(b);
        let lhs = bloch_vector(&combo, &gen, 2, BlochSource::Equilibrium).unwrap().components;
        let bx = bloch_vector(&x, &gen, 2, BlochSource::Equilibrium).unwrap().components;
        let by = bloch_vector(&y, &gen, 2, BlochSource::Equilibrium).unwrap().components;
        for k in 0..lhs.len() {
            prop_assert!((lhs[k] - (bx[k] * a + by[k] * b)).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_function_antisymmetry(en in -2.0f64..2.0, em in -2.0f64..2.0, w in 0.0f64..2.0, d in 0.01f64..1.0) {
        let f_nm = spectral_function(en, em, w, d).unwrap();
        let f_mn = spectral_function(em, en, w, d).unwrap();
        prop_assert!((f_nm + f_mn.conj()).norm() < 1e-12 * (1.0 + f_nm.norm()));
    }

    #[test]
    fn rho1_is_hermitian_and_traceless(seed in any::<u64>(), t in 0.1f64..3.0, w in 0.0f64..2.0) {
        let mut r = rng(seed);
        let h0 = random_hamiltonian(2, 3, &mut r);
        let coupling = random_hamiltonian(2, 3, &mut r);
        let th = thermal_state(&h0, 1.0 / t).unwrap();
        let drive = DriveSpec::new(coupling, 0.05, w, 0.2).unwrap();
        let rho1 = rho1_driven(&th.h0_spectrum, &th.weights, &drive).unwrap();
        prop_assert!(hermiticity_residual(rho1.data()) < 1e-12);
        prop_assert!(rho1.data().trace().norm() < 1e-12);
    }

    #[test]
    fn driven_routes_agree(seed in any::<u64>(), t in 0.2f64..3.0, w in 0.0f64..2.0, qutrit in any::<bool>()) {
        let mut r = rng(seed);
        let (d1, d2) = if qutrit { (3, 2) } else { (2, 3) };
        let gen = build_generators(d1).unwrap();
        let h0 = random_hamiltonian(d1, d2, &mut r);
        let coupling = random_hamiltonian(d1, d2, &mut r);
        let th = thermal_state(&h0, 1.0 / t).unwrap();
        let drive = DriveSpec::new(coupling, 0.05, w, 0.2).unwrap();
        let direct = build_w1_driven(&th.h0_spectrum, &th.weights, &drive, &gen).unwrap();
        let rho1 = rho1_driven(&th.h0_spectrum, &th.weights, &drive).unwrap();
        let general = build_w1_general(&th.rho0_spectrum(), &rho1, &gen).unwrap();
        let scale = 1.0 + max_abs(&direct);
        prop_assert!(max_abs(&(direct - general.matrix)) < 1e-12 * scale);
    }

    #[test]
    fn lqu_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gen = build_generators(2).unwrap();
        let st = random_density_matrix(2, 3, &mut r);
        let u = local_unitary(2, 3, &mut r);
        let a = lqu_exact(&st, &gen).unwrap().value;
        let b = lqu_exact(&st.conjugate_by(&u).unwrap(), &gen).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let st = random_density_matrix(2, 2, &mut r);
        let u = local_unitary(2, 2, &mut r);
        let a = concurrence_wootters(&st).unwrap().raw;
        let b = concurrence_wootters(&st.conjugate_by(&u).unwrap()).unwrap().raw;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn perturbative_lqu_ignores_basis_inside_degenerate_blocks(seed in any::<u64>()) {
        let mut r = rng(seed);
        let gen = build_generators(2).unwrap();
        // λ = (0.1, 0.3, 0.3, 0.3), a singlet-triplet–like degeneracy
        let base = random_unitary(4, &mut r);
        let lambda = vec![0.1, 0.3, 0.3, 0.3];
        let spec_a = SpectralData::new(lambda.clone(), base.clone()).unwrap();
        let mut block = lqu_core::linalg::identity(4);
        let mix = random_unitary(3, &mut r);
        block.view_mut((1, 1), (3, 3)).copy_from(&mix);
        let spec_b = SpectralData::new(lambda, &base * block).unwrap();
        let rho1 = PerturbationMatrix::new(random_traceless_hermitian(4, &mut r), 0.02, 2, 2).unwrap();
        let a = lqu_perturbative(&spec_a, &rho1, &gen).unwrap();
        let b = lqu_perturbative(&spec_b, &rho1, &gen).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-10);
        let ea = perturbative_sqrt(&spec_a, &rho1).unwrap().rho1e;
        let eb = perturbative_sqrt(&spec_b, &rho1).unwrap().rho1e;
        prop_assert!(max_abs(&(ea - eb)) < 1e-10);
    }

    #[test]
    fn sqrt_correction_is_hermitian(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho0 = random_density_matrix(2, 2, &mut r);
        let spec = eig_hermitian(rho0.data()).unwrap();
        let rho1 = PerturbationMatrix::new(random_traceless_hermitian(4, &mut r), 1e-3, 2, 2).unwrap();
        let e = perturbative_sqrt(&spec, &rho1).unwrap();
        prop_assert!(hermiticity_residual(&e.rho1e) < 1e-9 * (1.0 + max_abs(&e.rho1e)));
    }

    #[test]
    fn sqrt_error_is_second_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho0 = random_full_rank_state(2, 2, 0.5, &mut r);
        let rho1 = random_traceless_hermitian(4, &mut r);
        let spec = eig_hermitian(rho0.data()).unwrap();
        let scaled: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&eps| {
                let p = PerturbationMatrix::new(rho1.clone(), eps, 2, 2).unwrap();
                let approx = perturbative_sqrt(&spec, &p).unwrap().first_order();
                let exact = exact_sqrt(&DensityMatrix::new(rho0.data() + rho1.scale(eps), 2, 2).unwrap()).unwrap();
                frobenius(&(exact - approx)) / (eps * eps)
            })
            .collect();
        let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        prop_assert!(hi / lo < 2.0, "{scaled:?}");
    }

    #[test]
    fn thermal_state_invariants(seed in any::<u64>(), t in 0.05f64..5.0) {
        let mut r = rng(seed);
        let h0 = random_hamiltonian(2, 2, &mut r);
        let th = thermal_state(&h0, 1.0 / t).unwrap();
        prop_assert!(max_abs(&commutator(th.state.data(), h0.data())) < 1e-12);
        let spec = eig_hermitian(h0.data()).unwrap();
        let z: f64 = spec.eigenvalues.iter().map(|e| (-e / t).exp()).sum();
        let (w, _) = boltzmann_weights(&spec.eigenvalues, 1.0 / t).unwrap();
        for (e, wk) in spec.eigenvalues.iter().zip(&w) {
            prop_assert!(((-e / t).exp() / z - wk).abs() < 1e-12);
        }
        let tr = partial_trace_b(&th.state).trace();
        prop_assert!((tr.re - 1.0).abs() < 1e-14 && tr.im.abs() < 1e-14);
    }

    #[test]
    fn structure_constant_symmetries(d in 2usize..6) {
        let gen = build_generators(d).unwrap();
        let n = gen.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    prop_assert_eq!(gen.f(i, j, k), -gen.f(j, i, k));
                    prop_assert_eq!(gen.g(i, j, k), gen.g(j, i, k));
                }
            }
        }
        prop_assert!(gen.product_rule_residual() < 1e-12);
    }
}

#[test]
fn brute_force_bounds_exact_lqu_for_qubit_qutrit() {
    let gen = build_generators(2).unwrap();
    let mut r = rng(5);
    for _ in 0..5 {
        let st = random_density_matrix(2, 3, &mut r);
        let u = lqu_exact(&st, &gen).unwrap().value;
        let brute = common::brute_force_lqu(&st, 4000);
        assert!(brute - u >= -1e-10 && brute - u <= 5e-3, "{brute} vs {u}");
    }
}

#[test]
fn random_weights_stay_normalized() {
    let mut r = rng(9);
    for _ in 0..10 {
        let e: Vec<f64> = (0..6).map(|_| r.random::<f64>() * 10.0).collect();
        let (w, _) = boltzmann_weights(&e, 50.0).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
