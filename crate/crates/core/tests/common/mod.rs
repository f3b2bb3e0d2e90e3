#![allow(dead_code)]

use lqu_core::linalg::{c, identity, kron, pauli_x, pauli_y, pauli_z, CMatrix};
use lqu_core::lqu::skew_information_with_sqrt;
use lqu_core::sqrt_perturbation::exact_sqrt;
use lqu_core::DensityMatrix;

/// Quasi-uniform unit vectors on the sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Minimum skew information of `(n·σ) ⊗ 𝕀` over `n_dirs` directions.
pub fn brute_force_lqu(state: &DensityMatrix, n_dirs: usize) -> f64 {
    let sqrt_rho = exact_sqrt(state).unwrap();
    let (sx, sy, sz) = (pauli_x(), pauli_y(), pauli_z());
    let id = identity(state.d2());
    fibonacci_sphere(n_dirs)
        .iter()
        .map(|n| {
            let k_a = sx.scale(n[0]) + sy.scale(n[1]) + sz.scale(n[2]);
            skew_information_with_sqrt(state.data(), &sqrt_rho, &kron(&k_a, &id))
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn ket(amps: &[(f64, f64)]) -> Vec<num_complex::Complex64> {
    amps.iter().map(|&(re, im)| c(re, im)).collect()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    lqu_core::linalg::max_abs(m)
}
