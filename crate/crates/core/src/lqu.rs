//! Skew information, the `w = w⁰ + w¹` matrix and the local quantum
//! uncertainty (LQU).
//!
//! For a local observable `K = n·T ⊗ 𝕀` the skew information is
//! `I(n) = 2/d₁ − nᵀ w n`, hence `LQU = 2/d₁ − λ_max(w)`. The equilibrium
//! part is
//!
//! ```text
//! w⁰ᵢⱼ = Tr[√ρ₀ (Tᵢ⊗𝕀) √ρ₀ (Tⱼ⊗𝕀)] − Gᵢⱼ·L
//! ```
//!
//! and the first-order correction is
//!
//! ```text
//! w¹ᵢⱼ = 2ε Tr[√ρ₀ (Tᵢ⊗𝕀) ρ₁ᵉ (Tⱼ⊗𝕀)] − ε Gᵢⱼ·L¹
//! ```
//!
//! `w¹` is Hermitian but generally complex. The total is Hermitized before
//! the eigenvalue problem and the largest real eigenvalue is used.

use num_complex::Complex64;

use crate::error::{shape_mismatch, LquError, Result};
use crate::linalg::{hermiticity_residual, hermitize, trace_product, CMatrix};
use crate::sqrt_perturbation::{exact_sqrt, kernel_matrix, rho1e_in_eigenbasis};
use crate::state::{eig_hermitian, DensityMatrix, PerturbationMatrix, SpectralData};
use crate::su_algebra::{bloch_components, GeneratorSet};

/// Slack on the `[0, 2/d₁]` range before a result is flagged.
pub const RANGE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LquMode {
    Exact,
    PerturbativeGeneral,
    PerturbativeDriven,
    ClosedForm,
}

impl LquMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            LquMode::Exact => "exact",
            LquMode::PerturbativeGeneral => "perturbative-general",
            LquMode::PerturbativeDriven => "perturbative-driven",
            LquMode::ClosedForm => "closed-form",
        }
    }
}

/// Conditions that do not stop a computation but qualify its result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// ρ₁ had weight on eigenvalue pairs inside the kernel of ρ₀.
    KernelSingular { pairs: usize },
    /// The raw LQU left its physical range (large perturbation).
    OutOfRange { value: f64 },
}

impl Warning {
    pub fn tag(&self) -> &'static str {
        match self {
            Warning::KernelSingular { .. } => "kernel-singular",
            Warning::OutOfRange { .. } => "out-of-range",
        }
    }
}

/// `w⁰` and `w¹` in the generator basis of SU(d₁).
#[derive(Debug, Clone)]
pub struct WMatrix {
    pub w0: CMatrix,
    pub w1: CMatrix,
    pub d1: usize,
}

impl WMatrix {
    pub fn total(&self) -> CMatrix {
        &self.w0 + &self.w1
    }

    pub fn hermitian_total(&self) -> CMatrix {
        hermitize(&self.total())
    }

    /// Ascending eigenvalues of the Hermitized total.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eig_hermitian(&self.hermitian_total())?.eigenvalues)
    }
}

#[derive(Debug, Clone)]
pub struct LquResult {
    /// Raw `2/d₁ − λ_max`, never clamped.
    pub value: f64,
    pub max_eigenvalue: f64,
    pub eigenvalues: Vec<f64>,
    pub w: WMatrix,
    pub mode: LquMode,
    pub warnings: Vec<Warning>,
}

impl LquResult {
    /// Value clamped to `[0, 1]` for reporting.
    pub fn clamped(&self) -> f64 {
        self.value.clamp(0.0, 1.0)
    }

    pub fn is_valid(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Finishes an LQU evaluation from an assembled `w`.
pub fn lqu_from_w(w: WMatrix, mode: LquMode, mut warnings: Vec<Warning>) -> Result<LquResult> {
    let eigenvalues = w.eigenvalues()?;
    let max_eigenvalue = *eigenvalues.last().expect("w has at least three rows");
    let upper = 2.0 / w.d1 as f64;
    let value = upper - max_eigenvalue;
    if value < -RANGE_SLACK || value > upper + RANGE_SLACK {
        warnings.push(Warning::OutOfRange { value });
    }
    Ok(LquResult {
        value,
        max_eigenvalue,
        eigenvalues,
        w,
        mode,
        warnings,
    })
}

fn check_generators(gen: &GeneratorSet, d1: usize) -> Result<()> {
    if gen.dim() != d1 {
        return Err(shape_mismatch(
            format!("SU({d1}) generators"),
            format!("SU({}) generators", gen.dim()),
        ));
    }
    Ok(())
}

/// Skew information `I(ρ, K) = Tr(ρK²) − Tr(√ρ K √ρ K)`.
pub fn skew_information(state: &DensityMatrix, k: &CMatrix) -> Result<f64> {
    let n = state.dim();
    if k.nrows() != n || k.ncols() != n {
        return Err(shape_mismatch(
            format!("{n}x{n} observable"),
            format!("{}x{}", k.nrows(), k.ncols()),
        ));
    }
    let residual = hermiticity_residual(k);
    if residual > 1e-12 * crate::linalg::max_abs(k).max(1.0) {
        return Err(LquError::NotHermitian { residual });
    }
    let sqrt_rho = exact_sqrt(state)?;
    Ok(skew_information_with_sqrt(state.data(), &sqrt_rho, k))
}

/// Skew information with a precomputed `√ρ`.
pub fn skew_information_with_sqrt(rho: &CMatrix, sqrt_rho: &CMatrix, k: &CMatrix) -> f64 {
    let k2 = k * k;
    let a = trace_product(rho, &k2);
    let sk = sqrt_rho * k;
    let b = trace_product(&sk, &sk);
    (a - b).re
}

/// Subtracts `Gᵢⱼ·L` (scaled by `scale`) in place; no-op for SU(2).
fn subtract_g_term(w: &mut CMatrix, gen: &GeneratorSet, bloch: &[Complex64], scale: f64, fast_path: bool) {
    if fast_path && gen.g_vanishes() {
        return;
    }
    let n = gen.len();
    for i in 0..n {
        for j in 0..n {
            w[(i, j)] -= gen.g_dot(i, j, bloch) * scale;
        }
    }
}

/// `w⁰` from the exact `√ρ` of a single state.
pub fn build_w0_exact(state: &DensityMatrix, gen: &GeneratorSet) -> Result<CMatrix> {
    build_w0_exact_impl(state, gen, true)
}

pub(crate) fn build_w0_exact_impl(state: &DensityMatrix, gen: &GeneratorSet, fast_path: bool) -> Result<CMatrix> {
    check_generators(gen, state.d1())?;
    let sqrt_rho = exact_sqrt(state)?;
    let lifted = gen.lifted(state.d2());
    let n = gen.len();
    // √ρ·Tᵢ for each i, then w⁰ᵢⱼ = Tr[(√ρTᵢ)(√ρTⱼ)]
    let halves: Vec<CMatrix> = lifted.iter().map(|t| &sqrt_rho * t).collect();
    let mut w0 = CMatrix::from_fn(n, n, |i, j| trace_product(&halves[i], &halves[j]));
    let l = bloch_components(state.data(), &lifted);
    subtract_g_term(&mut w0, gen, &l, 1.0, fast_path);
    Ok(w0)
}

/// Generators rotated into the ρ₀ eigenbasis: `Pᵢ = V†(Tᵢ⊗𝕀)V`.
pub(crate) fn generators_in_eigenbasis(spec: &SpectralData, gen: &GeneratorSet, d2: usize) -> Vec<CMatrix> {
    gen.lifted(d2).iter().map(|t| spec.to_eigenbasis(t)).collect()
}

fn clamped_roots(eigenvalues: &[f64]) -> Vec<f64> {
    eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// `w⁰` from the spectral data of ρ₀:
/// `Σₙₘ √λₙ√λₘ ⟨ψₙ|Tᵢ|ψₘ⟩⟨ψₘ|Tⱼ|ψₙ⟩ − Gᵢⱼ·L`.
pub fn build_w0_spectral(rho0_spec: &SpectralData, gen: &GeneratorSet, d2: usize) -> Result<CMatrix> {
    build_w0_spectral_impl(rho0_spec, gen, d2, true)
}

pub(crate) fn build_w0_spectral_impl(
    rho0_spec: &SpectralData,
    gen: &GeneratorSet,
    d2: usize,
    fast_path: bool,
) -> Result<CMatrix> {
    let dim = gen.dim() * d2;
    if rho0_spec.dim() != dim {
        return Err(shape_mismatch(format!("spectrum of size {dim}"), rho0_spec.dim()));
    }
    let projected = generators_in_eigenbasis(rho0_spec, gen, d2);
    let roots = clamped_roots(&rho0_spec.eigenvalues);
    let scaled: Vec<CMatrix> = projected
        .iter()
        .map(|p| CMatrix::from_fn(dim, dim, |r, c| p[(r, c)] * roots[r]))
        .collect();
    let n = gen.len();
    let mut w0 = CMatrix::from_fn(n, n, |i, j| trace_product(&scaled[i], &scaled[j]));
    let l: Vec<Complex64> = projected
        .iter()
        .map(|p| (0..dim).map(|k| p[(k, k)] * rho0_spec.eigenvalues[k]).sum())
        .collect();
    subtract_g_term(&mut w0, gen, &l, 1.0, fast_path);
    Ok(w0)
}

/// First-order `w¹` with any kernel-singular count attached.
#[derive(Debug, Clone)]
pub struct W1 {
    pub matrix: CMatrix,
    pub singular_pairs: usize,
}

impl W1 {
    pub fn warnings(&self) -> Vec<Warning> {
        if self.singular_pairs > 0 {
            vec![Warning::KernelSingular {
                pairs: self.singular_pairs,
            }]
        } else {
            Vec::new()
        }
    }
}

/// `w¹ᵢⱼ = 2ε Tr[√ρ₀ Tᵢ ρ₁ᵉ Tⱼ] − ε Gᵢⱼ·L¹` through the divided-difference
/// kernel. `ε` is taken from `rho1` and applied once.
pub fn build_w1_general(rho0_spec: &SpectralData, rho1: &PerturbationMatrix, gen: &GeneratorSet) -> Result<W1> {
    build_w1_general_impl(rho0_spec, rho1, gen, true)
}

pub(crate) fn build_w1_general_impl(
    rho0_spec: &SpectralData,
    rho1: &PerturbationMatrix,
    gen: &GeneratorSet,
    fast_path: bool,
) -> Result<W1> {
    check_generators(gen, rho1.d1())?;
    let d2 = rho1.d2();
    let dim = gen.dim() * d2;
    if rho0_spec.dim() != dim {
        return Err(shape_mismatch(format!("spectrum of size {dim}"), rho0_spec.dim()));
    }
    let eps = rho1.epsilon();
    let projected = generators_in_eigenbasis(rho0_spec, gen, d2);
    let roots = clamped_roots(&rho0_spec.eigenvalues);
    let (kernel, singular) = kernel_matrix(&rho0_spec.eigenvalues)?;
    let rho1_eig = rho0_spec.to_eigenbasis(rho1.data());
    let (rho1e, singular_pairs) = rho1e_in_eigenbasis(&rho1_eig, &kernel, &singular);

    let left: Vec<CMatrix> = projected
        .iter()
        .map(|p| CMatrix::from_fn(dim, dim, |r, c| p[(r, c)] * roots[r]))
        .collect();
    let right: Vec<CMatrix> = projected.iter().map(|p| &rho1e * p).collect();
    let n = gen.len();
    let mut w1 = CMatrix::from_fn(n, n, |i, j| trace_product(&left[i], &right[j]) * (2.0 * eps));
    let l1: Vec<Complex64> = projected.iter().map(|p| trace_product(&rho1_eig, p)).collect();
    subtract_g_term(&mut w1, gen, &l1, eps, fast_path);
    Ok(W1 {
        matrix: w1,
        singular_pairs,
    })
}

/// Exact LQU of a single state.
pub fn lqu_exact(state: &DensityMatrix, gen: &GeneratorSet) -> Result<LquResult> {
    let w0 = build_w0_exact(state, gen)?;
    let n = w0.nrows();
    let w = WMatrix {
        w0,
        w1: CMatrix::zeros(n, n),
        d1: state.d1(),
    };
    lqu_from_w(w, LquMode::Exact, Vec::new())
}

/// First-order LQU of `ρ₀ + ερ₁`, from the spectrum of ρ₀.
pub fn lqu_perturbative(rho0_spec: &SpectralData, rho1: &PerturbationMatrix, gen: &GeneratorSet) -> Result<LquResult> {
    let w0 = build_w0_spectral(rho0_spec, gen, rho1.d2())?;
    let w1 = build_w1_general(rho0_spec, rho1, gen)?;
    let warnings = w1.warnings();
    let w = WMatrix {
        w0,
        w1: w1.matrix,
        d1: rho1.d1(),
    };
    lqu_from_w(w, LquMode::PerturbativeGeneral, warnings)
}

/// Inputs accepted by [`lqu`].
#[derive(Debug, Clone, Copy)]
pub enum LquInput<'a> {
    Exact(&'a DensityMatrix),
    Perturbative {
        rho0: &'a SpectralData,
        rho1: &'a PerturbationMatrix,
    },
}

pub fn lqu(input: LquInput<'_>, gen: &GeneratorSet) -> Result<LquResult> {
    match input {
        LquInput::Exact(state) => lqu_exact(state, gen),
        LquInput::Perturbative { rho0, rho1 } => lqu_perturbative(rho0, rho1, gen),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_real_diagonal, identity, kron, max_abs, pauli_x, pauli_z, ZERO};
    use crate::random::{random_density_matrix, random_traceless_hermitian, rng};
    use crate::su_algebra::build_generators;

    fn ket(amps: &[f64]) -> Vec<Complex64> {
        amps.iter().map(|a| c(*a, 0.0)).collect()
    }

    #[test]
    fn skew_information_examples() {
        let rho = DensityMatrix::new(from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]), 2, 2).unwrap();
        let k = kron(&pauli_z(), &identity(2));
        assert!(skew_information(&rho, &k).unwrap().abs() < 1e-15);

        let mm = DensityMatrix::maximally_mixed(2, 2);
        assert!(skew_information(&mm, &k).unwrap().abs() < 1e-15);

        // pure state: variance of K
        let psi = ket(&[0.6, 0.0, 0.0, 0.8]);
        let rho = DensityMatrix::pure(&psi, 2, 2).unwrap();
        let kx = kron(&pauli_x(), &pauli_x());
        let mean = trace_product(rho.data(), &kx).re;
        let var = trace_product(rho.data(), &(&kx * &kx)).re - mean * mean;
        assert!((skew_information(&rho, &kx).unwrap() - var).abs() < 1e-12);
    }

    #[test]
    fn skew_information_rejects_bad_observable() {
        let mm = DensityMatrix::maximally_mixed(2, 2);
        assert!(skew_information(&mm, &identity(2)).is_err());
        let mut k = identity(4);
        k[(0, 1)] = c(0.0, 1.0);
        assert!(matches!(skew_information(&mm, &k), Err(LquError::NotHermitian { .. })));
    }

    #[test]
    fn w0_of_maximally_mixed_is_identity() {
        let gen = build_generators(2).unwrap();
        let w0 = build_w0_exact(&DensityMatrix::maximally_mixed(2, 2), &gen).unwrap();
        assert!(max_abs(&(w0 - identity(3))) < 1e-15);
    }

    #[test]
    fn bell_and_product_states() {
        let gen = build_generators(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&ket(&[h, 0.0, 0.0, h]), 2, 2).unwrap();
        let r = lqu_exact(&bell, &gen).unwrap();
        assert!(r.max_eigenvalue.abs() < 1e-10);
        assert!((r.value - 1.0).abs() < 1e-10);

        let product = DensityMatrix::pure(&ket(&[1.0, 0.0, 0.0, 0.0]), 2, 2).unwrap();
        assert!(lqu_exact(&product, &gen).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn generator_dimension_must_match() {
        let gen = build_generators(3).unwrap();
        assert!(lqu_exact(&DensityMatrix::maximally_mixed(2, 2), &gen).is_err());
    }

    #[test]
    fn fast_path_matches_full_assembly() {
        let gen = build_generators(2).unwrap();
        let mut r = rng(7);
        for _ in 0..5 {
            let rho = random_density_matrix(2, 3, &mut r);
            let fast = build_w0_exact_impl(&rho, &gen, true).unwrap();
            let full = build_w0_exact_impl(&rho, &gen, false).unwrap();
            assert!(max_abs(&(fast - full)) < 1e-15);

            let spec = eig_hermitian(rho.data()).unwrap();
            let rho1 = PerturbationMatrix::new(random_traceless_hermitian(6, &mut r), 0.01, 2, 3).unwrap();
            let fast = build_w1_general_impl(&spec, &rho1, &gen, true).unwrap();
            let full = build_w1_general_impl(&spec, &rho1, &gen, false).unwrap();
            assert!(max_abs(&(fast.matrix - full.matrix)) < 1e-15);
            let fast = build_w0_spectral_impl(&spec, &gen, 3, true).unwrap();
            let full = build_w0_spectral_impl(&spec, &gen, 3, false).unwrap();
            assert!(max_abs(&(fast - full)) < 1e-15);
        }
    }

    #[test]
    fn spectral_w0_equals_exact_w0() {
        let mut r = rng(11);
        for d1 in [2, 3] {
            let gen = build_generators(d1).unwrap();
            let rho = random_density_matrix(d1, 2, &mut r);
            let spec = eig_hermitian(rho.data()).unwrap();
            let a = build_w0_exact(&rho, &gen).unwrap();
            let b = build_w0_spectral(&spec, &gen, 2).unwrap();
            assert!(max_abs(&(a - b)) < 1e-12, "d1={d1}");
        }
    }

    #[test]
    fn w1_vanishes_for_zero_perturbation_and_is_linear_in_epsilon() {
        let gen = build_generators(2).unwrap();
        let mut r = rng(3);
        let rho = random_density_matrix(2, 2, &mut r);
        let spec = eig_hermitian(rho.data()).unwrap();
        let zero = build_w1_general(&spec, &PerturbationMatrix::zero(0.5, 2, 2), &gen).unwrap();
        assert_eq!(max_abs(&zero.matrix), 0.0);

        let rho1 = PerturbationMatrix::new(random_traceless_hermitian(4, &mut r), 1.0, 2, 2).unwrap();
        let base = build_w1_general(&spec, &rho1, &gen).unwrap().matrix;
        for eps in [1e-2, 1e-4, 1e-6] {
            let w = build_w1_general(&spec, &rho1.with_epsilon(eps), &gen).unwrap().matrix;
            assert!(max_abs(&(w - base.scale(eps))) < 1e-15);
        }
    }

    #[test]
    fn exact_lqu_on_su3_stays_in_range() {
        let gen = build_generators(3).unwrap();
        let mut r = rng(5);
        for _ in 0..5 {
            let rho = random_density_matrix(3, 2, &mut r);
            let res = lqu_exact(&rho, &gen).unwrap();
            assert!(res.value >= -1e-10 && res.value <= 2.0 / 3.0 + 1e-10);
            assert!(res.warnings.is_empty());
        }
    }

    #[test]
    fn large_perturbation_is_flagged_out_of_range() {
        let gen = build_generators(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[c(h, 0.0), ZERO, ZERO, c(h, 0.0)], 2, 2).unwrap();
        let mixed = DensityMatrix::new(bell.data().scale(0.9) + identity(4).scale(0.025), 2, 2).unwrap();
        let spec = eig_hermitian(mixed.data()).unwrap();
        let rho1 = PerturbationMatrix::new(kron(&pauli_z(), &pauli_z()), 5.0, 2, 2).unwrap();
        let res = lqu_perturbative(&spec, &rho1, &gen).unwrap();
        assert!(res.warnings.iter().any(|w| matches!(w, Warning::OutOfRange { .. })));
    }
}
