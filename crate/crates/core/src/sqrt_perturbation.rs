//! Exact matrix square root and its first-order expansion
//! `√(ρ₀ + ερ₁) ≈ √ρ₀ + ε·ρ₁ᵉ`.
//!
//! In the eigenbasis `{|ψᵢ⟩, λᵢ}` of ρ₀ the correction is
//! `ρ₁ᵉᵢⱼ = ⟨ψᵢ|ρ₁|ψⱼ⟩ · (√λᵢ − √λⱼ)/(λᵢ − λⱼ)`, evaluated here through the
//! equivalent form `1/(√λᵢ + √λⱼ)`, which has no 0/0 at degenerate pairs.

use crate::error::{LquError, Result};
use crate::linalg::{hermiticity_residual, CMatrix};
use crate::state::{eig_hermitian, DensityMatrix, PerturbationMatrix, SpectralData};

/// Both eigenvalues below this are treated as lying in the kernel of ρ₀.
pub const KERNEL_ZERO: f64 = 1e-14;

/// Eigenvalues below this (negative) bound mean the input is not a state.
pub const SQRT_NEGATIVE_TOL: f64 = -1e-8;

/// Value of the divided-difference kernel for one eigenvalue pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    /// Both eigenvalues lie in the kernel of ρ₀, where the first-order
    /// expansion of the square root is undefined. `value` is 0 then.
    pub singular: bool,
}

/// `(√λᵢ − √λⱼ)/(λᵢ − λⱼ)` for non-negative arguments.
pub fn divided_difference(li: f64, lj: f64) -> Result<KernelValue> {
    if li < 0.0 || lj < 0.0 || li.is_nan() || lj.is_nan() {
        return Err(LquError::Domain(format!(
            "divided difference needs non-negative eigenvalues, got ({li}, {lj})"
        )));
    }
    if li < KERNEL_ZERO && lj < KERNEL_ZERO {
        return Ok(KernelValue {
            value: 0.0,
            singular: true,
        });
    }
    Ok(KernelValue {
        value: 1.0 / (li.sqrt() + lj.sqrt()),
        singular: false,
    })
}

/// Eigenvalue of a (nearly) PSD operator clamped at zero, or an error when
/// it is clearly negative.
fn clamp_eigenvalue(lambda: f64) -> Result<f64> {
    if lambda < SQRT_NEGATIVE_TOL {
        return Err(LquError::NotAState { min_eigenvalue: lambda });
    }
    Ok(lambda.max(0.0))
}

/// `√ρ` by spectral mapping. Eigenvalues below [`KERNEL_ZERO`] (including
/// tiny negative ones) map to 0, so rank-deficient states do not pick up
/// `√(roundoff)` contributions.
pub fn exact_sqrt(state: &DensityMatrix) -> Result<CMatrix> {
    sqrt_psd(state.data())
}

/// `√A` for any Hermitian PSD matrix (not necessarily unit trace).
pub fn sqrt_psd(a: &CMatrix) -> Result<CMatrix> {
    let spec = eig_hermitian(a)?;
    sqrt_from_spectrum(&spec)
}

pub fn sqrt_from_spectrum(spec: &SpectralData) -> Result<CMatrix> {
    let roots = spec
        .eigenvalues
        .iter()
        .map(|l| clamp_eigenvalue(*l).map(|l| if l < KERNEL_ZERO { 0.0 } else { l.sqrt() }))
        .collect::<Result<Vec<_>>>()?;
    let v = &spec.eigenvectors;
    Ok(v * crate::linalg::from_real_diagonal(&roots) * v.adjoint())
}

/// `√ρ₀` and the first-order correction ρ₁ᵉ, both in the computational basis.
#[derive(Debug, Clone)]
pub struct SqrtExpansion {
    pub sqrt_rho0: CMatrix,
    /// ρ₁ᵉ for the unscaled ρ₁; the full correction is `epsilon · rho1e`.
    pub rho1e: CMatrix,
    pub epsilon: f64,
    /// Number of ordered eigenvalue pairs that hit the singular kernel with a
    /// nonzero ρ₁ element.
    pub singular_pairs: usize,
}

impl SqrtExpansion {
    /// `√ρ₀ + ε·ρ₁ᵉ`.
    pub fn first_order(&self) -> CMatrix {
        &self.sqrt_rho0 + self.rho1e.scale(self.epsilon)
    }

    pub fn is_singular(&self) -> bool {
        self.singular_pairs > 0
    }
}

type KernelMatrix = (Vec<Vec<f64>>, Vec<(usize, usize)>);

/// Matrix of kernel values `k(λᵢ, λⱼ)` for a ρ₀ spectrum, plus the list of
/// singular index pairs.
pub(crate) fn kernel_matrix(eigenvalues: &[f64]) -> Result<KernelMatrix> {
    let clamped = eigenvalues
        .iter()
        .map(|l| clamp_eigenvalue(*l))
        .collect::<Result<Vec<_>>>()?;
    let n = clamped.len();
    let mut k = vec![vec![0.0; n]; n];
    let mut singular = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let kv = divided_difference(clamped[i], clamped[j])?;
            k[i][j] = kv.value;
            if kv.singular {
                singular.push((i, j));
            }
        }
    }
    Ok((k, singular))
}

/// ρ₁ᵉ in the ρ₀ eigenbasis, from ρ₁ already rotated into that basis.
pub(crate) fn rho1e_in_eigenbasis(
    rho1_eig: &CMatrix,
    kernel: &[Vec<f64>],
    singular: &[(usize, usize)],
) -> (CMatrix, usize) {
    let n = rho1_eig.nrows();
    let out = CMatrix::from_fn(n, n, |i, j| rho1_eig[(i, j)] * kernel[i][j]);
    let hits = singular.iter().filter(|(i, j)| rho1_eig[(*i, *j)].norm() > 0.0).count();
    (out, hits)
}

/// First-order expansion of `√(ρ₀ + ερ₁)` around the spectrum of ρ₀.
pub fn perturbative_sqrt(rho0_spec: &SpectralData, rho1: &PerturbationMatrix) -> Result<SqrtExpansion> {
    let n = rho0_spec.dim();
    if rho1.data().nrows() != n {
        return Err(crate::error::shape_mismatch(
            format!("{n}x{n}"),
            format!("{0}x{0}", rho1.data().nrows()),
        ));
    }
    let sqrt_rho0 = sqrt_from_spectrum(rho0_spec)?;
    let (kernel, singular) = kernel_matrix(&rho0_spec.eigenvalues)?;
    let rho1_eig = rho0_spec.to_eigenbasis(rho1.data());
    let (rho1e_eig, singular_pairs) = rho1e_in_eigenbasis(&rho1_eig, &kernel, &singular);
    let rho1e = rho0_spec.from_eigenbasis(&rho1e_eig);
    debug_assert!(hermiticity_residual(&rho1e) < 1e-9 * (1.0 + crate::linalg::max_abs(&rho1e)));
    Ok(SqrtExpansion {
        sqrt_rho0,
        rho1e,
        epsilon: rho1.epsilon(),
        singular_pairs,
    })
}
