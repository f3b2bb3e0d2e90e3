//! Two-qubit concurrence and pure-state entanglement.

use num_complex::Complex64;

use crate::error::{LquError, Result};
use crate::heisenberg::XStateEntries;
use crate::linalg::{kron, pauli_y, CMatrix};
use crate::sqrt_perturbation::{KERNEL_ZERO, SQRT_NEGATIVE_TOL};
use crate::state::{eig_hermitian, partial_trace_b_raw, DensityMatrix};

/// Off-X entries above this make the X-state formula inapplicable.
pub const X_SHAPE_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcurrenceMethod {
    Wootters,
    XState,
}

impl ConcurrenceMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConcurrenceMethod::Wootters => "wootters",
            ConcurrenceMethod::XState => "x-state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult {
    /// `max(0, raw)`.
    pub value: f64,
    pub method: ConcurrenceMethod,
    /// Unclamped value; its sign change marks the entanglement threshold.
    pub raw: f64,
}

impl ConcurrenceResult {
    fn new(raw: f64, method: ConcurrenceMethod) -> Self {
        Self {
            value: raw.max(0.0),
            method,
            raw,
        }
    }
}

fn check_two_qubit(state: &DensityMatrix) -> Result<()> {
    if state.d1() != 2 || state.d2() != 2 {
        return Err(LquError::InvalidDimension(format!(
            "concurrence needs a two-qubit state, got {}x{}",
            state.d1(),
            state.d2()
        )));
    }
    Ok(())
}

/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn spin_flip(rho: &CMatrix) -> CMatrix {
    let yy = kron(&pauli_y(), &pauli_y());
    &yy * rho.conjugate() * &yy
}

/// Wootters concurrence `max(0, r₁ − r₂ − r₃ − r₄)`, where the `rᵢ` are the
/// decreasing square roots of the eigenvalues of `√ρ ρ̃ √ρ`.
///
/// The `rᵢ` are taken as the singular values of `√ρ (σy⊗σy) √ρ*`, whose
/// Gram matrix is `√ρ ρ̃ √ρ`. Small singular values come out with absolute
/// accuracy, where square roots of small eigenvalues would not.
pub fn concurrence_wootters(state: &DensityMatrix) -> Result<ConcurrenceResult> {
    check_two_qubit(state)?;
    let spec = eig_hermitian(state.data())?;
    for &l in &spec.eigenvalues {
        if l < SQRT_NEGATIVE_TOL {
            return Err(LquError::NotAState { min_eigenvalue: l });
        }
    }
    let s = spec.map(|l| if l < KERNEL_ZERO { 0.0 } else { l.sqrt() });
    let yy = kron(&pauli_y(), &pauli_y());
    let m = &s * yy * s.conjugate();
    let mut roots: Vec<f64> = m.singular_values().iter().copied().collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    let raw = roots[0] - roots[1] - roots[2] - roots[3];
    Ok(ConcurrenceResult::new(raw, ConcurrenceMethod::Wootters))
}

/// `|⟨ψ|σy⊗σy|ψ*⟩|` for a normalized two-qubit pure state.
pub fn concurrence_pure(psi: &[Complex64]) -> Result<f64> {
    check_pure(psi)?;
    let (a, b, c, d) = (psi[0], psi[1], psi[2], psi[3]);
    Ok((2.0 * (a * d - b * c)).norm())
}

/// `2D·(|C| − A)` for the symmetric X state of the driven Heisenberg model.
pub fn concurrence_x_state(x: &XStateEntries) -> ConcurrenceResult {
    let raw = 2.0 * x.d * (x.c.norm() - x.a);
    ConcurrenceResult::new(raw, ConcurrenceMethod::XState)
}

/// General X-state concurrence
/// `2·max(|ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄))`.
pub fn concurrence_x_matrix(state: &DensityMatrix) -> Result<ConcurrenceResult> {
    check_two_qubit(state)?;
    let m = state.data();
    let on_x = |i: usize, j: usize| i == j || i + j == 3;
    for i in 0..4 {
        for j in 0..4 {
            if !on_x(i, j) && m[(i, j)].norm() > X_SHAPE_TOL {
                return Err(LquError::InvalidMatrix(format!(
                    "not an X state: |rho[{i},{j}]| = {:.3e}",
                    m[(i, j)].norm()
                )));
            }
        }
    }
    let p = |k: usize| m[(k, k)].re.max(0.0);
    let outer = m[(0, 3)].norm() - (p(1) * p(2)).sqrt();
    let inner = m[(1, 2)].norm() - (p(0) * p(3)).sqrt();
    Ok(ConcurrenceResult::new(
        2.0 * outer.max(inner),
        ConcurrenceMethod::XState,
    ))
}

fn check_pure(psi: &[Complex64]) -> Result<()> {
    if psi.len() != 4 {
        return Err(LquError::InvalidDimension(format!(
            "expected a 4-component state vector, got {}",
            psi.len()
        )));
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(LquError::Domain(format!("state vector norm² is {norm}, expected 1")));
    }
    Ok(())
}

/// `2(1 − Tr ρ_A²)` for a normalized two-qubit pure state.
pub fn linear_entropy_of_entanglement(psi: &[Complex64]) -> Result<f64> {
    check_pure(psi)?;
    let rho = crate::linalg::projector(psi);
    let rho_a = partial_trace_b_raw(&rho, 2, 2);
    let purity = crate::linalg::trace_product(&rho_a, &rho_a).re;
    Ok(2.0 * (1.0 - purity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{closed_form_concurrence_raw, x_state, HeisenbergParams};
    use crate::linalg::{c, identity, projector, ZERO};
    use crate::random::{random_x_state, rng};

    fn bell() -> Vec<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)]
    }

    #[test]
    fn reference_states() {
        let bell = DensityMatrix::new(projector(&bell()), 2, 2).unwrap();
        assert!((concurrence_wootters(&bell).unwrap().value - 1.0).abs() < 1e-12);
        assert!((concurrence_x_matrix(&bell).unwrap().value - 1.0).abs() < 1e-14);

        let product = DensityMatrix::pure(&[c(1.0, 0.0), ZERO, ZERO, ZERO], 2, 2).unwrap();
        assert!(concurrence_wootters(&product).unwrap().value < 1e-12);

        let mixed = DensityMatrix::new(identity(4).scale(0.25), 2, 2).unwrap();
        let r = concurrence_wootters(&mixed).unwrap();
        assert_eq!(r.value, 0.0);
        assert!((r.raw + 0.5).abs() < 1e-12);
    }

    #[test]
    fn werner_threshold() {
        let bell = projector(&bell());
        for p in [0.2, 1.0 / 3.0, 0.5, 0.9] {
            let rho = bell.scale(p) + identity(4).scale((1.0 - p) / 4.0);
            let st = DensityMatrix::new(rho, 2, 2).unwrap();
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((concurrence_wootters(&st).unwrap().value - expected).abs() < 1e-12);
            assert!((concurrence_x_matrix(&st).unwrap().value - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn x_formula_matches_wootters_on_random_x_states() {
        let mut r = rng(7);
        for _ in 0..50 {
            let st = random_x_state(&mut r);
            let a = concurrence_wootters(&st).unwrap().value;
            let b = concurrence_x_matrix(&st).unwrap().value;
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn heisenberg_x_state_matches_closed_form() {
        for t in [0.1, 0.3, 0.45, 0.6] {
            for xi in [0.0, 0.01, 0.05] {
                let p = HeisenbergParams::new(0.5, t, xi, 0.2, 0.45).unwrap();
                let x = x_state(&p);
                let entries = concurrence_x_state(&x);
                assert!((entries.raw - closed_form_concurrence_raw(&p)).abs() < 1e-12);
                let generic = concurrence_x_matrix(&x.to_density_matrix()).unwrap();
                assert!((generic.value - entries.value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_x_and_wrong_dims() {
        let mut m = identity(4).scale(0.25);
        m[(0, 1)] = c(0.1, 0.0);
        m[(1, 0)] = c(0.1, 0.0);
        let st = DensityMatrix::new(m, 2, 2).unwrap();
        assert!(concurrence_x_matrix(&st).is_err());
        assert!(concurrence_wootters(&DensityMatrix::maximally_mixed(2, 3)).is_err());
    }

    #[test]
    fn pure_state_concurrence_agrees_with_wootters() {
        let mut r = rng(3);
        for _ in 0..20 {
            let psi = crate::random::random_pure_vector(4, &mut r);
            let pure = concurrence_pure(&psi).unwrap();
            let st = DensityMatrix::pure(&psi, 2, 2).unwrap();
            let w = concurrence_wootters(&st).unwrap().value;
            assert!((pure - w).abs() < 1e-10, "{pure} vs {w}");
            let e = linear_entropy_of_entanglement(&psi).unwrap();
            assert!((e - pure * pure).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_entropy_examples() {
        let theta = std::f64::consts::PI / 8.0;
        let schmidt = [c(theta.cos(), 0.0), ZERO, ZERO, c(theta.sin(), 0.0)];
        assert!((linear_entropy_of_entanglement(&schmidt).unwrap() - 0.5).abs() < 1e-14);
        assert!((linear_entropy_of_entanglement(&bell()).unwrap() - 1.0).abs() < 1e-14);
        let product = [c(1.0, 0.0), ZERO, ZERO, ZERO];
        assert!(linear_entropy_of_entanglement(&product).unwrap().abs() < 1e-14);
        assert!(linear_entropy_of_entanglement(&[c(1.0, 0.0), c(1.0, 0.0), ZERO, ZERO]).is_err());
    }
}
