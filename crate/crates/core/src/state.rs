//! Density matrices, Hamiltonians, Hermitian eigendecomposition, thermal
//! states and the partial trace.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{shape_mismatch, LquError, Result};
use crate::linalg::{from_real_diagonal, hermiticity_residual, max_abs, CMatrix, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = -1e-10;

fn check_square(data: &CMatrix, d1: usize, d2: usize) -> Result<()> {
    if d1 == 0 || d2 == 0 {
        return Err(LquError::InvalidDimension(format!(
            "subsystem dimensions must be positive, got {d1}x{d2}"
        )));
    }
    let n = d1 * d2;
    if data.nrows() != n || data.ncols() != n {
        return Err(shape_mismatch(
            format!("{n}x{n} (d1={d1}, d2={d2})"),
            format!("{}x{}", data.nrows(), data.ncols()),
        ));
    }
    Ok(())
}

/// Tolerance scaled by the magnitude of the matrix entries.
fn scaled_tol(tol: f64, m: &CMatrix) -> f64 {
    tol * max_abs(m).max(1.0)
}

/// Operator on a `d1·d2` Hilbert space that is meant to be a quantum state.
///
/// Construction only checks the shape; [`validate`] reports whether the
/// Hermiticity, trace and positivity conditions actually hold.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
    d1: usize,
    d2: usize,
}

impl DensityMatrix {
    pub fn new(data: CMatrix, d1: usize, d2: usize) -> Result<Self> {
        check_square(&data, d1, d2)?;
        Ok(Self { data, d1, d2 })
    }

    /// Shape check plus every [`validate`] condition.
    pub fn validated(data: CMatrix, d1: usize, d2: usize) -> Result<Self> {
        let state = Self::new(data, d1, d2)?;
        let report = validate(&state);
        if report.hermiticity_residual > HERMITIAN_TOL {
            return Err(LquError::NotHermitian {
                residual: report.hermiticity_residual,
            });
        }
        if !report.passed() {
            if report.min_eigenvalue < PSD_TOL {
                return Err(LquError::NotAState {
                    min_eigenvalue: report.min_eigenvalue,
                });
            }
            return Err(LquError::InvalidMatrix(format!(
                "trace deviates from 1 by {:.3e}",
                report.trace_residual
            )));
        }
        Ok(state)
    }

    pub fn maximally_mixed(d1: usize, d2: usize) -> Self {
        let n = d1 * d2;
        let data = CMatrix::identity(n, n).scale(1.0 / n as f64);
        Self { data, d1, d2 }
    }

    /// `|ψ⟩⟨ψ|` for a vector normalized on the fly.
    pub fn pure(psi: &[Complex64], d1: usize, d2: usize) -> Result<Self> {
        Self::new(crate::linalg::projector(psi), d1, d2)
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn dim(&self) -> usize {
        self.d1 * self.d2
    }

    /// Same operator with the roles of A and B exchanged, so that quantities
    /// defined for measurements on A can be evaluated for B.
    pub fn swap_subsystems(&self) -> Self {
        let (d1, d2) = (self.d1, self.d2);
        let idx = |a: usize, b: usize| a * d2 + b;
        let swapped = CMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            let (rb, ra) = (r / d1, r % d1);
            let (cb, ca) = (c / d1, c % d1);
            self.data[(idx(ra, rb), idx(ca, cb))]
        });
        Self {
            data: swapped,
            d1: d2,
            d2: d1,
        }
    }

    /// Conjugation `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(shape_mismatch(
                format!("{0}x{0}", self.dim()),
                format!("{}x{}", u.nrows(), u.ncols()),
            ));
        }
        Self::new(u * &self.data * u.adjoint(), self.d1, self.d2)
    }
}

/// Hermitian, traceless first-order correction `ρ₁` together with its scale
/// `ε`. The scale is applied only where a first-order quantity is assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationMatrix {
    data: CMatrix,
    epsilon: f64,
    d1: usize,
    d2: usize,
}

impl PerturbationMatrix {
    pub fn new(data: CMatrix, epsilon: f64, d1: usize, d2: usize) -> Result<Self> {
        check_square(&data, d1, d2)?;
        if !epsilon.is_finite() {
            return Err(LquError::Domain(format!("epsilon must be finite, got {epsilon}")));
        }
        let residual = hermiticity_residual(&data);
        if residual > scaled_tol(HERMITIAN_TOL, &data) {
            return Err(LquError::NotHermitian { residual });
        }
        let tr = data.trace().norm();
        if tr > scaled_tol(TRACE_TOL, &data) {
            return Err(LquError::InvalidMatrix(format!(
                "perturbation must be traceless, trace = {tr:.3e}"
            )));
        }
        Ok(Self { data, epsilon, d1, d2 })
    }

    pub fn zero(epsilon: f64, d1: usize, d2: usize) -> Self {
        let n = d1 * d2;
        Self {
            data: CMatrix::zeros(n, n),
            epsilon,
            d1,
            d2,
        }
    }

    /// Unscaled `ρ₁`.
    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    /// `ε·ρ₁`.
    pub fn scaled(&self) -> CMatrix {
        self.data.scale(self.epsilon)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }
}

/// Hermitian operator on the full space (H₀ or a coupling operator).
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    data: CMatrix,
    d1: usize,
    d2: usize,
}

impl Hamiltonian {
    pub fn new(data: CMatrix, d1: usize, d2: usize) -> Result<Self> {
        check_square(&data, d1, d2)?;
        let residual = hermiticity_residual(&data);
        if residual > scaled_tol(HERMITIAN_TOL, &data) {
            return Err(LquError::NotHermitian { residual });
        }
        Ok(Self { data, d1, d2 })
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn dim(&self) -> usize {
        self.d1 * self.d2
    }
}

/// Eigenvalues and orthonormal column eigenvectors of a Hermitian operator.
///
/// Output of [`eig_hermitian`] is sorted ascending. Other constructors (such
/// as the ρ₀ spectrum of a thermal state, which reuses the H₀ eigenvectors)
/// keep whatever order they were built in; no formula here depends on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralData {
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: CMatrix) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(shape_mismatch(
                format!("{n}x{n} eigenvector matrix"),
                format!("{}x{}", eigenvectors.nrows(), eigenvectors.ncols()),
            ));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.eigenvectors;
        v * from_real_diagonal(&self.eigenvalues) * v.adjoint()
    }

    /// Same basis with the eigenvalues mapped through `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|x| f(*x)).collect();
        let v = &self.eigenvectors;
        v * from_real_diagonal(&values) * v.adjoint()
    }

    /// `‖V†V − 𝕀‖_max`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.eigenvectors.adjoint() * &self.eigenvectors - CMatrix::identity(n, n)))
    }

    /// Matrix elements `⟨ψₙ|X|ψₘ⟩`.
    pub fn to_eigenbasis(&self, op: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * op * &self.eigenvectors
    }

    /// Back from eigenbasis components to the computational basis.
    pub fn from_eigenbasis(&self, op: &CMatrix) -> CMatrix {
        &self.eigenvectors * op * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigendecomposition, ascending, with each eigenvector's
/// largest-magnitude component made real and positive.
pub fn eig_hermitian(a: &CMatrix) -> Result<SpectralData> {
    if !a.is_square() {
        return Err(shape_mismatch("square matrix", format!("{}x{}", a.nrows(), a.ncols())));
    }
    let residual = hermiticity_residual(a);
    if residual > scaled_tol(HERMITIAN_TOL, a) {
        return Err(LquError::NotHermitian { residual });
    }
    let n = a.nrows();
    let eig = SymmetricEigen::new(crate::linalg::hermitize(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let v = eig.eigenvectors.column(src);
        let biggest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = v.iter().find(|z| z.norm() >= biggest - 1e-12).copied().unwrap_or(ZERO);
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for r in 0..n {
            vectors[(r, col)] = v[r] * phase;
        }
    }
    SpectralData::new(values, vectors)
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub failures: Vec<ValidationFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationFailure {
    NotHermitian,
    TraceNotOne,
    NotPositive,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Reports Hermiticity, unit-trace and positivity residuals. Never fails; a
/// non-Hermitian matrix is Hermitized for the eigenvalue check.
pub fn validate(state: &DensityMatrix) -> ValidationReport {
    let data = state.data();
    let hermiticity_residual = hermiticity_residual(data);
    let trace_residual = (data.trace() - Complex64::new(1.0, 0.0)).norm();
    let eig = SymmetricEigen::new(crate::linalg::hermitize(data));
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);

    let mut failures = Vec::new();
    if hermiticity_residual > HERMITIAN_TOL {
        failures.push(ValidationFailure::NotHermitian);
    }
    if trace_residual > TRACE_TOL {
        failures.push(ValidationFailure::TraceNotOne);
    }
    if min_eigenvalue < PSD_TOL {
        failures.push(ValidationFailure::NotPositive);
    }
    ValidationReport {
        hermiticity_residual,
        trace_residual,
        min_eigenvalue,
        failures,
    }
}

/// Canonical state `e^{−βH₀}/Z` with the H₀ spectral data it was built from.
#[derive(Debug, Clone)]
pub struct ThermalState {
    pub state: DensityMatrix,
    /// Spectrum of H₀ (ascending energies).
    pub h0_spectrum: SpectralData,
    /// Boltzmann weights `λₙ`, aligned with `h0_spectrum` columns.
    pub weights: Vec<f64>,
    pub log_partition_function: f64,
}

impl ThermalState {
    pub fn partition_function(&self) -> f64 {
        self.log_partition_function.exp()
    }

    /// Spectral data of ρ₀ itself: the H₀ eigenvectors with eigenvalues `λₙ`.
    pub fn rho0_spectrum(&self) -> SpectralData {
        SpectralData {
            eigenvalues: self.weights.clone(),
            eigenvectors: self.h0_spectrum.eigenvectors.clone(),
        }
    }
}

/// Boltzmann weights for a spectrum, shifted by the ground energy so large β
/// cannot overflow. Returns `(weights, ln Z)`.
pub fn boltzmann_weights(energies: &[f64], beta: f64) -> Result<(Vec<f64>, f64)> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(LquError::Domain(format!(
            "inverse temperature must be finite and non-negative, got {beta}"
        )));
    }
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = energies.iter().map(|e| (-beta * (e - e_min)).exp()).collect();
    let sum: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / sum).collect();
    Ok((weights, sum.ln() - beta * e_min))
}

pub fn thermal_state(h0: &Hamiltonian, beta: f64) -> Result<ThermalState> {
    let spectrum = eig_hermitian(h0.data())?;
    thermal_state_from_spectrum(spectrum, beta, h0.d1(), h0.d2())
}

/// Thermal state from an already diagonalized H₀.
pub fn thermal_state_from_spectrum(h0_spectrum: SpectralData, beta: f64, d1: usize, d2: usize) -> Result<ThermalState> {
    let (weights, log_z) = boltzmann_weights(&h0_spectrum.eigenvalues, beta)?;
    let v = &h0_spectrum.eigenvectors;
    let data = v * from_real_diagonal(&weights) * v.adjoint();
    Ok(ThermalState {
        state: DensityMatrix::new(data, d1, d2)?,
        h0_spectrum,
        weights,
        log_partition_function: log_z,
    })
}

/// `Tr_B ρ` as a `d1 × d1` matrix.
pub fn partial_trace_b(state: &DensityMatrix) -> CMatrix {
    partial_trace_b_raw(state.data(), state.d1(), state.d2())
}

pub(crate) fn partial_trace_b_raw(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d1, |a, b| (0..d2).map(|k| m[(a * d2 + k, b * d2 + k)]).sum())
}
