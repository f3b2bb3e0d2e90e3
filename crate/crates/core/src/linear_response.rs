//! First-order density-matrix correction under a harmonic drive
//! `H₁ = −Â f₀ cos(ωt)` and the resulting driven `w¹`.
//!
//! In the eigenbasis `H₀|αₙ⟩ = Eₙ|αₙ⟩` with thermal weights `λₙ`:
//!
//! ```text
//! ρ₁ₙₘ   = ⟨αₙ|Â|αₘ⟩ (λₘ − λₙ) Fₙₘ(ω)
//! Fₙₘ(ω) = 1/(Eₙ − Eₘ − ω − iδ) + 1/(Eₙ − Eₘ + ω − iδ)
//! ```
//!
//! The drive strength enters only through `ξ = ε·2πf₀`, stored as the
//! `epsilon` of the returned [`PerturbationMatrix`].

use num_complex::Complex64;

use crate::error::{shape_mismatch, LquError, Result};
use crate::linalg::{identity, kron, pauli_x, pauli_y, pauli_z, CMatrix, ZERO};
use crate::lqu::{build_w0_spectral, generators_in_eigenbasis, lqu_from_w, LquMode, LquResult, WMatrix};
use crate::state::{Hamiltonian, PerturbationMatrix, SpectralData};
use crate::su_algebra::GeneratorSet;

/// Tolerance on `Σλₙ = 1` for externally supplied weights.
const WEIGHT_SUM_TOL: f64 = 1e-10;

/// Drive parameters: coupling operator `Â`, strength `ξ`, frequency `ω` and
/// broadening `δ`.
#[derive(Debug, Clone)]
pub struct DriveSpec {
    pub coupling: Hamiltonian,
    pub xi: f64,
    pub omega: f64,
    pub delta: f64,
}

impl DriveSpec {
    pub fn new(coupling: Hamiltonian, xi: f64, omega: f64, delta: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(LquError::Domain(format!("xi must be finite, got {xi}")));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(LquError::Domain(format!("omega must be finite and >= 0, got {omega}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(LquError::Domain(format!("broadening delta must be > 0, got {delta}")));
        }
        Ok(Self {
            coupling,
            xi,
            omega,
            delta,
        })
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.coupling.clone(), self.xi, omega, self.delta)
    }
}

/// Named local Pauli couplings on a two-qubit system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedCoupling {
    Sx1,
    Sy1,
    Sz1,
    Sx2,
    Sy2,
    Sz2,
}

impl NamedCoupling {
    pub const ALL: [NamedCoupling; 6] = [
        NamedCoupling::Sx1,
        NamedCoupling::Sy1,
        NamedCoupling::Sz1,
        NamedCoupling::Sx2,
        NamedCoupling::Sy2,
        NamedCoupling::Sz2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NamedCoupling::Sx1 => "sx1",
            NamedCoupling::Sy1 => "sy1",
            NamedCoupling::Sz1 => "sz1",
            NamedCoupling::Sx2 => "sx2",
            NamedCoupling::Sy2 => "sy2",
            NamedCoupling::Sz2 => "sz2",
        }
    }

    pub fn operator(&self) -> Hamiltonian {
        let id = identity(2);
        let m = match self {
            NamedCoupling::Sx1 => kron(&pauli_x(), &id),
            NamedCoupling::Sy1 => kron(&pauli_y(), &id),
            NamedCoupling::Sz1 => kron(&pauli_z(), &id),
            NamedCoupling::Sx2 => kron(&id, &pauli_x()),
            NamedCoupling::Sy2 => kron(&id, &pauli_y()),
            NamedCoupling::Sz2 => kron(&id, &pauli_z()),
        };
        Hamiltonian::new(m, 2, 2).expect("Pauli products are Hermitian")
    }
}

impl std::str::FromStr for NamedCoupling {
    type Err = LquError;

    fn from_str(s: &str) -> Result<Self> {
        NamedCoupling::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                LquError::InvalidConfig(format!(
                    "unknown coupling '{s}', expected one of sx1, sy1, sz1, sx2, sy2, sz2"
                ))
            })
    }
}

/// `Fₙₘ(ω)` for energies `en`, `em`.
pub fn spectral_function(en: f64, em: f64, omega: f64, delta: f64) -> Result<Complex64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(LquError::Domain(format!("broadening delta must be > 0, got {delta}")));
    }
    Ok(spectral_function_unchecked(en, em, omega, delta))
}

#[inline]
fn spectral_function_unchecked(en: f64, em: f64, omega: f64, delta: f64) -> Complex64 {
    let gap = en - em;
    let one = Complex64::new(1.0, 0.0);
    one / Complex64::new(gap - omega, -delta) + one / Complex64::new(gap + omega, -delta)
}

/// The `δ → 0` limit of `Fₙₘ(ω)`, `1/(Δ−ω) + 1/(Δ+ω)`; only defined off
/// resonance (`|Δ| ≠ ω`).
pub fn spectral_function_undamped(en: f64, em: f64, omega: f64) -> Result<f64> {
    let gap = en - em;
    if (gap.abs() - omega).abs() < f64::EPSILON * (1.0 + omega) {
        return Err(LquError::Domain(format!(
            "undamped spectral function is singular at resonance |En - Em| = omega = {omega}"
        )));
    }
    Ok(1.0 / (gap - omega) + 1.0 / (gap + omega))
}

fn check_weights(h0_spec: &SpectralData, weights: &[f64]) -> Result<()> {
    if weights.len() != h0_spec.dim() {
        return Err(shape_mismatch(
            format!("{} thermal weights", h0_spec.dim()),
            weights.len(),
        ));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL || weights.iter().any(|w| *w < 0.0) {
        return Err(LquError::Domain(format!(
            "thermal weights must be non-negative and sum to 1 (sum = {sum})"
        )));
    }
    Ok(())
}

fn check_drive(h0_spec: &SpectralData, drive: &DriveSpec) -> Result<()> {
    if drive.coupling.dim() != h0_spec.dim() {
        return Err(shape_mismatch(
            format!("{0}x{0} coupling", h0_spec.dim()),
            format!("{0}x{0}", drive.coupling.dim()),
        ));
    }
    Ok(())
}

/// Unscaled `ρ₁` in the H₀ eigenbasis.
fn rho1_eigenbasis(h0_spec: &SpectralData, weights: &[f64], drive: &DriveSpec) -> CMatrix {
    let a = h0_spec.to_eigenbasis(drive.coupling.data());
    let e = &h0_spec.eigenvalues;
    let n = h0_spec.dim();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return ZERO;
        }
        let f = spectral_function_unchecked(e[i], e[j], drive.omega, drive.delta);
        a[(i, j)] * (weights[j] - weights[i]) * f
    })
}

/// `ρ₁(ω)` in the computational basis with `epsilon = ξ`.
pub fn rho1_driven(h0_spec: &SpectralData, weights: &[f64], drive: &DriveSpec) -> Result<PerturbationMatrix> {
    check_weights(h0_spec, weights)?;
    check_drive(h0_spec, drive)?;
    let rho1 = h0_spec.from_eigenbasis(&rho1_eigenbasis(h0_spec, weights, drive));
    PerturbationMatrix::new(
        crate::linalg::hermitize(&rho1),
        drive.xi,
        drive.coupling.d1(),
        drive.coupling.d2(),
    )
}

/// Driven `w¹` assembled directly from the triple sum over H₀ eigenstates
///
/// ```text
/// w¹ᵢⱼ = −2ξ Σₙₘₗ √λₙ (√λₘ − √λₗ) Fₘₗ(ω) ⟨αₘ|Â|αₗ⟩ ⟨αₙ|Tᵢ|αₘ⟩ ⟨αₗ|Tⱼ|αₙ⟩ − ξ Gᵢⱼ·L¹
/// ```
///
/// The divided-difference kernel cancels against `λₗ − λₘ` here, so this
/// route never divides by an eigenvalue gap.
pub fn build_w1_driven(
    h0_spec: &SpectralData,
    weights: &[f64],
    drive: &DriveSpec,
    gen: &GeneratorSet,
) -> Result<CMatrix> {
    check_weights(h0_spec, weights)?;
    check_drive(h0_spec, drive)?;
    if gen.dim() != drive.coupling.d1() {
        return Err(shape_mismatch(
            format!("SU({}) generators", drive.coupling.d1()),
            format!("SU({})", gen.dim()),
        ));
    }
    let n = h0_spec.dim();
    let e = &h0_spec.eigenvalues;
    let roots: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let a = h0_spec.to_eigenbasis(drive.coupling.data());
    let p = generators_in_eigenbasis(h0_spec, gen, drive.coupling.d2());

    // response kernel (√λₘ − √λₗ) Fₘₗ Aₘₗ
    let mut resp = CMatrix::zeros(n, n);
    for m in 0..n {
        for l in 0..n {
            let gap = roots[m] - roots[l];
            if gap != 0.0 {
                resp[(m, l)] = spectral_function_unchecked(e[m], e[l], drive.omega, drive.delta) * a[(m, l)] * gap;
            }
        }
    }

    let k = gen.len();
    let mut w1 = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = ZERO;
            for nn in 0..n {
                for m in 0..n {
                    let left = p[i][(nn, m)];
                    if left == ZERO {
                        continue;
                    }
                    for l in 0..n {
                        acc += left * resp[(m, l)] * p[j][(l, nn)] * roots[nn];
                    }
                }
            }
            w1[(i, j)] = acc * (-2.0 * drive.xi);
        }
    }

    if !gen.g_vanishes() {
        let rho1 = rho1_eigenbasis(h0_spec, weights, drive);
        let l1: Vec<Complex64> = p
            .iter()
            .map(|pk| {
                let mut s = ZERO;
                for nn in 0..n {
                    for m in 0..n {
                        s += rho1[(nn, m)] * pk[(m, nn)];
                    }
                }
                s
            })
            .collect();
        for i in 0..k {
            for j in 0..k {
                w1[(i, j)] -= gen.g_dot(i, j, &l1) * drive.xi;
            }
        }
    }
    Ok(w1)
}

/// Which assembly of the driven `w¹` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DrivenRoute {
    /// Triple sum over H₀ eigenstates.
    #[default]
    Direct,
    /// `ρ₁(ω)` first, then the general divided-difference assembly.
    ViaPerturbation,
}

/// First-order LQU of a driven thermal state. `weights` must be the thermal
/// weights aligned with the `h0_spec` columns.
pub fn lqu_driven(
    h0_spec: &SpectralData,
    weights: &[f64],
    drive: &DriveSpec,
    gen: &GeneratorSet,
    route: DrivenRoute,
) -> Result<LquResult> {
    let rho0_spec = SpectralData::new(weights.to_vec(), h0_spec.eigenvectors.clone())?;
    let d2 = drive.coupling.d2();
    let w0 = build_w0_spectral(&rho0_spec, gen, d2)?;
    let (w1, warnings) = match route {
        DrivenRoute::Direct => (build_w1_driven(h0_spec, weights, drive, gen)?, Vec::new()),
        DrivenRoute::ViaPerturbation => {
            let rho1 = rho1_driven(h0_spec, weights, drive)?;
            let w1 = crate::lqu::build_w1_general(&rho0_spec, &rho1, gen)?;
            let warnings = w1.warnings();
            (w1.matrix, warnings)
        }
    };
    let w = WMatrix { w0, w1, d1: gen.dim() };
    lqu_from_w(w, LquMode::PerturbativeDriven, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::heisenberg_hamiltonian;
    use crate::linalg::max_abs;
    use crate::state::{eig_hermitian, thermal_state};
    use crate::su_algebra::build_generators;

    #[test]
    fn spectral_function_reference_point() {
        // Δ = ω = J = 0.5, δ = 0.2
        let f = spectral_function(0.5, 0.0, 0.5, 0.2).unwrap();
        // Re = 2Δ(Δ² − ω² + δ²)/([(Δ+ω)²+δ²][(Δ−ω)²+δ²]) = 2·0.5/1.04
        assert!((f.re - 1.0 / 1.04).abs() < 1e-14);
        assert!((f.im - 1.08 / 0.208).abs() < 1e-13);
        assert!((f.re / 2.0 - 0.480769).abs() < 1e-6);
        assert!((f.im - 5.192308).abs() < 1e-6);
    }

    #[test]
    fn spectral_function_rejects_non_positive_delta() {
        assert!(spectral_function(1.0, 0.0, 0.3, 0.0).is_err());
        assert!(spectral_function(1.0, 0.0, 0.3, -0.1).is_err());
    }

    #[test]
    fn static_limit() {
        let f = spectral_function(0.7, 0.2, 0.0, 1e-9).unwrap();
        assert!((f.re - 2.0 / 0.5).abs() < 1e-9);
        assert!(f.im.abs() < 1e-7);
        assert!((spectral_function_undamped(0.7, 0.2, 0.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(spectral_function_undamped(0.7, 0.2, 0.5).is_err());
    }

    #[test]
    fn drive_spec_validation() {
        let a = NamedCoupling::Sz1.operator();
        assert!(DriveSpec::new(a.clone(), 0.1, 0.5, 0.0).is_err());
        assert!(DriveSpec::new(a.clone(), 0.1, -0.5, 0.2).is_err());
        assert!(DriveSpec::new(a, f64::NAN, 0.5, 0.2).is_err());
        assert!("sq1".parse::<NamedCoupling>().is_err());
        assert_eq!("sy2".parse::<NamedCoupling>().unwrap(), NamedCoupling::Sy2);
    }

    #[test]
    fn identity_coupling_gives_no_response() {
        let h = heisenberg_hamiltonian(0.5);
        let th = thermal_state(&h, 2.0).unwrap();
        let a = Hamiltonian::new(identity(4).scale(0.7), 2, 2).unwrap();
        let drive = DriveSpec::new(a, 0.1, 0.4, 0.2).unwrap();
        let rho1 = rho1_driven(&th.h0_spectrum, &th.weights, &drive).unwrap();
        assert!(max_abs(rho1.data()) < 1e-15);
    }

    #[test]
    fn infinite_temperature_gives_no_response() {
        let h = heisenberg_hamiltonian(0.5);
        let th = thermal_state(&h, 0.0).unwrap();
        let drive = DriveSpec::new(NamedCoupling::Sx1.operator(), 0.1, 0.4, 0.2).unwrap();
        let rho1 = rho1_driven(&th.h0_spectrum, &th.weights, &drive).unwrap();
        assert!(max_abs(rho1.data()) < 1e-15);
    }

    #[test]
    fn sz_drive_couples_singlet_to_triplet_zero_only() {
        let h = heisenberg_hamiltonian(0.5);
        let th = thermal_state(&h, 2.0).unwrap();
        let drive = DriveSpec::new(NamedCoupling::Sz1.operator(), 0.05, 0.4, 0.2).unwrap();
        let rho1 = rho1_driven(&th.h0_spectrum, &th.weights, &drive).unwrap();
        // fixed reference basis: singlet, |T0⟩, |11⟩, |00⟩
        let h2 = std::f64::consts::FRAC_1_SQRT_2;
        let basis = CMatrix::from_row_slice(
            4,
            4,
            &[
                ZERO,
                ZERO,
                ZERO,
                Complex64::new(1.0, 0.0),
                Complex64::new(h2, 0.0),
                Complex64::new(h2, 0.0),
                ZERO,
                ZERO,
                Complex64::new(-h2, 0.0),
                Complex64::new(h2, 0.0),
                ZERO,
                ZERO,
                ZERO,
                ZERO,
                Complex64::new(1.0, 0.0),
                ZERO,
            ],
        );
        let r = basis.adjoint() * rho1.data() * &basis;
        for i in 0..4 {
            for j in 0..4 {
                let allowed = (i, j) == (0, 1) || (i, j) == (1, 0);
                if !allowed {
                    assert!(r[(i, j)].norm() < 1e-14, "({i},{j}) = {}", r[(i, j)]);
                }
            }
        }
        assert!(r[(0, 1)].norm() > 1e-3);
    }

    #[test]
    fn rho1_is_hermitian_and_traceless() {
        let h = heisenberg_hamiltonian(0.5);
        let th = thermal_state(&h, 1.3).unwrap();
        for c in NamedCoupling::ALL {
            let drive = DriveSpec::new(c.operator(), 0.05, 0.3, 0.2).unwrap();
            let rho1 = rho1_driven(&th.h0_spectrum, &th.weights, &drive).unwrap();
            assert!(crate::linalg::hermiticity_residual(rho1.data()) < 1e-12);
            assert!(rho1.data().trace().norm() < 1e-12);
            assert_eq!(rho1.epsilon(), 0.05);
        }
    }

    #[test]
    fn zero_xi_gives_zero_w1() {
        let gen = build_generators(2).unwrap();
        let h = heisenberg_hamiltonian(0.5);
        let th = thermal_state(&h, 2.0).unwrap();
        let drive = DriveSpec::new(NamedCoupling::Sz1.operator(), 0.0, 0.4, 0.2).unwrap();
        let w1 = build_w1_driven(&th.h0_spectrum, &th.weights, &drive, &gen).unwrap();
        assert_eq!(max_abs(&w1), 0.0);
    }

    #[test]
    fn weights_are_checked() {
        let gen = build_generators(2).unwrap();
        let spec = eig_hermitian(heisenberg_hamiltonian(0.5).data()).unwrap();
        let drive = DriveSpec::new(NamedCoupling::Sz1.operator(), 0.1, 0.4, 0.2).unwrap();
        assert!(build_w1_driven(&spec, &[0.5, 0.5, 0.5, 0.5], &drive, &gen).is_err());
        assert!(rho1_driven(&spec, &[1.0, 0.0, 0.0], &drive).is_err());
    }
}
