//! Closed-form reference results for two spins coupled by the isotropic
//! Heisenberg exchange `H₀ = J S₁·S₂` (`S = σ/2`, `ħ = k_B = 1`).
//!
//! The spectrum is a singlet at `−3J/4` and a triplet at `J/4`. With
//! `x = βJ/4` and `Z = e^{3x} + 3e^{−x}`:
//!
//! * `a  = 4 cosh(x)/Z` (the isotropic `w⁰ = a·𝕀₃`),
//! * `e⁺ = 2 sinh(x)/Z`,
//! * `b  = 4 e⁺ Re F₂₁(ω)`, where `F₂₁` is the spectral function between a
//!   triplet state and the singlet (energy gap `J`),
//! * driven LQU `= 1 − (a + ξ|b|)`.
//!
//! All hyperbolic ratios are evaluated in forms scaled by `e^{−3x}` so the
//! low-temperature end does not overflow.

use num_complex::Complex64;

use crate::error::{LquError, Result};
use crate::linalg::{c, identity, kron, pauli_x, pauli_y, pauli_z, CMatrix, I, ZERO};
use crate::linear_response::{lqu_driven, spectral_function, DriveSpec, DrivenRoute};
use crate::lqu::{lqu_from_w, LquMode, LquResult, WMatrix};
use crate::state::{boltzmann_weights, eig_hermitian, DensityMatrix, Hamiltonian, SpectralData};
use crate::su_algebra::GeneratorSet;

/// `J S₁·S₂` on two qubits.
pub fn heisenberg_hamiltonian(j: f64) -> Hamiltonian {
    let ss = kron(&pauli_x(), &pauli_x()) + kron(&pauli_y(), &pauli_y()) + kron(&pauli_z(), &pauli_z());
    Hamiltonian::new(ss.scale(j / 4.0), 2, 2).expect("exchange operator is Hermitian")
}

/// Columns: singlet `(|01⟩−|10⟩)/√2`, `(|01⟩+|10⟩)/√2`, `|11⟩`, `|00⟩`.
pub fn reference_eigenbasis() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let one = c(1.0, 0.0);
    CMatrix::from_row_slice(
        4,
        4,
        &[
            ZERO,
            ZERO,
            ZERO,
            one, //
            c(h, 0.0),
            c(h, 0.0),
            ZERO,
            ZERO, //
            c(-h, 0.0),
            c(h, 0.0),
            ZERO,
            ZERO, //
            ZERO,
            ZERO,
            one,
            ZERO,
        ],
    )
}

/// Model and drive parameters for the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergParams {
    pub j: f64,
    pub t: f64,
    pub xi: f64,
    pub delta: f64,
    pub omega: f64,
}

impl HeisenbergParams {
    pub fn new(j: f64, t: f64, xi: f64, delta: f64, omega: f64) -> Result<Self> {
        let p = Self { j, t, xi, delta, omega };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        let finite = [self.j, self.t, self.xi, self.delta, self.omega]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(LquError::Domain("Heisenberg parameters must be finite".into()));
        }
        if self.j <= 0.0 {
            return Err(LquError::Domain(format!("J must be > 0, got {}", self.j)));
        }
        if self.t <= 0.0 {
            return Err(LquError::Domain(format!("T must be > 0, got {}", self.t)));
        }
        if self.delta <= 0.0 {
            return Err(LquError::Domain(format!("delta must be > 0, got {}", self.delta)));
        }
        if self.omega < 0.0 {
            return Err(LquError::Domain(format!("omega must be >= 0, got {}", self.omega)));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.t
    }

    pub fn with_t(self, t: f64) -> Self {
        Self { t, ..self }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    pub fn with_xi(self, xi: f64) -> Self {
        Self { xi, ..self }
    }

    fn x(&self) -> f64 {
        self.beta() * self.j / 4.0
    }
}

/// `Z = e^{3βJ/4} + 3e^{−βJ/4}`.
pub fn partition_function(p: &HeisenbergParams) -> f64 {
    let x = p.x();
    (3.0 * x).exp() + 3.0 * (-x).exp()
}

/// `(cosh x / Z, sinh x / Z)` without overflow.
fn hyperbolic_ratios(x: f64) -> (f64, f64) {
    let q = (-4.0 * x).exp();
    let r = (-2.0 * x).exp();
    let denom = 2.0 * (1.0 + 3.0 * q);
    ((r + q) / denom, (r - q) / denom)
}

/// `F₂₁(ω)` between a triplet state and the singlet.
pub fn f21(p: &HeisenbergParams) -> Complex64 {
    spectral_function(p.j, 0.0, p.omega, p.delta).expect("params checked: delta > 0")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormW {
    pub a: f64,
    pub b: f64,
    pub e_plus: f64,
    pub re_f21: f64,
}

impl ClosedFormW {
    /// Eigenvalues `a − ξ|b|, a, a + ξ|b|`.
    pub fn eigenvalues(&self, xi: f64) -> [f64; 3] {
        let s = (xi * self.b).abs();
        [self.a - s, self.a, self.a + s]
    }
}

pub fn closed_form_w(p: &HeisenbergParams) -> ClosedFormW {
    let (cosh_z, sinh_z) = hyperbolic_ratios(p.x());
    let re_f21 = f21(p).re;
    let e_plus = 2.0 * sinh_z;
    ClosedFormW {
        a: 4.0 * cosh_z,
        b: 4.0 * e_plus * re_f21,
        e_plus,
        re_f21,
    }
}

/// `1 − (a + ξ|b|)`.
pub fn closed_form_lqu(p: &HeisenbergParams) -> f64 {
    let w = closed_form_w(p);
    1.0 - (w.a + (p.xi * w.b).abs())
}

/// Closed form packaged as an [`LquResult`] with
/// `w⁰ = a𝕀₃` and `w¹ = [[0, −iξb, 0], [iξb, 0, 0], [0, 0, 0]]`.
pub fn closed_form_lqu_result(p: &HeisenbergParams) -> Result<LquResult> {
    let cf = closed_form_w(p);
    let w0 = identity(3).scale(cf.a);
    let mut w1 = CMatrix::zeros(3, 3);
    w1[(0, 1)] = -I * (p.xi * cf.b);
    w1[(1, 0)] = I * (p.xi * cf.b);
    lqu_from_w(WMatrix { w0, w1, d1: 2 }, LquMode::ClosedForm, Vec::new())
}

/// `Ω = √(1 + 4ξ² Im[F₂₁]²)`.
pub fn omega_factor(p: &HeisenbergParams) -> f64 {
    let im = f21(p).im;
    (1.0 + 4.0 * p.xi * p.xi * im * im).sqrt()
}

/// Entries of the driven state in the computational basis,
/// `ρ = D·[[A,0,0,0],[0,B₊,C,0],[0,C*,B₋,0],[0,0,0,A]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateEntries {
    pub a: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub c: Complex64,
    pub d: f64,
    pub omega: f64,
}

impl XStateEntries {
    pub fn trace(&self) -> f64 {
        self.d * (2.0 * self.a + self.b_plus + self.b_minus)
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(self.a, 0.0);
        m[(1, 1)] = c(self.b_plus, 0.0);
        m[(2, 2)] = c(self.b_minus, 0.0);
        m[(3, 3)] = c(self.a, 0.0);
        m[(1, 2)] = self.c;
        m[(2, 1)] = self.c.conj();
        m.scale(self.d)
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix::new(self.to_matrix(), 2, 2).expect("4x4 two-qubit matrix")
    }
}

/// First-order driven state for `Â = σz ⊗ 𝕀`:
/// `A = e^{−βJ/2}`, `B± = cosh(βJ/2) ± 2ξ sinh(βJ/2) Re F₂₁`,
/// `C = sinh(βJ/2)(1 + 2iξ Im F₂₁)`, `D = e^{βJ/4}/Z`.
///
/// This is `(σz⊗𝕀)(ρ₀ + ξρ₁)(σz⊗𝕀)`; the local σz only flips the sign of
/// the coherence and leaves every correlation measure unchanged.
pub fn x_state(p: &HeisenbergParams) -> XStateEntries {
    let half = p.beta() * p.j / 2.0;
    let f = f21(p);
    let (ch, sh) = (half.cosh(), half.sinh());
    XStateEntries {
        a: (-half).exp(),
        b_plus: ch + 2.0 * p.xi * sh * f.re,
        b_minus: ch - 2.0 * p.xi * sh * f.re,
        c: Complex64::new(sh, 2.0 * p.xi * sh * f.im),
        d: (p.x()).exp() / partition_function(p),
        omega: omega_factor(p),
    }
}

/// `[(e^{3βJ/4} − e^{−βJ/4})Ω − 2e^{−βJ/4}]/Z`, unclamped.
pub fn closed_form_concurrence_raw(p: &HeisenbergParams) -> f64 {
    let q = (-4.0 * p.x()).exp();
    ((1.0 - q) * omega_factor(p) - 2.0 * q) / (1.0 + 3.0 * q)
}

pub fn closed_form_concurrence(p: &HeisenbergParams) -> f64 {
    closed_form_concurrence_raw(p).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalTemperatures {
    /// Undriven, `J/ln 3`.
    pub tc0: f64,
    /// Driven, `J/ln((Ω+2)/Ω)`.
    pub tc1: f64,
}

pub fn critical_temperatures(p: &HeisenbergParams) -> CriticalTemperatures {
    let omega = omega_factor(p);
    CriticalTemperatures {
        tc0: p.j / 3f64.ln(),
        tc1: p.j / ((omega + 2.0) / omega).ln(),
    }
}

pub const BISECTION_TOL: f64 = 1e-10;

/// Temperature at which the raw concurrence changes sign, by bisection over
/// `T ∈ [0.01J, 10J]`.
pub fn bisect_critical_temperature(p: &HeisenbergParams) -> Result<f64> {
    let f = |t: f64| closed_form_concurrence_raw(&p.with_t(t));
    let (mut lo, mut hi) = (0.01 * p.j, 10.0 * p.j);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo.signum() == f_hi.signum() {
        return Err(LquError::Domain(format!(
            "concurrence does not change sign on [{lo}, {hi}] ({f_lo:.3e}, {f_hi:.3e})"
        )));
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The Heisenberg model pushed through the general pipeline; the H₀
/// eigendecomposition is done once and reused for every `(T, ω)`.
#[derive(Debug, Clone)]
pub struct HeisenbergPipeline {
    pub j: f64,
    pub h0_spectrum: SpectralData,
}

impl HeisenbergPipeline {
    pub fn new(j: f64) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return Err(LquError::Domain(format!("J must be > 0, got {j}")));
        }
        let h0_spectrum = eig_hermitian(heisenberg_hamiltonian(j).data())?;
        Ok(Self { j, h0_spectrum })
    }

    pub fn weights(&self, t: f64) -> Result<Vec<f64>> {
        Ok(boltzmann_weights(&self.h0_spectrum.eigenvalues, 1.0 / t)?.0)
    }

    /// Driven LQU at `(T, ω)` for coupling `coupling`.
    pub fn lqu(
        &self,
        p: &HeisenbergParams,
        coupling: &Hamiltonian,
        gen: &GeneratorSet,
        route: DrivenRoute,
    ) -> Result<LquResult> {
        let weights = self.weights(p.t)?;
        let drive = DriveSpec::new(coupling.clone(), p.xi, p.omega, p.delta)?;
        lqu_driven(&self.h0_spectrum, &weights, &drive, gen, route)
    }
}
