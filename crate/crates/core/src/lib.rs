//! Local quantum uncertainty (LQU) of bipartite states.
//!
//! The LQU of `ρ` on `H_A ⊗ H_B` with `dim H_A = d₁` is
//! `u_A = 2/d₁ − λ_max(w)`, where `w` is built from the SU(d₁) generators and
//! `√ρ`. Besides the exact route the crate evaluates `w` to first order for
//! `ρ = ρ₀ + ερ₁`, and for thermal states under a weak harmonic drive in
//! linear response. The two-spin Heisenberg model has closed forms for all of
//! these and serves as the reference.
//!
//! ```
//! use lqu_core::heisenberg::{closed_form_lqu, HeisenbergParams};
//!
//! let p = HeisenbergParams::new(0.5, 0.5, 0.0, 0.2, 0.0).unwrap();
//! assert!((closed_form_lqu(&p) - 0.073595).abs() < 1e-6);
//! ```

pub mod entanglement;
pub mod error;
pub mod heisenberg;
pub mod io;
pub mod linalg;
pub mod linear_response;
pub mod lqu;
pub mod par;
pub mod random;
pub mod sqrt_perturbation;
pub mod state;
pub mod su_algebra;
pub mod sweep;

pub use error::{LquError, Result};
pub use linalg::CMatrix;
pub use lqu::{lqu, lqu_exact, lqu_perturbative, LquInput, LquMode, LquResult, Warning};
pub use state::{DensityMatrix, Hamiltonian, PerturbationMatrix, SpectralData};
pub use su_algebra::{build_generators, GeneratorSet};
