//! Seeded random states and operators for property checks and the CLI.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, identity, CMatrix, ZERO};
use crate::state::DensityMatrix;

pub type StateRng = ChaCha8Rng;

pub fn rng(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of i.i.d. complex Gaussians.
pub fn ginibre(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// Hilbert–Schmidt random state `GG†/Tr(GG†)`.
pub fn random_density_matrix(d1: usize, d2: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(d1 * d2, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr), d1, d2).expect("shape is consistent")
}

/// Random state mixed with white noise, `(1−p)ρ + p𝕀/n`; its smallest
/// eigenvalue is at least `p/n`.
pub fn random_full_rank_state(d1: usize, d2: usize, noise: f64, rng: &mut impl Rng) -> DensityMatrix {
    let n = d1 * d2;
    let base = random_density_matrix(d1, d2, rng);
    let data = base.data().scale(1.0 - noise) + identity(n).scale(noise / n as f64);
    DensityMatrix::new(data, d1, d2).expect("shape is consistent")
}

pub fn random_pure_vector(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase of `R`'s
/// diagonal removed.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let qr = ginibre(n, rng).qr();
    let (q, r) = qr.unpack();
    let phases = DVector::from_fn(n, |k, _| {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        }
    });
    CMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j])
}

/// Traceless Hermitian matrix with unit Frobenius norm.
pub fn random_traceless_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(n, rng);
    let mut h = (&g + g.adjoint()).scale(0.5);
    let shift = h.trace() / n as f64;
    for k in 0..n {
        h[(k, k)] -= shift;
    }
    let norm = crate::linalg::frobenius(&h);
    h.unscale(norm)
}

/// Random valid two-qubit X state: populations on the diagonal, coherences
/// only on `(0,3)` and `(1,2)`, bounded so the matrix stays PSD.
pub fn random_x_state(rng: &mut impl Rng) -> DensityMatrix {
    let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|x| x / sum).collect();
    let coherence = |bound: f64, rng: &mut dyn rand::RngCore| {
        let r = bound * rng.random::<f64>();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        Complex64::from_polar(r, phi)
    };
    let z = coherence((p[0] * p[3]).sqrt(), rng);
    let w = coherence((p[1] * p[2]).sqrt(), rng);
    let mut m = CMatrix::from_element(4, 4, ZERO);
    for k in 0..4 {
        m[(k, k)] = c(p[k], 0.0);
    }
    m[(0, 3)] = z;
    m[(3, 0)] = z.conj();
    m[(1, 2)] = w;
    m[(2, 1)] = w.conj();
    DensityMatrix::new(m, 2, 2).expect("shape is consistent")
}
