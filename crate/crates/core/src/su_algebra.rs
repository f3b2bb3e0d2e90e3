//! SU(d) generators in the generalized Gell-Mann basis, their structure
//! constants, and generalized Bloch vectors.
//!
//! Generators are normalized as `Tr(TᵢTⱼ) = 2δᵢⱼ`, so the product rule reads
//!
//! ```text
//! TᵢTⱼ = i Σₖ fᵢⱼₖ Tₖ + Σₖ gᵢⱼₖ Tₖ + (2/d) δᵢⱼ 𝕀
//! ```
//!
//! Ordering is frozen and every downstream index refers to it: first the
//! symmetric off-diagonal generators for pairs `(a, b)`, `a < b`, in
//! lexicographic order; then the antisymmetric ones for the same pairs; then
//! the `d − 1` diagonal ones. For `d = 2` this gives `(σx, σy, σz)`. All
//! indices in this crate are zero-based.
//!
//! Local observables are parametrized as `K = n·T ⊗ 𝕀` with a real unit vector
//! `n`. For `d > 2` this family does not cover every nondegenerate local
//! spectrum; the LQU computed here is the minimum over that family.

use num_complex::Complex64;

use crate::error::{shape_mismatch, LquError, Result};
use crate::linalg::{anticommutator, commutator, identity, kron, max_abs, trace_product, CMatrix, I, ONE};

/// Imaginary residue below which a structure constant is treated as real.
const REAL_TRUNCATION: f64 = 1e-12;

/// Immutable SU(d) generator set with dense structure-constant tensors.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    dim: usize,
    generators: Vec<CMatrix>,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators, `d² − 1`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.len();
        (i * n + j) * n + k
    }

    /// Antisymmetric structure constant `f_ijk`.
    pub fn f(&self, i: usize, j: usize, k: usize) -> f64 {
        self.f[self.offset(i, j, k)]
    }

    /// Symmetric structure constant `g_ijk`.
    pub fn g(&self, i: usize, j: usize, k: usize) -> f64 {
        self.g[self.offset(i, j, k)]
    }

    /// The vector `G_ij = (g_ij1, …)` contracted with `v`: `Σₖ g_ijk vₖ`.
    pub fn g_dot(&self, i: usize, j: usize, v: &[Complex64]) -> Complex64 {
        let base = self.offset(i, j, 0);
        self.g[base..base + self.len()].iter().zip(v).map(|(g, x)| x * *g).sum()
    }

    /// Whether all `g_ijk` vanish (true exactly for SU(2)).
    pub fn g_vanishes(&self) -> bool {
        self.g.iter().all(|x| *x == 0.0)
    }

    /// `Tᵢ ⊗ 𝕀_{d2}` for every generator.
    pub fn lifted(&self, d2: usize) -> Vec<CMatrix> {
        let id = identity(d2);
        self.generators.iter().map(|t| kron(t, &id)).collect()
    }

    /// Largest residual of the product rule over all generator pairs.
    pub fn product_rule_residual(&self) -> f64 {
        let n = self.len();
        let d = self.dim as f64;
        let id = identity(self.dim);
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut rebuilt = CMatrix::zeros(self.dim, self.dim);
                for k in 0..n {
                    let coeff = Complex64::new(self.g(i, j, k), self.f(i, j, k));
                    rebuilt += &self.generators[k] * coeff;
                }
                if i == j {
                    rebuilt += &id * Complex64::new(2.0 / d, 0.0);
                }
                let direct = &self.generators[i] * &self.generators[j];
                worst = worst.max(max_abs(&(direct - rebuilt)));
            }
        }
        worst
    }

    /// Largest deviation of `Tr(TᵢTⱼ)` from `2δᵢⱼ`.
    pub fn normalization_residual(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 2.0 } else { 0.0 };
                let got = trace_product(&self.generators[i], &self.generators[j]);
                worst = worst.max((got - Complex64::new(expected, 0.0)).norm());
            }
        }
        worst
    }
}

/// Builds the generalized Gell-Mann generators of SU(`d1`) and their
/// structure constants.
pub fn build_generators(d1: usize) -> Result<GeneratorSet> {
    if d1 < 2 {
        return Err(LquError::InvalidDimension(format!("SU(d) needs d >= 2, got {d1}")));
    }
    let mut generators = Vec::with_capacity(d1 * d1 - 1);
    let pairs: Vec<(usize, usize)> = (0..d1).flat_map(|a| (a + 1..d1).map(move |b| (a, b))).collect();

    for &(a, b) in &pairs {
        let mut m = CMatrix::zeros(d1, d1);
        m[(a, b)] = ONE;
        m[(b, a)] = ONE;
        generators.push(m);
    }
    for &(a, b) in &pairs {
        let mut m = CMatrix::zeros(d1, d1);
        m[(a, b)] = -I;
        m[(b, a)] = I;
        generators.push(m);
    }
    for l in 1..d1 {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d1, d1);
        for k in 0..l {
            m[(k, k)] = Complex64::new(scale, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * scale, 0.0);
        generators.push(m);
    }

    let mut set = GeneratorSet {
        dim: d1,
        generators,
        f: Vec::new(),
        g: Vec::new(),
    };
    let (f, g) = structure_constants(&set);
    set.f = f;
    set.g = g;
    Ok(set)
}

/// Evaluates `f_ijk = (1/4i)Tr([Tᵢ,Tⱼ]Tₖ)` and `g_ijk = (1/4)Tr({Tᵢ,Tⱼ}Tₖ)`
/// as dense row-major `n³` tensors (`n = d² − 1`).
#[allow(clippy::needless_range_loop)]
pub fn structure_constants(gen: &GeneratorSet) -> (Vec<f64>, Vec<f64>) {
    let n = gen.len();
    let mut f = vec![0.0; n * n * n];
    let mut g = vec![0.0; n * n * n];
    let ts = gen.generators();
    for i in 0..n {
        for j in 0..n {
            let comm = commutator(&ts[i], &ts[j]);
            let anti = anticommutator(&ts[i], &ts[j]);
            for k in 0..n {
                let idx = (i * n + j) * n + k;
                // (1/4i)·z = −i z / 4
                let fz = trace_product(&comm, &ts[k]) * Complex64::new(0.0, -0.25);
                let gz = trace_product(&anti, &ts[k]) * 0.25;
                f[idx] = truncate_real(fz);
                g[idx] = truncate_real(gz);
            }
        }
    }
    (f, g)
}

fn truncate_real(z: Complex64) -> f64 {
    debug_assert!(z.im.abs() < 1e-9, "structure constant not real: {z}");
    // snapping round-off to an exact zero keeps the SU(2) `g = 0` check strict
    if z.re.abs() < REAL_TRUNCATION {
        0.0
    } else {
        z.re
    }
}

/// Which operator a Bloch vector was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlochSource {
    Equilibrium,
    Perturbation,
}

/// Generalized Bloch vector `Lₖ = Tr(X·Tₖ⊗𝕀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    pub components: Vec<Complex64>,
    pub source: BlochSource,
}

impl BlochVector {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Real parts; meaningful when the input operator was Hermitian.
    pub fn real(&self) -> Vec<f64> {
        self.components.iter().map(|z| z.re).collect()
    }

    pub fn max_imaginary(&self) -> f64 {
        self.components.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// Bloch vector of an arbitrary `d1·d2` square operator.
pub fn bloch_vector(op: &CMatrix, gen: &GeneratorSet, d2: usize, source: BlochSource) -> Result<BlochVector> {
    let n = gen.dim() * d2;
    if op.nrows() != n || op.ncols() != n {
        return Err(shape_mismatch(
            format!("{n}x{n}"),
            format!("{}x{}", op.nrows(), op.ncols()),
        ));
    }
    let components = gen.lifted(d2).iter().map(|t| trace_product(op, t)).collect();
    Ok(BlochVector { components, source })
}

/// Bloch vector components from pre-lifted generators; no shape checks.
pub(crate) fn bloch_components(op: &CMatrix, lifted: &[CMatrix]) -> Vec<Complex64> {
    lifted.iter().map(|t| trace_product(op, t)).collect()
}
