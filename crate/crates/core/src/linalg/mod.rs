//! Dense complex-Hermitian linear algebra primitives.
//!
//! Everything downstream (Choi operators, SDP data, witnesses) is built on
//! two types: [`ComplexMatrix`], a dense row-major complex matrix, and
//! [`HermitianOperator`], a validated square Hermitian matrix whose
//! eigenstructure is exposed through [`Spectrum`]. Problem sizes are small
//! (Choi operators up to dimension ~16 at the intended scale), so storage is
//! dense and all algorithms are direct.
//!
//! Two conventions are fixed here once and used everywhere:
//!
//! - bipartite spaces are ordered `A ⊗ B` with row-major index `a·d_B + b`;
//! - Hermiticity is validated with an absolute tolerance of
//!   [`HERMITICITY_TOL`] on `‖H − H†‖∞`; inputs failing it are rejected, not
//!   symmetrized.

mod eigh;
mod lu;

pub(crate) use lu::{
    cholesky_lower, lu_solve_complex, lu_solve_real, tri_solve_lower, tri_solve_lower_t,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on `‖H − H†‖∞` accepted by [`HermitianOperator::new`].
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Tag selecting one factor of a bipartite space ordered `A ⊗ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// The first (input-side) factor, dimension `d_A`.
    A,
    /// The second (output-side) factor, dimension `d_B`.
    B,
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Square identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build a matrix by evaluating `f(row, col)`.
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Build from row-major complex entries. Fails if the count is wrong.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at `(i, j)`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    /// Mutable entry at `(i, j)`.
    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    /// Plain transpose.
    pub fn transpose(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i))
    }

    /// Entry-wise complex conjugate.
    pub fn conj(&self) -> Self {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).conj())
    }

    /// Matrix sum. Panics on shape mismatch (internal use is shape-checked).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Matrix difference.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Scale by a complex factor.
    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Scale by a real factor (keeps exact Hermitian symmetry of entries).
    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    /// Trace (sum of diagonal entries).
    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    /// Largest entry magnitude (the `∞` entry norm used by tolerances).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Deviation from Hermitian symmetry, `‖M − M†‖∞` entry-wise.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        dev
    }
}

/// Kronecker product `a ⊗ b` with the global row-major `A ⊗ B` ordering.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for ia in 0..ra {
        for ja in 0..ca {
            let f = a.at(ia, ja);
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    *out.at_mut(ia * rb + ib, ja * cb + jb) = f * b.at(ib, jb);
                }
            }
        }
    }
    out
}

/// Validated square Hermitian matrix.
///
/// Construction through [`HermitianOperator::new`] enforces
/// `‖H − H†‖∞ ≤ HERMITICITY_TOL` and finiteness of all entries. Operations
/// that produce Hermitian results by theorem (partial traces, spectral
/// reconstructions, real-linear combinations) construct instances through an
/// internal mirror that copies the upper triangle onto the lower one, so the
/// invariant holds exactly rather than merely within rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    mat: ComplexMatrix,
}

impl HermitianOperator {
    /// Validate and wrap a square matrix. Rejects non-square, non-finite, or
    /// non-Hermitian (beyond [`HERMITICITY_TOL`]) inputs.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(mat, HERMITICITY_TOL)
    }

    /// Same as [`HermitianOperator::new`] with an explicit tolerance.
    pub fn with_tolerance(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::Dimension(format!(
                "Hermitian operator must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        if mat
            .entries()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Validation(
                "matrix contains non-finite entries".into(),
            ));
        }
        let deviation = mat.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        // Mirror the upper triangle so that the stored matrix is Hermitian
        // to the last bit; downstream arithmetic relies on this.
        Ok(Self::mirror_upper(mat))
    }

    /// Wrap a matrix that is Hermitian *by construction* (e.g. a spectral
    /// reconstruction), mirroring the upper triangle to remove rounding skew.
    pub(crate) fn mirror_upper(mat: ComplexMatrix) -> Self {
        let n = mat.rows();
        let mut m = mat;
        for i in 0..n {
            m.at_mut(i, i).im = 0.0;
            for j in (i + 1)..n {
                let v = m.at(i, j);
                *m.at_mut(j, i) = v.conj();
            }
        }
        HermitianOperator { dim: n, mat: m }
    }

    /// Zero operator.
    pub fn zero(dim: usize) -> Self {
        HermitianOperator {
            dim,
            mat: ComplexMatrix::zeros(dim, dim),
        }
    }

    /// Identity operator.
    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            dim,
            mat: ComplexMatrix::identity(dim),
        }
    }

    /// Dimension of the underlying space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Consume into the underlying matrix.
    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Entry accessor.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.mat.at(i, j)
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Real-linear combination `self + s·other` (exactly Hermitian).
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "operator dims {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(HermitianOperator {
            dim: self.dim,
            mat: self.mat.add(&other.mat.scale_re(s)),
        })
    }

    /// Sum of two Hermitian operators.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, 1.0)
    }

    /// Difference of two Hermitian operators.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    /// Real scalar multiple.
    pub fn scale(&self, s: f64) -> Self {
        HermitianOperator {
            dim: self.dim,
            mat: self.mat.scale_re(s),
        }
    }

    /// Conjugation `C · self · C†` for an arbitrary complex matrix `C`
    /// (result is Hermitian by construction).
    pub fn conjugate_by(&self, c: &ComplexMatrix) -> Self {
        let prod = c.mul(&self.mat).mul(&c.dagger());
        Self::mirror_upper(prod)
    }

    /// Kronecker product of two Hermitian operators (Hermitian again).
    pub fn kron(&self, other: &Self) -> Self {
        Self::mirror_upper(kron(&self.mat, &other.mat))
    }
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues are sorted descending; `eigenvectors` holds the corresponding
/// orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Real eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, column `k` pairing with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Rebuild `Σ f(λ_k) v_k v_k†` from the eigenpairs.
    pub fn apply_to_eigenvalues<F: Fn(f64) -> f64>(&self, f: F) -> HermitianOperator {
        let n = self.eigenvectors.rows();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let w = f(self.eigenvalues[k]);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v.at(i, k).scale(w);
                for j in i..n {
                    let term = vik * v.at(j, k).conj();
                    *out.at_mut(i, j) += term;
                }
            }
        }
        HermitianOperator::mirror_upper(out)
    }
}

/// Eigendecomposition of a Hermitian operator.
///
/// Uses Householder tridiagonalization with implicit-shift QL iteration on
/// the real symmetric embedding of the matrix; see the `eigh` submodule for
/// details. Reconstruction satisfies `‖V diag(λ) V† − H‖∞ ≤ 1e-9 ‖H‖∞` on
/// the dimensions used in this crate.
pub fn eigh(h: &HermitianOperator) -> Spectrum {
    eigh::eigh_hermitian(h)
}

/// Real symmetric eigendecomposition on raw row-major storage.
///
/// Exposed for the SDP solver's Nesterov-Todd scaling, which works on real
/// symmetric blocks directly. Returns `(eigenvalues ascending, eigenvectors
/// row-major with column k ↔ eigenvalue k)`.
pub(crate) fn sym_eigh_raw(n: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    eigh::sym_eigh(n, a)
}

/// Partial trace over one factor of `A ⊗ B`.
///
/// `keep = Subsystem::A` returns `Tr_B x` (dim `d_a`); `keep = Subsystem::B`
/// returns `Tr_A x` (dim `d_b`). The full trace is preserved.
pub fn partial_trace(
    x: &HermitianOperator,
    d_a: usize,
    d_b: usize,
    keep: Subsystem,
) -> Result<HermitianOperator> {
    if x.dim() != d_a * d_b {
        return Err(Error::Dimension(format!(
            "operator dim {} does not factor as {}·{}",
            x.dim(),
            d_a,
            d_b
        )));
    }
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(d_a, d_a, |i, j| {
            (0..d_b).map(|b| x.at(i * d_b + b, j * d_b + b)).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(d_b, d_b, |i, j| {
            (0..d_a).map(|a| x.at(a * d_b + i, a * d_b + j)).sum()
        }),
    };
    Ok(HermitianOperator::mirror_upper(out))
}

/// Partial transpose on the tagged factor of `A ⊗ B`. Involutive and
/// trace-preserving; Hermiticity is preserved.
pub fn partial_transpose(
    x: &HermitianOperator,
    d_a: usize,
    d_b: usize,
    subsystem: Subsystem,
) -> Result<HermitianOperator> {
    if x.dim() != d_a * d_b {
        return Err(Error::Dimension(format!(
            "operator dim {} does not factor as {}·{}",
            x.dim(),
            d_a,
            d_b
        )));
    }
    let n = d_a * d_b;
    let out = ComplexMatrix::from_fn(n, n, |r, c| {
        let (a, b) = (r / d_b, r % d_b);
        let (ap, bp) = (c / d_b, c % d_b);
        match subsystem {
            Subsystem::A => x.at(ap * d_b + b, a * d_b + bp),
            Subsystem::B => x.at(a * d_b + bp, ap * d_b + b),
        }
    });
    Ok(HermitianOperator::mirror_upper(out))
}

/// Trace norm `‖H‖₁ = Σ|λ_i|` of a Hermitian operator.
pub fn trace_norm(h: &HermitianOperator) -> f64 {
    eigh(h).eigenvalues.iter().map(|l| l.abs()).sum()
}

/// Operator norm `‖H‖∞ = max|λ_i|` of a Hermitian operator.
pub fn operator_norm(h: &HermitianOperator) -> f64 {
    eigh(h)
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max)
}

/// Jordan decomposition `H = H₊ − H₋` into PSD parts with `H₊H₋ = 0`.
pub fn positive_negative_parts(h: &HermitianOperator) -> (HermitianOperator, HermitianOperator) {
    let spec = eigh(h);
    let pos = spec.apply_to_eigenvalues(|l| l.max(0.0));
    let neg = spec.apply_to_eigenvalues(|l| (-l).max(0.0));
    (pos, neg)
}

/// Hilbert-Schmidt inner product `⟨A, B⟩ = Tr(A†B)`, real for Hermitian
/// operands.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "hs_inner dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let mut acc = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            // Tr(A†B) = Σ_ij conj(A_ij) B_ij; imaginary parts cancel for
            // Hermitian operands.
            let t = a.at(i, j).conj() * b.at(i, j);
            acc += t.re;
        }
    }
    Ok(acc)
}

/// True iff `λ_min(H) ≥ −tol`.
pub fn is_psd(h: &HermitianOperator, tol: f64) -> bool {
    eigh(h).lambda_min() >= -tol
}

/// Hermitian square root of a PSD operator (eigenvalues clipped at zero to
/// absorb rounding).
pub fn psd_sqrt(h: &HermitianOperator) -> HermitianOperator {
    eigh(h).apply_to_eigenvalues(|l| l.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn sigma_x() -> HermitianOperator {
        HermitianOperator::new(ComplexMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    pub(crate) fn sigma_y() -> HermitianOperator {
        let mut m = ComplexMatrix::zeros(2, 2);
        *m.at_mut(0, 1) = c(0.0, -1.0);
        *m.at_mut(1, 0) = c(0.0, 1.0);
        HermitianOperator::new(m).unwrap()
    }

    pub(crate) fn sigma_z() -> HermitianOperator {
        let mut m = ComplexMatrix::zeros(2, 2);
        *m.at_mut(0, 0) = c(1.0, 0.0);
        *m.at_mut(1, 1) = c(-1.0, 0.0);
        HermitianOperator::new(m).unwrap()
    }

    fn diag(vals: &[f64]) -> HermitianOperator {
        let n = vals.len();
        HermitianOperator::new(ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(vals[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    /// SWAP on C² ⊗ C² — also the Choi operator of the transpose map.
    pub(crate) fn swap2() -> HermitianOperator {
        HermitianOperator::new(ComplexMatrix::from_fn(4, 4, |r, c_| {
            let (a, b) = (r / 2, r % 2);
            let (ap, bp) = (c_ / 2, c_ % 2);
            if a == bp && b == ap {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    /// Unnormalized maximally entangled projector |Ω⟩⟨Ω| on C^d ⊗ C^d.
    fn omega(d: usize) -> HermitianOperator {
        HermitianOperator::new(ComplexMatrix::from_fn(d * d, d * d, |r, s| {
            let (a, b) = (r / d, r % d);
            let (ap, bp) = (s / d, s % d);
            if a == b && ap == bp {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = ComplexMatrix::from_fn(dim, dim, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        HermitianOperator::mirror_upper(m.add(&m.dagger()).scale_re(0.5))
    }

    #[test]
    fn kron_identity_and_diag() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let a = diag(&[1.0, 2.0]);
        let b = diag(&[3.0, 4.0]);
        let k = kron(a.matrix(), b.matrix());
        for (i, want) in [3.0, 4.0, 6.0, 8.0].iter().enumerate() {
            assert_eq!(k.at(i, i), c(*want, 0.0));
        }
    }

    #[test]
    fn kron_sigma_x_flips_both_qubits() {
        // (σ_x ⊗ σ_x)|00⟩ = |11⟩: hand-expanded 4×4 antidiagonal.
        let k = kron(sigma_x().matrix(), sigma_x().matrix());
        let mut e00 = ComplexMatrix::zeros(4, 1);
        *e00.at_mut(0, 0) = c(1.0, 0.0);
        let out = k.mul(&e00);
        for i in 0..4 {
            let want = if i == 3 { 1.0 } else { 0.0 };
            assert!((out.at(i, 0) - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_omega_is_identity() {
        let tb = partial_trace(&omega(2), 2, 2, Subsystem::A).unwrap();
        assert!(tb.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let rho = random_hermitian(3, 7);
        let mut sigma = random_hermitian(2, 8);
        // normalize sigma to unit trace
        let t = sigma.trace();
        sigma = sigma.scale(1.0 / t);
        let prod = rho.kron(&sigma);
        let back = partial_trace(&prod, 3, 2, Subsystem::A).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn partial_trace_of_swap_is_identity() {
        let tb = partial_trace(&swap2(), 2, 2, Subsystem::A).unwrap();
        assert!(tb.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let ta = partial_trace(&swap2(), 2, 2, Subsystem::B).unwrap();
        assert!(ta.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn partial_transpose_product_and_omega() {
        let rho = random_hermitian(2, 1);
        let mut sigma = random_hermitian(2, 2);
        let t = sigma.trace();
        sigma = sigma.scale(1.0 / t);
        let prod = rho.kron(&sigma);
        let pt = partial_transpose(&prod, 2, 2, Subsystem::A).unwrap();
        let rho_t = HermitianOperator::mirror_upper(rho.matrix().transpose());
        assert!(pt.matrix().max_abs_diff(rho_t.kron(&sigma).matrix()) < 1e-14);

        // PT_A |Ω⟩⟨Ω| = SWAP by index bookkeeping on Σ|ii⟩⟨jj|.
        let pt_omega = partial_transpose(&omega(2), 2, 2, Subsystem::A).unwrap();
        assert!(pt_omega.matrix().max_abs_diff(swap2().matrix()) < 1e-15);
    }

    #[test]
    fn eigh_simple_spectra() {
        let s = eigh(&diag(&[3.0, 1.0, 2.0]));
        assert_eq!(s.eigenvalues.len(), 3);
        for (got, want) in s.eigenvalues.iter().zip([3.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }

        let sy = eigh(&sigma_y());
        assert!((sy.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((sy.eigenvalues[1] + 1.0).abs() < 1e-12);

        let sw = eigh(&swap2());
        for (got, want) in sw.eigenvalues.iter().zip([1.0, 1.0, 1.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn eigh_reconstruction_and_orthonormality() {
        for dim in [2usize, 3, 5, 8, 16] {
            let h = random_hermitian(dim, 1000 + dim as u64);
            let s = eigh(&h);
            let v = &s.eigenvectors;
            // V†V = 1
            let gram = v.dagger().mul(v);
            assert!(
                gram.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-11,
                "dim {dim}: eigenvectors not orthonormal"
            );
            // V diag(λ) V† = H
            let rebuilt = s.apply_to_eigenvalues(|l| l);
            let scale = h.matrix().max_abs().max(1e-30);
            assert!(
                rebuilt.matrix().max_abs_diff(h.matrix()) <= 1e-9 * scale,
                "dim {dim}: reconstruction residual too large"
            );
        }
    }

    #[test]
    fn eigh_handles_degenerate_complex_spectra() {
        // σ_y ⊗ σ_y has eigenvalues (1,1,-1,-1) with complex eigenvectors.
        let yy = sigma_y().kron(&sigma_y());
        let s = eigh(&yy);
        for (got, want) in s.eigenvalues.iter().zip([1.0, 1.0, -1.0, -1.0]) {
            assert!((got - want).abs() < 1e-11);
        }
        let rebuilt = s.apply_to_eigenvalues(|l| l);
        assert!(rebuilt.matrix().max_abs_diff(yy.matrix()) < 1e-10);
        let gram = s.eigenvectors.dagger().mul(&s.eigenvectors);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-11);
    }

    #[test]
    fn norms_and_parts() {
        assert!((trace_norm(&diag(&[2.0, -3.0])) - 5.0).abs() < 1e-12);
        assert!((trace_norm(&swap2()) - 4.0).abs() < 1e-11);
        let rho = diag(&[0.25, 0.75]);
        assert!((trace_norm(&rho) - 1.0).abs() < 1e-12);

        assert!((operator_norm(&HermitianOperator::identity(5)) - 1.0).abs() < 1e-12);
        assert!((operator_norm(&diag(&[2.0, -3.0])) - 3.0).abs() < 1e-12);
        assert!((operator_norm(&sigma_x()) - 1.0).abs() < 1e-12);

        let (p, n) = positive_negative_parts(&diag(&[2.0, -3.0]));
        assert!(p.matrix().max_abs_diff(diag(&[2.0, 0.0]).matrix()) < 1e-12);
        assert!(n.matrix().max_abs_diff(diag(&[0.0, 3.0]).matrix()) < 1e-12);

        let (pp, nn) = positive_negative_parts(&rho);
        assert!(pp.matrix().max_abs_diff(rho.matrix()) < 1e-12);
        assert!(nn.matrix().max_abs() < 1e-12);

        // Spectral projectors of SWAP: (1 ± SWAP)/2.
        let (ps, pa) = positive_negative_parts(&swap2());
        let sym = HermitianOperator::identity(4)
            .add(&swap2())
            .unwrap()
            .scale(0.5);
        let asym = HermitianOperator::identity(4)
            .sub(&swap2())
            .unwrap()
            .scale(0.5);
        assert!(ps.matrix().max_abs_diff(sym.matrix()) < 1e-10);
        assert!(pa.matrix().max_abs_diff(asym.matrix()) < 1e-10);
    }

    #[test]
    fn hs_inner_cases() {
        let rho = diag(&[0.5, 0.5]);
        assert!((hs_inner(&HermitianOperator::identity(2), &rho).unwrap() - 1.0).abs() < 1e-14);
        assert!(hs_inner(&sigma_x(), &sigma_z()).unwrap().abs() < 1e-14);
        let h = random_hermitian(4, 3);
        let sumsq: f64 = eigh(&h).eigenvalues.iter().map(|l| l * l).sum();
        assert!((hs_inner(&h, &h).unwrap() - sumsq).abs() < 1e-10);
        assert!(hs_inner(&h, &rho).is_err());
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&diag(&[0.3, 0.7]), 1e-10));
        assert!(!is_psd(&diag(&[1.0, -1e-3]), 1e-8));
        assert!(is_psd(&diag(&[1.0, -1e-9]), 1e-8));
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut skew = ComplexMatrix::zeros(2, 2);
        *skew.at_mut(0, 1) = c(0.0, 1e-3);
        *skew.at_mut(1, 0) = c(0.0, 1e-3); // not conjugate-symmetric
        assert!(matches!(
            HermitianOperator::new(skew),
            Err(Error::NotHermitian { .. })
        ));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(HermitianOperator::new(rect).is_err());
        let mut nan = ComplexMatrix::zeros(2, 2);
        *nan.at_mut(0, 0) = c(f64::NAN, 0.0);
        assert!(HermitianOperator::new(nan).is_err());
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let h = random_hermitian(4, 11);
        let (p, _) = positive_negative_parts(&h);
        let r = psd_sqrt(&p);
        let sq = r.matrix().mul(r.matrix());
        assert!(sq.max_abs_diff(p.matrix()) < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_trace_norm_is_sum_of_part_traces(seed in 0u64..5000, dim in 2usize..7) {
            let h = random_hermitian(dim, seed);
            let (p, n) = positive_negative_parts(&h);
            let tn = trace_norm(&h);
            let scale = tn.max(1.0);
            prop_assert!((tn - (p.trace() + n.trace())).abs() <= 1e-9 * scale);
            prop_assert!((h.trace() - (p.trace() - n.trace())).abs() <= 1e-9 * scale);
            // parts are PSD and annihilate each other
            prop_assert!(is_psd(&p, 1e-9));
            prop_assert!(is_psd(&n, 1e-9));
            prop_assert!(p.matrix().mul(n.matrix()).max_abs() <= 1e-9 * scale.max(1.0));
        }

        #[test]
        fn prop_partial_traces_preserve_trace(seed in 0u64..5000, da in 2usize..4, db in 2usize..4) {
            let h = random_hermitian(da * db, seed);
            let ta = partial_trace(&h, da, db, Subsystem::A).unwrap();
            let tb = partial_trace(&h, da, db, Subsystem::B).unwrap();
            prop_assert!((ta.trace() - h.trace()).abs() < 1e-10);
            prop_assert!((tb.trace() - h.trace()).abs() < 1e-10);
        }

        #[test]
        fn prop_partial_transpose_involution_and_trace(seed in 0u64..5000, da in 2usize..4, db in 2usize..4) {
            let h = random_hermitian(da * db, seed);
            for sub in [Subsystem::A, Subsystem::B] {
                let pt = partial_transpose(&h, da, db, sub).unwrap();
                prop_assert!((pt.trace() - h.trace()).abs() < 1e-12);
                let back = partial_transpose(&pt, da, db, sub).unwrap();
                prop_assert!(back.matrix().max_abs_diff(h.matrix()) < 1e-14);
            }
        }
    }
}
