//! Complex-to-real embedding and symmetric-matrix packing.
//!
//! The cone solver works over real symmetric blocks. Complex Hermitian data
//! enters through [`realify`], which maps `H` to the real symmetric matrix
//!
//! ```text
//! [[Re H, −Im H],
//!  [Im H,  Re H]]
//! ```
//!
//! of twice the dimension. Every eigenvalue of `H` appears exactly twice, so
//! `H ⪰ 0` iff `realify(H) ⪰ 0`, and inner products double:
//! `⟨realify(G), realify(H)⟩ = 2⟨G, H⟩`. Program builders account for the
//! factor of two once, uniformly, by halving compiled objective values.
//!
//! The reverse direction matters for witness extraction: a solver block is a
//! general real symmetric matrix `M̃`, not necessarily a realification.
//! Averaging `M̃ ↦ ½(M̃ + Jᵀ M̃ J)` with `J = [[0, −1], [1, 0]]` (blockwise)
//! projects onto the realified subspace without leaving the PSD cone and
//! without changing any inner product against realified data;
//! [`extract_hermitian`] performs this projection and returns the complex
//! witness.

use num_complex::Complex64;

use crate::linalg::{sym_eigh_raw, ComplexMatrix, HermitianOperator};

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    side: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Wrap row-major data as a symmetric matrix (symmetry is the caller's
    /// contract; the constructor mirrors the upper triangle to enforce it).
    pub fn new(side: usize, mut data: Vec<f64>) -> Self {
        assert_eq!(data.len(), side * side);
        for i in 0..side {
            for j in (i + 1)..side {
                let v = 0.5 * (data[i * side + j] + data[j * side + i]);
                data[i * side + j] = v;
                data[j * side + i] = v;
            }
        }
        SymMatrix { side, data }
    }

    /// Matrix side length.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// Entry accessor.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.side + j]
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        sym_eigh_raw(self.side, &self.data).0
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Packed length of the symmetric vectorization of an `n×n` matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Symmetric vectorization: packs the upper triangle row by row with
/// off-diagonal entries scaled by √2, so that `⟨svec X, svec Y⟩ = ⟨X, Y⟩_F`.
pub fn svec(n: usize, mat: &[f64]) -> Vec<f64> {
    assert_eq!(mat.len(), n * n);
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(svec_len(n));
    for i in 0..n {
        out.push(mat[i * n + i]);
        for j in (i + 1)..n {
            out.push(sqrt2 * mat[i * n + j]);
        }
    }
    out
}

/// Inverse of [`svec`]: unpack to a full row-major symmetric matrix.
pub fn smat(n: usize, packed: &[f64]) -> Vec<f64> {
    assert_eq!(packed.len(), svec_len(n));
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        out[i * n + i] = packed[k];
        k += 1;
        for j in (i + 1)..n {
            let v = inv_sqrt2 * packed[k];
            k += 1;
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    out
}

/// Real symmetric embedding `[[Re H, −Im H], [Im H, Re H]]` of a Hermitian
/// operator. `H ⪰ 0` iff the result is PSD; each eigenvalue doubles.
pub fn realify(h: &HermitianOperator) -> SymMatrix {
    let n = h.dim();
    let side = 2 * n;
    let mut data = vec![0.0; side * side];
    for i in 0..n {
        for j in 0..n {
            let z = h.at(i, j);
            data[i * side + j] = z.re;
            data[i * side + (n + j)] = -z.im;
            data[(n + i) * side + j] = z.im;
            data[(n + i) * side + (n + j)] = z.re;
        }
    }
    SymMatrix { side, data }
}

/// Project a real symmetric matrix of even side `2n` onto the realified
/// subspace and return the complex Hermitian operator it represents.
///
/// The projection averages over the embedding's complex-structure symmetry;
/// it is PSD-preserving and leaves inner products with realified operators
/// unchanged, so witnesses extracted this way inherit feasibility.
pub fn extract_hermitian(m: &SymMatrix) -> HermitianOperator {
    let side = m.side();
    assert_eq!(side % 2, 0, "realified matrices have even side");
    let n = side / 2;
    let mat = ComplexMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (m.at(i, j) + m.at(n + i, n + j));
        let im = 0.5 * (m.at(n + i, j) - m.at(i, n + j));
        Complex64::new(re, im)
    });
    HermitianOperator::mirror_upper(mat)
}

/// Orthonormal Hermitian operator basis of the `n×n` Hermitian space
/// (`n²` elements): diagonal units first, then symmetric and antisymmetric
/// pairs `(E_ij + E_ji)/√2`, `i(E_ij − E_ji)/√2` for `i < j`.
pub fn herm_basis(n: usize) -> Vec<HermitianOperator> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut m = ComplexMatrix::zeros(n, n);
        *m.at_mut(i, i) = Complex64::new(1.0, 0.0);
        out.push(HermitianOperator::mirror_upper(m));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = ComplexMatrix::zeros(n, n);
            *sym.at_mut(i, j) = Complex64::new(inv_sqrt2, 0.0);
            *sym.at_mut(j, i) = Complex64::new(inv_sqrt2, 0.0);
            out.push(HermitianOperator::mirror_upper(sym));

            let mut asym = ComplexMatrix::zeros(n, n);
            *asym.at_mut(i, j) = Complex64::new(0.0, inv_sqrt2);
            *asym.at_mut(j, i) = Complex64::new(0.0, -inv_sqrt2);
            out.push(HermitianOperator::mirror_upper(asym));
        }
    }
    out
}

/// `svec(realify(h))`: the row/column coefficient block a Hermitian operator
/// contributes to a compiled real cone program.
pub fn svec_of_herm(h: &HermitianOperator) -> Vec<f64> {
    let r = realify(h);
    svec(r.side(), r.entries())
}
