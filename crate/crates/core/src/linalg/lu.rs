//! LU and Cholesky factorizations.
//!
//! Partial-pivot LU backs the channel-inversion and witness-decomposition
//! linear solves; Cholesky with triangular solves backs the interior-point
//! solver's scaling-point computations. All routines operate on dense
//! row-major storage and the problem sizes are small, so no blocking is
//! attempted.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Solve the real square system `A x = b` by LU with partial pivoting.
pub(crate) fn lu_solve_real(n: usize, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut lu = a.to_vec();
    let mut x = b.to_vec();
    let amax = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tiny = amax.max(1.0) * 1e-14;

    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut piv = col;
        let mut best = lu[perm[col] * n + col].abs();
        for row in (col + 1)..n {
            let v = lu[perm[row] * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best <= tiny {
            return Err(Error::Singular(format!(
                "linear system is singular at pivot {col} (|pivot| = {best:.3e})"
            )));
        }
        perm.swap(col, piv);
        let prow = perm[col];
        let pval = lu[prow * n + col];
        for row in (col + 1)..n {
            let r = perm[row];
            let factor = lu[r * n + col] / pval;
            lu[r * n + col] = factor;
            for k in (col + 1)..n {
                lu[r * n + k] -= factor * lu[prow * n + k];
            }
        }
    }
    // forward substitution on permuted rows
    let mut y = vec![0.0; n];
    for i in 0..n {
        let r = perm[i];
        let mut acc = x[r];
        for (j, lu_val) in lu[r * n..r * n + i].iter().enumerate() {
            acc -= lu_val * y[j];
        }
        y[i] = acc;
    }
    // back substitution
    for i in (0..n).rev() {
        let r = perm[i];
        let mut acc = y[i];
        for j in (i + 1)..n {
            acc -= lu[r * n + j] * x[j];
        }
        x[i] = acc / lu[r * n + i];
    }
    Ok(x)
}

/// Solve the complex square system `A X = B` columnwise by LU with partial
/// pivoting. Returns `X` with the shape of `B`.
pub(crate) fn lu_solve_complex(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n {
        return Err(Error::Dimension(format!(
            "lu_solve_complex shapes {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut lu: Vec<Complex64> = a.entries().to_vec();
    let amax = a.max_abs();
    let tiny = amax.max(1.0) * 1e-14;

    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut piv = col;
        let mut best = lu[perm[col] * n + col].norm();
        for row in (col + 1)..n {
            let v = lu[perm[row] * n + col].norm();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best <= tiny {
            return Err(Error::Singular(format!(
                "linear system is singular at pivot {col} (|pivot| = {best:.3e})"
            )));
        }
        perm.swap(col, piv);
        let prow = perm[col];
        let pval = lu[prow * n + col];
        for row in (col + 1)..n {
            let r = perm[row];
            let factor = lu[r * n + col] / pval;
            lu[r * n + col] = factor;
            for k in (col + 1)..n {
                let sub = factor * lu[prow * n + k];
                lu[r * n + k] -= sub;
            }
        }
    }

    let mut out = ComplexMatrix::zeros(n, b.cols());
    for rhs in 0..b.cols() {
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let r = perm[i];
            let mut acc = b.at(r, rhs);
            for (j, yj) in y.iter().enumerate().take(i) {
                acc -= lu[r * n + j] * yj;
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let r = perm[i];
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= lu[r * n + j] * out.at(j, rhs);
            }
            *out.at_mut(i, rhs) = acc / lu[r * n + i];
        }
    }
    Ok(out)
}

/// Cholesky factorization `A = L Lᵀ` of a real symmetric positive-definite
/// matrix, row-major. Returns the lower factor, or `None` if a pivot is not
/// strictly positive (matrix not PD to working precision).
pub(crate) fn cholesky_lower(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// In-place forward solve `L y = b` with `L` lower triangular row-major.
pub(crate) fn tri_solve_lower(n: usize, l: &[f64], b: &mut [f64]) {
    for i in 0..n {
        let mut acc = b[i];
        for (j, lv) in l[i * n..i * n + i].iter().enumerate() {
            acc -= lv * b[j];
        }
        b[i] = acc / l[i * n + i];
    }
}

/// In-place backward solve `Lᵀ x = b` with `L` lower triangular row-major.
pub(crate) fn tri_solve_lower_t(n: usize, l: &[f64], b: &mut [f64]) {
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc -= l[j * n + i] * b[j];
        }
        b[i] = acc / l[i * n + i];
    }
}
