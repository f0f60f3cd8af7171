//! Symmetric and Hermitian eigensolvers.
//!
//! Real symmetric matrices are reduced to tridiagonal form by Householder
//! reflections and diagonalized by implicit-shift QL iteration with
//! accumulated transformations (the classical tred2/tql2 pair). Complex
//! Hermitian matrices are embedded as the real symmetric matrix
//! `[[Re H, −Im H], [Im H, Re H]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled; complex eigenvectors are recovered from the doubled
//! real eigenspaces by pivoted Gram-Schmidt selection, a global
//! re-orthonormalization pass, and Rayleigh-quotient eigenvalues.

use num_complex::Complex64;

use super::{ComplexMatrix, HermitianOperator, Spectrum};

/// Householder tridiagonalization with accumulated transformations.
///
/// `a` is an `n×n` row-major symmetric matrix; on return it holds the
/// accumulated orthogonal matrix `Q` with `QᵀAQ` tridiagonal. Returns the
/// diagonal `d` and subdiagonal `e` (with `e[0]` unused).
fn tred2(n: usize, a: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    let ix = |i: usize, j: usize| i * n + j;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        let mut scale = 0.0;
        if l > 0 {
            for k in 0..=l {
                scale += a[ix(i, k)].abs();
            }
            if scale == 0.0 {
                e[i] = a[ix(i, l)];
            } else {
                for k in 0..=l {
                    a[ix(i, k)] /= scale;
                    h += a[ix(i, k)] * a[ix(i, k)];
                }
                let mut f = a[ix(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[ix(i, l)] = f - g;
                f = 0.0;
                for j in 0..=l {
                    a[ix(j, i)] = a[ix(i, j)] / h;
                    let mut g2 = 0.0;
                    for k in 0..=j {
                        g2 += a[ix(j, k)] * a[ix(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g2 += a[ix(k, j)] * a[ix(i, k)];
                    }
                    e[j] = g2 / h;
                    f += e[j] * a[ix(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let fj = a[ix(i, j)];
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    for k in 0..=j {
                        a[ix(j, k)] -= fj * e[k] + gj * a[ix(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[ix(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[ix(i, k)] * a[ix(k, j)];
                }
                for k in 0..i {
                    a[ix(k, j)] -= g * a[ix(k, i)];
                }
            }
        }
        d[i] = a[ix(i, i)];
        a[ix(i, i)] = 1.0;
        for j in 0..i {
            a[ix(j, i)] = 0.0;
            a[ix(i, j)] = 0.0;
        }
    }
    (d, e)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix, updating
/// the accumulated transformation `z` so its columns become eigenvectors.
///
/// `d` holds the diagonal (overwritten with eigenvalues), `e` the
/// subdiagonal in `e[1..n]`. Panics only if 80 sweeps fail to deflate a
/// single eigenvalue, which does not occur for finite input.
fn tql2(n: usize, d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let ix = |i: usize, j: usize| i * n + j;
    if n <= 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd + f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 80, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / denom;
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            let mut i = m - 1;
            loop {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let fk = z[ix(k, i + 1)];
                    z[ix(k, i + 1)] = s * z[ix(k, i)] + c * fk;
                    z[ix(k, i)] = c * z[ix(k, i)] - s * fk;
                }
                if i == l {
                    break;
                }
                i -= 1;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Real symmetric eigendecomposition.
///
/// `a` is `n×n` row-major symmetric. Returns `(eigenvalues, eigenvectors)`
/// with eigenvalues ascending and eigenvector `k` stored as column `k` of
/// the row-major eigenvector matrix.
pub(crate) fn sym_eigh(n: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    if n == 1 {
        return (vec![a[0]], vec![1.0]);
    }
    let mut z = a.to_vec();
    let (mut d, mut e) = tred2(n, &mut z);
    tql2(n, &mut d, &mut e, &mut z);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| d[p].partial_cmp(&d[q]).expect("finite eigenvalues"));
    let evals: Vec<f64> = order.iter().map(|&p| d[p]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vecs[row * n + new_col] = z[row * n + old_col];
        }
    }
    (evals, vecs)
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Subtract from `v` its projections onto the unit vectors in `basis`.
fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let coef = cdot(b, v);
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi -= coef * bi;
        }
    }
}

/// Hermitian eigendecomposition through the real symmetric embedding.
pub(crate) fn eigh_hermitian(h: &HermitianOperator) -> Spectrum {
    let n = h.dim();
    if n == 0 {
        return Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        };
    }

    // Real symmetric embedding [[Re H, −Im H], [Im H, Re H]].
    let m = 2 * n;
    let mut big = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h.at(i, j);
            big[i * m + j] = z.re;
            big[i * m + (n + j)] = -z.im;
            big[(n + i) * m + j] = z.im;
            big[(n + i) * m + (n + j)] = z.re;
        }
    }
    let (evals, evecs) = sym_eigh(m, &big);

    let scale = evals.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    let cluster_tol = 1e-10 * scale;

    // Each eigenvalue of H appears twice in the embedding. Walk the
    // ascending real spectrum grouping near-equal values into clusters; a
    // cluster is only closed at even size so the doubling is respected.
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let candidate = |col: usize| -> Vec<Complex64> {
        (0..n)
            .map(|row| Complex64::new(evecs[row * m + col], evecs[(n + row) * m + col]))
            .collect()
    };

    let mut start = 0;
    while start < m {
        let mut end = start + 1;
        while end < m
            && ((evals[end] - evals[end - 1]).abs() <= cluster_tol || (end - start) % 2 == 1)
        {
            end += 1;
        }
        let size = end - start;
        debug_assert_eq!(size % 2, 0, "embedded eigenvalues must pair up");
        let want = size / 2;

        // Pivoted Gram-Schmidt: from the `size` candidate complex vectors
        // pick the `want` with the largest residuals against everything
        // accepted so far.
        let cands: Vec<Vec<Complex64>> = (start..end).map(candidate).collect();
        let mut used = vec![false; cands.len()];
        for _ in 0..want {
            let mut best = usize::MAX;
            let mut best_norm = -1.0;
            let mut best_vec: Option<Vec<Complex64>> = None;
            for (ci, cand) in cands.iter().enumerate() {
                if used[ci] {
                    continue;
                }
                let mut resid = cand.clone();
                project_out(&mut resid, &accepted);
                let nrm = cnorm(&resid);
                if nrm > best_norm {
                    best_norm = nrm;
                    best = ci;
                    best_vec = Some(resid);
                }
            }
            let mut v = best_vec.expect("cluster has candidates");
            used[best] = true;
            // A second projection pass keeps orthogonality at machine
            // precision even when the pivot residual is small.
            project_out(&mut v, &accepted);
            let nrm = cnorm(&v);
            assert!(
                nrm > 1e-12,
                "failed to extract independent eigenvector from embedding"
            );
            for vi in v.iter_mut() {
                *vi /= nrm;
            }
            accepted.push(v);
        }
        start = end;
    }
    debug_assert_eq!(accepted.len(), n);

    // Rayleigh-quotient eigenvalues from the extracted vectors.
    let mut pairs: Vec<(f64, Vec<Complex64>)> = accepted
        .into_iter()
        .map(|v| {
            let mut hv = vec![Complex64::new(0.0, 0.0); n];
            for (i, out) in hv.iter_mut().enumerate() {
                for (j, vj) in v.iter().enumerate() {
                    *out += h.at(i, j) * vj;
                }
            }
            let lambda = cdot(&v, &hv).re;
            (lambda, v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite eigenvalues"));

    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| pairs[k].1[i]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}
