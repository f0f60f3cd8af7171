//! Equality-row presolve: drop linearly dependent rows of `A`.
//!
//! Realified trace-type constraints routinely produce dependent rows;
//! interior-point normal equations `A H Aᵀ` become singular unless they are
//! removed. Two passes are attempted:
//!
//! 1. a fast full-rank certificate — Cholesky of `A Aᵀ` with a conditioning
//!    floor — which keeps every row;
//! 2. otherwise, modified Gram-Schmidt over rows (with the right-hand side
//!    carried through) keeps a maximal independent subset, dropping a row
//!    when its residual against the kept span falls below `1e-10` relative
//!    to its norm. A dropped row whose right-hand side disagrees with the
//!    implied linear combination certifies primal infeasibility.

use crate::linalg::cholesky_lower;

use super::ConeProgram;

/// Outcome of the row presolve.
pub(crate) enum Presolve {
    /// Rows to keep (indices into the original rows, ascending order).
    Reduced(Vec<usize>),
    /// Equality system is self-contradictory: a dependent row's right-hand
    /// side disagrees with the implied combination by the stated amount.
    Inconsistent { mismatch: f64 },
}

const DROP_TOL: f64 = 1e-10;

pub(crate) fn presolve_rows(p: &ConeProgram) -> Presolve {
    let m = p.num_rows();
    let n = p.num_vars();
    if m == 0 {
        return Presolve::Reduced(Vec::new());
    }

    // Fast path: A Aᵀ positive definite with a healthy pivot ratio proves
    // full row rank.
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        let ri = &p.constraint_matrix[i * n..(i + 1) * n];
        for j in 0..=i {
            let rj = &p.constraint_matrix[j * n..(j + 1) * n];
            let dot: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
            gram[i * m + j] = dot;
            gram[j * m + i] = dot;
        }
    }
    if let Some(l) = cholesky_lower(m, &gram) {
        let mut min_d = f64::INFINITY;
        let mut max_d: f64 = 0.0;
        for i in 0..m {
            let d = l[i * m + i];
            min_d = min_d.min(d);
            max_d = max_d.max(d);
        }
        if min_d > 1e-6 * max_d {
            return Presolve::Reduced((0..m).collect());
        }
    }

    // Gram-Schmidt pass with the rhs carried alongside each row.
    let mut kept: Vec<usize> = Vec::new();
    let mut q: Vec<Vec<f64>> = Vec::new(); // orthonormal row basis
    let mut q_rhs: Vec<f64> = Vec::new(); // rhs transformed identically
    let b_scale = p.rhs.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    for i in 0..m {
        let mut r = p.constraint_matrix[i * n..(i + 1) * n].to_vec();
        let mut rb = p.rhs[i];
        let norm0 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        // two-pass projection for numerical cleanliness
        for _ in 0..2 {
            for (qk, qb) in q.iter().zip(&q_rhs) {
                let coef: f64 = qk.iter().zip(&r).map(|(a, b)| a * b).sum();
                for (rv, qv) in r.iter_mut().zip(qk) {
                    *rv -= coef * qv;
                }
                rb -= coef * qb;
            }
        }
        let resid = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if resid > DROP_TOL * norm0.max(1.0) {
            for rv in r.iter_mut() {
                *rv /= resid;
            }
            q.push(r);
            q_rhs.push(rb / resid);
            kept.push(i);
        } else if rb.abs() > 1e-7 * b_scale {
            return Presolve::Inconsistent { mismatch: rb.abs() };
        }
    }
    Presolve::Reduced(kept)
}
