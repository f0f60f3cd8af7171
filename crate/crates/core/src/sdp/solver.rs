//! Primal-dual path-following interior-point solver.
//!
//! The algorithm is the standard dense recipe for small cone programs:
//! Nesterov-Todd scaling on PSD blocks (diagonal scaling on nonnegative
//! blocks), a Mehrotra predictor-corrector step, and a dense Cholesky solve
//! of the normal equations `(A H Aᵀ) Δy = r`. Free blocks are split into
//! differences of nonnegative blocks before iteration begins; redundant
//! equality rows are removed by the presolve pass.
//!
//! Heavy per-iteration kernels (scaling the constraint rows and forming the
//! normal matrix) are data-parallel across rows; each row is produced by a
//! single task, so results are bitwise independent of the scheduling.

use crate::error::Result;
use crate::linalg::{cholesky_lower, sym_eigh_raw, tri_solve_lower, tri_solve_lower_t};
use crate::par::map_range;

use super::presolve::{presolve_rows, Presolve};
use super::{smat, svec, Block, ConeProgram, IterateRecord, Solution, SolverConfig, Status};

/// Divergence threshold on iterate norms.
const DIVERGENCE_LIMIT: f64 = 1e10;
/// Gap-stagnation window (iterations without meaningful progress).
const STAGNATION_WINDOW: usize = 30;

// ---------------------------------------------------------------------------
// small dense helpers (row-major square matrices)

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn transpose(n: usize, a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

// ---------------------------------------------------------------------------
// internal cone layout (free blocks already split)

#[derive(Debug, Clone, Copy)]
enum Cone {
    Psd { side: usize, offset: usize },
    NonNeg { offset: usize, len: usize },
}

struct Internal {
    n: usize,
    m: usize,
    a: Vec<f64>, // m × n
    b: Vec<f64>,
    c: Vec<f64>,
    cones: Vec<Cone>,
    nu: f64,
    kept_rows: Vec<usize>,
    /// (user offset, appended negative-part offset, length) per free block
    free_pairs: Vec<(usize, usize, usize)>,
}

fn build_internal(p: &ConeProgram, kept_rows: Vec<usize>) -> Internal {
    let n_user = p.num_vars();
    let mut free_pairs = Vec::new();
    let mut cones = Vec::new();
    let mut extra = 0usize;
    let mut offset = 0usize;
    for blk in &p.blocks {
        match *blk {
            Block::Psd(side) => cones.push(Cone::Psd { side, offset }),
            Block::NonNeg(len) => {
                if len > 0 {
                    cones.push(Cone::NonNeg { offset, len });
                }
            }
            Block::Free(len) => {
                if len > 0 {
                    cones.push(Cone::NonNeg { offset, len });
                    free_pairs.push((offset, n_user + extra, len));
                    extra += len;
                }
            }
        }
        offset += blk.len();
    }
    let n = n_user + extra;
    for &(_, v_off, len) in &free_pairs {
        cones.push(Cone::NonNeg { offset: v_off, len });
    }

    let mut c = vec![0.0; n];
    c[..n_user].copy_from_slice(&p.objective);
    for &(u_off, v_off, len) in &free_pairs {
        for k in 0..len {
            c[v_off + k] = -p.objective[u_off + k];
        }
    }

    let m = kept_rows.len();
    let mut a = vec![0.0; m * n];
    let mut b = vec![0.0; m];
    for (row, &orig) in kept_rows.iter().enumerate() {
        let src = &p.constraint_matrix[orig * n_user..(orig + 1) * n_user];
        a[row * n..row * n + n_user].copy_from_slice(src);
        for &(u_off, v_off, len) in &free_pairs {
            for k in 0..len {
                a[row * n + v_off + k] = -src[u_off + k];
            }
        }
        b[row] = p.rhs[orig];
    }

    let nu: f64 = cones
        .iter()
        .map(|c| match *c {
            Cone::Psd { side, .. } => side as f64,
            Cone::NonNeg { len, .. } => len as f64,
        })
        .sum();

    Internal {
        n,
        m,
        a,
        b,
        c,
        cones,
        nu: nu.max(1.0),
        kept_rows,
        free_pairs,
    }
}

// ---------------------------------------------------------------------------
// Nesterov-Todd scaling data per cone

enum Scale {
    Psd {
        /// scaling matrix W = R Rᵀ with W S W = X
        w: Vec<f64>,
        r: Vec<f64>,
        r_inv: Vec<f64>,
        /// scaled spectrum λ_i (R⁻¹ X R⁻ᵀ = Rᵀ S R = diag λ)
        lam: Vec<f64>,
        chol_x: Vec<f64>,
        chol_s: Vec<f64>,
    },
    NonNeg {
        /// x_i / s_i
        h: Vec<f64>,
    },
}

/// Cholesky with escalating diagonal jitter; `None` only for hopeless data.
fn chol_with_jitter(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    if let Some(l) = cholesky_lower(n, a) {
        return Some(l);
    }
    let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
    let base = (trace.abs() / n as f64).max(1e-30);
    let mut jitter = 1e-14 * base;
    for _ in 0..12 {
        let mut aj = a.to_vec();
        for i in 0..n {
            aj[i * n + i] += jitter;
        }
        if let Some(l) = cholesky_lower(n, &aj) {
            return Some(l);
        }
        jitter *= 100.0;
    }
    None
}

/// `L⁻¹ M L⁻ᵀ` for symmetric `M` and lower-triangular `L`.
fn congruence_inv(n: usize, l: &[f64], m: &[f64]) -> Vec<f64> {
    // Z = L⁻¹ M  (solve column-wise on Mᵀ's rows = M's columns; M symmetric)
    let mut z = vec![0.0; n * n];
    for col in 0..n {
        let mut v: Vec<f64> = (0..n).map(|r| m[r * n + col]).collect();
        tri_solve_lower(n, l, &mut v);
        for r in 0..n {
            z[r * n + col] = v[r];
        }
    }
    // B = Z L⁻ᵀ  ⇔  Bᵀ = L⁻¹ Zᵀ
    let zt = transpose(n, &z);
    let mut bt = vec![0.0; n * n];
    for col in 0..n {
        let mut v: Vec<f64> = (0..n).map(|r| zt[r * n + col]).collect();
        tri_solve_lower(n, l, &mut v);
        for r in 0..n {
            bt[r * n + col] = v[r];
        }
    }
    transpose(n, &bt)
}

fn compute_scales(int: &Internal, x: &[f64], s: &[f64]) -> Option<Vec<Scale>> {
    let mut scales = Vec::with_capacity(int.cones.len());
    for cone in &int.cones {
        match *cone {
            Cone::NonNeg { offset, len } => {
                let h = (0..len).map(|k| x[offset + k] / s[offset + k]).collect();
                scales.push(Scale::NonNeg { h });
            }
            Cone::Psd { side, offset } => {
                let xm = smat(side, &x[offset..offset + super::svec_len(side)]);
                let sm = smat(side, &s[offset..offset + super::svec_len(side)]);
                let chol_x = chol_with_jitter(side, &xm)?;
                let chol_s = chol_with_jitter(side, &sm)?;
                // eigendecomposition of L_xᵀ S L_x
                let lxt = transpose(side, &chol_x);
                let tmp = mat_mul(side, &lxt, &sm);
                let lsl = mat_mul(side, &tmp, &chol_x);
                let (theta, v) = sym_eigh_raw(side, &lsl);
                // λ_i = √θ_i; R = L_x V Θ^{-1/4}; R⁻¹ = Θ^{1/4} Vᵀ L_x⁻¹
                let mut lam = Vec::with_capacity(side);
                for t in &theta {
                    let tc = t.max(1e-250);
                    lam.push(tc.sqrt());
                }
                let mut r = mat_mul(side, &chol_x, &v);
                for row in 0..side {
                    for kcol in 0..side {
                        r[row * side + kcol] *= theta[kcol].max(1e-250).powf(-0.25);
                    }
                }
                // L_x⁻¹ column by column
                let mut lx_inv = vec![0.0; side * side];
                for col in 0..side {
                    let mut e = vec![0.0; side];
                    e[col] = 1.0;
                    tri_solve_lower(side, &chol_x, &mut e);
                    for row in 0..side {
                        lx_inv[row * side + col] = e[row];
                    }
                }
                let vt = transpose(side, &v);
                let mut r_inv = mat_mul(side, &vt, &lx_inv);
                for row in 0..side {
                    let f = theta[row].max(1e-250).powf(0.25);
                    for col in 0..side {
                        r_inv[row * side + col] *= f;
                    }
                }
                let rt = transpose(side, &r);
                let w = mat_mul(side, &r, &rt);
                scales.push(Scale::Psd {
                    w,
                    r,
                    r_inv,
                    lam,
                    chol_x,
                    chol_s,
                });
            }
        }
    }
    Some(scales)
}

/// Apply the scaling operator `H = W ⊗ W` blockwise: `out = H v`.
fn apply_h(int: &Internal, scales: &[Scale], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; int.n];
    for (cone, scale) in int.cones.iter().zip(scales) {
        match (cone, scale) {
            (&Cone::NonNeg { offset, len }, Scale::NonNeg { h, .. }) => {
                for k in 0..len {
                    out[offset + k] = h[k] * v[offset + k];
                }
            }
            (&Cone::Psd { side, offset }, Scale::Psd { w, .. }) => {
                let len = super::svec_len(side);
                let vm = smat(side, &v[offset..offset + len]);
                let t = mat_mul(side, w, &vm);
                let hw = mat_mul(side, &t, w);
                out[offset..offset + len].copy_from_slice(&svec(side, &hw));
            }
            _ => unreachable!("cone/scale lists are built together"),
        }
    }
    out
}

/// Largest step `α` keeping `z + α·Δ` in the cone, per block, where the PSD
/// block factor `L` (chol of the current point) is supplied.
fn step_to_boundary(int: &Internal, scales: &[Scale], z: &[f64], dz: &[f64], primal: bool) -> f64 {
    let mut alpha = f64::INFINITY;
    for (cone, scale) in int.cones.iter().zip(scales) {
        match (cone, scale) {
            (&Cone::NonNeg { offset, len }, _) => {
                for k in 0..len {
                    let d = dz[offset + k];
                    if d < 0.0 {
                        alpha = alpha.min(-z[offset + k] / d);
                    }
                }
            }
            (&Cone::Psd { side, offset }, Scale::Psd { chol_x, chol_s, .. }) => {
                let l = if primal { chol_x } else { chol_s };
                let len = super::svec_len(side);
                let dm = smat(side, &dz[offset..offset + len]);
                let bmat = congruence_inv(side, l, &dm);
                // A nearly singular factor can overflow the congruence;
                // treat the whole step as blocked rather than feed
                // non-finite data to the eigensolver.
                if bmat.iter().any(|v| !v.is_finite()) {
                    return 0.0;
                }
                let (evals, _) = sym_eigh_raw(side, &bmat);
                let lmin = evals[0];
                if lmin < 0.0 {
                    alpha = alpha.min(-1.0 / lmin);
                }
            }
            _ => unreachable!(),
        }
    }
    alpha
}

/// Scaled inner products ⟨x, s⟩ summed over cones.
fn cone_inner(int: &Internal, x: &[f64], s: &[f64]) -> f64 {
    let mut acc = 0.0;
    for cone in &int.cones {
        match *cone {
            Cone::NonNeg { offset, len } => {
                for k in 0..len {
                    acc += x[offset + k] * s[offset + k];
                }
            }
            Cone::Psd { side, offset } => {
                let len = super::svec_len(side);
                acc += dot(&x[offset..offset + len], &s[offset..offset + len]);
            }
        }
    }
    acc
}

fn identity_point(int: &Internal, tau: f64) -> Vec<f64> {
    let mut v = vec![0.0; int.n];
    for cone in &int.cones {
        match *cone {
            Cone::NonNeg { offset, len } => {
                for k in 0..len {
                    v[offset + k] = tau;
                }
            }
            Cone::Psd { side, offset } => {
                let mut k = offset;
                for i in 0..side {
                    v[k] = tau;
                    k += side - i; // next diagonal coordinate in svec order
                }
            }
        }
    }
    v
}

// ---------------------------------------------------------------------------

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    ds: Vec<f64>,
}

/// Numerical-breakdown detector: directions computed from an extremely
/// ill-conditioned normal matrix can come back non-finite, and iterating on
/// them would only poison the state.
fn direction_finite(dir: &Direction) -> bool {
    dir.dx
        .iter()
        .chain(&dir.dy)
        .chain(&dir.ds)
        .all(|v| v.is_finite())
}

/// Solve the reduced Newton system for a given complementarity target `e_d`.
fn newton_step(
    int: &Internal,
    scales: &[Scale],
    l_m: &[f64],
    r_p: &[f64],
    r_d: &[f64],
    h_rd: &[f64],
    e_d: &[f64],
) -> Direction {
    let m = int.m;
    let n = int.n;
    // rhs = r_p − A e_d + A (H r_d)
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let row = &int.a[i * n..(i + 1) * n];
        rhs[i] = r_p[i] - dot(row, e_d) + dot(row, h_rd);
    }
    tri_solve_lower(m, l_m, &mut rhs);
    tri_solve_lower_t(m, l_m, &mut rhs);
    let dy = rhs;
    // Δs = r_d − Aᵀ Δy
    let mut ds = r_d.to_vec();
    for (i, dyi) in dy.iter().enumerate() {
        if *dyi == 0.0 {
            continue;
        }
        let row = &int.a[i * n..(i + 1) * n];
        for (dsv, av) in ds.iter_mut().zip(row) {
            *dsv -= av * dyi;
        }
    }
    // Δx = e_d − H Δs
    let hds = apply_h(int, scales, &ds);
    let dx: Vec<f64> = e_d.iter().zip(&hds).map(|(e, h)| e - h).collect();
    Direction { dx, dy, ds }
}

pub(crate) fn solve_impl(p: &ConeProgram, cfg: &SolverConfig) -> Result<Solution> {
    let kept = match presolve_rows(p) {
        Presolve::Reduced(kept) => kept,
        Presolve::Inconsistent { mismatch } => {
            let mut sol = infeasible_solution(p, Status::PrimalInfeasible);
            sol.primal_residual = mismatch;
            return Ok(sol);
        }
    };
    let int = build_internal(p, kept);

    let tau_p = norm_inf(&int.b).max(1.0);
    let tau_d = norm_inf(&int.c).max(1.0);
    let mut x = identity_point(&int, tau_p);
    let mut s = identity_point(&int, tau_d);
    let mut y = vec![0.0; int.m];

    let b_scale = norm2(&int.b).max(1.0);
    let c_scale = norm2(&int.c).max(1.0);

    let mut iterates: Vec<IterateRecord> = Vec::new();
    let mut mu_history: Vec<f64> = Vec::new();
    let mut status = Status::MaxIterations;
    let mut iterations = 0;

    for iter in 0..cfg.max_iterations {
        iterations = iter;
        // residuals
        let ax = {
            let mut v = vec![0.0; int.m];
            for i in 0..int.m {
                v[i] = dot(&int.a[i * int.n..(i + 1) * int.n], &x);
            }
            v
        };
        let r_p: Vec<f64> = int.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut r_d: Vec<f64> = int.c.iter().zip(&s).map(|(c, s)| c - s).collect();
        for (i, yi) in y.iter().enumerate() {
            if *yi == 0.0 {
                continue;
            }
            let row = &int.a[i * int.n..(i + 1) * int.n];
            for (rv, av) in r_d.iter_mut().zip(row) {
                *rv -= av * yi;
            }
        }

        let p_obj = dot(&int.c, &x);
        let d_obj = dot(&int.b, &y);
        let mu = cone_inner(&int, &x, &s) / int.nu;
        iterates.push(IterateRecord {
            primal_objective: p_obj,
            dual_objective: d_obj,
            primal_residual_norm: norm2(&r_p),
            dual_residual_norm: norm2(&r_d),
            x_norm: norm2(&x),
            y_norm: norm2(&y),
            mu,
        });
        mu_history.push(mu);

        let rel_gap = (p_obj - d_obj).abs() / p_obj.abs().max(d_obj.abs()).max(1.0);
        let rp_rel = norm2(&r_p) / b_scale;
        let rd_rel = norm2(&r_d) / c_scale;
        let mu_rel = mu / p_obj.abs().max(d_obj.abs()).max(1.0);
        if rel_gap <= cfg.gap_tol
            && mu_rel <= cfg.gap_tol.max(1e-9) * 10.0
            && rp_rel <= cfg.feas_tol
            && rd_rel <= cfg.feas_tol
        {
            status = Status::Optimal;
            break;
        }

        // divergence heuristics
        let xin = norm_inf(&x);
        let yin = norm_inf(&y);
        let sin = norm_inf(&s);
        if xin.max(yin).max(sin) > DIVERGENCE_LIMIT * tau_p.max(tau_d) {
            status = if yin >= xin.max(sin) {
                Status::PrimalInfeasible
            } else {
                Status::DualInfeasible
            };
            break;
        }
        // gap stagnation
        if iter >= STAGNATION_WINDOW {
            let past = mu_history[iter - STAGNATION_WINDOW];
            if mu > 0.9 * past && rel_gap > cfg.gap_tol {
                status = Status::MaxIterations;
                break;
            }
        }

        // scaling
        let scales = match compute_scales(&int, &x, &s) {
            Some(sc) => sc,
            None => {
                status = Status::MaxIterations;
                break;
            }
        };

        // normal matrix M = A H Aᵀ (rows in parallel; deterministic order)
        let h_rows: Vec<Vec<f64>> = map_range(int.m, cfg.parallelism, |i| {
            apply_h(&int, &scales, &int.a[i * int.n..(i + 1) * int.n])
        });
        let tri: Vec<Vec<f64>> = map_range(int.m, cfg.parallelism, |i| {
            let row = &int.a[i * int.n..(i + 1) * int.n];
            (0..=i).map(|j| dot(row, &h_rows[j])).collect()
        });
        let mut normal = vec![0.0; int.m * int.m];
        for i in 0..int.m {
            for j in 0..=i {
                normal[i * int.m + j] = tri[i][j];
                normal[j * int.m + i] = tri[i][j];
            }
        }
        let l_m = match chol_with_jitter(int.m, &normal) {
            Some(l) => l,
            None => {
                status = Status::MaxIterations;
                break;
            }
        };

        let h_rd = apply_h(&int, &scales, &r_d);

        // predictor (affine) direction: e_d = −x
        let e_aff: Vec<f64> = x.iter().map(|v| -v).collect();
        let aff = newton_step(&int, &scales, &l_m, &r_p, &r_d, &h_rd, &e_aff);
        if !direction_finite(&aff) {
            status = Status::MaxIterations;
            break;
        }
        let a_p = step_to_boundary(&int, &scales, &x, &aff.dx, true).min(1.0);
        let a_d = step_to_boundary(&int, &scales, &s, &aff.ds, false).min(1.0);
        let x_probe: Vec<f64> = x.iter().zip(&aff.dx).map(|(v, d)| v + a_p * d).collect();
        let s_probe: Vec<f64> = s.iter().zip(&aff.ds).map(|(v, d)| v + a_d * d).collect();
        let mu_aff = cone_inner(&int, &x_probe, &s_probe) / int.nu;
        let sigma_c = (mu_aff / mu).powi(3).clamp(1e-10, 1.0);

        // corrector target
        let mut e_d = vec![0.0; int.n];
        for (cone, scale) in int.cones.iter().zip(&scales) {
            match (cone, scale) {
                (&Cone::NonNeg { offset, len }, _) => {
                    for k in 0..len {
                        let i = offset + k;
                        e_d[i] = (sigma_c * mu - x[i] * s[i] - aff.dx[i] * aff.ds[i]) / s[i];
                    }
                }
                (&Cone::Psd { side, offset }, Scale::Psd { r, r_inv, lam, .. }) => {
                    let len = super::svec_len(side);
                    let dxm = smat(side, &aff.dx[offset..offset + len]);
                    let dsm = smat(side, &aff.ds[offset..offset + len]);
                    // scaled affine directions
                    let rit = transpose(side, r_inv);
                    let dxs = mat_mul(side, &mat_mul(side, r_inv, &dxm), &rit);
                    let rt = transpose(side, r);
                    let dss = mat_mul(side, &mat_mul(side, &rt, &dsm), r);
                    // D = σμ I − Λ² − ½(ΔX̂ ΔŜ + ΔŜ ΔX̂)
                    let prod1 = mat_mul(side, &dxs, &dss);
                    let mut d = vec![0.0; side * side];
                    for i in 0..side {
                        for j in 0..side {
                            let symm = 0.5 * (prod1[i * side + j] + prod1[j * side + i]);
                            let mut v = -symm;
                            if i == j {
                                v += sigma_c * mu - lam[i] * lam[i];
                            }
                            d[i * side + j] = v;
                        }
                    }
                    // E_ij = 2 D_ij / (λ_i + λ_j); e_d = svec(R E Rᵀ)
                    for i in 0..side {
                        for j in 0..side {
                            d[i * side + j] *= 2.0 / (lam[i] + lam[j]);
                        }
                    }
                    let re = mat_mul(side, r, &d);
                    let rer = mat_mul(side, &re, &rt);
                    // symmetrize against rounding
                    let mut sym = vec![0.0; side * side];
                    for i in 0..side {
                        for j in 0..side {
                            sym[i * side + j] = 0.5 * (rer[i * side + j] + rer[j * side + i]);
                        }
                    }
                    e_d[offset..offset + len].copy_from_slice(&svec(side, &sym));
                }
                _ => unreachable!(),
            }
        }

        let dir = newton_step(&int, &scales, &l_m, &r_p, &r_d, &h_rd, &e_d);
        if !direction_finite(&dir) {
            status = Status::MaxIterations;
            break;
        }
        let bp = step_to_boundary(&int, &scales, &x, &dir.dx, true);
        let bd = step_to_boundary(&int, &scales, &s, &dir.ds, false);
        let a_p = (cfg.step_fraction * bp).min(1.0);
        let a_d = (cfg.step_fraction * bd).min(1.0);

        for (v, d) in x.iter_mut().zip(&dir.dx) {
            *v += a_p * d;
        }
        for (v, d) in y.iter_mut().zip(&dir.dy) {
            *v += a_d * d;
        }
        for (v, d) in s.iter_mut().zip(&dir.ds) {
            *v += a_d * d;
        }
        iterations = iter + 1;
    }

    Ok(finish(p, &int, status, x, y, s, iterations, iterates))
}

/// Construct a solution object for an infeasible presolve outcome.
fn infeasible_solution(p: &ConeProgram, status: Status) -> Solution {
    Solution {
        status,
        x: vec![0.0; p.num_vars()],
        y: vec![0.0; p.num_rows()],
        s: vec![0.0; p.num_vars()],
        primal_objective: 0.0,
        dual_objective: 0.0,
        relative_gap: f64::INFINITY,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        iterations: 0,
        iterates: Vec::new(),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    p: &ConeProgram,
    int: &Internal,
    status: Status,
    x_int: Vec<f64>,
    y_int: Vec<f64>,
    s_int: Vec<f64>,
    iterations: usize,
    iterates: Vec<IterateRecord>,
) -> Solution {
    let n_user = p.num_vars();
    let mut x = x_int[..n_user].to_vec();
    let mut s = s_int[..n_user].to_vec();
    for &(u_off, v_off, len) in &int.free_pairs {
        for k in 0..len {
            x[u_off + k] = x_int[u_off + k] - x_int[v_off + k];
        }
    }
    let mut y = vec![0.0; p.num_rows()];
    for (row, &orig) in int.kept_rows.iter().enumerate() {
        y[orig] = y_int[row];
    }
    // free-block dual slack is the raw residual c − Aᵀy
    let aty = p.apply_at(&y);
    for &(u_off, _, len) in &int.free_pairs {
        for k in 0..len {
            s[u_off + k] = p.objective[u_off + k] - aty[u_off + k];
        }
    }

    let p_obj = dot(&p.objective, &x);
    let d_obj = dot(&p.rhs, &y);
    let ax = p.apply_a(&x);
    let rp: Vec<f64> = p.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let rd: Vec<f64> = p
        .objective
        .iter()
        .zip(&aty)
        .zip(&s)
        .map(|((c, a), sv)| c - a - sv)
        .collect();
    let primal_residual = norm2(&rp) / norm2(&p.rhs).max(1.0);
    let dual_residual = norm2(&rd) / norm2(&p.objective).max(1.0);
    let relative_gap = (p_obj - d_obj).abs() / p_obj.abs().max(d_obj.abs()).max(1.0);

    Solution {
        status,
        x,
        y,
        s,
        primal_objective: p_obj,
        dual_objective: d_obj,
        relative_gap,
        primal_residual,
        dual_residual,
        iterations,
        iterates,
    }
}
