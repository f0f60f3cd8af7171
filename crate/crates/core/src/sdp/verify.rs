//! Independent certificate checking.
//!
//! A reported optimum is only trusted after recomputing, from the original
//! program data, that the primal point is feasible, the dual point is
//! feasible, both lie in their cones, and the objective gap closes. Every
//! check is normalized so a single relative tolerance applies to all of them;
//! each records a violation magnitude (`value`), so `pass ⇔ value ≤ threshold`.

use crate::linalg::sym_eigh_raw;

use super::{smat, svec_len, Block, ConeProgram, Solution, Status};

/// One normalized feasibility/optimality check.
#[derive(Debug, Clone)]
pub struct CertificateCheck {
    /// Stable identifier, e.g. `primal_feasibility` or `primal_cone_block_2`.
    pub name: String,
    /// Whether `value ≤ threshold`.
    pub pass: bool,
    /// Normalized violation magnitude (0 when exactly satisfied).
    pub value: f64,
    /// Tolerance the violation is compared against.
    pub threshold: f64,
}

/// Outcome of [`verify_certificate`] over all checks.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// True when every individual check passed.
    pub pass: bool,
    /// Individual checks in a fixed, deterministic order.
    pub checks: Vec<CertificateCheck>,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn check(name: String, value: f64, threshold: f64) -> CertificateCheck {
    CertificateCheck {
        pass: value <= threshold,
        name,
        value,
        threshold,
    }
}

/// Smallest eigenvalue of a packed symmetric block, with a scale for
/// normalization (largest absolute eigenvalue, floored at 1).
fn block_lambda_min(side: usize, packed: &[f64]) -> (f64, f64) {
    let mat = smat(side, packed);
    let (evals, _) = sym_eigh_raw(side, &mat);
    let lmin = evals[0];
    let scale = evals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    (lmin, scale)
}

/// Re-derive feasibility, cone membership, and the duality gap of a reported
/// solution directly from the program data.
///
/// All residuals are relative; `tol` is applied uniformly. A non-`Optimal`
/// status fails the report regardless of the numerical checks.
pub fn verify_certificate(
    program: &ConeProgram,
    solution: &Solution,
    tol: f64,
) -> CertificateReport {
    let mut checks = Vec::new();

    let status_violation = if solution.status == Status::Optimal {
        0.0
    } else {
        1.0
    };
    checks.push(check("status_optimal".into(), status_violation, 0.5));

    // primal feasibility: ‖b − A x‖ / max(1, ‖b‖)
    let ax = program.apply_a(&solution.x);
    let rp: Vec<f64> = program.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    checks.push(check(
        "primal_feasibility".into(),
        norm2(&rp) / norm2(&program.rhs).max(1.0),
        tol,
    ));

    // dual feasibility: ‖c − Aᵀy − s‖ / max(1, ‖c‖)
    let aty = program.apply_at(&solution.y);
    let rd: Vec<f64> = program
        .objective
        .iter()
        .zip(&aty)
        .zip(&solution.s)
        .map(|((c, a), s)| c - a - s)
        .collect();
    checks.push(check(
        "dual_feasibility".into(),
        norm2(&rd) / norm2(&program.objective).max(1.0),
        tol,
    ));

    // duality gap
    let p_obj: f64 = program
        .objective
        .iter()
        .zip(&solution.x)
        .map(|(c, x)| c * x)
        .sum();
    let d_obj: f64 = program
        .rhs
        .iter()
        .zip(&solution.y)
        .map(|(b, y)| b * y)
        .sum();
    checks.push(check(
        "duality_gap".into(),
        (p_obj - d_obj).abs() / p_obj.abs().max(d_obj.abs()).max(1.0),
        tol,
    ));

    // cone membership per block
    let c_scale = norm_inf(&program.objective).max(1.0);
    let mut offset = 0usize;
    for (k, blk) in program.blocks.iter().enumerate() {
        let len = blk.len();
        let x_blk = &solution.x[offset..offset + len];
        let s_blk = &solution.s[offset..offset + len];
        match *blk {
            Block::Psd(side) => {
                debug_assert_eq!(len, svec_len(side));
                let (xmin, xscale) = block_lambda_min(side, x_blk);
                checks.push(check(
                    format!("primal_cone_block_{k}"),
                    (-xmin).max(0.0) / xscale,
                    tol,
                ));
                let (smin, sscale) = block_lambda_min(side, s_blk);
                checks.push(check(
                    format!("dual_cone_block_{k}"),
                    (-smin).max(0.0) / sscale,
                    tol,
                ));
            }
            Block::NonNeg(_) => {
                let xv = x_blk.iter().fold(0.0f64, |m, v| m.max(-v));
                checks.push(check(
                    format!("primal_cone_block_{k}"),
                    xv / norm_inf(x_blk).max(1.0),
                    tol,
                ));
                let sv = s_blk.iter().fold(0.0f64, |m, v| m.max(-v));
                checks.push(check(
                    format!("dual_cone_block_{k}"),
                    sv / norm_inf(s_blk).max(1.0),
                    tol,
                ));
            }
            Block::Free(_) => {
                // free primal coordinates are unconstrained; the dual slack
                // must vanish
                checks.push(check(
                    format!("free_dual_slack_block_{k}"),
                    norm_inf(s_blk) / c_scale,
                    tol,
                ));
            }
        }
        offset += len;
    }

    CertificateReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}
