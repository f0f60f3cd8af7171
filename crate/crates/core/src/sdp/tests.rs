//! Solver tests on small cone programs whose optima are known independently
//! (by hand or from the dense eigensolver), plus bookkeeping checks:
//! presolve behaviour, infeasibility detection, determinism across execution
//! strategies, certificate verification, and a per-iterate weak-duality
//! audit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::sym_eigh_raw;
use crate::par::Parallelism;

fn config() -> SolverConfig {
    SolverConfig::default()
}

/// Every recorded iterate must satisfy the weak-duality inequality
/// `p − d ≥ −(‖x‖·‖r_d‖ + ‖y‖·‖r_p‖)` up to rounding, because
/// `p − d = ⟨x, s⟩ − r_pᵀy + xᵀr_d` and `⟨x, s⟩ ≥ 0` on the cone.
fn audit_iterates(sol: &Solution) {
    assert!(!sol.iterates.is_empty(), "no iterates recorded");
    for (k, it) in sol.iterates.iter().enumerate() {
        let bound = -(it.x_norm * it.dual_residual_norm + it.y_norm * it.primal_residual_norm);
        let slack = 1e-10 * bound.abs()
            + 1e-12
                * it.primal_objective
                    .abs()
                    .max(it.dual_objective.abs())
                    .max(1.0);
        assert!(
            it.primal_objective - it.dual_objective >= bound - slack,
            "weak duality violated at iterate {k}: p−d = {:.3e}, bound = {:.3e}",
            it.primal_objective - it.dual_objective,
            bound
        );
        assert!(it.mu >= 0.0, "negative complementarity at iterate {k}");
    }
}

fn assert_optimal(sol: &Solution, value: f64, tol: f64) {
    assert_eq!(sol.status, Status::Optimal, "status: {:?}", sol.status);
    assert!(
        (sol.primal_objective - value).abs() <= tol,
        "primal objective {} != {value}",
        sol.primal_objective
    );
    assert!(
        (sol.dual_objective - value).abs() <= tol,
        "dual objective {} != {value}",
        sol.dual_objective
    );
}

/// min x  s.t.  x − u = 3,  x, u ≥ 0  →  x = 3.
fn simple_lp() -> ConeProgram {
    ConeProgram {
        objective: vec![1.0, 0.0],
        constraint_matrix: vec![1.0, -1.0],
        rhs: vec![3.0],
        blocks: vec![Block::NonNeg(1), Block::NonNeg(1)],
    }
}

#[test]
fn lp_known_optimum() {
    let p = simple_lp();
    let sol = solve(&p, &config()).unwrap();
    assert_optimal(&sol, 3.0, 1e-7);
    assert!((sol.x[0] - 3.0).abs() <= 1e-6);
    assert!(sol.x[1].abs() <= 1e-6);
    audit_iterates(&sol);
}

/// min t  s.t.  t·I − P = C,  P ⪰ 0,  t free  →  t = λ_max(C).
///
/// The dual multiplier is a density matrix and the dual optimum is the same
/// largest eigenvalue, so this exercises the free block, a PSD block, and a
/// degenerate (rank-deficient) primal optimum at once.
fn lambda_max_program() -> ConeProgram {
    // C = [[0, 1], [1, 0]], svec C = [0, √2, 0], svec I = [1, 0, 1]
    let svec_c = vec![0.0, std::f64::consts::SQRT_2, 0.0];
    let svec_i = [1.0, 0.0, 1.0];
    let mut a = Vec::new();
    for r in 0..3 {
        let mut row = vec![svec_i[r]];
        for k in 0..3 {
            row.push(if k == r { -1.0 } else { 0.0 });
        }
        a.extend_from_slice(&row);
    }
    ConeProgram {
        objective: vec![1.0, 0.0, 0.0, 0.0],
        constraint_matrix: a,
        rhs: svec_c,
        blocks: vec![Block::Free(1), Block::Psd(2)],
    }
}

#[test]
fn lambda_max_with_free_variable() {
    let p = lambda_max_program();
    let sol = solve(&p, &config()).unwrap();
    assert_optimal(&sol, 1.0, 1e-6);
    assert!((sol.x[0] - 1.0).abs() <= 1e-6, "t = {}", sol.x[0]);
    // free dual slack must vanish
    assert!(sol.s[0].abs() <= 1e-6, "free slack = {}", sol.s[0]);
    audit_iterates(&sol);
    let report = verify_certificate(&p, &sol, 1e-6);
    assert!(
        report.pass,
        "certificate failed: {:?}",
        report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
    );
}

/// min ⟨C, X⟩  s.t.  Tr X = 1,  X ⪰ 0  →  λ_min(C).
fn trace_one_program(side: usize, seed: u64) -> (ConeProgram, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![0.0; side * side];
    for i in 0..side {
        for j in 0..=i {
            let v = rng.gen_range(-1.0..1.0);
            c[i * side + j] = v;
            c[j * side + i] = v;
        }
    }
    let (evals, _) = sym_eigh_raw(side, &c);
    let eye: Vec<f64> = (0..side * side)
        .map(|k| if k % (side + 1) == 0 { 1.0 } else { 0.0 })
        .collect();
    let p = ConeProgram {
        objective: svec(side, &c),
        constraint_matrix: svec(side, &eye),
        rhs: vec![1.0],
        blocks: vec![Block::Psd(side)],
    };
    (p, evals[0])
}

#[test]
fn minimum_eigenvalue_matches_eigensolver() {
    for (side, seed) in [(3usize, 11u64), (4, 12), (5, 13), (6, 14)] {
        let (p, lmin) = trace_one_program(side, seed);
        let sol = solve(&p, &config()).unwrap();
        assert_optimal(&sol, lmin, 1e-6);
        audit_iterates(&sol);
        let report = verify_certificate(&p, &sol, 1e-6);
        assert!(report.pass, "certificate failed for side {side}");
    }
}

#[test]
fn deterministic_across_parallelism() {
    let (p, _) = trace_one_program(6, 21);
    let mut seq = config();
    seq.parallelism = Parallelism::Sequential;
    let mut par = config();
    par.parallelism = Parallelism::Rayon;
    let a = solve(&p, &seq).unwrap();
    let b = solve(&p, &par).unwrap();
    assert_eq!(a.x, b.x, "primal iterates diverged across strategies");
    assert_eq!(a.y, b.y);
    assert_eq!(a.s, b.s);
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn presolve_drops_redundant_rows() {
    let (base, lmin) = trace_one_program(4, 31);
    let n = base.num_vars();
    let mut a = base.constraint_matrix.clone();
    let mut b = base.rhs.clone();
    // duplicate the trace row and append a scaled copy; both are consistent
    a.extend_from_slice(&base.constraint_matrix);
    b.push(1.0);
    a.extend(base.constraint_matrix.iter().map(|v| 2.0 * v));
    b.push(2.0);
    let p = ConeProgram {
        objective: base.objective.clone(),
        constraint_matrix: a,
        rhs: b,
        blocks: base.blocks.clone(),
    };
    assert_eq!(p.num_rows(), 3);
    assert_eq!(p.num_vars(), n);
    let sol = solve(&p, &config()).unwrap();
    assert_optimal(&sol, lmin, 1e-6);
    // dropped rows keep a zero multiplier
    assert_eq!(sol.y.len(), 3);
    assert_eq!(sol.y[1], 0.0);
    assert_eq!(sol.y[2], 0.0);
}

#[test]
fn presolve_reports_inconsistent_rows() {
    let (base, _) = trace_one_program(3, 41);
    let mut a = base.constraint_matrix.clone();
    let mut b = base.rhs.clone();
    // Tr X = 1 together with 2·Tr X = 3 is unsatisfiable
    a.extend(base.constraint_matrix.iter().map(|v| 2.0 * v));
    b.push(3.0);
    let p = ConeProgram {
        objective: base.objective.clone(),
        constraint_matrix: a,
        rhs: b,
        blocks: base.blocks.clone(),
    };
    let sol = solve(&p, &config()).unwrap();
    assert_eq!(sol.status, Status::PrimalInfeasible);
    assert_eq!(sol.iterations, 0);
}

#[test]
fn iteration_detects_primal_infeasibility() {
    // x − u = 3 and x + v = 2 with x, u, v ≥ 0 force x ≥ 3 and x ≤ 2.
    let p = ConeProgram {
        objective: vec![1.0, 0.0, 0.0],
        constraint_matrix: vec![1.0, -1.0, 0.0, 1.0, 0.0, 1.0],
        rhs: vec![3.0, 2.0],
        blocks: vec![Block::NonNeg(3)],
    };
    let sol = solve(&p, &config()).unwrap();
    assert_eq!(sol.status, Status::PrimalInfeasible, "got {:?}", sol.status);
}

#[test]
fn zero_objective_feasibility_problem() {
    let (mut p, _) = trace_one_program(3, 51);
    p.objective.iter_mut().for_each(|v| *v = 0.0);
    let sol = solve(&p, &config()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!(sol.primal_objective.abs() <= 1e-7);
    let report = verify_certificate(&p, &sol, 1e-6);
    assert!(report.pass);
}

#[test]
fn certificate_rejects_tampered_solutions() {
    let p = lambda_max_program();
    let sol = solve(&p, &config()).unwrap();
    assert!(verify_certificate(&p, &sol, 1e-6).pass);

    // perturbing a primal coordinate breaks feasibility
    let mut bad = sol.clone();
    bad.x[1] += 0.5;
    let report = verify_certificate(&p, &bad, 1e-6);
    assert!(!report.pass);
    assert!(report
        .checks
        .iter()
        .any(|c| c.name == "primal_feasibility" && !c.pass));

    // an absurdly tight tolerance must flag the (finite-precision) gap
    let report = verify_certificate(&p, &sol, 1e-16);
    assert!(!report.pass);

    // a non-optimal status fails regardless of the numbers
    let mut stale = sol.clone();
    stale.status = Status::MaxIterations;
    let report = verify_certificate(&p, &stale, 1e-6);
    assert!(!report.pass);
    assert!(report
        .checks
        .iter()
        .any(|c| c.name == "status_optimal" && !c.pass));
}

#[test]
fn validation_rejects_malformed_programs() {
    let mut p = simple_lp();
    p.rhs.push(1.0); // rhs length no longer matches the matrix
    assert!(solve(&p, &config()).is_err());

    let p = ConeProgram {
        objective: vec![1.0],
        constraint_matrix: vec![1.0],
        rhs: vec![1.0],
        blocks: vec![Block::NonNeg(2)], // block lengths exceed objective
    };
    assert!(solve(&p, &config()).is_err());

    let mut cfg = config();
    cfg.gap_tol = -1.0;
    assert!(solve(&simple_lp(), &cfg).is_err());
}
