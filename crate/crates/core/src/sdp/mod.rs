//! Standard-form cone programming: model, interior-point solver, and
//! certificate verification.
//!
//! A [`ConeProgram`] is the equality-constrained primal
//!
//! ```text
//! minimize    cᵀx
//! subject to  A x = b,   x ∈ K
//! ```
//!
//! where `K` is an ordered product of PSD, nonnegative-orthant, and free
//! blocks. PSD blocks are stored in packed symmetric vectorization (`svec`,
//! length n(n+1)/2 with off-diagonal √2 scaling — declared here once and
//! used everywhere). The associated dual is
//!
//! ```text
//! maximize    bᵀy
//! subject to  Aᵀy + s = c,   s ∈ K*
//! ```
//!
//! and the solver returns `(x, y, s)` together with residuals and the
//! duality gap; [`verify_certificate`] re-derives all optimality checks from
//! scratch so results never rest on the solver's own bookkeeping.
//!
//! Complex Hermitian data enters via the [`embed`] module's realification.

mod embed;
mod presolve;
mod solver;
mod verify;

pub use embed::{
    extract_hermitian, herm_basis, realify, smat, svec, svec_len, svec_of_herm, SymMatrix,
};
pub use verify::{verify_certificate, CertificateCheck, CertificateReport};

use crate::error::{Error, Result};
use crate::par::Parallelism;

/// One cone block of a [`ConeProgram`] variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    /// PSD cone over real symmetric `n×n` matrices, packed as `svec`
    /// (length `n(n+1)/2`).
    Psd(usize),
    /// Nonnegative orthant of the given length.
    NonNeg(usize),
    /// Unconstrained variables of the given length (dual cone `{0}`).
    Free(usize),
}

impl Block {
    /// Number of scalar variables the block occupies.
    pub fn len(&self) -> usize {
        match *self {
            Block::Psd(n) => svec_len(n),
            Block::NonNeg(k) | Block::Free(k) => k,
        }
    }

    /// True for zero-length blocks.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Standard-form cone program `min cᵀx  s.t.  Ax = b, x ∈ K`.
#[derive(Debug, Clone)]
pub struct ConeProgram {
    /// Objective vector `c`.
    pub objective: Vec<f64>,
    /// Dense row-major constraint matrix `A` (`rows × len(c)`).
    pub constraint_matrix: Vec<f64>,
    /// Right-hand side `b`.
    pub rhs: Vec<f64>,
    /// Ordered cone blocks partitioning the variable vector.
    pub blocks: Vec<Block>,
}

impl ConeProgram {
    /// Number of scalar variables.
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Number of equality constraints.
    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    /// Validate internal dimension consistency.
    pub fn validate(&self) -> Result<()> {
        let block_len: usize = self.blocks.iter().map(Block::len).sum();
        if block_len != self.objective.len() {
            return Err(Error::Dimension(format!(
                "blocks cover {} variables but objective has {}",
                block_len,
                self.objective.len()
            )));
        }
        if self.constraint_matrix.len() != self.num_rows() * self.num_vars() {
            return Err(Error::Dimension(format!(
                "constraint matrix has {} entries, expected {}×{}",
                self.constraint_matrix.len(),
                self.num_rows(),
                self.num_vars()
            )));
        }
        let finite = self
            .objective
            .iter()
            .chain(&self.constraint_matrix)
            .chain(&self.rhs)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Validation(
                "cone program contains non-finite data".into(),
            ));
        }
        Ok(())
    }

    /// `A x` for a full-length variable vector.
    pub(crate) fn apply_a(&self, x: &[f64]) -> Vec<f64> {
        let n = self.num_vars();
        (0..self.num_rows())
            .map(|i| {
                self.constraint_matrix[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .map(|(a, v)| a * v)
                    .sum()
            })
            .collect()
    }

    /// `Aᵀ y` for a multiplier vector.
    pub(crate) fn apply_at(&self, y: &[f64]) -> Vec<f64> {
        let n = self.num_vars();
        let mut out = vec![0.0; n];
        for (i, yi) in y.iter().enumerate() {
            if *yi == 0.0 {
                continue;
            }
            for (o, a) in out
                .iter_mut()
                .zip(&self.constraint_matrix[i * n..(i + 1) * n])
            {
                *o += a * yi;
            }
        }
        out
    }
}

/// Solver termination status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// All tolerances met; `x`, `(y, s)` form an optimal pair.
    Optimal,
    /// Divergence heuristics indicate the equalities admit no cone point.
    PrimalInfeasible,
    /// Divergence heuristics indicate an unbounded primal / infeasible dual.
    DualInfeasible,
    /// Iteration or stagnation limit reached before the tolerances.
    MaxIterations,
}

impl Status {
    /// Short stable string used in JSON output.
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::PrimalInfeasible => "primal_infeasible",
            Status::DualInfeasible => "dual_infeasible",
            Status::MaxIterations => "max_iterations",
        }
    }
}

/// Per-iteration record kept for auditability of the solve path.
#[derive(Debug, Clone, Copy)]
pub struct IterateRecord {
    /// Primal objective `cᵀx`.
    pub primal_objective: f64,
    /// Dual objective `bᵀy`.
    pub dual_objective: f64,
    /// `‖b − Ax‖₂`.
    pub primal_residual_norm: f64,
    /// `‖c − Aᵀy − s‖₂`.
    pub dual_residual_norm: f64,
    /// `‖x‖₂`.
    pub x_norm: f64,
    /// `‖y‖₂`.
    pub y_norm: f64,
    /// Normalized complementarity `⟨x, s⟩/ν`.
    pub mu: f64,
}

/// Result of a cone-program solve.
#[derive(Debug, Clone)]
pub struct Solution {
    /// Termination status.
    pub status: Status,
    /// Primal variable (original block layout).
    pub x: Vec<f64>,
    /// Equality multipliers, one per original row (zero on rows the
    /// presolve dropped as redundant).
    pub y: Vec<f64>,
    /// Dual slack in the original block layout; on free blocks it is the
    /// raw residual `c − Aᵀy`, which must vanish at optimality.
    pub s: Vec<f64>,
    /// `cᵀx`.
    pub primal_objective: f64,
    /// `bᵀy`.
    pub dual_objective: f64,
    /// `|cᵀx − bᵀy| / max(1, |cᵀx|, |bᵀy|)`.
    pub relative_gap: f64,
    /// `‖b − Ax‖₂ / max(1, ‖b‖₂)`.
    pub primal_residual: f64,
    /// `‖c − Aᵀy − s‖₂ / max(1, ‖c‖₂)`.
    pub dual_residual: f64,
    /// Iterations consumed.
    pub iterations: usize,
    /// Full iterate log (used by the weak-duality audit).
    pub iterates: Vec<IterateRecord>,
}

/// Interior-point solver configuration.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Relative duality-gap tolerance (default `1e-8`).
    pub gap_tol: f64,
    /// Relative feasibility tolerance (default `1e-8`).
    pub feas_tol: f64,
    /// Iteration cap (default 200).
    pub max_iterations: usize,
    /// Fraction of the distance to the cone boundary taken per step,
    /// in `(0, 1)` (default 0.98).
    pub step_fraction: f64,
    /// Work scheduling for the solver's data-parallel kernels; does not
    /// affect results.
    pub parallelism: Parallelism,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iterations: 200,
            step_fraction: 0.98,
            parallelism: Parallelism::default(),
        }
    }
}

impl SolverConfig {
    /// Validate tolerance/step ranges.
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_tol > 0.0) || !(self.feas_tol > 0.0) {
            return Err(Error::Validation(
                "solver tolerances must be positive".into(),
            ));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(Error::Validation(
                "step fraction must lie strictly inside (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Solve a cone program with the primal-dual interior-point method
/// (Nesterov–Todd scaling, Mehrotra predictor-corrector, dense
/// normal-equation solves).
///
/// Redundant equality rows are removed by a presolve pass; multipliers for
/// dropped rows are reported as zero. Free blocks are handled by an internal
/// nonnegative splitting.
pub fn solve(program: &ConeProgram, config: &SolverConfig) -> Result<Solution> {
    program.validate()?;
    config.validate()?;
    solver::solve_impl(program, config)
}

#[cfg(test)]
mod tests;
