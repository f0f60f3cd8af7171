//! Measures of how far a Hermiticity-preserving map is from a physical
//! quantum channel.
//!
//! The core quantities are the diamond norm, the base norm with respect to
//! completely positive trace-non-increasing (CPTNI) maps, and three
//! robustness measures: the symmetric robustness `R` (least `λ` such that
//! `(Φ + λΛ)/(1+λ)` is CPTNI for some CPTNI `Λ`), the one-sided robustness
//! `R'` (least `λ` with `J_Φ ⪯ (1+λ) J_Λ`), and the complete-positivity
//! restoration `R''` (least `λ` with `Φ + λΛ` completely positive). Each is
//! computed by solving the defining conic program *and* its Lagrangian dual
//! as two independent semidefinite programs; the two optimal values are
//! cross-checked and the decoded witnesses are verified feasible before a
//! result is returned.
//!
//! Alongside the variational measures, this module provides closed-form
//! structural approximation costs ([`spa`], [`spa_prime`]), quasiprobability
//! simulation of unphysical maps ([`build_simulation`]), discrimination-game
//! advantages ([`game_advantage`], [`game_from_witness`]), spectral and
//! probe-based bounds ([`bounds_trace_norm`], [`bounds_upper`],
//! [`bounds_lower`], [`approx_inverse_bounds`]), and an independent
//! grid-search oracle for qubit-input diamond norms
//! ([`diamond_norm_bloch_oracle`]).

mod bounds;
mod games;
mod oracle;
mod programs;
mod simulate;

pub use bounds::{
    approx_inverse_bounds, bounds_lower, bounds_trace_norm, bounds_upper, Bound, BoundKind,
    BoundsReport,
};
pub use games::{best_cptp_payoff, game_advantage, game_from_witness, payoff, Game};
pub use oracle::diamond_norm_bloch_oracle;
pub use simulate::{build_simulation, verify_simulation, SimulationPlan};

use crate::channels::LinearMapRep;
use crate::error::{Error, Result};
use crate::linalg::{eigh, hs_inner, partial_trace, HermitianOperator, Subsystem};
use crate::par::Parallelism;
use crate::sdp::{solve, Solution, SolverConfig, Status};
use programs::CompiledProgram;

/// Feasibility and cross-check tolerance applied to every certificate
/// before a measure value is reported.
pub const WITNESS_TOL: f64 = 1e-7;

/// Numerical options shared by all measure evaluations.
#[derive(Debug, Clone, Copy)]
pub struct MeasureOptions {
    /// Relative duality-gap tolerance for each individual solve.
    pub gap_tol: f64,
    /// Relative primal/dual feasibility tolerance for each individual solve.
    pub feas_tol: f64,
    /// Iteration cap per solve.
    pub max_iterations: usize,
    /// Parallelism used by the solver and the oracle.
    pub parallelism: Parallelism,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        let solver = SolverConfig::default();
        MeasureOptions {
            gap_tol: solver.gap_tol,
            feas_tol: solver.feas_tol,
            max_iterations: solver.max_iterations,
            parallelism: solver.parallelism,
        }
    }
}

impl MeasureOptions {
    pub(crate) fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            gap_tol: self.gap_tol,
            feas_tol: self.feas_tol,
            max_iterations: self.max_iterations,
            parallelism: self.parallelism,
            ..SolverConfig::default()
        }
    }
}

/// A named operator or scalar attached to a measure certificate.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Hermitian matrix witness.
    Operator(HermitianOperator),
    /// Scalar witness (a robustness weight, mixing coefficient, ...).
    Scalar(f64),
}

/// Ordered collection of named certificate components.
#[derive(Debug, Clone, Default)]
pub struct WitnessSet {
    items: Vec<(String, Witness)>,
}

impl WitnessSet {
    pub(crate) fn push_operator(&mut self, name: &str, op: HermitianOperator) {
        self.items.push((name.to_owned(), Witness::Operator(op)));
    }

    pub(crate) fn push_scalar(&mut self, name: &str, value: f64) {
        self.items.push((name.to_owned(), Witness::Scalar(value)));
    }

    /// Look up an operator witness by name.
    pub fn operator(&self, name: &str) -> Option<&HermitianOperator> {
        self.items.iter().find_map(|(n, w)| match w {
            Witness::Operator(op) if n == name => Some(op),
            _ => None,
        })
    }

    /// Look up a scalar witness by name.
    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.items.iter().find_map(|(n, w)| match w {
            Witness::Scalar(v) if n == name => Some(*v),
            _ => None,
        })
    }

    /// Iterate over the named witnesses in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Witness)> {
        self.items.iter().map(|(n, w)| (n.as_str(), w))
    }

    /// Number of stored witnesses.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// True when no witnesses are stored.
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Certified outcome of a measure evaluation.
///
/// `value` is the optimal value of the defining minimisation; `gap` is the
/// absolute difference against the independently solved dual program. Both
/// witness sets have been feasibility-checked at [`WITNESS_TOL`].
#[derive(Debug, Clone)]
pub struct MeasureResult {
    /// Canonical measure name (`"diamond_norm"`, `"R"`, ...).
    pub measure: String,
    /// Certified optimal value.
    pub value: f64,
    /// Decoded variables of the defining minimisation.
    pub primal_witness: WitnessSet,
    /// Decoded variables of the dual program, in witness form.
    pub dual_witness: WitnessSet,
    /// Absolute primal/dual value mismatch.
    pub gap: f64,
    /// Solver status (always `Optimal` for a returned result).
    pub status: Status,
}

fn solve_one(prog: &CompiledProgram, what: &str, opts: &MeasureOptions) -> Result<Solution> {
    let sol = solve(&prog.program, &opts.solver_config())?;
    if sol.status != Status::Optimal {
        return Err(Error::Solver(format!(
            "{what}: solver stopped with status {}",
            sol.status.as_str()
        )));
    }
    Ok(sol)
}

fn cross_check_gap(measure: &str, primal_value: f64, dual_value: f64) -> Result<f64> {
    let gap = (primal_value - dual_value).abs();
    if gap > WITNESS_TOL * 1.0_f64.max(primal_value.abs()) {
        return Err(Error::CrossCheck(format!(
            "{measure}: primal value {primal_value:.12e} and dual value {dual_value:.12e} \
             differ by {gap:.3e}"
        )));
    }
    Ok(gap)
}

fn op_scale(h: &HermitianOperator) -> f64 {
    1.0_f64.max(h.matrix().max_abs())
}

fn ensure_psd(measure: &str, what: &str, h: &HermitianOperator) -> Result<()> {
    let lambda_min = eigh(h).lambda_min();
    if lambda_min < -WITNESS_TOL * op_scale(h) {
        return Err(Error::CrossCheck(format!(
            "{measure}: witness {what} has negative eigenvalue {lambda_min:.3e}"
        )));
    }
    Ok(())
}

fn ensure_close(
    measure: &str,
    what: &str,
    got: &HermitianOperator,
    want: &HermitianOperator,
) -> Result<()> {
    let dev = got.matrix().max_abs_diff(want.matrix());
    if dev > WITNESS_TOL * op_scale(want) {
        return Err(Error::CrossCheck(format!(
            "{measure}: witness equation {what} violated by {dev:.3e}"
        )));
    }
    Ok(())
}

fn ensure_value(measure: &str, what: &str, got: f64, want: f64) -> Result<()> {
    let dev = (got - want).abs();
    if dev > WITNESS_TOL * 1.0_f64.max(want.abs()) {
        return Err(Error::CrossCheck(format!(
            "{measure}: {what} is {got:.12e}, expected {want:.12e}"
        )));
    }
    Ok(())
}

/// Shift a trace-`≤ target` PSD operator by a multiple of the identity so
/// its trace equals `target` exactly, erroring if the trace already exceeds
/// the target beyond tolerance.
fn pad_trace(
    measure: &str,
    what: &str,
    op: &HermitianOperator,
    target: f64,
) -> Result<HermitianOperator> {
    let deficit = target - op.trace();
    if deficit < -WITNESS_TOL * 1.0_f64.max(target.abs()) {
        return Err(Error::CrossCheck(format!(
            "{measure}: witness {what} has trace {:.12e} exceeding {target}",
            op.trace()
        )));
    }
    let dim = op.dim() as f64;
    op.add_scaled(&HermitianOperator::identity(op.dim()), deficit / dim)
}

fn kron_id(op: &HermitianOperator, d_b: usize) -> HermitianOperator {
    op.kron(&HermitianOperator::identity(d_b))
}

fn marginal(j: &HermitianOperator, d_a: usize, d_b: usize) -> Result<HermitianOperator> {
    partial_trace(j, d_a, d_b, Subsystem::A)
}

/// Diamond norm of a Hermiticity-preserving map.
///
/// Computed as `min μ` over decompositions `J_Φ = M₊ − M₋` with
/// `Tr_B (M₊ + M₋) ⪯ μ 1`, cross-checked against the dual maximisation of
/// `⟨J_Φ, W⟩` over `−ρ ⊗ 1 ⪯ W ⪯ ρ ⊗ 1` with `ρ` a state.
pub fn diamond_norm(m: &LinearMapRep, opts: &MeasureOptions) -> Result<MeasureResult> {
    let name = "diamond_norm";
    let j = m.choi();
    let (d_a, d_b) = (m.d_in(), m.d_out());
    let tr_b_j = marginal(j, d_a, d_b)?;

    let primal = programs::diamond_primal(j, d_a, d_b);
    let dual = programs::diamond_dual(j, &tr_b_j, d_a, d_b);
    let sol_p = solve_one(&primal.prog, name, opts)?;
    let sol_d = solve_one(&dual.prog, name, opts)?;
    let value = primal.prog.value(&sol_p);
    let dual_value = dual.prog.value(&sol_d);
    let gap = cross_check_gap(name, value, dual_value)?;

    let m_plus = primal.prog.matrix_of(&sol_p, primal.m_plus);
    let m_minus = m_plus.sub(j)?;
    let slack = primal.prog.matrix_of(&sol_p, primal.slack);
    let mu = primal.prog.scalar_of(&sol_p, primal.mu);
    ensure_psd(name, "M_plus", &m_plus)?;
    ensure_psd(name, "M_minus", &m_minus)?;
    ensure_psd(name, "S", &slack)?;
    let lhs = marginal(&m_plus.add(&m_minus)?, d_a, d_b)?.add(&slack)?;
    let rhs = HermitianOperator::identity(d_a).scale(mu);
    ensure_close(name, "Tr_B(M_plus + M_minus) + S = mu·1", &lhs, &rhs)?;
    ensure_value(name, "primal objective", mu, value)?;

    let q = dual.prog.matrix_of(&sol_d, dual.q);
    let rho_raw = dual.prog.matrix_of(&sol_d, dual.rho);
    let w = q.sub(&kron_id(&rho_raw, d_b))?;
    ensure_value(name, "dual witness value", hs_inner(j, &w)?, dual_value)?;
    let rho = pad_trace(name, "rho", &rho_raw, 1.0)?;
    ensure_psd(name, "rho", &rho)?;
    let bound = kron_id(&rho, d_b);
    ensure_psd(name, "rho⊗1 - W", &bound.sub(&w)?)?;
    ensure_psd(name, "W + rho⊗1", &bound.add(&w)?)?;

    let mut primal_witness = WitnessSet::default();
    primal_witness.push_operator("M_plus", m_plus);
    primal_witness.push_operator("M_minus", m_minus);
    primal_witness.push_operator("S", slack);
    primal_witness.push_scalar("mu", mu);
    let mut dual_witness = WitnessSet::default();
    dual_witness.push_operator("W", w);
    dual_witness.push_operator("rho", rho);
    Ok(MeasureResult {
        measure: name.to_owned(),
        value,
        primal_witness,
        dual_witness,
        gap,
        status: Status::Optimal,
    })
}

/// Base norm with respect to CPTNI maps: the least `λ₊ + λ₋` over
/// decompositions `Φ = λ₊ Λ₊ − λ₋ Λ₋` with `Λ±` completely positive and
/// trace-non-increasing.
pub fn base_norm_cptni(m: &LinearMapRep, opts: &MeasureOptions) -> Result<MeasureResult> {
    let name = "base_norm_cptni";
    let j = m.choi();
    let (d_a, d_b) = (m.d_in(), m.d_out());
    let tr_b_j = marginal(j, d_a, d_b)?;

    let primal = programs::base_primal(j, d_a, d_b);
    let dual = programs::base_dual(j, &tr_b_j, d_a, d_b);
    let sol_p = solve_one(&primal.prog, name, opts)?;
    let sol_d = solve_one(&dual.prog, name, opts)?;
    let value = primal.prog.value(&sol_p);
    let dual_value = dual.prog.value(&sol_d);
    let gap = cross_check_gap(name, value, dual_value)?;

    let m_plus = primal.prog.matrix_of(&sol_p, primal.m_plus);
    let m_minus = m_plus.sub(j)?;
    let s_plus = primal.prog.matrix_of(&sol_p, primal.s_plus);
    let s_minus = primal.prog.matrix_of(&sol_p, primal.s_minus);
    let lambda_plus = primal.prog.scalar_of(&sol_p, primal.lambda_plus);
    let lambda_minus = primal.prog.scalar_of(&sol_p, primal.lambda_minus);
    ensure_psd(name, "M_plus", &m_plus)?;
    ensure_psd(name, "M_minus", &m_minus)?;
    ensure_psd(name, "S_plus", &s_plus)?;
    ensure_psd(name, "S_minus", &s_minus)?;
    ensure_close(
        name,
        "Tr_B M_plus + S_plus = lambda_plus·1",
        &marginal(&m_plus, d_a, d_b)?.add(&s_plus)?,
        &HermitianOperator::identity(d_a).scale(lambda_plus),
    )?;
    ensure_close(
        name,
        "Tr_B M_minus + S_minus = lambda_minus·1",
        &marginal(&m_minus, d_a, d_b)?.add(&s_minus)?,
        &HermitianOperator::identity(d_a).scale(lambda_minus),
    )?;
    ensure_value(name, "primal objective", lambda_plus + lambda_minus, value)?;

    let q = dual.prog.matrix_of(&sol_d, dual.q);
    let rho_raw = dual.prog.matrix_of(&sol_d, dual.rho);
    let sigma_raw = dual.prog.matrix_of(&sol_d, dual.sigma);
    let w = q.sub(&kron_id(&rho_raw, d_b))?;
    ensure_value(name, "dual witness value", hs_inner(j, &w)?, dual_value)?;
    let rho = pad_trace(name, "rho", &rho_raw, 1.0)?;
    let sigma = pad_trace(name, "sigma", &sigma_raw, 1.0)?;
    ensure_psd(name, "rho", &rho)?;
    ensure_psd(name, "sigma", &sigma)?;
    ensure_psd(name, "sigma⊗1 - W", &kron_id(&sigma, d_b).sub(&w)?)?;
    ensure_psd(name, "W + rho⊗1", &kron_id(&rho, d_b).add(&w)?)?;

    let mut primal_witness = WitnessSet::default();
    primal_witness.push_operator("M_plus", m_plus);
    primal_witness.push_operator("M_minus", m_minus);
    primal_witness.push_operator("S_plus", s_plus);
    primal_witness.push_operator("S_minus", s_minus);
    primal_witness.push_scalar("lambda_plus", lambda_plus);
    primal_witness.push_scalar("lambda_minus", lambda_minus);
    let mut dual_witness = WitnessSet::default();
    dual_witness.push_operator("W", w);
    dual_witness.push_operator("rho", rho);
    dual_witness.push_operator("sigma", sigma);
    Ok(MeasureResult {
        measure: name.to_owned(),
        value,
        primal_witness,
        dual_witness,
        gap,
        status: Status::Optimal,
    })
}

/// Robustness `R`: the least `λ ≥ 0` such that `(Φ + λ Λ)/(1 + λ)` is CPTNI
/// for some CPTNI map `Λ`.
pub fn robustness_r(m: &LinearMapRep, opts: &MeasureOptions) -> Result<MeasureResult> {
    let name = "R";
    let j = m.choi();
    let (d_a, d_b) = (m.d_in(), m.d_out());
    let tr_b_j = marginal(j, d_a, d_b)?;

    let primal = programs::robustness_primal(j, d_a, d_b);
    let dual = programs::robustness_dual(j, &tr_b_j, d_a, d_b);
    let sol_p = solve_one(&primal.prog, name, opts)?;
    let sol_d = solve_one(&dual.prog, name, opts)?;
    let value = primal.prog.value(&sol_p);
    let dual_value = dual.prog.value(&sol_d);
    let gap = cross_check_gap(name, value, dual_value)?;

    let m_plus = primal.prog.matrix_of(&sol_p, primal.m_plus);
    let m_minus = m_plus.sub(j)?;
    let s_plus = primal.prog.matrix_of(&sol_p, primal.s_plus);
    let s_minus = primal.prog.matrix_of(&sol_p, primal.s_minus);
    let lambda = primal.prog.scalar_of(&sol_p, primal.lambda);
    ensure_psd(name, "M_plus", &m_plus)?;
    ensure_psd(name, "M_minus", &m_minus)?;
    ensure_psd(name, "S_plus", &s_plus)?;
    ensure_psd(name, "S_minus", &s_minus)?;
    ensure_close(
        name,
        "Tr_B M_plus + S_plus = (1 + lambda)·1",
        &marginal(&m_plus, d_a, d_b)?.add(&s_plus)?,
        &HermitianOperator::identity(d_a).scale(1.0 + lambda),
    )?;
    ensure_close(
        name,
        "Tr_B M_minus + S_minus = lambda·1",
        &marginal(&m_minus, d_a, d_b)?.add(&s_minus)?,
        &HermitianOperator::identity(d_a).scale(lambda),
    )?;
    ensure_value(name, "primal objective", lambda, value)?;

    let q = dual.prog.matrix_of(&sol_d, dual.q);
    let x_raw = dual.prog.matrix_of(&sol_d, dual.x);
    let y = dual.prog.matrix_of(&sol_d, dual.y);
    let w = q.sub(&kron_id(&x_raw, d_b))?;
    ensure_value(
        name,
        "dual witness value",
        hs_inner(j, &w)? - y.trace(),
        dual_value,
    )?;
    // Absorb the trace slack into X: the witness value only involves Y, and
    // enlarging X keeps the lower bound −X⊗1 ⪯ W valid.
    let x = pad_trace(name, "X", &x_raw, 1.0 - y.trace())?;
    ensure_psd(name, "X", &x)?;
    ensure_psd(name, "Y", &y)?;
    ensure_psd(name, "Y⊗1 - W", &kron_id(&y, d_b).sub(&w)?)?;
    ensure_psd(name, "W + X⊗1", &kron_id(&x, d_b).add(&w)?)?;
    ensure_value(name, "Tr X + Tr Y", x.trace() + y.trace(), 1.0)?;

    let mut primal_witness = WitnessSet::default();
    primal_witness.push_operator("M_plus", m_plus);
    primal_witness.push_operator("M_minus", m_minus);
    primal_witness.push_operator("S_plus", s_plus);
    primal_witness.push_operator("S_minus", s_minus);
    primal_witness.push_scalar("lambda", lambda);
    let mut dual_witness = WitnessSet::default();
    dual_witness.push_operator("W", w);
    dual_witness.push_operator("X", x);
    dual_witness.push_operator("Y", y);
    Ok(MeasureResult {
        measure: name.to_owned(),
        value,
        primal_witness,
        dual_witness,
        gap,
        status: Status::Optimal,
    })
}

/// One-sided robustness `R'`: the least `λ ≥ 0` such that
/// `J_Φ ⪯ (1 + λ) J_Λ` for some CPTNI map `Λ`.
pub fn robustness_r_prime(m: &LinearMapRep, opts: &MeasureOptions) -> Result<MeasureResult> {
    let name = "Rprime";
    let j = m.choi();
    let (d_a, d_b) = (m.d_in(), m.d_out());

    let primal = programs::upper_robustness_primal(j, d_a, d_b);
    let dual = programs::upper_robustness_dual(j, d_a, d_b);
    let sol_p = solve_one(&primal.prog, name, opts)?;
    let sol_d = solve_one(&dual.prog, name, opts)?;
    let value = primal.prog.value(&sol_p);
    let dual_value = dual.prog.value(&sol_d);
    let gap = cross_check_gap(name, value, dual_value)?;

    let m_op = primal.prog.matrix_of(&sol_p, primal.m);
    let n_op = m_op.sub(j)?;
    let slack = primal.prog.matrix_of(&sol_p, primal.slack);
    let lambda = primal.prog.scalar_of(&sol_p, primal.lambda);
    ensure_psd(name, "M", &m_op)?;
    ensure_psd(name, "M - J", &n_op)?;
    ensure_psd(name, "S", &slack)?;
    ensure_close(
        name,
        "Tr_B M + S = (1 + lambda)·1",
        &marginal(&m_op, d_a, d_b)?.add(&slack)?,
        &HermitianOperator::identity(d_a).scale(1.0 + lambda),
    )?;
    ensure_value(name, "primal objective", lambda, value)?;

    let w = dual.prog.matrix_of(&sol_d, dual.w);
    let z_raw = dual.prog.matrix_of(&sol_d, dual.z);
    ensure_value(
        name,
        "dual witness value",
        hs_inner(j, &w)? - z_raw.trace(),
        dual_value,
    )?;
    let rho = pad_trace(name, "rho", &z_raw, 1.0)?;
    ensure_psd(name, "W", &w)?;
    ensure_psd(name, "rho", &rho)?;
    ensure_psd(name, "rho⊗1 - W", &kron_id(&rho, d_b).sub(&w)?)?;

    let mut primal_witness = WitnessSet::default();
    primal_witness.push_operator("M", m_op);
    primal_witness.push_operator("N", n_op);
    primal_witness.push_operator("S", slack);
    primal_witness.push_scalar("lambda", lambda);
    let mut dual_witness = WitnessSet::default();
    dual_witness.push_operator("W", w);
    dual_witness.push_operator("rho", rho);
    Ok(MeasureResult {
        measure: name.to_owned(),
        value,
        primal_witness,
        dual_witness,
        gap,
        status: Status::Optimal,
    })
}

/// Complete-positivity restoration `R''`: the least `λ ≥ 0` such that
/// `Φ + λ Λ` is completely positive for some CPTNI map `Λ`.
pub fn robustness_r_double_prime(m: &LinearMapRep, opts: &MeasureOptions) -> Result<MeasureResult> {
    let name = "Rdoubleprime";
    let j = m.choi();
    let (d_a, d_b) = (m.d_in(), m.d_out());
    let tr_b_j = marginal(j, d_a, d_b)?;

    let primal = programs::lower_robustness_primal(j, d_a, d_b);
    let dual = programs::lower_robustness_dual(j, &tr_b_j, d_a, d_b);
    let sol_p = solve_one(&primal.prog, name, opts)?;
    let sol_d = solve_one(&dual.prog, name, opts)?;
    let value = primal.prog.value(&sol_p);
    let dual_value = dual.prog.value(&sol_d);
    let gap = cross_check_gap(name, value, dual_value)?;

    let m_op = primal.prog.matrix_of(&sol_p, primal.m);
    let g_op = j.add(&m_op)?;
    let slack = primal.prog.matrix_of(&sol_p, primal.slack);
    let lambda = primal.prog.scalar_of(&sol_p, primal.lambda);
    ensure_psd(name, "M", &m_op)?;
    ensure_psd(name, "J + M", &g_op)?;
    ensure_psd(name, "S", &slack)?;
    ensure_close(
        name,
        "Tr_B M + S = lambda·1",
        &marginal(&m_op, d_a, d_b)?.add(&slack)?,
        &HermitianOperator::identity(d_a).scale(lambda),
    )?;
    ensure_value(name, "primal objective", lambda, value)?;

    let w_raw = dual.prog.matrix_of(&sol_d, dual.w);
    let z_raw = dual.prog.matrix_of(&sol_d, dual.z);
    // Pad Z to unit trace and shift W in lockstep; the witness value
    // ⟨J, W − Z⊗1⟩ is invariant under the joint shift.
    let deficit = 1.0 - z_raw.trace();
    let rho = pad_trace(name, "rho", &z_raw, 1.0)?;
    let w = w_raw.add_scaled(
        &HermitianOperator::identity(d_a * d_b),
        deficit / d_a as f64,
    )?;
    ensure_value(
        name,
        "dual witness value",
        hs_inner(j, &w)? - hs_inner(&tr_b_j, &rho)?,
        dual_value,
    )?;
    ensure_psd(name, "W", &w)?;
    ensure_psd(name, "rho", &rho)?;
    ensure_psd(name, "rho⊗1 - W", &kron_id(&rho, d_b).sub(&w)?)?;

    let mut primal_witness = WitnessSet::default();
    primal_witness.push_operator("M", m_op);
    primal_witness.push_operator("G", g_op);
    primal_witness.push_operator("S", slack);
    primal_witness.push_scalar("lambda", lambda);
    let mut dual_witness = WitnessSet::default();
    dual_witness.push_operator("W", w);
    dual_witness.push_operator("rho", rho);
    Ok(MeasureResult {
        measure: name.to_owned(),
        value,
        primal_witness,
        dual_witness,
        gap,
        status: Status::Optimal,
    })
}

/// Cost of the quasiprobability simulation scheme: `2 R(Φ) + 1`, the least
/// trace norm of an ancilla operator implementing `Φ` through a physical
/// channel.
pub fn simulation_cost(m: &LinearMapRep, opts: &MeasureOptions) -> Result<f64> {
    Ok(2.0 * robustness_r(m, opts)?.value + 1.0)
}

/// Compile the primal/dual cone-program pair that a named measure solves,
/// without solving it — for export and inspection with external tooling.
///
/// Accepts the SDP-backed measure names (`"diamond_norm"`,
/// `"base_norm_cptni"`, `"R"`, `"Rprime"`, `"Rdoubleprime"`, and
/// `"game_advantage"`, which shares its programs with `Rprime`); closed-form
/// quantities have no compiled programs.
pub fn compile_measure_programs(
    m: &LinearMapRep,
    measure: &str,
) -> Result<(crate::sdp::ConeProgram, crate::sdp::ConeProgram)> {
    let (d_a, d_b) = (m.d_in(), m.d_out());
    let j = m.choi();
    let tr_b_j = marginal(j, d_a, d_b)?;
    let pair = match measure {
        "diamond_norm" => (
            programs::diamond_primal(j, d_a, d_b).prog.program,
            programs::diamond_dual(j, &tr_b_j, d_a, d_b).prog.program,
        ),
        "base_norm_cptni" => (
            programs::base_primal(j, d_a, d_b).prog.program,
            programs::base_dual(j, &tr_b_j, d_a, d_b).prog.program,
        ),
        "R" => (
            programs::robustness_primal(j, d_a, d_b).prog.program,
            programs::robustness_dual(j, &tr_b_j, d_a, d_b).prog.program,
        ),
        "Rprime" | "game_advantage" => (
            programs::upper_robustness_primal(j, d_a, d_b).prog.program,
            programs::upper_robustness_dual(j, d_a, d_b).prog.program,
        ),
        "Rdoubleprime" => (
            programs::lower_robustness_primal(j, d_a, d_b).prog.program,
            programs::lower_robustness_dual(j, &tr_b_j, d_a, d_b).prog.program,
        ),
        other => {
            return Err(Error::Validation(format!(
                "no compiled cone program for measure '{other}'"
            )))
        }
    };
    Ok(pair)
}

/// Structural physical approximation cost: the least `ς ≥ 0` such that
/// `(Φ + ς D)/(1 + ς)` is completely positive, where `D` is the completely
/// depolarising channel.
pub fn spa(m: &LinearMapRep) -> f64 {
    let lambda_min = eigh(m.choi()).lambda_min();
    m.d_out() as f64 * (-lambda_min).max(0.0)
}

/// Optimised structural physical approximation cost: the least `ς ≥ 0` such
/// that `J_Φ + ς (λ_max 1 − J_Φ)/(λ_max d_B − 1) ⪰ 0`, mixing towards the
/// spectrally flattened version of the map itself instead of the
/// depolarising channel.
///
/// Returns an error when the Choi spectrum is flat (no mixing direction) or
/// when `λ_max ≤ 1/d_B` (the mixing operator is not a subnormalised Choi
/// operator). For completely positive maps the cost is zero.
pub fn spa_prime(m: &LinearMapRep) -> Result<f64> {
    let spectrum = eigh(m.choi());
    let lambda_min = spectrum.lambda_min();
    let lambda_max = spectrum.lambda_max();
    let scale = lambda_min
        .abs()
        .max(lambda_max.abs())
        .max(f64::MIN_POSITIVE);
    if lambda_max - lambda_min <= 1e-12 * scale {
        return Err(Error::Validation(
            "optimised approximation undefined: Choi spectrum is flat".to_owned(),
        ));
    }
    if lambda_min >= 0.0 {
        return Ok(0.0);
    }
    let d_b = m.d_out() as f64;
    if lambda_max * d_b - 1.0 <= 1e-9 * 1.0_f64.max(lambda_max * d_b) {
        return Err(Error::Validation(format!(
            "optimised approximation undefined: largest Choi eigenvalue {lambda_max:.6e} \
             does not exceed 1/d_B = {:.6e}",
            1.0 / d_b
        )));
    }
    Ok((-lambda_min * (d_b * lambda_max - 1.0) / (lambda_max - lambda_min)).max(0.0))
}
