//! Quasiprobability simulation of a Hermiticity-preserving map.
//!
//! Any such map `Φ` can be written as `Φ(ρ) = Λ(ρ ⊗ X)` where `Λ` is a
//! physical (CPTNI) channel and `X` is a fixed trace-one Hermitian ancilla
//! operator — a pseudo-state whose negative part carries the
//! unphysicality. The least achievable ancilla trace norm is `2R(Φ) + 1`
//! with `R` the robustness, and the construction below attains it: split
//! `Φ = (1+R) Λ₊ − R Λ₋` with `Λ±` CPTNI using the optimal robustness
//! decomposition, attach a qubit ancilla whose basis states select the
//! branch, and set `X = (1+R)|0⟩⟨0| − R|1⟩⟨1|`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::LinearMapRep;
use crate::error::{Error, Result};
use crate::linalg::{trace_norm, ComplexMatrix, HermitianOperator};
use crate::sdp::herm_basis;

use super::{robustness_r, MeasureOptions};

/// Recipe implementing a Hermiticity-preserving map as a physical channel
/// consuming a fixed ancilla pseudo-state.
#[derive(Debug, Clone)]
pub struct SimulationPlan {
    /// CPTNI channel on `A ⊗ C → B` implementing `Φ(ρ) = Λ(ρ ⊗ X)`.
    pub lambda: LinearMapRep,
    /// Trace-one ancilla operator `X = μ₊ ω₊ − μ₋ ω₋` on the qubit `C`.
    pub x: HermitianOperator,
    /// Weight of the positive branch (`1 + R`).
    pub mu_plus: f64,
    /// Weight of the negative branch (`R`).
    pub mu_minus: f64,
    /// Ancilla state selecting the positive branch.
    pub omega_plus: HermitianOperator,
    /// Ancilla state selecting the negative branch.
    pub omega_minus: HermitianOperator,
}

impl SimulationPlan {
    /// Trace norm of the ancilla operator — the simulation cost
    /// `μ₊ + μ₋ = 2R + 1`.
    pub fn cost(&self) -> f64 {
        trace_norm(&self.x)
    }
}

fn ancilla_state(k: usize) -> HermitianOperator {
    let mat = ComplexMatrix::from_fn(2, 2, |i, j| {
        if i == k && j == k {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    HermitianOperator::new(mat).expect("ancilla projector is Hermitian")
}

/// Construct the optimal-cost simulation plan for a Hermiticity-preserving
/// map by solving the robustness program at tightened tolerance and
/// packaging the optimal decomposition into a branch-selecting channel.
pub fn build_simulation(m: &LinearMapRep, opts: &MeasureOptions) -> Result<SimulationPlan> {
    let tight = MeasureOptions {
        gap_tol: opts.gap_tol.min(1e-10),
        ..*opts
    };
    let r = robustness_r(m, &tight)?;
    let rv = r.value;
    let (d_a, d_b) = (m.d_in(), m.d_out());
    let j = m.choi();
    let mu_plus = 1.0 + rv;
    let mu_minus = rv;

    // Branch Choi operators, normalised to CPTNI. When the map is already
    // (numerically) physical the negative branch is the zero map; dividing
    // the vanishing M₋ by the vanishing weight would only amplify solver
    // noise.
    let (j_plus, j_minus) = if rv < 1e-9 {
        (
            j.scale(1.0 / mu_plus),
            HermitianOperator::identity(d_a * d_b).scale(0.0),
        )
    } else {
        let m_plus = r
            .primal_witness
            .operator("M_plus")
            .ok_or_else(|| Error::Solver("robustness result lacks M_plus witness".into()))?;
        (
            m_plus.scale(1.0 / mu_plus),
            m_plus.sub(j)?.scale(1.0 / mu_minus),
        )
    };

    // Choi operator of Λ on (A ⊗ C) ⊗ B: the ancilla basis state |c⟩
    // routes the input to branch c, coherences between branches vanish.
    let d_ac = 2 * d_a;
    let n = d_ac * d_b;
    let jl = ComplexMatrix::from_fn(n, n, |row, col| {
        let (ac, k) = (row / d_b, row % d_b);
        let (acp, l) = (col / d_b, col % d_b);
        let (a, c) = (ac / 2, ac % 2);
        let (ap, cp) = (acp / 2, acp % 2);
        if c != cp {
            return Complex64::new(0.0, 0.0);
        }
        let branch = if c == 0 { &j_plus } else { &j_minus };
        branch.at(a * d_b + k, ap * d_b + l)
    });
    let lambda = LinearMapRep::from_choi(HermitianOperator::new(jl)?, d_ac, d_b)?;

    let omega_plus = ancilla_state(0);
    let omega_minus = ancilla_state(1);
    let x = omega_plus
        .scale(mu_plus)
        .sub(&omega_minus.scale(mu_minus))?;
    Ok(SimulationPlan {
        lambda,
        x,
        mu_plus,
        mu_minus,
        omega_plus,
        omega_minus,
    })
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> Result<HermitianOperator> {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let gram = crate::channels::hermitize(&g.mul(&g.dagger()))?;
    let tr = gram.trace();
    if tr <= f64::EPSILON {
        return Ok(HermitianOperator::identity(d).scale(1.0 / d as f64));
    }
    Ok(gram.scale(1.0 / tr))
}

/// Replay a simulation plan against the map it claims to implement.
///
/// Probes with a full Hermitian operator basis of the input space (which
/// certifies the identity `Λ(· ⊗ X) = Φ(·)` by linearity) plus
/// `probe_count` random density matrices drawn from `seed`, and returns the
/// largest trace-norm deviation observed.
pub fn verify_simulation(
    plan: &SimulationPlan,
    m: &LinearMapRep,
    probe_count: usize,
    seed: u64,
) -> Result<f64> {
    let (d_a, d_b) = (m.d_in(), m.d_out());
    if plan.lambda.d_in() != 2 * d_a || plan.lambda.d_out() != d_b {
        return Err(Error::Dimension(format!(
            "plan channel maps {}→{}, expected {}→{}",
            plan.lambda.d_in(),
            plan.lambda.d_out(),
            2 * d_a,
            d_b
        )));
    }
    if plan.x.dim() != 2 {
        return Err(Error::Dimension(format!(
            "plan ancilla has dimension {}, expected 2",
            plan.x.dim()
        )));
    }

    let mut probes = herm_basis(d_a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..probe_count {
        probes.push(random_density(&mut rng, d_a)?);
    }

    let mut worst: f64 = 0.0;
    for rho in &probes {
        let simulated = plan.lambda.apply(&rho.kron(&plan.x))?;
        let expected = m.apply(rho)?;
        worst = worst.max(trace_norm(&simulated.sub(&expected)?));
    }
    Ok(worst)
}
