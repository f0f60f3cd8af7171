//! Discrimination games and the operational meaning of the one-sided
//! robustness.
//!
//! A game consists of an ensemble of input states, a POVM measured on the
//! output, and a payoff weight for each (state, outcome) pair. The payoff
//! achieved by a map is linear in its Choi operator, so every Hermitian
//! witness `W` on `A ⊗ B` can be packaged into a game whose payoff equals
//! `⟨W, J_Φ⟩` ([`game_from_witness`]). The best payoff over physical
//! channels is itself an SDP ([`best_cptp_payoff`]), and the largest
//! advantage any game can certify for a map over all physical channels
//! equals `1 + R'` ([`game_advantage`]).

use num_complex::Complex64;

use crate::channels::LinearMapRep;
use crate::error::{Error, Result};
use crate::linalg::{
    eigh, hs_inner, lu_solve_real, partial_trace, partial_transpose, ComplexMatrix,
    HermitianOperator, Subsystem,
};
use crate::sdp::{herm_basis, Status};

use super::{
    cross_check_gap, ensure_close, ensure_psd, ensure_value, programs, robustness_r_prime,
    solve_one, MeasureOptions, MeasureResult, WitnessSet, WITNESS_TOL,
};

/// A discrimination game: inputs drawn from an ensemble, outputs measured
/// by a POVM, payoffs accumulated per (input, outcome) pair.
#[derive(Debug, Clone)]
pub struct Game {
    /// `(probability, state)` pairs; probabilities sum to one.
    pub ensemble: Vec<(f64, HermitianOperator)>,
    /// POVM elements on the output space, summing to the identity.
    pub povm: Vec<HermitianOperator>,
    /// Payoff weights indexed `[input][outcome]`.
    pub weights: Vec<Vec<f64>>,
}

impl Game {
    /// Input dimension.
    pub fn d_in(&self) -> usize {
        self.ensemble.first().map_or(0, |(_, s)| s.dim())
    }

    /// Output dimension.
    pub fn d_out(&self) -> usize {
        self.povm.first().map_or(0, |m| m.dim())
    }

    /// Check that the ensemble is a probability ensemble of states, the
    /// POVM is complete and positive, and the weight table is rectangular
    /// with finite entries.
    pub fn validate(&self) -> Result<()> {
        if self.ensemble.is_empty() || self.povm.is_empty() {
            return Err(Error::Validation(
                "game needs at least one input state and one POVM element".into(),
            ));
        }
        let d_in = self.d_in();
        let mut prob_sum = 0.0;
        for (k, (p, s)) in self.ensemble.iter().enumerate() {
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::Validation(format!(
                    "ensemble probability {k} is {p}, expected nonnegative"
                )));
            }
            prob_sum += p;
            if s.dim() != d_in {
                return Err(Error::Dimension(format!(
                    "ensemble state {k} has dimension {}, expected {d_in}",
                    s.dim()
                )));
            }
            let lambda_min = eigh(s).lambda_min();
            if lambda_min < -1e-9 * 1.0_f64.max(s.matrix().max_abs()) {
                return Err(Error::Validation(format!(
                    "ensemble state {k} is not positive semidefinite (λ_min = {lambda_min:.3e})"
                )));
            }
            if (s.trace() - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!(
                    "ensemble state {k} has trace {:.12e}, expected 1",
                    s.trace()
                )));
            }
        }
        if (prob_sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "ensemble probabilities sum to {prob_sum:.12e}, expected 1"
            )));
        }
        let d_out = self.d_out();
        let mut povm_sum = HermitianOperator::identity(d_out).scale(0.0);
        for (j, m) in self.povm.iter().enumerate() {
            if m.dim() != d_out {
                return Err(Error::Dimension(format!(
                    "POVM element {j} has dimension {}, expected {d_out}",
                    m.dim()
                )));
            }
            let lambda_min = eigh(m).lambda_min();
            if lambda_min < -1e-10 {
                return Err(Error::Validation(format!(
                    "POVM element {j} is not positive semidefinite (λ_min = {lambda_min:.3e})"
                )));
            }
            povm_sum = povm_sum.add(m)?;
        }
        let closure_dev = povm_sum
            .matrix()
            .max_abs_diff(HermitianOperator::identity(d_out).matrix());
        if closure_dev > 1e-9 {
            return Err(Error::Validation(format!(
                "POVM elements sum to identity only within {closure_dev:.3e}"
            )));
        }
        if self.weights.len() != self.ensemble.len() {
            return Err(Error::Validation(format!(
                "weight table has {} rows, expected {}",
                self.weights.len(),
                self.ensemble.len()
            )));
        }
        for (i, row) in self.weights.iter().enumerate() {
            if row.len() != self.povm.len() {
                return Err(Error::Validation(format!(
                    "weight row {i} has {} entries, expected {}",
                    row.len(),
                    self.povm.len()
                )));
            }
            if row.iter().any(|w| !w.is_finite()) {
                return Err(Error::Validation(format!(
                    "weight row {i} contains non-finite entries"
                )));
            }
        }
        Ok(())
    }

    /// The payoff observable `Σ_ij p_i w_ij σ_iᵀ ⊗ M_j` on `A ⊗ B`, whose
    /// inner product with a Choi operator gives the payoff of that map.
    pub fn payoff_observable(&self) -> Result<HermitianOperator> {
        let n = self.d_in() * self.d_out();
        let mut acc = HermitianOperator::identity(n).scale(0.0);
        for (i, (p, s)) in self.ensemble.iter().enumerate() {
            let s_t = HermitianOperator::new(s.matrix().transpose())?;
            for (j, m) in self.povm.iter().enumerate() {
                let w = p * self.weights[i][j];
                if w == 0.0 {
                    continue;
                }
                acc = acc.add_scaled(&s_t.kron(m), w)?;
            }
        }
        Ok(acc)
    }
}

/// Expected payoff of a map in a game: `Σ_ij p_i w_ij Tr[M_j Φ(σ_i)]`.
pub fn payoff(m: &LinearMapRep, game: &Game) -> Result<f64> {
    game.validate()?;
    if m.d_in() != game.d_in() || m.d_out() != game.d_out() {
        return Err(Error::Dimension(format!(
            "map is {}→{}, game expects {}→{}",
            m.d_in(),
            m.d_out(),
            game.d_in(),
            game.d_out()
        )));
    }
    let mut total = 0.0;
    for (i, (p, s)) in game.ensemble.iter().enumerate() {
        let out = m.apply(s)?;
        for (j, povm_el) in game.povm.iter().enumerate() {
            let w = game.weights[i][j];
            if w == 0.0 {
                continue;
            }
            total += p * w * hs_inner(povm_el, &out)?;
        }
    }
    Ok(total)
}

/// Informationally complete set of `d²` pure states: basis projectors plus
/// the `+`-type and `i`-type two-level superposition projectors.
fn tomography_states(d: usize) -> Vec<HermitianOperator> {
    let zero = Complex64::new(0.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let mut states = Vec::with_capacity(d * d);
    for k in 0..d {
        states.push(
            HermitianOperator::new(ComplexMatrix::from_fn(d, d, |i, j| {
                if i == k && j == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    zero
                }
            }))
            .expect("projector is Hermitian"),
        );
    }
    for k in 0..d {
        for l in (k + 1)..d {
            states.push(
                HermitianOperator::new(ComplexMatrix::from_fn(d, d, |i, j| {
                    if (i == k || i == l) && (j == k || j == l) {
                        half
                    } else {
                        zero
                    }
                }))
                .expect("projector is Hermitian"),
            );
        }
    }
    for k in 0..d {
        for l in (k + 1)..d {
            states.push(
                HermitianOperator::new(ComplexMatrix::from_fn(d, d, |i, j| {
                    if i == k && j == k || i == l && j == l {
                        half
                    } else if i == k && j == l {
                        Complex64::new(0.0, -0.5)
                    } else if i == l && j == k {
                        Complex64::new(0.0, 0.5)
                    } else {
                        zero
                    }
                }))
                .expect("projector is Hermitian"),
            );
        }
    }
    states
}

/// Convert a Hermitian witness `W` on `A ⊗ B` into a discrimination game
/// whose payoff satisfies `P(Φ, G) = ⟨W, J_Φ⟩` for every map `Φ: A → B`.
///
/// The input ensemble is the uniform mixture of an informationally complete
/// family of pure states; the POVM rescales an informationally complete
/// family on the output, completed by a closure element with zero payoff
/// weight. The reconstruction identity is re-verified before returning.
pub fn game_from_witness(w: &HermitianOperator, d_a: usize, d_b: usize) -> Result<Game> {
    if w.dim() != d_a * d_b {
        return Err(Error::Dimension(format!(
            "witness has dimension {}, expected {}",
            w.dim(),
            d_a * d_b
        )));
    }
    let sigmas = tomography_states(d_a);
    let taus = tomography_states(d_b);
    let n = d_a * d_b;
    let n_cols = d_a * d_a * d_b * d_b;

    // Expand W^{T_A} over the product family σ_i ⊗ τ_j by solving a real
    // linear system in Hermitian-basis coordinates.
    let w_ta = partial_transpose(w, d_a, d_b, Subsystem::A)?;
    let basis = herm_basis(n);
    let mut system = vec![0.0; n_cols * n_cols];
    let mut rhs = vec![0.0; n_cols];
    let mut products = Vec::with_capacity(n_cols);
    for sigma in &sigmas {
        for tau in &taus {
            products.push(sigma.kron(tau));
        }
    }
    for (row, b) in basis.iter().enumerate() {
        for (col, prod) in products.iter().enumerate() {
            system[row * n_cols + col] = hs_inner(b, prod)?;
        }
        rhs[row] = hs_inner(b, &w_ta)?;
    }
    let coeffs = lu_solve_real(n_cols, &system, &rhs)?;

    // POVM: rescale the τ family so it sits below the identity, then close.
    let mut tau_sum = HermitianOperator::identity(d_b).scale(0.0);
    for tau in &taus {
        tau_sum = tau_sum.add(tau)?;
    }
    let s = eigh(&tau_sum).lambda_max() * (1.0 + 1e-9);
    let mut povm: Vec<HermitianOperator> = taus.iter().map(|t| t.scale(1.0 / s)).collect();
    let mut closure = HermitianOperator::identity(d_b);
    for m in &povm {
        closure = closure.sub(m)?;
    }
    povm.push(closure);

    let p = 1.0 / (d_a * d_a) as f64;
    let ensemble: Vec<(f64, HermitianOperator)> = sigmas.iter().map(|s| (p, s.clone())).collect();
    let mut weights = Vec::with_capacity(sigmas.len());
    for i in 0..sigmas.len() {
        let mut row = Vec::with_capacity(taus.len() + 1);
        for j in 0..taus.len() {
            row.push(coeffs[i * taus.len() + j] * (d_a * d_a) as f64 * s);
        }
        row.push(0.0);
        weights.push(row);
    }
    let game = Game {
        ensemble,
        povm,
        weights,
    };
    game.validate()?;

    // Re-verify the defining identity: the payoff observable must
    // reproduce W.
    let rebuilt = game.payoff_observable()?;
    let dev = rebuilt.matrix().max_abs_diff(w.matrix());
    if dev > WITNESS_TOL * 1.0_f64.max(w.matrix().max_abs()) {
        return Err(Error::CrossCheck(format!(
            "game reconstruction deviates from witness by {dev:.3e}"
        )));
    }
    Ok(game)
}

/// Largest advantage over physical channels achievable by any
/// discrimination game, `sup_G P(Φ, G) / max_{Λ CPTP} P(Λ, G) = 1 + R'(Φ)`.
///
/// The dual witness `W` (with its feasibility certificate `rho`) is exactly
/// the payoff observable of an optimal game: feed it through
/// [`game_from_witness`] to materialise one.
pub fn game_advantage(m: &LinearMapRep, opts: &MeasureOptions) -> Result<MeasureResult> {
    let r = robustness_r_prime(m, opts)?;
    Ok(MeasureResult {
        measure: "game_advantage".to_owned(),
        value: r.value + 1.0,
        primal_witness: r.primal_witness,
        dual_witness: r.dual_witness,
        gap: r.gap,
        status: r.status,
    })
}

/// Best payoff of a game over all physical (CPTP) channels, computed as an
/// SDP over Choi operators with its dual as an independent cross-check.
pub fn best_cptp_payoff(game: &Game, opts: &MeasureOptions) -> Result<MeasureResult> {
    let name = "best_cptp_payoff";
    game.validate()?;
    let (d_a, d_b) = (game.d_in(), game.d_out());
    let w_g = game.payoff_observable()?;

    let primal = programs::best_channel_primal(&w_g, d_a, d_b);
    let dual = programs::best_channel_dual(&w_g, d_a, d_b);
    let sol_p = solve_one(&primal.prog, name, opts)?;
    let sol_d = solve_one(&dual.prog, name, opts)?;
    let value = primal.prog.value(&sol_p);
    let dual_value = dual.prog.value(&sol_d);
    let gap = cross_check_gap(name, value, dual_value)?;

    let j_opt = primal.prog.matrix_of(&sol_p, primal.choi);
    ensure_psd(name, "J", &j_opt)?;
    ensure_close(
        name,
        "Tr_B J = 1",
        &partial_trace(&j_opt, d_a, d_b, Subsystem::A)?,
        &HermitianOperator::identity(d_a),
    )?;
    ensure_value(name, "primal payoff", hs_inner(&w_g, &j_opt)?, value)?;

    let y = dual.prog.matrix_of(&sol_d, dual.y);
    ensure_psd(
        name,
        "Y⊗1 - W_G",
        &y.kron(&HermitianOperator::identity(d_b)).sub(&w_g)?,
    )?;
    ensure_value(name, "dual objective", y.trace(), dual_value)?;

    let mut primal_witness = WitnessSet::default();
    primal_witness.push_operator("J", j_opt);
    let mut dual_witness = WitnessSet::default();
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
