//! Closed-form and probe-based bounds on the unphysicality measures.
//!
//! Three families are provided, all cheap relative to a full SDP solve:
//!
//! * [`bounds_trace_norm`] — two-sided bounds from the traces of the
//!   positive and negative parts of the Choi operator.
//! * [`bounds_upper`] — upper bounds from the largest eigenvalues of the
//!   output marginals of the Choi parts.
//! * [`bounds_lower`] — lower bounds from probing the map with input
//!   states, plus spectral bounds on the trace-out-output marginal.
//!
//! [`approx_inverse_bounds`] specialises the probe machinery to recovery
//! maps: given a forward channel `Φ`, a candidate approximate inverse, and
//! an accuracy `ε` with `‖Φ̃(Φ(ρ)) − ρ‖₁ ≤ ε` on states, it lower-bounds
//! the unphysicality of *any* such inverse by probing with reachable target
//! states.

use num_complex::Complex64;

use crate::channels::{hermitize, LinearMapRep};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh, operator_norm, partial_trace, positive_negative_parts, trace_norm, ComplexMatrix,
    HermitianOperator, Subsystem,
};

use super::WITNESS_TOL;

/// Side of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// The measure is at least this value.
    Lower,
    /// The measure is at most this value.
    Upper,
}

/// One named bound on one measure.
#[derive(Debug, Clone)]
pub struct Bound {
    /// Measure the bound applies to (`"diamond_norm"`, `"R"`, ...).
    pub measure: String,
    /// Short description of where the bound comes from.
    pub name: String,
    /// Whether the value bounds from below or above.
    pub kind: BoundKind,
    /// Numeric bound.
    pub value: f64,
}

/// A batch of bounds produced by one bound family (or several merged).
#[derive(Debug, Clone, Default)]
pub struct BoundsReport {
    /// All bounds, in production order.
    pub bounds: Vec<Bound>,
}

impl BoundsReport {
    fn push(&mut self, measure: &str, name: &str, kind: BoundKind, value: f64) {
        self.bounds.push(Bound {
            measure: measure.to_owned(),
            name: name.to_owned(),
            kind,
            value,
        });
    }

    /// Append all bounds of another report.
    pub fn merge(&mut self, other: BoundsReport) {
        self.bounds.extend(other.bounds);
    }

    /// Best (largest) lower bound recorded for a measure, if any.
    pub fn lower(&self, measure: &str) -> Option<f64> {
        self.bounds
            .iter()
            .filter(|b| b.kind == BoundKind::Lower && b.measure == measure)
            .map(|b| b.value)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// Best (smallest) upper bound recorded for a measure, if any.
    pub fn upper(&self, measure: &str) -> Option<f64> {
        self.bounds
            .iter()
            .filter(|b| b.kind == BoundKind::Upper && b.measure == measure)
            .map(|b| b.value)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }

    /// Distinct measures mentioned by this report, in first-seen order.
    pub fn measures(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for b in &self.bounds {
            if !seen.contains(&b.measure.as_str()) {
                seen.push(&b.measure);
            }
        }
        seen
    }

    /// Error when, for some measure, the best lower bound exceeds the best
    /// upper bound beyond tolerance.
    pub fn check_consistency(&self) -> Result<()> {
        for measure in self.measures() {
            if let (Some(lo), Some(hi)) = (self.lower(measure), self.upper(measure)) {
                if lo > hi + WITNESS_TOL * 1.0_f64.max(hi.abs()) {
                    return Err(Error::CrossCheck(format!(
                        "bounds for {measure} are inconsistent: lower {lo:.12e} exceeds \
                         upper {hi:.12e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Error when a certified value escapes the recorded bracket for the
    /// given measure.
    pub fn check_value(&self, measure: &str, value: f64) -> Result<()> {
        if let Some(lo) = self.lower(measure) {
            if value < lo - WITNESS_TOL * 1.0_f64.max(lo.abs()) {
                return Err(Error::CrossCheck(format!(
                    "{measure} value {value:.12e} violates lower bound {lo:.12e}"
                )));
            }
        }
        if let Some(hi) = self.upper(measure) {
            if value > hi + WITNESS_TOL * 1.0_f64.max(hi.abs()) {
                return Err(Error::CrossCheck(format!(
                    "{measure} value {value:.12e} violates upper bound {hi:.12e}"
                )));
            }
        }
        Ok(())
    }
}

fn clamp0(v: f64) -> f64 {
    v.max(0.0)
}

/// Two-sided bounds from the Choi trace decomposition.
///
/// With `J = J₊ − J₋` the Jordan decomposition and `t± = Tr J±`:
/// the base norm lies between `(t₊ + t₋)/d_A` and `t₊ + t₋`, and the three
/// robustness measures are bracketed by the corresponding trace excesses at
/// input dimension scale. Robustness bounds are clamped at zero to match
/// the nonnegative measures.
pub fn bounds_trace_norm(m: &LinearMapRep) -> Result<BoundsReport> {
    let (j_pos, j_neg) = positive_negative_parts(m.choi());
    let (t_plus, t_minus) = (j_pos.trace(), j_neg.trace());
    let d_a = m.d_in() as f64;

    let mut report = BoundsReport::default();
    report.push(
        "base_norm_cptni",
        "Choi trace norm",
        BoundKind::Upper,
        t_plus + t_minus,
    );
    report.push(
        "base_norm_cptni",
        "Choi trace norm over d_A",
        BoundKind::Lower,
        (t_plus + t_minus) / d_a,
    );
    report.push(
        "R",
        "Choi part traces",
        BoundKind::Upper,
        clamp0((t_plus - 1.0).max(t_minus)),
    );
    report.push(
        "R",
        "Choi part traces over d_A",
        BoundKind::Lower,
        clamp0((t_plus / d_a - 1.0).max(t_minus / d_a)),
    );
    report.push(
        "Rprime",
        "Choi positive trace",
        BoundKind::Upper,
        clamp0(t_plus - 1.0),
    );
    report.push(
        "Rprime",
        "Choi positive trace over d_A",
        BoundKind::Lower,
        clamp0(t_plus / d_a - 1.0),
    );
    report.push(
        "Rdoubleprime",
        "Choi negative trace",
        BoundKind::Upper,
        t_minus,
    );
    report.push(
        "Rdoubleprime",
        "Choi negative trace over d_A",
        BoundKind::Lower,
        clamp0(t_minus / d_a),
    );
    Ok(report)
}

/// Upper bounds from the input marginals of the Choi parts.
///
/// With `a = λ_max(Tr_B J₊)` and `b = λ_max(Tr_B J₋)`: the diamond norm is
/// at most `λ_max(Tr_B(J₊ + J₋))`, the base norm at most `a + b`, and the
/// robustness measures at most the corresponding excesses (clamped at
/// zero).
pub fn bounds_upper(m: &LinearMapRep) -> Result<BoundsReport> {
    let (d_a, d_b) = (m.d_in(), m.d_out());
    let (j_pos, j_neg) = positive_negative_parts(m.choi());
    let marg_pos = partial_trace(&j_pos, d_a, d_b, Subsystem::A)?;
    let marg_neg = partial_trace(&j_neg, d_a, d_b, Subsystem::A)?;
    let a = eigh(&marg_pos).lambda_max();
    let b = eigh(&marg_neg).lambda_max();
    let both = eigh(&marg_pos.add(&marg_neg)?).lambda_max();

    let mut report = BoundsReport::default();
    report.push("diamond_norm", "marginal of |J|", BoundKind::Upper, both);
    report.push(
        "base_norm_cptni",
        "marginals of Choi parts",
        BoundKind::Upper,
        a + b,
    );
    report.push(
        "R",
        "marginals of Choi parts",
        BoundKind::Upper,
        clamp0((a - 1.0).max(b)),
    );
    report.push(
        "Rprime",
        "marginal of positive Choi part",
        BoundKind::Upper,
        clamp0(a - 1.0),
    );
    report.push(
        "Rdoubleprime",
        "marginal of negative Choi part",
        BoundKind::Upper,
        clamp0(b),
    );
    Ok(report)
}

/// Standard input probes on a `d`-dimensional system: the computational
/// basis states, the maximally mixed state, and the uniform superposition.
pub(crate) fn default_probes(d: usize) -> Vec<HermitianOperator> {
    let mut probes = Vec::with_capacity(d + 2);
    for k in 0..d {
        probes.push(basis_state(d, k));
    }
    probes.push(HermitianOperator::identity(d).scale(1.0 / d as f64));
    probes.push(uniform_superposition(d));
    probes
}

fn basis_state(d: usize, k: usize) -> HermitianOperator {
    let mat = ComplexMatrix::from_fn(d, d, |i, j| {
        if i == k && j == k {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    HermitianOperator::new(mat).expect("basis projector is Hermitian")
}

fn uniform_superposition(d: usize) -> HermitianOperator {
    let v = 1.0 / d as f64;
    let mat = ComplexMatrix::from_fn(d, d, |_, _| Complex64::new(v, 0.0));
    HermitianOperator::new(mat).expect("superposition projector is Hermitian")
}

fn validate_state(what: &str, p: &HermitianOperator, d: usize) -> Result<()> {
    if p.dim() != d {
        return Err(Error::Dimension(format!(
            "{what} has dimension {}, expected {d}",
            p.dim()
        )));
    }
    let lambda_min = eigh(p).lambda_min();
    if lambda_min < -1e-9 * 1.0_f64.max(p.matrix().max_abs()) {
        return Err(Error::Validation(format!(
            "{what} is not positive semidefinite (λ_min = {lambda_min:.3e})"
        )));
    }
    if (p.trace() - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "{what} has trace {:.12e}, expected 1",
            p.trace()
        )));
    }
    Ok(())
}

/// Lower bounds from probing the map with input states.
///
/// Default probes (basis states, maximally mixed, uniform superposition)
/// are always included; `extra_probes` must be valid states on the input
/// system. Each probe `ρ` yields lower bounds via the trace norm and the
/// positive/negative trace weights of `Φ(ρ)`; spectral bounds on the
/// trace-out-output marginal `Tr_B J` are appended as probe-free
/// alternatives.
pub fn bounds_lower(m: &LinearMapRep, extra_probes: &[HermitianOperator]) -> Result<BoundsReport> {
    let (d_a, d_b) = (m.d_in(), m.d_out());
    let mut probes = default_probes(d_a);
    for (k, p) in extra_probes.iter().enumerate() {
        validate_state(&format!("probe {k}"), p, d_a)?;
        probes.push(p.clone());
    }

    let mut best_tn = f64::NEG_INFINITY;
    let mut best_plus = f64::NEG_INFINITY;
    let mut best_minus = f64::NEG_INFINITY;
    for p in &probes {
        let out = m.apply(p)?;
        let (pos, neg) = positive_negative_parts(&out);
        best_tn = best_tn.max(pos.trace() + neg.trace());
        best_plus = best_plus.max(pos.trace());
        best_minus = best_minus.max(neg.trace());
    }

    let marg = partial_trace(m.choi(), d_a, d_b, Subsystem::A)?;
    let (marg_pos, marg_neg) = positive_negative_parts(&marg);
    let spec_plus = eigh(&marg_pos).lambda_max();
    let spec_minus = eigh(&marg_neg).lambda_max();

    let mut report = BoundsReport::default();
    report.push(
        "diamond_norm",
        "best probe output trace norm",
        BoundKind::Lower,
        best_tn,
    );
    report.push(
        "diamond_norm",
        "marginal operator norm",
        BoundKind::Lower,
        operator_norm(&marg),
    );
    report.push(
        "base_norm_cptni",
        "best probe output traces",
        BoundKind::Lower,
        best_plus + best_minus,
    );
    report.push(
        "base_norm_cptni",
        "marginal spectral traces",
        BoundKind::Lower,
        spec_plus + spec_minus,
    );
    report.push(
        "R",
        "best probe output traces",
        BoundKind::Lower,
        clamp0(best_minus.max(best_plus - 1.0)),
    );
    report.push(
        "R",
        "marginal spectrum",
        BoundKind::Lower,
        clamp0(spec_minus.max(spec_plus - 1.0)),
    );
    report.push(
        "Rprime",
        "best probe positive output trace",
        BoundKind::Lower,
        clamp0(best_plus - 1.0),
    );
    report.push(
        "Rprime",
        "marginal spectrum",
        BoundKind::Lower,
        clamp0(spec_plus - 1.0),
    );
    report.push(
        "Rdoubleprime",
        "best probe negative output trace",
        BoundKind::Lower,
        clamp0(best_minus),
    );
    report.push(
        "Rdoubleprime",
        "marginal spectrum",
        BoundKind::Lower,
        clamp0(spec_minus),
    );
    Ok(report)
}

/// Solve `Φ(Z) = σ` for Hermitian `Z` through the pseudo-inverse of the
/// transfer matrix. Returns `None` when `σ` is (numerically) outside the
/// range of the map.
fn preimage(
    transfer: &ComplexMatrix,
    transfer_dag: &ComplexMatrix,
    gram_spec: &crate::linalg::Spectrum,
    sigma: &HermitianOperator,
    d_a: usize,
) -> Result<Option<HermitianOperator>> {
    let n_in = d_a * d_a;
    let sigma_vec = ComplexMatrix::from_fn(sigma.dim() * sigma.dim(), 1, |r, _| {
        sigma.at(r / sigma.dim(), r % sigma.dim())
    });
    let rhs = transfer_dag.mul(&sigma_vec);
    let cutoff = 1e-12 * gram_spec.lambda_max().max(f64::MIN_POSITIVE);
    let u = &gram_spec.eigenvectors;
    let mut z_vec = vec![Complex64::new(0.0, 0.0); n_in];
    for k in 0..n_in {
        let lambda = gram_spec.eigenvalues[k];
        if lambda <= cutoff {
            continue;
        }
        let mut coeff = Complex64::new(0.0, 0.0);
        for i in 0..n_in {
            coeff += u.at(i, k).conj() * rhs.at(i, 0);
        }
        coeff /= lambda;
        for (i, z) in z_vec.iter_mut().enumerate() {
            *z += coeff * u.at(i, k);
        }
    }
    let z_col = ComplexMatrix::from_fn(n_in, 1, |r, _| z_vec[r]);
    let residual = transfer.mul(&z_col).sub(&sigma_vec).max_abs();
    if residual > 1e-8 * 1.0_f64.max(sigma.matrix().max_abs()) {
        return Ok(None);
    }
    let z_mat = ComplexMatrix::from_fn(d_a, d_a, |i, j| z_vec[i * d_a + j]);
    Ok(Some(hermitize(&z_mat)?))
}

/// Lower bounds on the unphysicality of any approximate inverse.
///
/// `forward` is the physical map `Φ: A → B`; `candidate` is the inverse
/// under study, mapping `B → A`; `eps` bounds the recovery error
/// `‖candidate(Φ(ρ)) − ρ‖₁` over input states `ρ` (this premise is spot
/// checked against the candidate on standard probes). `target_probes` are
/// additional output states `σ` to probe with; defaults on `B` are always
/// included. Probes outside the range of `Φ` are skipped; it is an error
/// for every probe to be skipped.
///
/// For each reachable `σ` with preimage `Z` (so `Φ(Z) = σ`), any valid
/// inverse maps `σ` to within `ε‖Z‖₁` of `Z` in trace norm, which converts
/// the probe bounds of [`bounds_lower`] into bounds depending only on `Φ`,
/// `σ`, and `ε`.
pub fn approx_inverse_bounds(
    forward: &LinearMapRep,
    candidate: &LinearMapRep,
    eps: f64,
    target_probes: &[HermitianOperator],
) -> Result<BoundsReport> {
    if !(eps >= 0.0) {
        return Err(Error::Validation(format!(
            "recovery accuracy must be nonnegative, got {eps}"
        )));
    }
    let (d_a, d_b) = (forward.d_in(), forward.d_out());
    if candidate.d_in() != d_b || candidate.d_out() != d_a {
        return Err(Error::Dimension(format!(
            "candidate inverse maps {}→{}, expected {}→{}",
            candidate.d_in(),
            candidate.d_out(),
            d_b,
            d_a
        )));
    }

    // Spot-check the stated accuracy against the candidate on standard
    // input states: the claimed eps may not undercut what the candidate
    // demonstrably achieves.
    let mut observed: f64 = 0.0;
    for rho in default_probes(d_a) {
        let roundtrip = candidate.apply(&forward.apply(&rho)?)?;
        observed = observed.max(trace_norm(&roundtrip.sub(&rho)?));
    }
    if eps < observed - 1e-12 {
        return Err(Error::Validation(format!(
            "stated recovery accuracy {eps:.6e} is below the deviation {observed:.6e} \
             observed on standard probes"
        )));
    }

    let mut probes = default_probes(d_b);
    for (k, p) in target_probes.iter().enumerate() {
        validate_state(&format!("target probe {k}"), p, d_b)?;
        probes.push(p.clone());
    }

    let transfer = forward.transfer_matrix();
    let transfer_dag = transfer.dagger();
    let gram = hermitize(&transfer_dag.mul(&transfer))?;
    let gram_spec = eigh(&gram);

    let mut best_tn = f64::NEG_INFINITY;
    let mut best_plus = f64::NEG_INFINITY;
    let mut best_minus = f64::NEG_INFINITY;
    let mut reachable = 0usize;
    for sigma in &probes {
        let z = match preimage(&transfer, &transfer_dag, &gram_spec, sigma, d_a)? {
            Some(z) => z,
            None => continue,
        };
        reachable += 1;
        let (pos, neg) = positive_negative_parts(&z);
        let tn = pos.trace() + neg.trace();
        best_tn = best_tn.max(tn * (1.0 - eps));
        best_plus = best_plus.max(pos.trace() - eps * tn);
        best_minus = best_minus.max(neg.trace() - eps * tn);
    }
    if reachable == 0 {
        return Err(Error::Validation(
            "no target probe lies in the range of the forward map".to_owned(),
        ));
    }

    let mut report = BoundsReport::default();
    report.push(
        "diamond_norm",
        "inverse probe trace norm",
        BoundKind::Lower,
        clamp0(best_tn),
    );
    report.push(
        "base_norm_cptni",
        "inverse probe traces",
        BoundKind::Lower,
        clamp0(best_minus) + clamp0(best_plus),
    );
    report.push(
        "R",
        "inverse probe traces",
        BoundKind::Lower,
        clamp0(best_minus.max(best_plus - 1.0)),
    );
    report.push(
        "Rprime",
        "inverse probe positive trace",
        BoundKind::Lower,
        clamp0(best_plus - 1.0),
    );
    report.push(
        "Rdoubleprime",
        "inverse probe negative trace",
        BoundKind::Lower,
        clamp0(best_minus),
    );
    Ok(report)
}
