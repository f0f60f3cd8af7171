//! Built-in map constructors and the `name?key=value` mini-spec parser.
//!
//! Every constructor validates its parameter domain and returns the map in
//! the Choi representation. Inverse constructors are closed forms (not
//! numerical inversions), so they stay exact at the representation level;
//! the generic [`LinearMapRep::inverse`] is tested against them.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, HermitianOperator};

use super::{hermitize, KrausSet, LinearMapRep};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Validation("dimension must be at least 1".into()));
    }
    Ok(())
}

fn check_unit_interval(value: f64, name: &str) -> Result<()> {
    if !(0.0..1.0).contains(&value) {
        return Err(Error::Validation(format!(
            "{name} = {value} outside the domain [0, 1)"
        )));
    }
    Ok(())
}

/// Choi operator from the action `E_ij ↦ Φ(E_ij)` on matrix units:
/// `J[(i,k),(j,l)] = Φ(E_ij)_{kl}`.
fn choi_from_action<F>(d_in: usize, d_out: usize, action: F) -> Result<HermitianOperator>
where
    F: Fn(usize, usize) -> ComplexMatrix,
{
    let n = d_in * d_out;
    let mut images = Vec::with_capacity(d_in * d_in);
    for i in 0..d_in {
        for j in 0..d_in {
            images.push(action(i, j));
        }
    }
    let mat = ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / d_out, r % d_out);
        let (j, l) = (c / d_out, c % d_out);
        images[i * d_in + j].at(k, l)
    });
    hermitize(&mat)
}

/// The identity map on dimension `d` (`J = |Ω⟩⟨Ω|`).
pub fn identity(d: usize) -> Result<LinearMapRep> {
    check_dim(d)?;
    let n = d * d;
    let mat = ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        if i == k && j == l {
            re(1.0)
        } else {
            re(0.0)
        }
    });
    LinearMapRep::from_choi(HermitianOperator::new(mat)?, d, d)
}

/// The completely depolarizing channel `ρ ↦ Tr(ρ)·1/d` (`J = 1_{AB}/d`).
pub fn completely_depolarizing(d: usize) -> Result<LinearMapRep> {
    check_dim(d)?;
    let j = HermitianOperator::identity(d * d).scale(1.0 / d as f64);
    LinearMapRep::from_choi(j, d, d)
}

/// The depolarizing channel `ρ ↦ (1−p)ρ + p·Tr(ρ)·1/d`.
pub fn depolarizing(p: f64, d: usize) -> Result<LinearMapRep> {
    check_dim(d)?;
    check_unit_interval(p, "depolarizing strength p")?;
    let id = identity(d)?;
    let mix = p / d as f64;
    let j = id
        .choi()
        .scale(1.0 - p)
        .add(&HermitianOperator::identity(d * d).scale(mix))?;
    LinearMapRep::from_choi(j, d, d)
}

/// Inverse of the depolarizing channel:
/// `J = 1/(1−p)·|Ω⟩⟨Ω| − p/((1−p)d)·1_{AB}`.
pub fn depolarizing_inverse(p: f64, d: usize) -> Result<LinearMapRep> {
    check_dim(d)?;
    check_unit_interval(p, "depolarizing strength p")?;
    let id = identity(d)?;
    let j = id
        .choi()
        .scale(1.0 / (1.0 - p))
        .add(&HermitianOperator::identity(d * d).scale(-p / ((1.0 - p) * d as f64)))?;
    LinearMapRep::from_choi(j, d, d)
}

/// Schur-multiplier matrix `S_{jk} = Σ_i p_i ω^{i(j−k)}` of the generalized
/// dephasing channel with cycling-phase Kraus weights `p`.
fn dephasing_multipliers(p: &[f64]) -> Vec<Vec<Complex64>> {
    let d = p.len();
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let mut s = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    #[allow(clippy::needless_range_loop)]
    for j in 0..d {
        for k in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &pi) in p.iter().enumerate() {
                let phase = omega * (i as f64) * (j as f64 - k as f64);
                acc += re(pi) * Complex64::new(phase.cos(), phase.sin());
            }
            s[j][k] = acc;
        }
    }
    s
}

fn check_dephasing_weights(p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::Validation(
            "dephasing weight vector needs at least 2 entries".into(),
        ));
    }
    if p.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::Validation(
            "dephasing weights must lie in [0, 1]".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "dephasing weights must sum to 1 (got {sum})"
        )));
    }
    Ok(())
}

/// Choi operator of a Schur-multiplication map `ρ_{jk} ↦ S_{jk} ρ_{jk}`.
fn schur_map(s: &[Vec<Complex64>]) -> Result<LinearMapRep> {
    let d = s.len();
    let n = d * d;
    let mat = ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        if i == k && j == l {
            s[i][j]
        } else {
            re(0.0)
        }
    });
    LinearMapRep::from_choi(hermitize(&mat)?, d, d)
}

/// Generalized dephasing channel for a probability vector `p` of length `d`:
/// entrywise multiplication by `S_{jk} = Σ_i p_i ω^{i(j−k)}`, `ω = e^{2πi/d}`.
pub fn dephasing_general(p: &[f64]) -> Result<LinearMapRep> {
    check_dephasing_weights(p)?;
    schur_map(&dephasing_multipliers(p))
}

/// Inverse of [`dephasing_general`]: entrywise multiplication by `1/S_{jk}`.
/// Fails when any multiplier vanishes.
pub fn dephasing_general_inverse(p: &[f64]) -> Result<LinearMapRep> {
    check_dephasing_weights(p)?;
    let s = dephasing_multipliers(p);
    let mut inv = vec![vec![Complex64::new(0.0, 0.0); s.len()]; s.len()];
    for (j, row) in s.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if v.norm() <= 1e-12 {
                return Err(Error::Validation(format!(
                    "dephasing multiplier S[{j}][{k}] vanishes; the channel is not invertible"
                )));
            }
            inv[j][k] = v.inv();
        }
    }
    schur_map(&inv)
}

/// Qubit amplitude damping channel at decay probability `γ`.
pub fn amplitude_damping(gamma: f64) -> Result<LinearMapRep> {
    check_unit_interval(gamma, "damping probability γ")?;
    let a0 = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => re(1.0),
        (1, 1) => re((1.0 - gamma).sqrt()),
        _ => re(0.0),
    });
    let a1 = ComplexMatrix::from_fn(2, 2, |i, j| {
        if i == 0 && j == 1 {
            re(gamma.sqrt())
        } else {
            re(0.0)
        }
    });
    LinearMapRep::from_kraus(&KrausSet::new(vec![a0, a1])?)
}

/// Closed-form inverse of the qubit amplitude damping channel.
pub fn amplitude_damping_inverse(gamma: f64) -> Result<LinearMapRep> {
    check_unit_interval(gamma, "damping probability γ")?;
    let q = 1.0 - gamma;
    let choi = choi_from_action(2, 2, |i, j| {
        ComplexMatrix::from_fn(2, 2, |k, l| match (i, j, k, l) {
            (0, 0, 0, 0) => re(1.0),
            (1, 1, 0, 0) => re(-gamma / q),
            (1, 1, 1, 1) => re(1.0 / q),
            (0, 1, 0, 1) | (1, 0, 1, 0) => re(1.0 / q.sqrt()),
            _ => re(0.0),
        })
    })?;
    LinearMapRep::from_choi(choi, 2, 2)
}

/// Qubit leakage: conjugation by `L_p = diag(1, √(1−p))`, a CP
/// trace-nonincreasing map that loses the excited state with probability `p`.
pub fn leakage(p: f64) -> Result<LinearMapRep> {
    check_unit_interval(p, "leakage probability p")?;
    let l = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => re(1.0),
        (1, 1) => re((1.0 - p).sqrt()),
        _ => re(0.0),
    });
    LinearMapRep::from_kraus(&KrausSet::new(vec![l])?)
}

/// Inverse of [`leakage`]: conjugation by `L_p⁻¹ = diag(1, 1/√(1−p))`.
pub fn leakage_inverse(p: f64) -> Result<LinearMapRep> {
    check_unit_interval(p, "leakage probability p")?;
    let l = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => re(1.0),
        (1, 1) => re(1.0 / (1.0 - p).sqrt()),
        _ => re(0.0),
    });
    LinearMapRep::from_kraus(&KrausSet::new(vec![l])?)
}

/// The transposition map `X ↦ Xᵀ` (Choi operator: the SWAP on `A ⊗ B`).
pub fn transpose_map(d: usize) -> Result<LinearMapRep> {
    check_dim(d)?;
    let n = d * d;
    let mat = ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        if i == l && j == k {
            re(1.0)
        } else {
            re(0.0)
        }
    });
    LinearMapRep::from_choi(HermitianOperator::new(mat)?, d, d)
}

/// The (trace-normalized) Choi map on dimension 3, an indecomposable
/// positive but not completely positive trace-preserving map.
///
/// The underlying positive map is
/// `X ↦ [[X₁₁+X₂₂, −X₁₂, −X₁₃], [−X₂₁, X₂₂+X₃₃, −X₂₃], [−X₃₁, −X₃₂, X₃₃+X₁₁]]`,
/// which doubles the trace; the constructor divides by 2 so the result is
/// trace preserving and directly comparable with other channels here.
pub fn choi_map() -> Result<LinearMapRep> {
    let choi = choi_from_action(3, 3, |i, j| {
        ComplexMatrix::from_fn(3, 3, |k, l| {
            if i == j {
                // C(E_ii) = E_ii + E_{i-1,i-1} (indices mod 3)
                if k == l && (k == i || k == (i + 2) % 3) {
                    re(0.5)
                } else {
                    re(0.0)
                }
            } else if k == i && l == j {
                re(-0.5)
            } else {
                re(0.0)
            }
        })
    })?;
    LinearMapRep::from_choi(choi, 3, 3)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Random Hermiticity-preserving trace-preserving map: a Gaussian Hermitian
/// Choi operator, shifted by `(1_A − Tr_B J) ⊗ 1_B/d_B` to enforce TP.
/// Deterministic in `seed`; generically not CP.
pub fn random_tp_map(seed: u64, d: usize) -> Result<LinearMapRep> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = d * d;
    let mut mat = ComplexMatrix::zeros(n, n);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        *mat.at_mut(i, i) = re(standard_normal(&mut rng));
        for j in (i + 1)..n {
            let z = Complex64::new(
                standard_normal(&mut rng) * inv_sqrt2,
                standard_normal(&mut rng) * inv_sqrt2,
            );
            *mat.at_mut(i, j) = z;
            *mat.at_mut(j, i) = z.conj();
        }
    }
    let j0 = HermitianOperator::new(mat)?;
    let raw = LinearMapRep::from_choi(j0, d, d)?;
    let tr_b = crate::linalg::partial_trace(raw.choi(), d, d, crate::linalg::Subsystem::A)?;
    let correction = HermitianOperator::identity(d)
        .sub(&tr_b)?
        .kron(&HermitianOperator::identity(d).scale(1.0 / d as f64));
    let j = raw.choi().add(&correction)?;
    LinearMapRep::from_choi(j, d, d)
}

/// Random CPTP channel: `d²` Gaussian Kraus operators, renormalized by
/// `S^{-1/2}` with `S = Σ K†K` so that the set is exactly trace preserving.
/// Deterministic in `seed`.
pub fn random_channel(seed: u64, d: usize) -> Result<LinearMapRep> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = Vec::with_capacity(d * d);
    for _ in 0..d * d {
        let mut k = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                *k.at_mut(i, j) =
                    Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng));
            }
        }
        ops.push(k);
    }
    let mut gram = ComplexMatrix::zeros(d, d);
    for k in &ops {
        gram = gram.add(&k.dagger().mul(k));
    }
    let s = hermitize(&gram)?;
    let spec = eigh(&s);
    if spec.lambda_min() <= 1e-10 {
        return Err(Error::Singular(
            "sampled Kraus normalization is singular; use another seed".into(),
        ));
    }
    let inv_sqrt = spec.apply_to_eigenvalues(|l| 1.0 / l.sqrt());
    let normalized: Vec<ComplexMatrix> = ops.iter().map(|k| k.mul(inv_sqrt.matrix())).collect();
    LinearMapRep::from_kraus(&KrausSet::new(normalized)?)
}

// ---------------------------------------------------------------------------
// mini-spec parser: "name?key=value&key=value"

struct Params {
    pairs: Vec<(String, String, bool)>, // key, value, consumed
}

impl Params {
    fn parse(query: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        if query.is_empty() {
            return Ok(Self { pairs });
        }
        for item in query.split('&') {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "malformed builtin parameter '{item}' (expected key=value)"
                ))
            })?;
            if k.is_empty() {
                return Err(Error::Parse(format!("empty parameter name in '{item}'")));
            }
            pairs.push((k.to_string(), v.to_string(), false));
        }
        Ok(Self { pairs })
    }

    fn take(&mut self, key: &str) -> Result<String> {
        for (k, v, consumed) in self.pairs.iter_mut() {
            if k == key && !*consumed {
                *consumed = true;
                return Ok(v.clone());
            }
        }
        Err(Error::Parse(format!("missing builtin parameter '{key}'")))
    }

    fn take_f64(&mut self, key: &str) -> Result<f64> {
        let raw = self.take(key)?;
        raw.parse::<f64>()
            .map_err(|_| Error::Parse(format!("parameter '{key}'='{raw}' is not a number")))
    }

    fn take_usize(&mut self, key: &str) -> Result<usize> {
        let raw = self.take(key)?;
        raw.parse::<usize>()
            .map_err(|_| Error::Parse(format!("parameter '{key}'='{raw}' is not a dimension")))
    }

    fn take_u64(&mut self, key: &str) -> Result<u64> {
        let raw = self.take(key)?;
        raw.parse::<u64>()
            .map_err(|_| Error::Parse(format!("parameter '{key}'='{raw}' is not a seed")))
    }

    /// Comma-separated float list, e.g. `p=0.75,0.25`.
    fn take_f64_list(&mut self, key: &str) -> Result<Vec<f64>> {
        let raw = self.take(key)?;
        raw.split(',')
            .map(|piece| {
                piece.trim().parse::<f64>().map_err(|_| {
                    Error::Parse(format!("parameter '{key}' entry '{piece}' is not a number"))
                })
            })
            .collect()
    }

    fn finish(self) -> Result<()> {
        for (k, _, consumed) in &self.pairs {
            if !consumed {
                return Err(Error::Parse(format!("unknown builtin parameter '{k}'")));
            }
        }
        Ok(())
    }
}

/// Construct a builtin map from a mini-spec like
/// `depolarizing_inverse?p=0.3&d=2` (the `builtin:` prefix already removed).
///
/// `transpose` is accepted as an alias for `transpose_map`. Unknown names,
/// unknown or missing parameters, and out-of-domain values are errors.
pub fn builtin_from_spec(spec: &str) -> Result<LinearMapRep> {
    let (name, query) = match spec.split_once('?') {
        Some((n, q)) => (n, q),
        None => (spec, ""),
    };
    let mut params = Params::parse(query)?;
    let map = match name {
        "identity" => identity(params.take_usize("d")?),
        "completely_depolarizing" => completely_depolarizing(params.take_usize("d")?),
        "depolarizing" => {
            let p = params.take_f64("p")?;
            let d = params.take_usize("d")?;
            depolarizing(p, d)
        }
        "depolarizing_inverse" => {
            let p = params.take_f64("p")?;
            let d = params.take_usize("d")?;
            depolarizing_inverse(p, d)
        }
        "dephasing_general" => dephasing_general(&params.take_f64_list("p")?),
        "dephasing_general_inverse" => dephasing_general_inverse(&params.take_f64_list("p")?),
        "amplitude_damping" => amplitude_damping(params.take_f64("gamma")?),
        "amplitude_damping_inverse" => amplitude_damping_inverse(params.take_f64("gamma")?),
        "leakage" => leakage(params.take_f64("p")?),
        "leakage_inverse" => leakage_inverse(params.take_f64("p")?),
        "transpose_map" | "transpose" => transpose_map(params.take_usize("d")?),
        "choi_map" => choi_map(),
        "random_tp_map" => {
            let seed = params.take_u64("seed")?;
            let d = params.take_usize("d")?;
            random_tp_map(seed, d)
        }
        "random_channel" => {
            let seed = params.take_u64("seed")?;
            let d = params.take_usize("d")?;
            random_channel(seed, d)
        }
        other => Err(Error::Parse(format!("unknown builtin map '{other}'"))),
    }?;
    params.finish()?;
    Ok(map)
}
