//! Linear maps on operators, stored in the Choi representation.
//!
//! A map Φ from operators on system A (dimension `d_in`) to operators on
//! system B (dimension `d_out`) is held through its Choi operator
//! `J_Φ = (id ⊗ Φ)|Ω⟩⟨Ω|` with the unnormalized `|Ω⟩ = Σ_i |ii⟩`, living on
//! `A ⊗ B` in row-major composite indexing. Hermiticity of `J_Φ` is exactly
//! Hermiticity-preservation of Φ, complete positivity is `J_Φ ⪰ 0`, and
//! trace preservation is `Tr_B J_Φ = 1_A`.
//!
//! Composition and inversion go through the transfer (natural) matrix
//! picture, where they are ordinary matrix products and inverses; the two
//! pictures are related by a fixed index reshuffle. Positivity questions and
//! the optimization programs stay in the Choi picture.

mod builtins;
mod json;

pub use builtins::{
    amplitude_damping, amplitude_damping_inverse, builtin_from_spec, choi_map,
    completely_depolarizing, dephasing_general, dephasing_general_inverse, depolarizing,
    depolarizing_inverse, identity, leakage, leakage_inverse, random_channel, random_tp_map,
    transpose_map,
};
pub use json::{channel_from_json, channel_to_json};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, partial_trace, ComplexMatrix, HermitianOperator, Subsystem};

/// Default tolerance for [`LinearMapRep::classify`] and related checks.
pub const CLASSIFICATION_TOL: f64 = 1e-9;

/// Condition-number cutoff beyond which [`LinearMapRep::inverse`] refuses to
/// invert: past this point the downstream measures would be numerically
/// meaningless at the solver's tolerances.
const INVERSION_CONDITION_LIMIT: f64 = 1e12;

/// Symmetrize a matrix that is Hermitian up to rounding and wrap it.
///
/// `(M + M†)/2` has exactly zero Hermiticity deviation in floating point, so
/// construction cannot fail on asymmetry — only on non-finite entries.
pub(crate) fn hermitize(m: &ComplexMatrix) -> Result<HermitianOperator> {
    HermitianOperator::new(m.add(&m.dagger()).scale_re(0.5))
}

/// A set of Kraus operators, each `d_out × d_in`.
#[derive(Debug, Clone)]
pub struct KrausSet {
    d_in: usize,
    d_out: usize,
    ops: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Wrap a nonempty list of equal-shape Kraus operators.
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::Validation("Kraus set must be nonempty".into()))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        if d_in == 0 || d_out == 0 {
            return Err(Error::Validation("Kraus operators must be nonempty".into()));
        }
        for (idx, op) in ops.iter().enumerate() {
            if op.rows() != d_out || op.cols() != d_in {
                return Err(Error::Dimension(format!(
                    "Kraus operator {idx} is {}×{}, expected {}×{}",
                    op.rows(),
                    op.cols(),
                    d_out,
                    d_in
                )));
            }
        }
        Ok(Self { d_in, d_out, ops })
    }

    /// Input dimension (columns of each operator).
    pub fn d_in(&self) -> usize {
        self.d_in
    }

    /// Output dimension (rows of each operator).
    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// The operators themselves.
    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }
}

/// Classification flags of a map, all derived from its Choi operator at a
/// stated tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Classification {
    /// Always true for maps representable here: the constructor rejects
    /// non-Hermitian Choi matrices.
    pub hermiticity_preserving: bool,
    /// Completely positive: `J ⪰ −tol`.
    pub cp: bool,
    /// Trace preserving: `‖Tr_B J − 1‖∞ ≤ tol`.
    pub tp: bool,
    /// Trace nonincreasing: `1 − Tr_B J ⪰ −tol`.
    pub tni: bool,
    /// Proportional to a trace-preserving map: `‖Tr_B J − t·1‖∞ ≤ tol`.
    pub proportional_tp: bool,
    /// The proportionality factor `t = Tr J / d_in` (equals 1 for TP maps).
    pub factor: f64,
    /// Tolerance used for every flag above.
    pub tolerance: f64,
}

/// A Hermiticity-preserving linear map in the Choi representation.
#[derive(Debug, Clone)]
pub struct LinearMapRep {
    d_in: usize,
    d_out: usize,
    choi: HermitianOperator,
}

impl LinearMapRep {
    /// Build a map from its Choi operator. Rejects dimension mismatches; the
    /// Hermiticity requirement is enforced by [`HermitianOperator`] itself.
    pub fn from_choi(choi: HermitianOperator, d_in: usize, d_out: usize) -> Result<Self> {
        if d_in == 0 || d_out == 0 {
            return Err(Error::Dimension("map dimensions must be positive".into()));
        }
        if choi.dim() != d_in * d_out {
            return Err(Error::Dimension(format!(
                "Choi dimension {} does not equal d_in·d_out = {}·{}",
                choi.dim(),
                d_in,
                d_out
            )));
        }
        Ok(Self { d_in, d_out, choi })
    }

    /// Build the (completely positive) map `X ↦ Σ_α K_α X K_α†`.
    pub fn from_kraus(kraus: &KrausSet) -> Result<Self> {
        let (da, db) = (kraus.d_in(), kraus.d_out());
        let n = da * db;
        let mat = ComplexMatrix::from_fn(n, n, |r, c| {
            let (i, k) = (r / db, r % db);
            let (j, l) = (c / db, c % db);
            kraus
                .ops()
                .iter()
                .map(|op| op.at(k, i) * op.at(l, j).conj())
                .sum()
        });
        // Σ K E K† sums conjugate-symmetric products, so `mat` is Hermitian
        // to the last bit and construction cannot fail.
        Self::from_choi(HermitianOperator::new(mat)?, da, db)
    }

    /// Input dimension `d_A`.
    pub fn d_in(&self) -> usize {
        self.d_in
    }

    /// Output dimension `d_B`.
    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// The Choi operator `J_Φ` on `A ⊗ B`.
    pub fn choi(&self) -> &HermitianOperator {
        &self.choi
    }

    /// Apply the map to an arbitrary (complex) matrix:
    /// `Φ(X)_{kl} = Σ_{ij} X_{ij} J_{(i,k),(j,l)}`.
    pub(crate) fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (self.d_in, self.d_out);
        ComplexMatrix::from_fn(db, db, |k, l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..da {
                for j in 0..da {
                    acc += x.at(i, j) * self.choi.at(i * db + k, j * db + l);
                }
            }
            acc
        })
    }

    /// Apply the map to a Hermitian operator; the result is Hermitian
    /// because the Choi operator is.
    pub fn apply(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        if x.dim() != self.d_in {
            return Err(Error::Dimension(format!(
                "input dimension {} does not match map input {}",
                x.dim(),
                self.d_in
            )));
        }
        hermitize(&self.apply_matrix(x.matrix()))
    }

    /// Transfer (natural) matrix `T` with `vec(Φ(X)) = T vec(X)` in
    /// row-major vectorization: `T_{(k,l),(i,j)} = J_{(i,k),(j,l)}`.
    pub fn transfer_matrix(&self) -> ComplexMatrix {
        let (da, db) = (self.d_in, self.d_out);
        ComplexMatrix::from_fn(db * db, da * da, |r, c| {
            let (k, l) = (r / db, r % db);
            let (i, j) = (c / da, c % da);
            self.choi.at(i * db + k, j * db + l)
        })
    }

    /// Rebuild a map from its transfer matrix (inverse reshuffle).
    pub(crate) fn from_transfer(t: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        if t.rows() != d_out * d_out || t.cols() != d_in * d_in {
            return Err(Error::Dimension(format!(
                "transfer matrix is {}×{}, expected {}×{}",
                t.rows(),
                t.cols(),
                d_out * d_out,
                d_in * d_in
            )));
        }
        let n = d_in * d_out;
        let mat = ComplexMatrix::from_fn(n, n, |r, c| {
            let (i, k) = (r / d_out, r % d_out);
            let (j, l) = (c / d_out, c % d_out);
            t.at(k * d_out + l, i * d_in + j)
        });
        Self::from_choi(hermitize(&mat)?, d_in, d_out)
    }

    /// Invert the map through its transfer matrix.
    ///
    /// Fails when the map is not square, when the transfer matrix is
    /// singular, or when its condition number exceeds `1e12`.
    pub fn inverse(&self) -> Result<Self> {
        if self.d_in != self.d_out {
            return Err(Error::Dimension(
                "only maps with d_in = d_out can be inverted".into(),
            ));
        }
        let t = self.transfer_matrix();
        // condition number from the spectrum of T†T
        let gram = hermitize(&t.dagger().mul(&t))?;
        let spec = eigh(&gram);
        let smax = spec.lambda_max().max(0.0).sqrt();
        let smin = spec.lambda_min().max(0.0).sqrt();
        if smin <= 0.0 || smax / smin > INVERSION_CONDITION_LIMIT {
            return Err(Error::Singular(format!(
                "transfer matrix is singular or ill-conditioned (σ_max = {smax:.3e}, σ_min = {smin:.3e})"
            )));
        }
        let inv = crate::linalg::lu_solve_complex(&t, &ComplexMatrix::identity(t.rows()))?;
        Self::from_transfer(&inv, self.d_out, self.d_in)
    }

    /// Classify the map (CP / TP / TNI / proportional-to-TP) at tolerance
    /// `tol`.
    pub fn classify(&self, tol: f64) -> Classification {
        let tr_b = partial_trace(&self.choi, self.d_in, self.d_out, Subsystem::A)
            .expect("Choi dimension is d_in·d_out by construction");
        let cp = eigh(&self.choi).lambda_min() >= -tol;
        let eye = HermitianOperator::identity(self.d_in);
        let tp = tr_b.matrix().max_abs_diff(eye.matrix()) <= tol;
        let tni = eye
            .sub(&tr_b)
            .map(|gap| eigh(&gap).lambda_min() >= -tol)
            .unwrap_or(false);
        let factor = self.choi.trace() / self.d_in as f64;
        let proportional_tp = tr_b.matrix().max_abs_diff(eye.scale(factor).matrix()) <= tol;
        Classification {
            hermiticity_preserving: true,
            cp,
            tp,
            tni,
            proportional_tp,
            factor,
            tolerance: tol,
        }
    }
}

/// Choi operator of `second ∘ first`, via the transfer-matrix product.
pub fn compose(second: &LinearMapRep, first: &LinearMapRep) -> Result<LinearMapRep> {
    if first.d_out() != second.d_in() {
        return Err(Error::Dimension(format!(
            "cannot compose: first map outputs dim {}, second expects {}",
            first.d_out(),
            second.d_in()
        )));
    }
    let t = second.transfer_matrix().mul(&first.transfer_matrix());
    LinearMapRep::from_transfer(&t, first.d_in(), second.d_out())
}

/// Tensor product `a ⊗ b`, reindexed to the global `(A₁A₂) ⊗ (B₁B₂)`
/// convention.
pub fn tensor(a: &LinearMapRep, b: &LinearMapRep) -> LinearMapRep {
    let (da1, db1) = (a.d_in(), a.d_out());
    let (da2, db2) = (b.d_in(), b.d_out());
    let d_in = da1 * da2;
    let d_out = db1 * db2;
    let n = d_in * d_out;
    let mat = ComplexMatrix::from_fn(n, n, |r, c| {
        let (ga, gb) = (r / d_out, r % d_out);
        let (a1, a2) = (ga / da2, ga % da2);
        let (b1, b2) = (gb / db2, gb % db2);
        let (gap, gbp) = (c / d_out, c % d_out);
        let (a1p, a2p) = (gap / da2, gap % da2);
        let (b1p, b2p) = (gbp / db2, gbp % db2);
        a.choi().at(a1 * db1 + b1, a1p * db1 + b1p) * b.choi().at(a2 * db2 + b2, a2p * db2 + b2p)
    });
    let choi = HermitianOperator::new(mat)
        .expect("entrywise products of Hermitian Choi operators stay Hermitian");
    LinearMapRep { d_in, d_out, choi }
}
