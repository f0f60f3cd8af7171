//! Conic-program builders for the channel-distance measures.
//!
//! Every measure in this crate is evaluated by compiling *two* independent
//! cone programs — the defining minimisation and its Lagrangian dual — and
//! cross-checking their optimal values. This module contains the shared
//! builder that lowers matrix variables and operator equalities into the
//! real symmetric standard form consumed by [`crate::sdp::solve`], plus one
//! constructor per program.
//!
//! Lowering conventions:
//!
//! - A complex Hermitian variable of dimension `n` becomes one real PSD (or
//!   free) block of side `2n` holding the realified matrix
//!   `[[Re X, -Im X], [Im X, Re X]]` in `svec` packing. Realification
//!   doubles traces and inner products, so every compiled row and objective
//!   carries a uniform factor of two that the builder accounts for.
//! - An operator equality `Σ_k c_k · op_k(X_k) + Σ_j s_j C_j = R` over
//!   Hermitian matrices of dimension `m` is expanded into `m²` scalar rows,
//!   one per element `B` of an orthonormal Hermitian basis: the column block
//!   of `X_k` receives `c_k · svec(realify(op_k†(B)))`, the column of the
//!   scalar `s_j` receives `2⟨B, C_j⟩`, and the right-hand side is `2⟨B, R⟩`.
//! - Objectives accumulate `svec(realify(G))` for matrix terms `⟨G, X⟩` and
//!   doubled coefficients for scalar terms; the compiled program records an
//!   `objective_scale` of `±1/2` so that reported values undo the doubling
//!   (and the sign flip used to express maximisations as minimisations).

use crate::linalg::{hs_inner, partial_trace, HermitianOperator, Subsystem};
use crate::sdp::{
    extract_hermitian, herm_basis, smat, svec_len, svec_of_herm, Block, ConeProgram, Solution,
    SymMatrix,
};

/// Handle to a Hermitian matrix variable registered with a [`Builder`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct MatVar(usize);

/// Handle to a nonnegative scalar variable registered with a [`Builder`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScalarVar(usize);

/// How a matrix variable enters an operator equality.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Embed {
    /// The variable lives in the equality space itself.
    Id,
    /// The variable lives on `A ⊗ B` and enters as `Tr_B X`; the equality
    /// space is the `A` factor.
    TraceB {
        /// Dimension of the traced-out `B` factor.
        d_b: usize,
    },
    /// The variable lives on `A` and enters as `X ⊗ 1_B`; the equality
    /// space is `A ⊗ B`.
    KronIdB {
        /// Dimension of the adjoined `B` factor.
        d_b: usize,
    },
}

impl Embed {
    /// Image of a Hermitian-basis element under the adjoint of the
    /// embedding, i.e. the operator `G` with `⟨B, op(X)⟩ = ⟨G, X⟩`.
    fn adjoint_image(&self, basis_elem: &HermitianOperator, var_dim: usize) -> HermitianOperator {
        match *self {
            Embed::Id => {
                debug_assert_eq!(basis_elem.dim(), var_dim);
                basis_elem.clone()
            }
            Embed::TraceB { d_b } => {
                debug_assert_eq!(basis_elem.dim() * d_b, var_dim);
                basis_elem.kron(&HermitianOperator::identity(d_b))
            }
            Embed::KronIdB { d_b } => {
                debug_assert_eq!(basis_elem.dim(), var_dim * d_b);
                partial_trace(basis_elem, var_dim, d_b, Subsystem::A)
                    .expect("embedding dimensions validated at registration")
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct VarInfo {
    offset: usize,
    len: usize,
    /// Complex dimension for matrix variables, `0` for scalars.
    dim: usize,
}

/// Incremental builder translating matrix-variable programs into the
/// solver's standard form. Variables must all be registered before the
/// first constraint or objective is added, so that column offsets are fixed.
#[derive(Debug, Default)]
pub(crate) struct Builder {
    vars: Vec<VarInfo>,
    blocks: Vec<Block>,
    width: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    objective: Option<Vec<f64>>,
    objective_scale: f64,
    sealed: bool,
}

impl Builder {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    fn register(&mut self, block: Block, dim: usize) -> usize {
        assert!(
            !self.sealed,
            "all variables must be registered before constraints"
        );
        let len = block.len();
        let offset = self.width;
        self.blocks.push(block);
        self.vars.push(VarInfo { offset, len, dim });
        self.width += len;
        self.vars.len() - 1
    }

    /// Register a PSD Hermitian matrix variable of complex dimension `dim`.
    pub(crate) fn psd_matrix(&mut self, dim: usize) -> MatVar {
        MatVar(self.register(Block::Psd(2 * dim), dim))
    }

    /// Register an unconstrained Hermitian matrix variable.
    pub(crate) fn free_matrix(&mut self, dim: usize) -> MatVar {
        MatVar(self.register(Block::Free(svec_len(2 * dim)), dim))
    }

    /// Register a nonnegative scalar variable.
    pub(crate) fn nonneg_scalar(&mut self) -> ScalarVar {
        ScalarVar(self.register(Block::NonNeg(1), 0))
    }

    fn accumulate_matrix(&self, row: &mut [f64], var: MatVar, coeff: f64, g: &HermitianOperator) {
        let info = self.vars[var.0];
        assert_eq!(g.dim(), info.dim, "matrix coefficient dimension mismatch");
        let coords = svec_of_herm(g);
        let dst = &mut row[info.offset..info.offset + info.len];
        for (d, c) in dst.iter_mut().zip(coords) {
            *d += coeff * c;
        }
    }

    /// Add the operator equality
    /// `Σ_k coeff_k · op_k(X_k) + Σ_j s_j · C_j = rhs`.
    pub(crate) fn matrix_eq(
        &mut self,
        terms: &[(MatVar, f64, Embed)],
        scalars: &[(ScalarVar, &HermitianOperator)],
        rhs: &HermitianOperator,
    ) {
        self.sealed = true;
        for basis_elem in herm_basis(rhs.dim()) {
            let mut row = vec![0.0; self.width];
            for &(var, coeff, embed) in terms {
                let image = embed.adjoint_image(&basis_elem, self.vars[var.0].dim);
                self.accumulate_matrix(&mut row, var, coeff, &image);
            }
            for &(svar, c_op) in scalars {
                row[self.vars[svar.0].offset] +=
                    2.0 * hs_inner(&basis_elem, c_op).expect("scalar coefficient dimension");
            }
            self.rhs
                .push(2.0 * hs_inner(&basis_elem, rhs).expect("rhs dimension"));
            self.rows.push(row);
        }
    }

    /// Add the scalar equality `Σ_k ⟨G_k, X_k⟩ + Σ_j a_j s_j = rhs`.
    pub(crate) fn scalar_eq(
        &mut self,
        mats: &[(MatVar, &HermitianOperator)],
        scalars: &[(ScalarVar, f64)],
        rhs: f64,
    ) {
        self.sealed = true;
        let mut row = vec![0.0; self.width];
        for &(var, g) in mats {
            self.accumulate_matrix(&mut row, var, 1.0, g);
        }
        for &(svar, a) in scalars {
            row[self.vars[svar.0].offset] += 2.0 * a;
        }
        self.rhs.push(2.0 * rhs);
        self.rows.push(row);
    }

    fn set_objective(
        &mut self,
        mats: &[(MatVar, &HermitianOperator)],
        scalars: &[(ScalarVar, f64)],
        sign: f64,
    ) {
        self.sealed = true;
        assert!(self.objective.is_none(), "objective set twice");
        let mut c = vec![0.0; self.width];
        for &(var, g) in mats {
            self.accumulate_matrix(&mut c, var, sign, g);
        }
        for &(svar, a) in scalars {
            c[self.vars[svar.0].offset] += 2.0 * sign * a;
        }
        self.objective = Some(c);
        self.objective_scale = 0.5 * sign;
    }

    /// Minimise `Σ_k ⟨G_k, X_k⟩ + Σ_j a_j s_j`.
    pub(crate) fn minimize(
        &mut self,
        mats: &[(MatVar, &HermitianOperator)],
        scalars: &[(ScalarVar, f64)],
    ) {
        self.set_objective(mats, scalars, 1.0);
    }

    /// Maximise `Σ_k ⟨G_k, X_k⟩ + Σ_j a_j s_j`.
    pub(crate) fn maximize(
        &mut self,
        mats: &[(MatVar, &HermitianOperator)],
        scalars: &[(ScalarVar, f64)],
    ) {
        self.set_objective(mats, scalars, -1.0);
    }

    /// Finish the program.
    pub(crate) fn build(self) -> CompiledProgram {
        let objective = self.objective.expect("objective must be set");
        let mut constraint_matrix = Vec::with_capacity(self.rows.len() * self.width);
        for row in &self.rows {
            constraint_matrix.extend_from_slice(row);
        }
        CompiledProgram {
            program: ConeProgram {
                objective,
                constraint_matrix,
                rhs: self.rhs,
                blocks: self.blocks,
            },
            vars: self.vars,
            objective_scale: self.objective_scale,
        }
    }
}

/// A lowered program together with the metadata needed to interpret
/// solutions in terms of the original Hermitian variables.
#[derive(Debug, Clone)]
pub(crate) struct CompiledProgram {
    pub(crate) program: ConeProgram,
    vars: Vec<VarInfo>,
    objective_scale: f64,
}

impl CompiledProgram {
    /// Optimal value of the original program given a solver solution.
    pub(crate) fn value(&self, sol: &Solution) -> f64 {
        self.objective_scale * sol.primal_objective
    }

    /// Decode a Hermitian matrix variable from a solution, averaging away
    /// any component outside the realified-Hermitian subspace.
    pub(crate) fn matrix_of(&self, sol: &Solution, var: MatVar) -> HermitianOperator {
        let info = self.vars[var.0];
        let side = 2 * info.dim;
        let packed = &sol.x[info.offset..info.offset + info.len];
        extract_hermitian(&SymMatrix::new(side, smat(side, packed)))
    }

    /// Decode a scalar variable from a solution.
    pub(crate) fn scalar_of(&self, sol: &Solution, var: ScalarVar) -> f64 {
        sol.x[self.vars[var.0].offset]
    }
}

fn neg_identity(dim: usize) -> HermitianOperator {
    HermitianOperator::identity(dim).scale(-1.0)
}

/// `min μ  s.t.  M₊ − M₋ = J,  Tr_B M₊ + Tr_B M₋ + S = μ 1_A,  M±, S ⪰ 0`.
///
/// This is the diamond norm of the Hermiticity-preserving map with Choi
/// operator `J`.
pub(crate) struct DiamondPrimal {
    pub(crate) prog: CompiledProgram,
    pub(crate) m_plus: MatVar,
    pub(crate) slack: MatVar,
    pub(crate) mu: ScalarVar,
}

pub(crate) fn diamond_primal(j: &HermitianOperator, d_a: usize, d_b: usize) -> DiamondPrimal {
    let n = d_a * d_b;
    let mut b = Builder::new();
    let m_plus = b.psd_matrix(n);
    let m_minus = b.psd_matrix(n);
    let slack = b.psd_matrix(d_a);
    let mu = b.nonneg_scalar();
    let neg_id = neg_identity(d_a);
    b.matrix_eq(
        &[(m_plus, 1.0, Embed::Id), (m_minus, -1.0, Embed::Id)],
        &[],
        j,
    );
    b.matrix_eq(
        &[
            (m_plus, 1.0, Embed::TraceB { d_b }),
            (m_minus, 1.0, Embed::TraceB { d_b }),
            (slack, 1.0, Embed::Id),
        ],
        &[(mu, &neg_id)],
        &HermitianOperator::zero(d_a),
    );
    b.minimize(&[], &[(mu, 1.0)]);
    DiamondPrimal {
        prog: b.build(),
        m_plus,
        slack,
        mu,
    }
}

/// `max ⟨J, Q⟩ − ⟨Tr_B J, ρ⟩  s.t.  P + Q = 2 ρ ⊗ 1_B,  Tr ρ ≤ 1,  P, Q, ρ ⪰ 0`.
///
/// Lagrangian dual of [`diamond_primal`]; the optimal witness is
/// `W = Q − ρ ⊗ 1_B` with `−ρ ⊗ 1 ⪯ W ⪯ ρ ⊗ 1` and value `⟨J, W⟩`.
pub(crate) struct DiamondDual {
    pub(crate) prog: CompiledProgram,
    pub(crate) q: MatVar,
    pub(crate) rho: MatVar,
}

pub(crate) fn diamond_dual(
    j: &HermitianOperator,
    tr_b_j: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> DiamondDual {
    let n = d_a * d_b;
    let mut b = Builder::new();
    let p = b.psd_matrix(n);
    let q = b.psd_matrix(n);
    let rho = b.psd_matrix(d_a);
    let slack = b.nonneg_scalar();
    let id_a = HermitianOperator::identity(d_a);
    b.matrix_eq(
        &[
            (p, 1.0, Embed::Id),
            (q, 1.0, Embed::Id),
            (rho, -2.0, Embed::KronIdB { d_b }),
        ],
        &[],
        &HermitianOperator::zero(n),
    );
    b.scalar_eq(&[(rho, &id_a)], &[(slack, 1.0)], 1.0);
    let neg_marginal = tr_b_j.scale(-1.0);
    b.maximize(&[(q, j), (rho, &neg_marginal)], &[]);
    DiamondDual {
        prog: b.build(),
        q,
        rho,
    }
}

/// `min λ₊ + λ₋  s.t.  M₊ − M₋ = J,  Tr_B M± + S± = λ± 1_A,  M±, S± ⪰ 0`.
///
/// Base norm with respect to completely positive trace-non-increasing maps:
/// the cheapest decomposition `Φ = λ₊ Λ₊ − λ₋ Λ₋` with `Λ±` CPTNI.
pub(crate) struct BasePrimal {
    pub(crate) prog: CompiledProgram,
    pub(crate) m_plus: MatVar,
    pub(crate) s_plus: MatVar,
    pub(crate) s_minus: MatVar,
    pub(crate) lambda_plus: ScalarVar,
    pub(crate) lambda_minus: ScalarVar,
}

pub(crate) fn base_primal(j: &HermitianOperator, d_a: usize, d_b: usize) -> BasePrimal {
    let n = d_a * d_b;
    let mut b = Builder::new();
    let m_plus = b.psd_matrix(n);
    let m_minus = b.psd_matrix(n);
    let s_plus = b.psd_matrix(d_a);
    let s_minus = b.psd_matrix(d_a);
    let lambda_plus = b.nonneg_scalar();
    let lambda_minus = b.nonneg_scalar();
    let neg_id = neg_identity(d_a);
    let zero_a = HermitianOperator::zero(d_a);
    b.matrix_eq(
        &[(m_plus, 1.0, Embed::Id), (m_minus, -1.0, Embed::Id)],
        &[],
        j,
    );
    b.matrix_eq(
        &[
            (m_plus, 1.0, Embed::TraceB { d_b }),
            (s_plus, 1.0, Embed::Id),
        ],
        &[(lambda_plus, &neg_id)],
        &zero_a,
    );
    b.matrix_eq(
        &[
            (m_minus, 1.0, Embed::TraceB { d_b }),
            (s_minus, 1.0, Embed::Id),
        ],
        &[(lambda_minus, &neg_id)],
        &zero_a,
    );
    b.minimize(&[], &[(lambda_plus, 1.0), (lambda_minus, 1.0)]);
    BasePrimal {
        prog: b.build(),
        m_plus,
        s_plus,
        s_minus,
        lambda_plus,
        lambda_minus,
    }
}

/// `max ⟨J, Q⟩ − ⟨Tr_B J, ρ⟩  s.t.  P + Q = (ρ + σ) ⊗ 1_B,  Tr ρ ≤ 1,
/// Tr σ ≤ 1,  P, Q, ρ, σ ⪰ 0`.
///
/// Dual of [`base_primal`]; the witness is `W = Q − ρ ⊗ 1_B` with
/// `−ρ ⊗ 1 ⪯ W ⪯ σ ⊗ 1` and value `⟨J, W⟩`.
pub(crate) struct BaseDual {
    pub(crate) prog: CompiledProgram,
    pub(crate) q: MatVar,
    pub(crate) rho: MatVar,
    pub(crate) sigma: MatVar,
}

pub(crate) fn base_dual(
    j: &HermitianOperator,
    tr_b_j: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> BaseDual {
    let n = d_a * d_b;
    let mut b = Builder::new();
    let p = b.psd_matrix(n);
    let q = b.psd_matrix(n);
    let rho = b.psd_matrix(d_a);
    let sigma = b.psd_matrix(d_a);
    let slack_rho = b.nonneg_scalar();
    let slack_sigma = b.nonneg_scalar();
    let id_a = HermitianOperator::identity(d_a);
    b.matrix_eq(
        &[
            (p, 1.0, Embed::Id),
            (q, 1.0, Embed::Id),
            (rho, -1.0, Embed::KronIdB { d_b }),
            (sigma, -1.0, Embed::KronIdB { d_b }),
        ],
        &[],
        &HermitianOperator::zero(n),
    );
    b.scalar_eq(&[(rho, &id_a)], &[(slack_rho, 1.0)], 1.0);
    b.scalar_eq(&[(sigma, &id_a)], &[(slack_sigma, 1.0)], 1.0);
    let neg_marginal = tr_b_j.scale(-1.0);
    b.maximize(&[(q, j), (rho, &neg_marginal)], &[]);
    BaseDual {
        prog: b.build(),
        q,
        rho,
        sigma,
    }
}

/// `min λ  s.t.  M₊ − M₋ = J,  Tr_B M₊ + S₊ = (1 + λ) 1_A,
/// Tr_B M₋ + S₋ = λ 1_A,  M±, S± ⪰ 0,  λ ≥ 0`.
///
/// Robustness against CPTNI noise: the least `λ` such that
/// `(Φ + λ Λ) / (1 + λ)` is CPTNI for some CPTNI `Λ`.
pub(crate) struct RobustnessPrimal {
    pub(crate) prog: CompiledProgram,
    pub(crate) m_plus: MatVar,
    pub(crate) s_plus: MatVar,
    pub(crate) s_minus: MatVar,
    pub(crate) lambda: ScalarVar,
}

pub(crate) fn robustness_primal(j: &HermitianOperator, d_a: usize, d_b: usize) -> RobustnessPrimal {
    let n = d_a * d_b;
    let mut b = Builder::new();
    let m_plus = b.psd_matrix(n);
    let m_minus = b.psd_matrix(n);
    let s_plus = b.psd_matrix(d_a);
    let s_minus = b.psd_matrix(d_a);
    let lambda = b.nonneg_scalar();
    let neg_id = neg_identity(d_a);
    b.matrix_eq(
        &[(m_plus, 1.0, Embed::Id), (m_minus, -1.0, Embed::Id)],
        &[],
        j,
    );
    b.matrix_eq(
        &[
            (m_plus, 1.0, Embed::TraceB { d_b }),
            (s_plus, 1.0, Embed::Id),
        ],
        &[(lambda, &neg_id)],
        &HermitianOperator::identity(d_a),
    );
    b.matrix_eq(
        &[
            (m_minus, 1.0, Embed::TraceB { d_b }),
            (s_minus, 1.0, Embed::Id),
        ],
        &[(lambda, &neg_id)],
        &HermitianOperator::zero(d_a),
    );
    b.minimize(&[], &[(lambda, 1.0)]);
    RobustnessPrimal {
        prog: b.build(),
        m_plus,
        s_plus,
        s_minus,
        lambda,
    }
}

/// `max ⟨J, Q⟩ − ⟨Tr_B J, X⟩ − Tr Y  s.t.  P + Q = (X + Y) ⊗ 1_B,
/// Tr X + Tr Y ≤ 1,  P, Q, X, Y ⪰ 0`.
///
/// Dual of [`robustness_primal`]; the witness is `W = Q − X ⊗ 1_B` with
/// `−X ⊗ 1 ⪯ W ⪯ Y ⊗ 1` and value `⟨J, W⟩ − Tr Y`.
pub(crate) struct RobustnessDual {
    pub(crate) prog: CompiledProgram,
    pub(crate) q: MatVar,
    pub(crate) x: MatVar,
    pub(crate) y: MatVar,
}

pub(crate) fn robustness_dual(
    j: &HermitianOperator,
    tr_b_j: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> RobustnessDual {
    let n = d_a * d_b;
    let mut b = Builder::new();
    let p = b.psd_matrix(n);
    let q = b.psd_matrix(n);
    let x = b.psd_matrix(d_a);
    let y = b.psd_matrix(d_a);
    let slack = b.nonneg_scalar();
    let id_a = HermitianOperator::identity(d_a);
    b.matrix_eq(
        &[
            (p, 1.0, Embed::Id),
            (q, 1.0, Embed::Id),
            (x, -1.0, Embed::KronIdB { d_b }),
            (y, -1.0, Embed::KronIdB { d_b }),
        ],
        &[],
        &HermitianOperator::zero(n),
    );
    b.scalar_eq(&[(x, &id_a), (y, &id_a)], &[(slack, 1.0)], 1.0);
    let neg_marginal = tr_b_j.scale(-1.0);
    let neg_id = neg_identity(d_a);
    b.maximize(&[(q, j), (x, &neg_marginal), (y, &neg_id)], &[]);
    RobustnessDual {
        prog: b.build(),
        q,
        x,
        y,
    }
}

/// `min λ  s.t.  M − N = J,  Tr_B M + S = (1 + λ) 1_A,  M, N, S ⪰ 0,  λ ≥ 0`.
///
/// One-sided robustness: the least `λ` such that `J ⪯ (1 + λ) J_Λ` for some
/// CPTNI map `Λ`.
pub(crate) struct UpperRobustnessPrimal {
    pub(crate) prog: CompiledProgram,
    pub(crate) m: MatVar,
    pub(crate) slack: MatVar,
    pub(crate) lambda: ScalarVar,
}

pub(crate) fn upper_robustness_primal(
    j: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> UpperRobustnessPrimal {
    let dim = d_a * d_b;
    let mut b = Builder::new();
    let m = b.psd_matrix(dim);
    let n = b.psd_matrix(dim);
    let slack = b.psd_matrix(d_a);
    let lambda = b.nonneg_scalar();
    let neg_id = neg_identity(d_a);
    b.matrix_eq(&[(m, 1.0, Embed::Id), (n, -1.0, Embed::Id)], &[], j);
    b.matrix_eq(
        &[(m, 1.0, Embed::TraceB { d_b }), (slack, 1.0, Embed::Id)],
        &[(lambda, &neg_id)],
        &HermitianOperator::identity(d_a),
    );
    b.minimize(&[], &[(lambda, 1.0)]);
    UpperRobustnessPrimal {
        prog: b.build(),
        m,
        slack,
        lambda,
    }
}

/// `max ⟨J, W⟩ − Tr Z  s.t.  W + P = Z ⊗ 1_B,  Tr Z ≤ 1,  W, P, Z ⪰ 0`.
///
/// Dual of [`upper_robustness_primal`]: `0 ⪯ W ⪯ Z ⊗ 1_B` with `Z` a
/// subnormalised state on the input factor.
pub(crate) struct UpperRobustnessDual {
    pub(crate) prog: CompiledProgram,
    pub(crate) w: MatVar,
    pub(crate) z: MatVar,
}

pub(crate) fn upper_robustness_dual(
    j: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> UpperRobustnessDual {
    let dim = d_a * d_b;
    let mut b = Builder::new();
    let w = b.psd_matrix(dim);
    let p = b.psd_matrix(dim);
    let z = b.psd_matrix(d_a);
    let slack = b.nonneg_scalar();
    let id_a = HermitianOperator::identity(d_a);
    b.matrix_eq(
        &[
            (w, 1.0, Embed::Id),
            (p, 1.0, Embed::Id),
            (z, -1.0, Embed::KronIdB { d_b }),
        ],
        &[],
        &HermitianOperator::zero(dim),
    );
    b.scalar_eq(&[(z, &id_a)], &[(slack, 1.0)], 1.0);
    let neg_id = neg_identity(d_a);
    b.maximize(&[(w, j), (z, &neg_id)], &[]);
    UpperRobustnessDual {
        prog: b.build(),
        w,
        z,
    }
}

/// `min λ  s.t.  G − M = J,  Tr_B M + S = λ 1_A,  M, G, S ⪰ 0,  λ ≥ 0`.
///
/// Complete-positivity restoration: the least `λ` such that `Φ + λ Λ` is
/// completely positive for some CPTNI map `Λ`.
pub(crate) struct LowerRobustnessPrimal {
    pub(crate) prog: CompiledProgram,
    pub(crate) m: MatVar,
    pub(crate) slack: MatVar,
    pub(crate) lambda: ScalarVar,
}

pub(crate) fn lower_robustness_primal(
    j: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> LowerRobustnessPrimal {
    let dim = d_a * d_b;
    let mut b = Builder::new();
    let m = b.psd_matrix(dim);
    let g = b.psd_matrix(dim);
    let slack = b.psd_matrix(d_a);
    let lambda = b.nonneg_scalar();
    let neg_id = neg_identity(d_a);
    b.matrix_eq(&[(g, 1.0, Embed::Id), (m, -1.0, Embed::Id)], &[], j);
    b.matrix_eq(
        &[(m, 1.0, Embed::TraceB { d_b }), (slack, 1.0, Embed::Id)],
        &[(lambda, &neg_id)],
        &HermitianOperator::zero(d_a),
    );
    b.minimize(&[], &[(lambda, 1.0)]);
    LowerRobustnessPrimal {
        prog: b.build(),
        m,
        slack,
        lambda,
    }
}

/// `max ⟨J, W⟩ − ⟨Tr_B J, Z⟩  s.t.  W + P = Z ⊗ 1_B,  Tr Z ≤ 1,  W, P, Z ⪰ 0`.
///
/// Dual of [`lower_robustness_primal`]: `0 ⪯ W ⪯ Z ⊗ 1_B` and the value is
/// `⟨J, W − Z ⊗ 1_B⟩`.
pub(crate) struct LowerRobustnessDual {
    pub(crate) prog: CompiledProgram,
    pub(crate) w: MatVar,
    pub(crate) z: MatVar,
}

pub(crate) fn lower_robustness_dual(
    j: &HermitianOperator,
    tr_b_j: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> LowerRobustnessDual {
    let dim = d_a * d_b;
    let mut b = Builder::new();
    let w = b.psd_matrix(dim);
    let p = b.psd_matrix(dim);
    let z = b.psd_matrix(d_a);
    let slack = b.nonneg_scalar();
    let id_a = HermitianOperator::identity(d_a);
    b.matrix_eq(
        &[
            (w, 1.0, Embed::Id),
            (p, 1.0, Embed::Id),
            (z, -1.0, Embed::KronIdB { d_b }),
        ],
        &[],
        &HermitianOperator::zero(dim),
    );
    b.scalar_eq(&[(z, &id_a)], &[(slack, 1.0)], 1.0);
    let neg_marginal = tr_b_j.scale(-1.0);
    b.maximize(&[(w, j), (z, &neg_marginal)], &[]);
    LowerRobustnessDual {
        prog: b.build(),
        w,
        z,
    }
}

/// `max ⟨W, J⟩  s.t.  Tr_B J = 1_A,  J ⪰ 0` — the best payoff any quantum
/// channel can reach against the fixed game operator `W`.
pub(crate) struct BestChannelPrimal {
    pub(crate) prog: CompiledProgram,
    pub(crate) choi: MatVar,
}

pub(crate) fn best_channel_primal(
    w: &HermitianOperator,
    d_a: usize,
    d_b: usize,
) -> BestChannelPrimal {
    let dim = d_a * d_b;
    let mut b = Builder::new();
    let choi = b.psd_matrix(dim);
    b.matrix_eq(
        &[(choi, 1.0, Embed::TraceB { d_b })],
        &[],
        &HermitianOperator::identity(d_a),
    );
    b.maximize(&[(choi, w)], &[]);
    BestChannelPrimal {
        prog: b.build(),
        choi,
    }
}

/// `min Tr Y  s.t.  Y ⊗ 1_B − P = W,  P ⪰ 0,  Y` Hermitian.
///
/// Dual of [`best_channel_primal`]: the optimal `Y` dominates `W` after
/// tracing out the output factor.
pub(crate) struct BestChannelDual {
    pub(crate) prog: CompiledProgram,
    pub(crate) y: MatVar,
}

pub(crate) fn best_channel_dual(w: &HermitianOperator, d_a: usize, d_b: usize) -> BestChannelDual {
    let dim = d_a * d_b;
    let mut b = Builder::new();
    let y = b.free_matrix(d_a);
    let p = b.psd_matrix(dim);
    let id_a = HermitianOperator::identity(d_a);
    b.matrix_eq(
        &[(y, 1.0, Embed::KronIdB { d_b }), (p, -1.0, Embed::Id)],
        &[],
        w,
    );
    b.minimize(&[(y, &id_a)], &[]);
    BestChannelDual { prog: b.build(), y }
}
