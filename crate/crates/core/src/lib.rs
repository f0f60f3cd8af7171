//! Measures of non-physicality for linear maps on quantum states.
//!
//! `mapnorm` quantifies how far a Hermiticity-preserving linear map is from
//! being a physical quantum channel (a completely positive trace-preserving
//! map). The toolkit is organized bottom-up:
//!
//! - [`linalg`]: dense complex-Hermitian linear algebra (eigendecompositions,
//!   partial traces/transposes, trace and operator norms).
//! - [`sdp`]: a standard-form cone-program model with a primal-dual
//!   interior-point solver and independent certificate verification.
//! - [`channels`]: Choi-operator representation of linear maps, a library of
//!   builtin channels and their inverses, classification, composition,
//!   tensoring and inversion.
//! - [`measures`]: the robustness measures R, R', R'', the diamond and base
//!   norms (each solved as an independently compiled primal/dual pair and
//!   cross-checked), structural physical approximations, closed-form bounds,
//!   explicit channel-simulation plans, and discrimination games.
//! - [`nonmarkov`]: divisibility diagnostics for time-dependent channel
//!   families via the right derivative of the propagator's diamond norm.
//!
//! # Conventions
//!
//! A map `Φ: L(A) → L(B)` is stored through its Choi operator
//! `J_Φ = (id_A ⊗ Φ)|Ω⟩⟨Ω|` with the *unnormalized* maximally entangled
//! vector `|Ω⟩ = Σ_i |ii⟩`. Bipartite spaces are ordered `A ⊗ B` and indexed
//! row-major as `a·d_B + b`. Under this convention the map is
//! Hermiticity-preserving iff `J_Φ` is Hermitian, completely positive iff
//! `J_Φ ⪰ 0`, and trace-preserving iff `Tr_B J_Φ = 1_A`.
//!
//! # Parallelism
//!
//! Batch evaluations (measure suites, grid oracles, divisibility grids) can
//! run data-parallel through rayon when the default `parallel` feature is
//! enabled; a runtime [`par::Parallelism`] switch selects between the two
//! code paths so both can be exercised and benchmarked from the same build.
//! Outputs are assembled in deterministic order either way.

pub mod channels;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod nonmarkov;
pub mod par;
pub mod sdp;

pub use error::{Error, Result};
