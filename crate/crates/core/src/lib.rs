//! Exact minimal projections in `l1^N` and their transfer to `C[0,1]`.
//!
//! The crate computes relative projection constants `lambda(V, l1^N)` with
//! an exact rational simplex, checks duplication invariance, transfers
//! minimal projections to piecewise-constant subspaces of `L1[0,1]` inside
//! `M[0,1] = C[0,1]*`, and assembles duality-ladder reports
//! `lambda(Y, C[0,1]) = 1 + lambda(W, M[0,1])` for annihilators `Y = W^⊥`.
//!
//! Module map:
//!
//! * [`exact`]: rationals, binomials, matrices, fraction-free rank and solve.
//! * [`lp`]: exact minimax linear programming and optimal-face probing.
//! * [`minproj`]: minimal projections onto subspaces of `l1^N`.
//! * [`duplication`]: the duplication operator and block maps.
//! * [`families`]: closed-form projection constants, Rademacher
//!   combinatorics, parameter inversion and the family registry.
//! * [`continuum`]: piecewise-constant copies, coding families, the
//!   weak*-obstruction, smoothing, the duality ladder, attainment checks.
//! * [`shell`]: problem files, the result store and report emission.

pub mod continuum;
pub mod duplication;
pub mod error;
pub mod exact;
pub mod families;
pub mod lp;
pub mod minproj;
pub mod shell;

pub use error::{Error, Result};
pub use exact::{binom, mat_rank, mat_solve, FloatMirror, Matrix, Rational};
pub use minproj::{
    build_problem, kadec_snobar_check, projection_norm, solve_min_projection, MinProjResult,
    ProjectionL1, SubspaceL1,
};
