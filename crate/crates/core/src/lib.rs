//! Matrix-free solver for `min_u f(u) + g(A u) + h(u)` with smooth `f`,
//! proximable `g`, `h` and a linear operator `A`.
//!
//! Each outer step is a proximal-gradient step whose composite prox
//! `prox_{alpha h + alpha g o A}` is approximated by a fixed number of dual
//! iterations, warm-started from the previous outer step.
//!
//! ```
//! use nestprox::{problems::make_tv_denoise_1d, SolverConfig, nested_primal_dual};
//!
//! let inst = make_tv_denoise_1d(20, 1.0, 7).unwrap();
//! let cfg = SolverConfig::new(&inst.problem, 1.0, 0.2, 3).with_max_outer(5000);
//! let out = nested_primal_dual(&inst.problem, &cfg, None).unwrap();
//! let oracle = inst.oracle_solution.unwrap();
//! assert!(out.u_final.distance(&oracle) <= 1e-5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
mod error;
pub mod innerloop;
pub mod operator;
pub mod oracle;
mod problem;
pub mod problems;
pub mod proxlib;
pub mod rng;
pub mod smooth;
pub mod solver;
mod terms;
pub mod trace;
mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use operator::{DenseMatrix, ForwardDifference, Identity, LinearOperator};
pub use problem::{CompositeProblem, SplitTerms};
pub use solver::{
    loris_verhoeven_step_solver, nested_primal_dual, optimality_residuals, proximal_gradient, Reference, SolveOutcome,
    SolveStatus, SolverConfig, StartMode,
};
pub use terms::{ProximableTerm, SmoothTerm};
pub use trace::{SolveTrace, TraceRow};
pub use vector::Vector;
