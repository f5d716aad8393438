//! Outer iterations: the warm-started nested primal-dual method, its
//! single-inner-step special case, and plain proximal gradient.

mod baseline;
mod config;
mod nested;
mod residuals;

pub use baseline::{proximal_gradient, proximal_gradient_observed};
pub use config::{SolverConfig, StartMode};
pub use nested::{
    loris_verhoeven_step_solver, loris_verhoeven_step_solver_observed, nested_primal_dual, nested_primal_dual_observed,
};
pub use residuals::optimality_residuals;

use serde::{Deserialize, Serialize};

use crate::trace::SolveTrace;
use crate::vector::Vector;

/// Objective growth beyond this factor of the starting value counts as
/// divergence.
pub const BLOWUP_FACTOR: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    BudgetExhausted,
    Diverged,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::BudgetExhausted => "budget_exhausted",
            SolveStatus::Diverged => "diverged",
        }
    }
}

/// A primal-dual pair satisfying the optimality system, used to populate
/// the distance and Lyapunov columns of a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub u: Vector,
    pub v: Vector,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub u_final: Vector,
    /// Dual estimate paired with `u_final`: the last inner loop's final
    /// dual iterate (or the configured start before any step).
    pub v_final: Vector,
    pub outer_iterations: usize,
    pub trace: SolveTrace,
    pub status: SolveStatus,
}
