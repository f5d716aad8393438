use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::problem::CompositeProblem;
use crate::vector::Vector;

/// Where each inner loop starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMode {
    /// `v_n^0 = v_{n-1}^{k_max}`
    Warm,
    /// `v_n^0 = v_0^0` for every `n`.
    Cold,
}

impl std::str::FromStr for StartMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "warm" => Ok(StartMode::Warm),
            "cold" => Ok(StartMode::Cold),
            other => Err(Error::invalid(
                "start_mode",
                format!("expected warm or cold, got {other:?}"),
            )),
        }
    }
}

impl std::fmt::Display for StartMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StartMode::Warm => "warm",
            StartMode::Cold => "cold",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Primal step, `0 < alpha < 2 / L`.
    pub alpha: f64,
    /// Dual step, `0 < beta < 1 / ||A||^2`.
    pub beta: f64,
    /// Inner iterations per outer step, at least 1.
    pub k_max: usize,
    pub start_mode: StartMode,
    pub max_outer: usize,
    /// Stop once both optimality residuals are at most this; 0 runs the
    /// full budget unless an exact fixed point is hit.
    pub outer_tol: f64,
    pub u0: Vector,
    pub v00: Vector,
    /// Record every `trace_every`-th iteration; the first and last are
    /// always recorded.
    pub trace_every: usize,
    /// Permits step sizes outside the convergence conditions and cold starts.
    pub allow_unsafe: bool,
}

impl SolverConfig {
    /// Zero starting points, warm start, 1000 outer iterations.
    pub fn new(problem: &CompositeProblem, alpha: f64, beta: f64, k_max: usize) -> Self {
        SolverConfig {
            alpha,
            beta,
            k_max,
            start_mode: StartMode::Warm,
            max_outer: 1000,
            outer_tol: 0.0,
            u0: Vector::zeros(problem.dim()),
            v00: Vector::zeros(problem.dual_dim()),
            trace_every: 1,
            allow_unsafe: false,
        }
    }

    pub fn with_start_mode(mut self, mode: StartMode) -> Self {
        self.start_mode = mode;
        self
    }

    pub fn with_max_outer(mut self, max_outer: usize) -> Self {
        self.max_outer = max_outer;
        self
    }

    pub fn with_outer_tol(mut self, tol: f64) -> Self {
        self.outer_tol = tol;
        self
    }

    pub fn with_trace_every(mut self, every: usize) -> Self {
        self.trace_every = every;
        self
    }

    pub fn with_start(mut self, u0: Vector, v00: Vector) -> Self {
        self.u0 = u0;
        self.v00 = v00;
        self
    }

    pub fn unsafe_experiment(mut self) -> Self {
        self.allow_unsafe = true;
        self
    }

    /// Checks the configuration against the problem's declared `L` and
    /// `||A||` bound.
    pub fn validate(&self, problem: &CompositeProblem) -> Result<()> {
        check_len("u0", problem.dim(), self.u0.len())?;
        check_len("v00", problem.dual_dim(), self.v00.len())?;
        if !self.u0.is_finite() || !self.v00.is_finite() {
            return Err(Error::invalid("start point", "must be finite"));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be positive, got {}", self.beta)));
        }
        if self.k_max == 0 {
            return Err(Error::invalid("k_max", "must be at least 1"));
        }
        if self.trace_every == 0 {
            return Err(Error::invalid("trace_every", "must be at least 1"));
        }
        if !(self.outer_tol >= 0.0) {
            return Err(Error::invalid("outer_tol", "must be >= 0"));
        }
        if self.allow_unsafe {
            return Ok(());
        }
        let alpha_max = 2.0 / problem.lipschitz();
        if self.alpha >= alpha_max {
            return Err(Error::invalid(
                "alpha",
                format!(
                    "needs alpha < 2/L = {alpha_max}, got {} (pass the unsafe flag to override)",
                    self.alpha
                ),
            ));
        }
        let beta_max = 1.0 / problem.norm_bound().powi(2);
        if self.beta >= beta_max {
            return Err(Error::invalid(
                "beta",
                format!(
                    "needs beta < 1/||A||^2 = {beta_max}, got {} (pass the unsafe flag to override)",
                    self.beta
                ),
            ));
        }
        if self.start_mode == StartMode::Cold {
            return Err(Error::invalid(
                "start_mode",
                "cold start carries no convergence guarantee (pass the unsafe flag to override)",
            ));
        }
        Ok(())
    }
}
