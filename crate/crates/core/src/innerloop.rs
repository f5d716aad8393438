//! Dual fixed-point iteration for `prox_{alpha h + alpha g o A}(a)`.
//!
//! With `u^k = prox_{alpha h}(a - alpha A^T v^k)` the dual iterate moves by
//! `v^{k+1} = prox_{(beta/alpha) g*}(v^k + (beta/alpha) A u^k)`; at the fixed
//! point `v`, `u = prox_{alpha h}(a - alpha A^T v)` is the composite prox.
//! Two drivers are provided: a run-to-tolerance oracle and the fixed-budget
//! averaged version used inside the outer solver.

use crate::error::{check_len, check_positive, Error, Result};
use crate::problem::SplitTerms;
use crate::proxlib::fenchel_dual_prox;
use crate::vector::Vector;

/// Dual iterate together with the most recent primal inner iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerState {
    pub v: Vector,
    pub last_u: Vector,
    pub iterations_done: usize,
}

impl InnerState {
    pub fn new(v0: Vector, primal_dim: usize) -> Self {
        InnerState {
            v: v0,
            last_u: Vector::zeros(primal_dim),
            iterations_done: 0,
        }
    }

    /// One dual update. Returns `||v^{k+1} - v^k||`.
    pub fn step(&mut self, parts: SplitTerms<'_>, a: &Vector, alpha: f64, beta: f64) -> Result<f64> {
        let u = primal_point(parts, a, alpha, &self.v)?;
        let ratio = beta / alpha;
        let shifted = self.v.add_scaled(ratio, &parts.a.apply(&u));
        let next = fenchel_dual_prox(parts.g, &shifted, ratio)?;
        let step = next.distance(&self.v);
        self.v = next;
        self.last_u = u;
        self.iterations_done += 1;
        Ok(step)
    }
}

/// `prox_{alpha h}(a - alpha A^T v)`.
pub fn primal_point(parts: SplitTerms<'_>, a: &Vector, alpha: f64, v: &Vector) -> Result<Vector> {
    parts.h.prox(&a.add_scaled(-alpha, &parts.a.adjoint(v)), alpha)
}

/// Output of the fixed-budget inner loop.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    /// `(u^1 + ... + u^{k_max}) / k_max`
    pub primal: Vector,
    /// `v^{k_max}`, the warm start for the next call.
    pub final_dual: Vector,
    /// `||v^{k_max} - v^{k_max - 1}||`
    pub last_step_norm: f64,
    /// All dual step norms, when requested.
    pub inner_trace: Option<Vec<f64>>,
}

/// Output of [`dual_fixed_point_converged`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergedDual {
    pub prox_point: Vector,
    pub dual: Vector,
    pub iterations: usize,
    /// False when `max_iter` ran out before the step dropped to `tol`.
    pub converged: bool,
    pub last_step: f64,
}

fn check_inputs(parts: SplitTerms<'_>, a: &Vector, v0: &Vector, alpha: f64) -> Result<()> {
    check_len("inner point a", parts.a.in_dim(), a.len())?;
    check_len("inner dual start", parts.a.out_dim(), v0.len())?;
    check_positive("alpha", alpha)
}

/// Runs the dual iteration until `||v^{k+1} - v^k|| <= tol`.
///
/// Requires `0 < beta < 2 / ||A||^2`, with `||A||` taken as the operator's
/// declared bound. Running out of iterations is reported through
/// [`ConvergedDual::converged`], not as an error.
pub fn dual_fixed_point_converged(
    parts: SplitTerms<'_>,
    a: &Vector,
    alpha: f64,
    beta: f64,
    v0: &Vector,
    tol: f64,
    max_iter: usize,
) -> Result<ConvergedDual> {
    check_inputs(parts, a, v0, alpha)?;
    check_positive("tol", tol)?;
    let limit = 2.0 / parts.a.norm_bound().powi(2);
    if !(beta > 0.0 && beta < limit) {
        return Err(Error::invalid(
            "beta",
            format!("standalone dual iteration needs 0 < beta < 2/||A||^2 = {limit}, got {beta}"),
        ));
    }
    let mut state = InnerState::new(v0.clone(), parts.a.in_dim());
    let mut last_step = f64::INFINITY;
    let mut converged = false;
    while state.iterations_done < max_iter {
        last_step = state.step(parts, a, alpha, beta)?;
        if !last_step.is_finite() {
            break;
        }
        if last_step <= tol {
            converged = true;
            break;
        }
    }
    let prox_point = primal_point(parts, a, alpha, &state.v)?;
    Ok(ConvergedDual {
        prox_point,
        dual: state.v,
        iterations: state.iterations_done,
        converged,
        last_step,
    })
}

/// Exactly `k_max` dual updates from `v0`, returning the average of
/// `u^1 .. u^{k_max}` (where `u^{k_max}` is one extra primal evaluation after
/// the loop) and the last dual iterate.
///
/// Only `beta > 0` is checked here; the caller enforces the regime it needs.
pub fn inner_budgeted(
    parts: SplitTerms<'_>,
    a: &Vector,
    alpha: f64,
    beta: f64,
    v0: &Vector,
    k_max: usize,
    record_trace: bool,
) -> Result<InnerResult> {
    check_inputs(parts, a, v0, alpha)?;
    check_positive("beta", beta)?;
    if k_max == 0 {
        return Err(Error::invalid("k_max", "the inner budget must be at least 1"));
    }
    let mut state = InnerState::new(v0.clone(), a.len());
    let mut sum = Vector::zeros(a.len());
    let mut trace = record_trace.then(|| Vec::with_capacity(k_max));
    let mut last_step_norm = 0.0;
    for k in 0..k_max {
        last_step_norm = state.step(parts, a, alpha, beta)?;
        // u^0 only feeds v^1; the average starts at u^1.
        if k >= 1 {
            sum.axpy(1.0, &state.last_u);
        }
        if let Some(t) = trace.as_mut() {
            t.push(last_step_norm);
        }
    }
    let last = primal_point(parts, a, alpha, &state.v)?;
    sum.axpy(1.0, &last);
    let n = k_max as f64;
    Ok(InnerResult {
        primal: sum.map(|x| x / n),
        final_dual: state.v,
        last_step_norm,
        inner_trace: trace,
    })
}
