use crate::diagnostics::lyapunov;
use crate::error::{check_len, Error, Result};
use crate::innerloop::inner_budgeted;
use crate::problem::CompositeProblem;
use crate::proxlib::fenchel_dual_prox;
use crate::trace::{SolveTrace, TraceRow};
use crate::vector::Vector;

use super::{optimality_residuals, Reference, SolveOutcome, SolveStatus, SolverConfig, StartMode, BLOWUP_FACTOR};

/// Outer iterate: `u_n`, the inner start `v_n^0`, and the dual estimate
/// `v_{n-1}^{k_max}` used for residuals (equal to `v_n^0` under warm start).
struct OuterState {
    u: Vector,
    v_start: Vector,
    v_estimate: Vector,
    inner_step: Option<f64>,
}

/// Shared stop/record logic for the primal-dual methods.
fn drive(
    problem: &CompositeProblem,
    config: &SolverConfig,
    reference: Option<&Reference>,
    observe: &mut dyn FnMut(usize, &Vector, &Vector),
    step: &mut dyn FnMut(&mut OuterState) -> Result<()>,
) -> Result<SolveOutcome> {
    config.validate(problem)?;
    if let Some(r) = reference {
        check_len("reference u", problem.dim(), r.u.len())?;
        check_len("reference v", problem.dual_dim(), r.v.len())?;
    }
    let (alpha, beta) = (config.alpha, config.beta);
    let mut state = OuterState {
        u: config.u0.clone(),
        v_start: config.v00.clone(),
        v_estimate: config.v00.clone(),
        inner_step: None,
    };
    let initial = problem.objective(&state.u)?;
    let blowup = BLOWUP_FACTOR * initial.abs().max(1.0);
    let mut trace = SolveTrace::default();
    let mut n = 0;
    let status = loop {
        observe(n, &state.u, &state.v_start);
        let objective = problem.objective(&state.u)?;
        let (r_p, r_d) = optimality_residuals(problem, &state.u, &state.v_estimate, alpha, beta)?;
        let diverged = !state.u.is_finite()
            || !state.v_start.is_finite()
            || objective.is_nan()
            || (objective.is_finite() && objective > blowup);
        let status = if diverged {
            Some(SolveStatus::Diverged)
        } else if r_p <= config.outer_tol && r_d <= config.outer_tol {
            Some(SolveStatus::Converged)
        } else if n >= config.max_outer {
            Some(SolveStatus::BudgetExhausted)
        } else {
            None
        };
        if status.is_some() || n % config.trace_every == 0 {
            trace.rows.push(TraceRow {
                n,
                objective,
                r_p,
                r_d,
                dist_to_ref: reference.map(|r| state.u.distance(&r.u)),
                lyapunov: reference.map(|r| lyapunov(alpha, beta, config.k_max, &state.u, &state.v_start, r)),
                inner_dual_step_norm_last: state.inner_step,
            });
        }
        if let Some(status) = status {
            break status;
        }
        step(&mut state)?;
        n += 1;
    };
    Ok(SolveOutcome {
        u_final: state.u,
        v_final: state.v_estimate,
        outer_iterations: n,
        trace,
        status,
    })
}

/// Nested primal-dual proximal gradient with a fixed inner budget.
///
/// Each outer step takes a gradient step `z = u_n - alpha grad f(u_n)`,
/// approximates `prox_{alpha h + alpha g o A}(z)` by
/// [`inner_budgeted`] from `v_n^0`, and (warm mode) feeds the last inner
/// dual iterate forward as `v_{n+1}^0`.
pub fn nested_primal_dual(
    problem: &CompositeProblem,
    config: &SolverConfig,
    reference: Option<&Reference>,
) -> Result<SolveOutcome> {
    nested_primal_dual_observed(problem, config, reference, |_, _, _| {})
}

/// [`nested_primal_dual`] calling `observe(n, u_n, v_n^0)` at every outer
/// iteration.
pub fn nested_primal_dual_observed(
    problem: &CompositeProblem,
    config: &SolverConfig,
    reference: Option<&Reference>,
    mut observe: impl FnMut(usize, &Vector, &Vector),
) -> Result<SolveOutcome> {
    let parts = problem.split();
    let (alpha, beta, k_max) = (config.alpha, config.beta, config.k_max);
    let mut step = |s: &mut OuterState| -> Result<()> {
        let z = s.u.add_scaled(-alpha, &problem.f().gradient(&s.u));
        let inner = inner_budgeted(parts, &z, alpha, beta, &s.v_start, k_max, false)?;
        s.u = inner.primal;
        s.inner_step = Some(inner.last_step_norm);
        s.v_start = match config.start_mode {
            StartMode::Warm => inner.final_dual.clone(),
            StartMode::Cold => config.v00.clone(),
        };
        s.v_estimate = inner.final_dual;
        Ok(())
    };
    drive(problem, config, reference, &mut observe, &mut step)
}

/// The `h = 0`, `k_max = 1` recursion written out directly:
///
/// ```text
/// z_n     = u_n - alpha grad f(u_n)
/// v_{n+1} = prox_{(beta/alpha) g*}(v_n + (beta/alpha) A (z_n - alpha A^T v_n))
/// u_{n+1} = z_n - alpha A^T v_{n+1}
/// ```
///
/// It shares no code with the inner loop and serves as a cross-check of
/// [`nested_primal_dual`].
pub fn loris_verhoeven_step_solver(
    problem: &CompositeProblem,
    config: &SolverConfig,
    reference: Option<&Reference>,
) -> Result<SolveOutcome> {
    loris_verhoeven_step_solver_observed(problem, config, reference, |_, _, _| {})
}

pub fn loris_verhoeven_step_solver_observed(
    problem: &CompositeProblem,
    config: &SolverConfig,
    reference: Option<&Reference>,
    mut observe: impl FnMut(usize, &Vector, &Vector),
) -> Result<SolveOutcome> {
    if !problem.h().is_zero() {
        return Err(Error::invalid("h", "the single-step recursion requires h = 0"));
    }
    if config.k_max != 1 {
        return Err(Error::invalid("k_max", "the single-step recursion requires k_max = 1"));
    }
    let a = problem.operator();
    let (alpha, beta) = (config.alpha, config.beta);
    let ratio = beta / alpha;
    let mut step = |s: &mut OuterState| -> Result<()> {
        let z = s.u.add_scaled(-alpha, &problem.f().gradient(&s.u));
        let predicted = z.add_scaled(-alpha, &a.adjoint(&s.v_start));
        let v_next = fenchel_dual_prox(problem.g(), &s.v_start.add_scaled(ratio, &a.apply(&predicted)), ratio)?;
        s.u = z.add_scaled(-alpha, &a.adjoint(&v_next));
        s.inner_step = Some(v_next.distance(&s.v_start));
        s.v_estimate = v_next.clone();
        s.v_start = match config.start_mode {
            StartMode::Warm => v_next,
            StartMode::Cold => config.v00.clone(),
        };
        Ok(())
    };
    drive(problem, config, reference, &mut observe, &mut step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{ForwardDifference, Identity};
    use crate::proxlib::{L1Norm, Zero};
    use crate::smooth::SquaredDistance;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    fn quadratic(b: &[f64]) -> CompositeProblem {
        CompositeProblem::new(
            Box::new(SquaredDistance::new(v(b))),
            Box::new(Zero),
            Box::new(Zero),
            Box::new(Identity::new(b.len())),
        )
        .unwrap()
    }

    #[test]
    fn reduces_to_an_exact_gradient_step() {
        let p = quadratic(&[5.0]);
        let cfg = SolverConfig::new(&p, 1.0, 0.5, 3);
        let out = nested_primal_dual(&p, &cfg, None).unwrap();
        assert_eq!(out.status, SolveStatus::Converged);
        assert_eq!(out.outer_iterations, 1);
        assert_eq!(out.u_final, v(&[5.0]));
        assert_eq!(out.trace.len(), 2);
    }

    #[test]
    fn single_step_recursion_with_zero_dual() {
        let p = quadratic(&[1.0, -3.0]);
        let cfg = SolverConfig::new(&p, 0.5, 0.5, 1).with_max_outer(1);
        let out = loris_verhoeven_step_solver(&p, &cfg, None).unwrap();
        // u_1 = z_0 = u_0 - 0.5 (u_0 - b)
        assert_eq!(out.u_final, v(&[0.5, -1.5]));
        assert_eq!(out.v_final, v(&[0.0, 0.0]));
    }

    #[test]
    fn single_step_recursion_rejects_nonzero_h_or_budget() {
        let p = CompositeProblem::new(
            Box::new(SquaredDistance::new(v(&[1.0, 2.0]))),
            Box::new(L1Norm::unit()),
            Box::new(Zero),
            Box::new(Identity::new(2)),
        )
        .unwrap();
        let cfg = SolverConfig::new(&p, 0.5, 0.5, 1);
        assert!(loris_verhoeven_step_solver(&p, &cfg, None).is_err());
        let q = quadratic(&[1.0]);
        let cfg = SolverConfig::new(&q, 0.5, 0.5, 2);
        assert!(loris_verhoeven_step_solver(&q, &cfg, None).is_err());
    }

    #[test]
    fn step_size_gate() {
        let p = quadratic(&[1.0]);
        let err = nested_primal_dual(&p, &SolverConfig::new(&p, 2.0, 0.5, 1), None).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "alpha", .. }));
        let err = nested_primal_dual(&p, &SolverConfig::new(&p, 1.0, 1.0, 1), None).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "beta", .. }));
        let cold = SolverConfig::new(&p, 1.0, 0.5, 1).with_start_mode(StartMode::Cold);
        assert!(matches!(
            nested_primal_dual(&p, &cold, None),
            Err(Error::InvalidParameter { name: "start_mode", .. })
        ));
        assert!(nested_primal_dual(&p, &cold.unsafe_experiment(), None).is_ok());
    }

    #[test]
    fn oversized_step_is_reported_as_divergence() {
        let p = quadratic(&[1.0, 1.0]);
        let cfg = SolverConfig::new(&p, 5.0, 0.5, 1)
            .with_max_outer(10_000)
            .unsafe_experiment();
        let out = nested_primal_dual(&p, &cfg, None).unwrap();
        assert_eq!(out.status, SolveStatus::Diverged);
        assert!(out.outer_iterations < 10_000);
    }

    #[test]
    fn trace_decimation_keeps_first_and_last() {
        let d = ForwardDifference::new(6).unwrap();
        let p = CompositeProblem::new(
            Box::new(SquaredDistance::new(v(&[0.0, 1.0, 3.0, 2.0, 2.0, 0.0]))),
            Box::new(Zero),
            Box::new(L1Norm::new(0.5).unwrap()),
            Box::new(d),
        )
        .unwrap();
        let cfg = SolverConfig::new(&p, 1.0, 0.2, 2)
            .with_max_outer(25)
            .with_trace_every(10);
        let out = nested_primal_dual(&p, &cfg, None).unwrap();
        let ns: Vec<usize> = out.trace.rows.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![0, 10, 20, 25]);
        assert_eq!(out.status, SolveStatus::BudgetExhausted);
        assert!(out.trace.rows[0].inner_dual_step_norm_last.is_none());
        assert!(out.trace.rows[1].inner_dual_step_norm_last.is_some());
    }
}
