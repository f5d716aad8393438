//! Convergence diagnostics: the monitored Lyapunov quantity, the linear
//! rate bound for strongly convex `f` with `h = 0`, the `A`-norm, and the
//! inner loop's dual objective.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, check_positive, Error, Result};
use crate::operator::LinearOperator;
use crate::problem::SplitTerms;
use crate::proxlib::moreau_envelope;
use crate::solver::Reference;
use crate::trace::SolveTrace;
use crate::vector::Vector;

/// Lyapunov values below this are treated as numerical noise.
pub const LYAPUNOV_FLOOR: f64 = 1e-14;

/// Rows skipped at the start of the default rate window.
pub const DEFAULT_WINDOW_SKIP: usize = 5;

/// Absolute slack when comparing measured ratios to the bound.
pub const RATE_SLACK: f64 = 1e-9;

/// `beta ||u - u_ref||^2 + alpha^2 / k_max ||v - v_ref||^2`.
///
/// The weight `1 / k_max` is applied as a division so no rounded
/// reciprocal enters the product.
pub fn lyapunov(alpha: f64, beta: f64, k_max: usize, u: &Vector, v: &Vector, reference: &Reference) -> f64 {
    beta * u.distance_squared(&reference.u) + alpha * alpha * v.distance_squared(&reference.v) / k_max as f64
}

/// `max(1 + mu alpha (alpha L - 2), 1 - beta sigma^2)`.
///
/// Preconditions: `0 < mu <= L`, `0 < alpha < 2/L`, `beta > 0`,
/// `sigma > 0` and `beta sigma^2 < 1` (implied by `beta < 1/||A||^2`
/// because `sigma <= ||A||`).
pub fn theoretical_rate(mu: f64, lipschitz: f64, alpha: f64, beta: f64, sigma: f64) -> Result<f64> {
    check_positive("mu", mu)?;
    check_positive("L", lipschitz)?;
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_positive("sigma", sigma)?;
    if mu > lipschitz {
        return Err(Error::invalid(
            "mu",
            format!("strong convexity {mu} exceeds L = {lipschitz}"),
        ));
    }
    if alpha >= 2.0 / lipschitz {
        return Err(Error::invalid("alpha", format!("needs alpha < 2/L, got {alpha}")));
    }
    if beta * sigma * sigma >= 1.0 {
        return Err(Error::invalid(
            "beta",
            format!("needs beta sigma^2 < 1, got {}", beta * sigma * sigma),
        ));
    }
    let primal = 1.0 + mu * alpha * (alpha * lipschitz - 2.0);
    let dual = 1.0 - beta * sigma * sigma;
    // The primal branch is >= 1 - mu/L >= 0 analytically; clamp rounding.
    Ok(primal.max(dual).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub epsilon_bound: f64,
    /// Per-iteration contraction factors over the window.
    pub measured_ratios: Vec<f64>,
    pub max_measured: f64,
    /// `max_measured <= epsilon_bound + 1e-9`
    pub satisfied: bool,
}

/// Default window: skip the first few rows and stop before the Lyapunov
/// column drops below [`LYAPUNOV_FLOOR`].
pub fn default_window(trace: &SolveTrace) -> Result<(usize, usize)> {
    if !trace.has_reference() {
        return Err(Error::MissingReference);
    }
    let start = DEFAULT_WINDOW_SKIP.min(trace.len());
    let end = trace.rows[start..]
        .iter()
        .position(|r| r.lyapunov.unwrap_or(0.0) <= LYAPUNOV_FLOOR)
        .map_or(trace.len(), |p| start + p);
    Ok((start, end))
}

/// Per-step Lyapunov contraction over trace rows `start..end`.
///
/// For consecutive recorded rows `i`, `i+1` that are `m` iterations apart
/// the per-step factor is `(L_{i+1} / L_i)^(1/m)`.
pub fn measure_rate(trace: &SolveTrace, window: (usize, usize), epsilon_bound: f64) -> Result<RateReport> {
    if !trace.has_reference() {
        return Err(Error::MissingReference);
    }
    let (start, end) = window;
    if start >= end || end > trace.len() || end - start < 2 {
        return Err(Error::invalid(
            "window",
            format!("need at least two rows within 0..{}, got {start}..{end}", trace.len()),
        ));
    }
    let rows = &trace.rows[start..end];
    for (i, r) in rows.iter().enumerate() {
        let value = r.lyapunov.unwrap_or(0.0);
        if !(value > LYAPUNOV_FLOOR) {
            return Err(Error::LyapunovUnderflow {
                row: start + i,
                value,
                floor: LYAPUNOV_FLOOR,
            });
        }
    }
    let measured_ratios: Vec<f64> = rows
        .windows(2)
        .map(|w| {
            let gap = (w[1].n - w[0].n).max(1) as f64;
            let ratio = w[1].lyapunov.unwrap() / w[0].lyapunov.unwrap();
            if gap == 1.0 {
                ratio
            } else {
                ratio.powf(1.0 / gap)
            }
        })
        .collect();
    let max_measured = measured_ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RateReport {
        epsilon_bound,
        satisfied: max_measured <= epsilon_bound + RATE_SLACK,
        measured_ratios,
        max_measured,
    })
}

/// First row where the Lyapunov column grows by more than `rel_slack`
/// relative to the previous row, if any.
pub fn lyapunov_increase(trace: &SolveTrace, rel_slack: f64) -> Result<Option<usize>> {
    if !trace.has_reference() {
        return Err(Error::MissingReference);
    }
    Ok(trace
        .rows
        .windows(2)
        .position(|w| {
            let (prev, next) = (w[0].lyapunov.unwrap(), w[1].lyapunov.unwrap());
            next > prev * (1.0 + rel_slack)
        })
        .map(|i| i + 1))
}

/// `||v||^2 - beta ||A^T v||^2`, a squared norm for `0 < beta < 1/||A||^2`.
pub fn a_norm_squared(v: &Vector, op: &dyn LinearOperator, beta: f64) -> Result<f64> {
    check_len("v", op.out_dim(), v.len())?;
    let limit = 1.0 / op.norm_bound().powi(2);
    if !(beta > 0.0 && beta < limit) {
        return Err(Error::invalid(
            "beta",
            format!("needs 0 < beta < 1/||A||^2 = {limit}, got {beta}"),
        ));
    }
    Ok(v.norm_squared() - beta * op.adjoint(v).norm_squared())
}

/// Dual objective `psi(v) + g*(v) / alpha` of the inner problem at `a`,
/// where `psi(v) = (||w||^2 / (2 alpha) - env_{alpha h}(w)) / alpha` and
/// `w = a - alpha A^T v`.
///
/// Needs the closed-form conjugate value of `g`.
pub fn dual_objective(parts: SplitTerms<'_>, a: &Vector, v: &Vector, alpha: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_len("a", parts.a.in_dim(), a.len())?;
    check_len("v", parts.a.out_dim(), v.len())?;
    let conj = parts.g.conjugate_value(v).ok_or(Error::Unavailable {
        what: "conjugate value of g",
    })?;
    if conj == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let w = a.add_scaled(-alpha, &parts.a.adjoint(v));
    let env = moreau_envelope(parts.h, &w, alpha)?;
    let psi = (w.norm_squared() / (2.0 * alpha) - env.value) / alpha;
    Ok(psi + conj / alpha)
}

/// Gradient of `psi` from the closed form `-A prox_{alpha h}(a - alpha A^T v) / alpha`.
pub fn dual_smooth_gradient(parts: SplitTerms<'_>, a: &Vector, v: &Vector, alpha: f64) -> Result<Vector> {
    let u = crate::innerloop::primal_point(parts, a, alpha, v)?;
    Ok(parts.a.apply(&u).scaled(-1.0 / alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{ForwardDifference, Identity};
    use crate::proxlib::{L1Norm, Zero};
    use crate::trace::TraceRow;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    fn geometric_trace(ratio: f64, len: usize) -> SolveTrace {
        SolveTrace {
            rows: (0..len)
                .map(|n| TraceRow {
                    n,
                    objective: 0.0,
                    r_p: 0.0,
                    r_d: 0.0,
                    dist_to_ref: Some(0.0),
                    lyapunov: Some(ratio.powi(n as i32)),
                    inner_dual_step_norm_last: None,
                })
                .collect(),
        }
    }

    #[test]
    fn rate_examples() {
        assert_eq!(theoretical_rate(1.0, 1.0, 1.0, 0.5, 1.0).unwrap(), 0.5);
        assert_eq!(theoretical_rate(0.5, 1.0, 1.0, 0.9, 1.0).unwrap(), 0.5);
        // mu = L and alpha = 1/L zero the primal branch, leaving 1 - beta sigma^2.
        let l = 4.0;
        assert_eq!(theoretical_rate(l, l, 1.0 / l, 0.01, 1.0).unwrap(), 0.99);
        assert_eq!(
            theoretical_rate(l, l, 1.0 / l, 0.01, 0.0001f64.sqrt()).unwrap(),
            1.0 - 0.01 * 0.0001
        );
    }

    #[test]
    fn rate_preconditions_name_the_violation() {
        let name = |r: Result<f64>| match r {
            Err(Error::InvalidParameter { name, .. }) => name,
            other => panic!("{other:?}"),
        };
        assert_eq!(name(theoretical_rate(0.0, 1.0, 1.0, 0.5, 1.0)), "mu");
        assert_eq!(name(theoretical_rate(2.0, 1.0, 0.5, 0.5, 1.0)), "mu");
        assert_eq!(name(theoretical_rate(1.0, 1.0, 2.0, 0.5, 1.0)), "alpha");
        assert_eq!(name(theoretical_rate(1.0, 1.0, 1.0, 1.0, 1.0)), "beta");
        assert_eq!(name(theoretical_rate(1.0, 1.0, 1.0, 0.5, 0.0)), "sigma");
    }

    #[test]
    fn geometric_sequence_rate() {
        let t = geometric_trace(0.5, 40);
        let report = measure_rate(&t, default_window(&t).unwrap(), 0.5).unwrap();
        assert!((report.max_measured - 0.5).abs() <= 1e-15);
        assert!(report.satisfied);
        assert!(!measure_rate(&t, (0, 40), 0.4).unwrap().satisfied);
    }

    #[test]
    fn decimated_rows_use_per_step_factor() {
        let mut t = geometric_trace(0.5, 30);
        t.rows.retain(|r| r.n % 3 == 0);
        let report = measure_rate(&t, (0, t.len()), 0.5).unwrap();
        assert!((report.max_measured - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn underflow_in_window_is_an_error() {
        let t = geometric_trace(0.0, 10);
        assert!(matches!(
            measure_rate(&t, (0, 10), 0.5),
            Err(Error::LyapunovUnderflow { .. })
        ));
    }

    #[test]
    fn lyapunov_increase_detection() {
        let t = geometric_trace(0.9, 10);
        assert_eq!(lyapunov_increase(&t, 1e-9).unwrap(), None);
        let t = geometric_trace(1.1, 10);
        assert_eq!(lyapunov_increase(&t, 1e-9).unwrap(), Some(1));
    }

    #[test]
    fn a_norm_examples() {
        let id = Identity::new(1);
        assert_eq!(a_norm_squared(&v(&[0.0]), &id, 0.5).unwrap(), 0.0);
        assert_eq!(a_norm_squared(&v(&[2.0]), &id, 0.5).unwrap(), 2.0);
        assert!(a_norm_squared(&v(&[2.0]), &id, 1.0).is_err());
    }

    #[test]
    fn dual_objective_with_zero_h() {
        let (h, g) = (Zero, L1Norm::unit());
        let d = ForwardDifference::new(3).unwrap();
        let parts = SplitTerms::new(&h, &g, &d);
        let a = v(&[0.0, 3.0, 0.0]);
        let dual = v(&[0.5, -0.25]);
        let alpha = 0.5;
        let w = a.add_scaled(-alpha, &d.adjoint(&dual));
        let expected = w.norm_squared() / (2.0 * alpha * alpha);
        let got = dual_objective(parts, &a, &dual, alpha).unwrap();
        assert!((got - expected).abs() <= 1e-14 * expected);
        assert_eq!(
            dual_objective(parts, &a, &v(&[1.5, 0.0]), alpha).unwrap(),
            f64::INFINITY
        );
    }
}
