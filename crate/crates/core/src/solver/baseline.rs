use crate::error::{check_len, Error, Result};
use crate::terms::{ProximableTerm, SmoothTerm};
use crate::trace::{SolveTrace, TraceRow};
use crate::vector::Vector;

use super::{SolveOutcome, SolveStatus, BLOWUP_FACTOR};

/// `u_{n+1} = prox_{alpha h}(u_n - alpha grad f(u_n))` for `min f + h`.
///
/// Stops at the first `u_n` with `||u_{n+1} - u_n|| <= tol` (returning
/// `u_n`) or after `max_iter` steps. With
/// `h` a box indicator this is projected gradient descent. The trace's
/// `r_p` column holds `||u_n - prox_{alpha h}(u_n - alpha grad f(u_n))||`;
/// there is no dual variable, so `r_d` is 0.
pub fn proximal_gradient(
    f: &dyn SmoothTerm,
    h: &dyn ProximableTerm,
    alpha: f64,
    u0: &Vector,
    max_iter: usize,
    tol: f64,
) -> Result<SolveOutcome> {
    proximal_gradient_observed(f, h, alpha, u0, max_iter, tol, |_, _| {})
}

pub fn proximal_gradient_observed(
    f: &dyn SmoothTerm,
    h: &dyn ProximableTerm,
    alpha: f64,
    u0: &Vector,
    max_iter: usize,
    tol: f64,
    mut observe: impl FnMut(usize, &Vector),
) -> Result<SolveOutcome> {
    let alpha_max = 2.0 / f.lipschitz();
    if !(alpha > 0.0 && alpha < alpha_max) {
        return Err(Error::invalid(
            "alpha",
            format!("needs 0 < alpha < 2/L = {alpha_max}, got {alpha}"),
        ));
    }
    if !(tol >= 0.0) {
        return Err(Error::invalid("tol", "must be >= 0"));
    }
    if let Some(d) = f.dim() {
        check_len("u0", d, u0.len())?;
    }
    if let Some(d) = h.dim() {
        check_len("u0", d, u0.len())?;
    }
    let objective = |u: &Vector| -> Result<f64> {
        let hv = h.value(u).ok_or(Error::Unavailable { what: "value of h" })?;
        Ok(if hv == f64::INFINITY { hv } else { f.value(u) + hv })
    };
    let blowup = BLOWUP_FACTOR * objective(u0)?.abs().max(1.0);

    let mut u = u0.clone();
    let mut trace = SolveTrace::default();
    let mut n = 0;
    let status = loop {
        observe(n, &u);
        let next = h.prox(&u.add_scaled(-alpha, &f.gradient(&u)), alpha)?;
        let step = next.distance(&u);
        let value = objective(&u)?;
        let diverged = !u.is_finite() || value.is_nan() || (value.is_finite() && value > blowup);
        trace.rows.push(TraceRow {
            n,
            objective: value,
            r_p: step,
            r_d: 0.0,
            dist_to_ref: None,
            lyapunov: None,
            inner_dual_step_norm_last: None,
        });
        if diverged {
            break SolveStatus::Diverged;
        }
        if step <= tol {
            break SolveStatus::Converged;
        }
        if n >= max_iter {
            break SolveStatus::BudgetExhausted;
        }
        u = next;
        n += 1;
    };
    Ok(SolveOutcome {
        u_final: u,
        v_final: Vector::zeros(0),
        outer_iterations: n,
        trace,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxlib::{BoxIndicator, L1Norm, Zero};
    use crate::smooth::SquaredDistance;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn quadratic_in_one_step() {
        let b = v(&[3.0, -1.0]);
        let out = proximal_gradient(&SquaredDistance::new(b.clone()), &Zero, 1.0, &Vector::zeros(2), 10, 0.0).unwrap();
        assert_eq!(out.u_final, b);
        assert_eq!(out.status, SolveStatus::Converged);
        assert_eq!(out.outer_iterations, 1);
    }

    #[test]
    fn soft_threshold_fixed_point() {
        let out = proximal_gradient(
            &SquaredDistance::new(v(&[2.0])),
            &L1Norm::unit(),
            1.0,
            &v(&[0.0]),
            60,
            1e-12,
        )
        .unwrap();
        assert!((out.u_final[0] - 1.0).abs() <= 1e-10);
        assert!(out.outer_iterations <= 60);
    }

    #[test]
    fn projection_of_negative_target() {
        let h = BoxIndicator::uniform(0.0, 1.0).unwrap();
        let out = proximal_gradient(&SquaredDistance::new(v(&[-3.0])), &h, 0.5, &v(&[0.7]), 200, 1e-14).unwrap();
        assert_eq!(out.status, SolveStatus::Converged);
        assert!(out.u_final[0].abs() <= 1e-12);
    }

    #[test]
    fn step_outside_range_is_rejected() {
        let f = SquaredDistance::new(v(&[1.0]));
        assert!(proximal_gradient(&f, &Zero, 2.0, &v(&[0.0]), 5, 0.0).is_err());
        assert!(proximal_gradient(&f, &Zero, 0.0, &v(&[0.0]), 5, 0.0).is_err());
    }
}
