use crate::error::{check_len, check_positive, Result};
use crate::problem::CompositeProblem;
use crate::proxlib::fenchel_dual_prox;
use crate::vector::Vector;

/// Distances of `(u, v)` from satisfying the optimality system
///
/// `u = prox_{alpha h}(u - alpha grad f(u) - alpha A^T v)`,
/// `v = prox_{(beta/alpha) g*}(v + (beta/alpha) A u)`.
///
/// Both vanish exactly at a minimizer paired with a dual solution.
pub fn optimality_residuals(
    problem: &CompositeProblem,
    u: &Vector,
    v: &Vector,
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64)> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_len("u", problem.dim(), u.len())?;
    check_len("v", problem.dual_dim(), v.len())?;
    let a = problem.operator();
    let forward = u
        .add_scaled(-alpha, &problem.f().gradient(u))
        .add_scaled(-alpha, &a.adjoint(v));
    let r_p = u.distance(&problem.h().prox(&forward, alpha)?);
    let ratio = beta / alpha;
    let dual = fenchel_dual_prox(problem.g(), &v.add_scaled(ratio, &a.apply(u)), ratio)?;
    let r_d = v.distance(&dual);
    Ok((r_p, r_d))
}
