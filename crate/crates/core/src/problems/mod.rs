//! Seeded test instances with exact constants and independently computed
//! minimizers.

mod taut_string;

pub use taut_string::{taut_string_tv, total_variation};

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::innerloop::dual_fixed_point_converged;
use crate::operator::{DenseMatrix, ForwardDifference};
use crate::oracle::singular_values;
use crate::problem::{CompositeProblem, SplitTerms};
use crate::proxlib::{prox_l1, L1Norm, Zero};
use crate::rng::seeded;
use crate::smooth::SquaredDistance;
use crate::solver::{optimality_residuals, proximal_gradient, Reference, SolveStatus};
use crate::terms::ProximableTerm;
use crate::vector::Vector;

/// Stopping rule for the dual iterations that recover companion duals.
const DUAL_TOL: f64 = 1e-14;
const DUAL_MAX_ITER: usize = 1_000_000;

/// Relative slack on declared bounds computed from an SVD, so that the
/// declared value is never below the true one.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(rename = "L")]
    pub lipschitz: f64,
    pub mu: Option<f64>,
    pub norm_a: f64,
    /// Coercivity of `A^T`; declared only on instances meant for the
    /// linear-rate check.
    pub sigma: Option<f64>,
}

pub struct Instance {
    pub problem: CompositeProblem,
    pub name: String,
    pub seed: u64,
    pub constants: Constants,
    /// The data `b` of `f = 1/2 ||u - b||^2`.
    pub observation: Vector,
    pub oracle_solution: Option<Vector>,
    /// Outer iterations that suffice for `r_p + r_d <= 1e-6` across the
    /// shipped step-size grid.
    pub documented_budget: usize,
}

impl std::fmt::Debug for Instance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Instance")
            .field("name", &self.name)
            .field("seed", &self.seed)
            .field("constants", &self.constants)
            .field("documented_budget", &self.documented_budget)
            .finish_non_exhaustive()
    }
}

impl Instance {
    /// `(u_ref, v_ref)` with `v_ref` recovered by the dual iteration at
    /// `a = u_ref - grad f(u_ref) / L`, where `u_ref` is the oracle.
    pub fn reference(&self) -> Result<Reference> {
        let u = self.oracle_solution.clone().ok_or(Error::MissingReference)?;
        let v = companion_dual(&self.problem, &u)?;
        Ok(Reference { u, v })
    }

    /// Optimality residuals of the oracle pair at `alpha = 1/L`,
    /// `beta = 0.5/||A||^2`.
    pub fn oracle_residuals(&self) -> Result<(f64, f64)> {
        let r = self.reference()?;
        optimality_residuals(
            &self.problem,
            &r.u,
            &r.v,
            1.0 / self.constants.lipschitz,
            0.5 / self.constants.norm_a.powi(2),
        )
    }

    /// Whether the instance satisfies the linear-rate hypotheses: strongly
    /// convex `f`, `h = 0`, coercive `A^T`.
    pub fn has_rate_constants(&self) -> bool {
        self.constants.mu.is_some() && self.constants.sigma.is_some() && self.problem.h().is_zero()
    }
}

/// Dual `v` with `u = prox_{alpha h}(u - alpha grad f(u) - alpha A^T v)` and
/// `v` a fixed point of the dual iteration, for `alpha = 1/L`.
pub fn companion_dual(problem: &CompositeProblem, u: &Vector) -> Result<Vector> {
    check_len("oracle solution", problem.dim(), u.len())?;
    let alpha = 1.0 / problem.lipschitz();
    let beta = 1.0 / problem.norm_bound().powi(2);
    let a = u.add_scaled(-alpha, &problem.f().gradient(u));
    let out = dual_fixed_point_converged(
        problem.split(),
        &a,
        alpha,
        beta,
        &Vector::zeros(problem.dual_dim()),
        DUAL_TOL,
        DUAL_MAX_ITER,
    )?;
    if !out.converged {
        return Err(Error::invalid(
            "oracle",
            format!("dual recovery stalled at step {:e}", out.last_step),
        ));
    }
    Ok(out.dual)
}

/// Three-level step signal plus uniform noise in `[-0.2, 0.2)`.
pub fn piecewise_constant_signal(d: usize, seed: u64) -> Vector {
    const LEVELS: [f64; 3] = [0.0, 2.0, 1.0];
    let mut rng = seeded(seed);
    Vector::from_fn(d, |i| LEVELS[(3 * i / d.max(1)).min(2)] + rng.random_range(-0.2..0.2))
}

/// 1D total-variation denoising: `f = 1/2 ||u - b||^2`, `g = lambda ||.||_1`,
/// `h = 0`, `A = D` the forward difference on `R^d`, declared `||D|| <= 2`.
pub fn make_tv_denoise_1d(d: usize, lambda: f64, seed: u64) -> Result<Instance> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let diff = ForwardDifference::new(d)?;
    let b = piecewise_constant_signal(d, seed);
    let oracle = taut_string_tv(&b, lambda)?;
    let problem = CompositeProblem::new(
        Box::new(SquaredDistance::new(b.clone())),
        Box::new(Zero),
        Box::new(L1Norm::new(lambda)?),
        Box::new(diff),
    )?;
    Ok(Instance {
        problem,
        name: "tv-1d".into(),
        seed,
        constants: Constants {
            lipschitz: 1.0,
            mu: Some(1.0),
            norm_a: 2.0,
            sigma: None,
        },
        observation: b,
        oracle_solution: Some(oracle),
        documented_budget: 5_000,
    })
}

/// Fused lasso: the TV instance's data with an extra `h = lambda2 ||.||_1`.
///
/// The stored minimizer is `soft_{lambda2}(taut_string(b, lambda1))`, which is
/// exact for this separable-plus-TV structure; [`fused_lasso_reference_run`]
/// computes the same point by an independent route.
pub fn make_fused_lasso(d: usize, lambda1: f64, lambda2: f64, seed: u64) -> Result<Instance> {
    if !(lambda1 >= 0.0 && lambda2 >= 0.0) {
        return Err(Error::invalid("lambda", "fused lasso weights must be >= 0"));
    }
    let diff = ForwardDifference::new(d)?;
    let b = piecewise_constant_signal(d, seed);
    let smooth_part = taut_string_tv(&b, lambda1)?;
    let oracle = if lambda2 > 0.0 {
        prox_l1(&smooth_part, lambda2)?
    } else {
        smooth_part
    };
    let problem = CompositeProblem::new(
        Box::new(SquaredDistance::new(b.clone())),
        Box::new(L1Norm::new(lambda2)?),
        Box::new(L1Norm::new(lambda1)?),
        Box::new(diff),
    )?;
    Ok(Instance {
        problem,
        name: "fused-lasso".into(),
        seed,
        constants: Constants {
            lipschitz: 1.0,
            mu: Some(1.0),
            norm_a: 2.0,
            sigma: None,
        },
        observation: b,
        oracle_solution: Some(oracle),
        documented_budget: 5_000,
    })
}

/// `h + g o A` with its prox computed by the converged dual iteration.
struct ExactComposite<'a> {
    parts: SplitTerms<'a>,
    inner_iterations: AtomicUsize,
}

impl ProximableTerm for ExactComposite<'_> {
    fn dim(&self) -> Option<usize> {
        Some(self.parts.a.in_dim())
    }

    fn value(&self, u: &Vector) -> Option<f64> {
        Some(self.parts.h.value(u)? + self.parts.g.value(&self.parts.a.apply(u))?)
    }

    fn prox(&self, a: &Vector, t: f64) -> Result<Vector> {
        let beta = 1.0 / self.parts.a.norm_bound().powi(2);
        let budget = 1_000_000usize.saturating_sub(self.inner_iterations.load(Ordering::Relaxed));
        let out = dual_fixed_point_converged(
            self.parts,
            a,
            t,
            beta,
            &Vector::zeros(self.parts.a.out_dim()),
            1e-12,
            budget.max(1),
        )?;
        self.inner_iterations.fetch_add(out.iterations, Ordering::Relaxed);
        Ok(out.prox_point)
    }
}

/// Proximal gradient on `f + (h + g o A)` with an exact composite prox
/// (dual iteration to `1e-12`, at most `10^6` inner steps in total).
pub fn fused_lasso_reference_run(instance: &Instance) -> Result<Vector> {
    let p = &instance.problem;
    let term = ExactComposite {
        parts: p.split(),
        inner_iterations: AtomicUsize::new(0),
    };
    let out = proximal_gradient(p.f(), &term, 1.0 / p.lipschitz(), &Vector::zeros(p.dim()), 1000, 1e-13)?;
    if out.status != SolveStatus::Converged {
        return Err(Error::invalid(
            "oracle",
            "reference proximal gradient run did not converge",
        ));
    }
    Ok(out.u_final)
}

/// Seeded square matrix `I + G / sqrt(d)` with `G` uniform in `[-0.5, 0.5)`;
/// well conditioned and invertible for the shipped sizes.
pub fn seeded_square_matrix(d: usize, seed: u64) -> Result<DenseMatrix> {
    let mut rng = seeded(seed);
    let scale = 1.0 / (d as f64).sqrt();
    let data = (0..d * d)
        .map(|k| {
            let noise = rng.random_range(-0.5..0.5) * scale;
            if k / d == k % d {
                1.0 + noise
            } else {
                noise
            }
        })
        .collect();
    DenseMatrix::new(d, d, data)
}

/// Linear-rate instance: `f = 1/2 ||u - b||^2`, `h = 0`,
/// `g = 0.5 ||.||_1`, `A` a seeded square invertible matrix, `b` uniform in
/// `[-2, 2)`.
pub fn make_strongly_convex_rate_instance(d: usize, seed: u64) -> Result<Instance> {
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    let matrix = seeded_square_matrix(d, seed)?;
    // Separate stream for the data so the matrix does not shift with it.
    let b = Vector::random(&mut seeded(seed.wrapping_add(0x9e37_79b9)), d, 2.0);
    let mut inst = strongly_convex_instance(b, matrix, 0.5)?;
    inst.seed = seed;
    Ok(inst)
}

/// Linear-rate instance from explicit data. The matrix must be square and
/// invertible; its declared norm and `sigma` come from a dense SVD.
pub fn strongly_convex_instance(b: Vector, matrix: DenseMatrix, weight: f64) -> Result<Instance> {
    check_len("matrix", b.len(), matrix.cols())?;
    check_len("matrix", b.len(), matrix.rows())?;
    let s = singular_values(&matrix);
    let (s_max, s_min) = (s[0], *s.last().unwrap());
    if !(s_min > 0.0) {
        return Err(Error::invalid("matrix", "must be invertible"));
    }
    let norm_a = s_max * (1.0 + BOUND_SLACK);
    let matrix = matrix.with_norm_bound(norm_a)?;
    let problem = CompositeProblem::new(
        Box::new(SquaredDistance::new(b.clone())),
        Box::new(Zero),
        Box::new(L1Norm::new(weight)?),
        Box::new(matrix),
    )?;
    // With alpha = 1/L = 1 the outer fixed point is the composite prox of b.
    let beta = 1.0 / norm_a.powi(2);
    let out = dual_fixed_point_converged(
        problem.split(),
        &b,
        1.0,
        beta,
        &Vector::zeros(b.len()),
        DUAL_TOL,
        DUAL_MAX_ITER,
    )?;
    if !out.converged {
        return Err(Error::invalid("oracle", "dual iteration did not converge"));
    }
    Ok(Instance {
        problem,
        name: "strongly-convex".into(),
        seed: 0,
        constants: Constants {
            lipschitz: 1.0,
            mu: Some(1.0),
            norm_a,
            sigma: Some(s_min),
        },
        observation: b,
        oracle_solution: Some(out.prox_point),
        documented_budget: 1_000,
    })
}

/// Instance name plus parameters, as written in run files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    #[serde(rename = "tv-1d")]
    Tv1d {
        d: usize,
        lambda: f64,
        seed: u64,
    },
    FusedLasso {
        d: usize,
        lambda1: f64,
        lambda2: f64,
        seed: u64,
    },
    StronglyConvex {
        d: usize,
        seed: u64,
    },
}

impl InstanceSpec {
    /// The instances exercised by the acceptance suite.
    pub fn shipped() -> Vec<InstanceSpec> {
        vec![
            InstanceSpec::Tv1d {
                d: 20,
                lambda: 1.0,
                seed: 7,
            },
            InstanceSpec::FusedLasso {
                d: 15,
                lambda1: 0.5,
                lambda2: 0.5,
                seed: 3,
            },
            InstanceSpec::StronglyConvex { d: 10, seed: 11 },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            InstanceSpec::Tv1d { .. } => "tv-1d",
            InstanceSpec::FusedLasso { .. } => "fused-lasso",
            InstanceSpec::StronglyConvex { .. } => "strongly-convex",
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            InstanceSpec::Tv1d { seed, .. }
            | InstanceSpec::FusedLasso { seed, .. }
            | InstanceSpec::StronglyConvex { seed, .. } => seed,
        }
    }

    pub fn with_seed(mut self, new_seed: u64) -> Self {
        match &mut self {
            InstanceSpec::Tv1d { seed, .. }
            | InstanceSpec::FusedLasso { seed, .. }
            | InstanceSpec::StronglyConvex { seed, .. } => *seed = new_seed,
        }
        self
    }

    pub fn build(&self) -> Result<Instance> {
        match *self {
            InstanceSpec::Tv1d { d, lambda, seed } => make_tv_denoise_1d(d, lambda, seed),
            InstanceSpec::FusedLasso {
                d,
                lambda1,
                lambda2,
                seed,
            } => make_fused_lasso(d, lambda1, lambda2, seed),
            InstanceSpec::StronglyConvex { d, seed } => make_strongly_convex_rate_instance(d, seed),
        }
    }
}
