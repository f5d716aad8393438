//! Reusable check suites: proximal calculus identities, the convergence and
//! Lyapunov grid, the linear-rate grid, and per-instance verification.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{default_window, lyapunov_increase, measure_rate, theoretical_rate, RateReport};
use crate::error::Result;
use crate::operator::{adjoint_consistency_check, estimate_operator_norm};
use crate::oracle::adjoint_coercivity;
use crate::problems::{companion_dual, fused_lasso_reference_run, Instance};
use crate::proxlib::{moreau_envelope, BoxIndicator, L1Norm, Scaled, SquaredL2, Translated, Zero};
use crate::rng::seeded;
use crate::solver::{nested_primal_dual, optimality_residuals, Reference, SolveStatus, SolverConfig};
use crate::terms::ProximableTerm;
use crate::vector::Vector;

/// Step-size grid for the convergence and monotonicity checks, as
/// multiples of `1/L` and `1/||A||^2`.
pub const GRID_ALPHA: [f64; 3] = [0.5, 1.0, 1.9];
pub const GRID_BETA: [f64; 3] = [0.3, 0.6, 0.95];
pub const GRID_K_MAX: [usize; 4] = [1, 2, 5, 20];

pub const RATE_ALPHA: [f64; 3] = [0.5, 1.0, 1.5];
pub const RATE_K_MAX: [usize; 2] = [1, 3];

/// Target for `r_p + r_d` in the convergence grid.
pub const CONVERGENCE_TOL: f64 = 1e-6;
pub const ORACLE_RESIDUAL_TOL: f64 = 1e-8;
pub const LYAPUNOV_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// `(point, step) -> prox_{step h*}(point)`.
pub type ConjugateProx = Box<dyn Fn(&Vector, f64) -> Vector + Send + Sync>;

/// A catalogued term with an independently written proximal map of its
/// conjugate.
pub struct CatalogueEntry {
    pub name: &'static str,
    pub term: Box<dyn ProximableTerm>,
    pub conjugate_prox: ConjugateProx,
}

fn clamp_all(a: &Vector, lo: f64, hi: f64) -> Vector {
    a.map(|x| x.clamp(lo, hi))
}

/// One instance of every catalogued term on `R^dim`.
pub fn catalogue(dim: usize, seed: u64) -> Vec<CatalogueEntry> {
    let c = Vector::random(&mut seeded(seed), dim, 1.0);
    let (w, lo, hi, lambda) = (0.7, -0.5, 1.5, 2.0);
    let c_sq = c.clone();
    let c_tr = c.clone();
    vec![
        CatalogueEntry {
            name: "zero",
            term: Box::new(Zero),
            conjugate_prox: Box::new(|a, _| Vector::zeros(a.len())),
        },
        CatalogueEntry {
            name: "l1",
            term: Box::new(L1Norm::new(w).unwrap()),
            conjugate_prox: Box::new(move |a, _| clamp_all(a, -w, w)),
        },
        CatalogueEntry {
            name: "squared_l2",
            term: Box::new(SquaredL2::centered(c.clone())),
            conjugate_prox: Box::new(move |a, t| a.zip_map(&c_sq, |x, ci| (x - t * ci) / (1.0 + t))),
        },
        CatalogueEntry {
            name: "box",
            term: Box::new(BoxIndicator::uniform(lo, hi).unwrap()),
            // support function sum_i max(lo y_i, hi y_i)
            conjugate_prox: Box::new(move |a, t| {
                a.map(|x| {
                    if x > t * hi {
                        x - t * hi
                    } else if x < t * lo {
                        x - t * lo
                    } else {
                        0.0
                    }
                })
            }),
        },
        CatalogueEntry {
            name: "scaled_l1",
            term: Box::new(Scaled::new(lambda, L1Norm::unit()).unwrap()),
            conjugate_prox: Box::new(move |a, _| clamp_all(a, -lambda, lambda)),
        },
        CatalogueEntry {
            name: "translated_l1",
            term: Box::new(Translated::new(c.clone(), L1Norm::new(w).unwrap()).unwrap()),
            conjugate_prox: Box::new(move |a, t| clamp_all(&a.add_scaled(-t, &c_tr), -w, w)),
        },
    ]
}

/// Moreau decomposition, subgradient inequality, envelope gradient and
/// duality, and nonexpansiveness for every catalogued term.
pub fn prox_calculus_suite(seed: u64) -> Result<Vec<Check>> {
    const DIM: usize = 6;
    let mut rng = seeded(seed);
    let mut checks = Vec::new();
    for entry in catalogue(DIM, seed ^ 0x5eed) {
        let term = entry.term.as_ref();

        let mut moreau: f64 = 0.0;
        for alpha in [0.1, 1.0, 10.0] {
            for _ in 0..50 {
                let u = Vector::random(&mut rng, DIM, 3.0);
                let p = term.prox(&u, alpha)?;
                let q = (entry.conjugate_prox)(&u.scaled(1.0 / alpha), 1.0 / alpha);
                let gap = (&p + &q.scaled(alpha)).distance(&u);
                moreau = moreau.max(gap / (1.0 + u.norm()));
            }
        }
        checks.push(Check::new(
            format!("moreau_decomposition/{}", entry.name),
            moreau <= 1e-10,
            format!("max relative gap {moreau:e}"),
        ));

        let mut subgradient: f64 = 0.0;
        for _ in 0..10 {
            let a = Vector::random(&mut rng, DIM, 3.0);
            let t = 0.5;
            let xp = term.prox(&a, t)?;
            let s = (&a - &xp).scaled(1.0 / t);
            let hp = term.value(&xp).unwrap_or(f64::NAN);
            for _ in 0..50 {
                let x = Vector::random(&mut rng, DIM, 3.0);
                let hx = term.value(&x).unwrap_or(f64::NAN);
                if hx.is_finite() {
                    let lower = hp + s.dot(&(&x - &xp));
                    subgradient = subgradient.max((lower - hx) / (1.0 + hx.abs()));
                }
            }
        }
        checks.push(Check::new(
            format!("subgradient_inequality/{}", entry.name),
            subgradient <= 1e-12,
            format!("max violation {subgradient:e}"),
        ));

        let mut grad_err: f64 = 0.0;
        let h = 1e-6;
        for _ in 0..20 {
            let u = Vector::random(&mut rng, DIM, 3.0);
            let alpha = 0.7;
            let env = moreau_envelope(term, &u, alpha)?;
            let fd = Vector::from_fn(DIM, |i| {
                let e = Vector::basis(DIM, i);
                let plus = moreau_envelope(term, &u.add_scaled(h, &e), alpha).map(|r| r.value);
                let minus = moreau_envelope(term, &u.add_scaled(-h, &e), alpha).map(|r| r.value);
                match (plus, minus) {
                    (Ok(p), Ok(m)) => (p - m) / (2.0 * h),
                    _ => f64::NAN,
                }
            });
            let err = fd.distance(&env.gradient) / env.gradient.norm().max(1.0);
            grad_err = if err.is_nan() { f64::INFINITY } else { grad_err.max(err) };
        }
        checks.push(Check::new(
            format!("envelope_gradient/{}", entry.name),
            grad_err <= 1e-5,
            format!("max relative error {grad_err:e}"),
        ));

        let mut expansion: f64 = 0.0;
        for _ in 0..100 {
            let a = Vector::random(&mut rng, DIM, 3.0);
            let b = Vector::random(&mut rng, DIM, 3.0);
            let t = 0.9;
            let d = term.prox(&a, t)?.distance(&term.prox(&b, t)?);
            expansion = expansion.max(d - a.distance(&b));
        }
        checks.push(Check::new(
            format!("nonexpansive/{}", entry.name),
            expansion <= 1e-12,
            format!("max excess {expansion:e}"),
        ));
    }

    // Envelope duality for pairs whose conjugate is itself catalogued.
    type Pair = (&'static str, Box<dyn ProximableTerm>, Box<dyn ProximableTerm>);
    let pairs: Vec<Pair> = vec![
        (
            "l1",
            Box::new(L1Norm::new(0.7)?),
            Box::new(BoxIndicator::uniform(-0.7, 0.7)?),
        ),
        (
            "squared_l2",
            Box::new(SquaredL2::origin()),
            Box::new(SquaredL2::origin()),
        ),
    ];
    for (name, h, h_star) in pairs {
        let mut gap: f64 = 0.0;
        for alpha in [0.1, 1.0, 10.0] {
            for _ in 0..50 {
                let u = Vector::random(&mut rng, DIM, 3.0);
                let lhs = moreau_envelope(h.as_ref(), &u, alpha)?.value
                    + moreau_envelope(h_star.as_ref(), &u.scaled(1.0 / alpha), 1.0 / alpha)?.value;
                let rhs = u.norm_squared() / (2.0 * alpha);
                gap = gap.max((lhs - rhs).abs() / (1.0 + rhs));
            }
        }
        checks.push(Check::new(
            format!("envelope_duality/{name}"),
            gap <= 1e-9,
            format!("max relative gap {gap:e}"),
        ));
    }
    Ok(checks)
}

/// One run of a step-size grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRun {
    pub alpha: f64,
    pub beta: f64,
    pub k_max: usize,
    pub status: SolveStatus,
    pub iterations: usize,
    pub r_p: f64,
    pub r_d: f64,
    pub distance_to_oracle: f64,
    /// Trace row at which the Lyapunov column first grew, if it did.
    pub lyapunov_increase_at: Option<usize>,
}

impl GridRun {
    pub fn converged(&self) -> bool {
        self.r_p + self.r_d <= CONVERGENCE_TOL
    }
}

/// Warm-start runs over `GRID_ALPHA x GRID_BETA x GRID_K_MAX` within the
/// instance's documented budget, with reference columns enabled.
pub fn convergence_grid(instance: &Instance, reference: &Reference) -> Result<Vec<GridRun>> {
    let c = instance.constants;
    let mut runs = Vec::new();
    for a in GRID_ALPHA {
        for b in GRID_BETA {
            for k_max in GRID_K_MAX {
                let (alpha, beta) = (a / c.lipschitz, b / c.norm_a.powi(2));
                // Both residuals at half the target keep their sum within it.
                let cfg = SolverConfig::new(&instance.problem, alpha, beta, k_max)
                    .with_max_outer(instance.documented_budget)
                    .with_outer_tol(CONVERGENCE_TOL / 2.0);
                let out = nested_primal_dual(&instance.problem, &cfg, Some(reference))?;
                let last = out.trace.last().expect("trace has a final row");
                runs.push(GridRun {
                    alpha,
                    beta,
                    k_max,
                    status: out.status,
                    iterations: out.outer_iterations,
                    r_p: last.r_p,
                    r_d: last.r_d,
                    distance_to_oracle: out.u_final.distance(&reference.u),
                    lyapunov_increase_at: lyapunov_increase(&out.trace, LYAPUNOV_SLACK)?,
                });
            }
        }
    }
    Ok(runs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRun {
    pub alpha: f64,
    pub beta: f64,
    pub k_max: usize,
    pub report: RateReport,
}

/// Linear-rate check over `RATE_ALPHA x GRID_BETA x RATE_K_MAX`. Needs
/// `mu` and `sigma` on the instance.
pub fn rate_grid(instance: &Instance, reference: &Reference) -> Result<Vec<RateRun>> {
    let c = instance.constants;
    let (mu, sigma) = match (c.mu, c.sigma) {
        (Some(mu), Some(sigma)) => (mu, sigma),
        _ => {
            return Err(crate::Error::Unavailable {
                what: "strong convexity and coercivity constants",
            })
        }
    };
    let mut runs = Vec::new();
    for a in RATE_ALPHA {
        for b in GRID_BETA {
            for k_max in RATE_K_MAX {
                let (alpha, beta) = (a / c.lipschitz, b / c.norm_a.powi(2));
                let epsilon = theoretical_rate(mu, c.lipschitz, alpha, beta, sigma)?;
                let cfg =
                    SolverConfig::new(&instance.problem, alpha, beta, k_max).with_max_outer(instance.documented_budget);
                let out = nested_primal_dual(&instance.problem, &cfg, Some(reference))?;
                let report = measure_rate(&out.trace, default_window(&out.trace)?, epsilon)?;
                runs.push(RateRun {
                    alpha,
                    beta,
                    k_max,
                    report,
                });
            }
        }
    }
    Ok(runs)
}

/// Everything checkable about an instance: oracle optimality, cross-checks
/// against a second oracle, declared constants, convergence, Lyapunov
/// monotonicity, and the rate when the instance declares `mu` and `sigma`.
///
/// `oracle` replaces the instance's stored minimizer when given.
pub fn verify_instance(instance: &Instance, oracle: Option<&Vector>) -> Result<Vec<Check>> {
    let p = &instance.problem;
    let c = instance.constants;
    let mut checks = Vec::new();

    let u = match oracle.or(instance.oracle_solution.as_ref()) {
        Some(u) => u.clone(),
        None => {
            checks.push(Check::new("oracle_residuals", false, "instance carries no oracle"));
            return Ok(checks);
        }
    };
    if u.len() != p.dim() {
        checks.push(Check::new(
            "oracle_residuals",
            false,
            format!("oracle has length {}, expected {}", u.len(), p.dim()),
        ));
        return Ok(checks);
    }
    let v = companion_dual(p, &u)?;
    let (r_p, r_d) = optimality_residuals(p, &u, &v, 1.0 / c.lipschitz, 0.5 / c.norm_a.powi(2))?;
    checks.push(Check::new(
        "oracle_residuals",
        r_p <= ORACLE_RESIDUAL_TOL && r_d <= ORACLE_RESIDUAL_TOL,
        format!("r_p = {r_p:e}, r_d = {r_d:e}"),
    ));

    match instance.name.as_str() {
        "tv-1d" | "fused-lasso" => {
            let second = if instance.name == "tv-1d" {
                let a = u.add_scaled(-1.0 / c.lipschitz, &p.f().gradient(&u));
                crate::innerloop::dual_fixed_point_converged(
                    p.split(),
                    &a,
                    1.0 / c.lipschitz,
                    1.0 / c.norm_a.powi(2),
                    &Vector::zeros(p.dual_dim()),
                    1e-12,
                    1_000_000,
                )?
                .prox_point
            } else {
                fused_lasso_reference_run(instance)?
            };
            let gap = second.distance(&u);
            checks.push(Check::new(
                "second_oracle",
                gap <= ORACLE_RESIDUAL_TOL,
                format!("distance to independent solution {gap:e}"),
            ));
        }
        _ => {}
    }

    let op = p.operator();
    let adjoint = adjoint_consistency_check(op, 100, instance.seed);
    let estimate = estimate_operator_norm(op, 500, instance.seed);
    let mut detail = format!(
        "adjoint gap {adjoint:e}, power-iteration norm {estimate} <= declared {}",
        op.norm_bound()
    );
    let mut ok = adjoint <= 1e-10 && estimate <= op.norm_bound() * (1.0 + 1e-12);
    if let Some(sigma) = c.sigma {
        let svd = adjoint_coercivity(op);
        ok &= (svd - sigma).abs() <= 1e-10;
        detail.push_str(&format!(", sigma {sigma} vs SVD {svd}"));
    }
    checks.push(Check::new("declared_constants", ok, detail));

    let reference = Reference { u, v };
    let grid = convergence_grid(instance, &reference)?;
    let failed: Vec<String> = grid
        .iter()
        .filter(|r| !r.converged())
        .map(|r| format!("(alpha {}, beta {}, k_max {})", r.alpha, r.beta, r.k_max))
        .collect();
    let worst = grid.iter().map(|r| r.iterations).max().unwrap_or(0);
    checks.push(Check::new(
        "convergence_grid",
        failed.is_empty(),
        if failed.is_empty() {
            format!(
                "{} runs, at most {worst} of {} outer iterations",
                grid.len(),
                instance.documented_budget
            )
        } else {
            format!("not converged: {}", failed.join(", "))
        },
    ));
    let increases: Vec<String> = grid
        .iter()
        .filter_map(|r| {
            r.lyapunov_increase_at
                .map(|row| format!("(alpha {}, beta {}, k_max {}) at row {row}", r.alpha, r.beta, r.k_max))
        })
        .collect();
    checks.push(Check::new(
        "lyapunov_monotone",
        increases.is_empty(),
        if increases.is_empty() {
            format!("{} runs non-increasing", grid.len())
        } else {
            format!("increase: {}", increases.join(", "))
        },
    ));

    if instance.has_rate_constants() {
        let runs = rate_grid(instance, &reference)?;
        let worst = runs
            .iter()
            .map(|r| r.report.max_measured - r.report.epsilon_bound)
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::new(
            "rate",
            runs.iter().all(|r| r.report.satisfied),
            format!("{} runs, largest (measured - bound) {worst:e}", runs.len()),
        ));
    }
    Ok(checks)
}
