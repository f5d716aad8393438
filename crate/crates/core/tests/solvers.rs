use nestprox::diagnostics::{default_window, measure_rate, theoretical_rate};
use nestprox::problems::*;
use nestprox::proxlib::{BoxIndicator, Zero};
use nestprox::smooth::{LeastSquares, SquaredDistance};
use nestprox::solver::{loris_verhoeven_step_solver, nested_primal_dual_observed, proximal_gradient_observed};
use nestprox::*;

#[test]
fn tv_instance_reaches_the_taut_string_solution() {
    let inst = make_tv_denoise_1d(20, 1.0, 7).unwrap();
    let oracle = inst.oracle_solution.as_ref().unwrap();
    let cfg = SolverConfig::new(&inst.problem, 1.0, 0.9 / 4.0, 3).with_max_outer(5000);
    let out = nested_primal_dual(&inst.problem, &cfg, None).unwrap();
    assert!(out.u_final.distance(oracle) <= 1e-5);
    let cfg = SolverConfig::new(&inst.problem, 1.0, 0.9 / 4.0, 1).with_max_outer(5000);
    let out = loris_verhoeven_step_solver(&inst.problem, &cfg, None).unwrap();
    assert!(out.u_final.distance(oracle) <= 1e-5);
}

#[test]
fn single_inner_step_matches_the_explicit_recursion() {
    let inst = make_tv_denoise_1d(20, 1.0, 7).unwrap();
    let cfg = SolverConfig::new(&inst.problem, 0.9, 0.2, 1).with_max_outer(50);
    let mut a = Vec::new();
    let mut b = Vec::new();
    nested_primal_dual_observed(&inst.problem, &cfg, None, |_, u, v| a.push((u.clone(), v.clone()))).unwrap();
    solver::loris_verhoeven_step_solver_observed(&inst.problem, &cfg, None, |_, u, v| b.push((u.clone(), v.clone())))
        .unwrap();
    assert_eq!(a.len(), 51);
    assert_eq!(a.len(), b.len());
    for ((u1, v1), (u2, v2)) in a.iter().zip(&b) {
        assert!(u1.distance(u2) <= 1e-14);
        assert!(v1.distance(v2) <= 1e-14);
    }
}

#[test]
fn zero_g_reduces_to_proximal_gradient() {
    let inst = make_fused_lasso(15, 0.0, 0.5, 3).unwrap();
    // Rebuild with g = 0 and the same f, h, A.
    let p = CompositeProblem::new(
        Box::new(SquaredDistance::new(inst.observation.clone())),
        Box::new(proxlib::L1Norm::new(0.5).unwrap()),
        Box::new(Zero),
        Box::new(ForwardDifference::new(15).unwrap()),
    )
    .unwrap();
    let cfg = SolverConfig::new(&p, 0.6, 0.2, 4).with_max_outer(40);
    let mut nested = Vec::new();
    nested_primal_dual_observed(&p, &cfg, None, |_, u, _| nested.push(u.clone())).unwrap();
    let mut plain = Vec::new();
    proximal_gradient_observed(p.f(), p.h(), 0.6, &Vector::zeros(15), 40, 0.0, |_, u| {
        plain.push(u.clone())
    })
    .unwrap();
    assert_eq!(nested.len(), plain.len());
    for (x, y) in nested.iter().zip(&plain) {
        assert!(x.distance(y) <= 1e-12);
    }
}

#[test]
fn projected_gradient_stays_feasible_and_descends() {
    let m = DenseMatrix::from_rows(&[&[2.0, 0.5, 0.0], &[0.3, 1.0, -0.4], &[0.0, 0.2, 1.5], &[1.0, 1.0, 1.0]]).unwrap();
    let f = LeastSquares::new(m, Vector::from_slice(&[3.0, -2.0, 4.0, 0.5]).unwrap()).unwrap();
    let h = BoxIndicator::uniform(-0.5, 0.5).unwrap();
    let alpha = 1.5 / f.lipschitz();
    let mut iterates = Vec::new();
    let out = proximal_gradient_observed(&f, &h, alpha, &Vector::zeros(3), 500, 1e-14, |_, u| {
        iterates.push(u.clone())
    })
    .unwrap();
    for u in &iterates {
        assert!(h.contains(u));
    }
    for w in out.trace.rows.windows(2) {
        assert!(w[1].objective <= w[0].objective + 1e-12);
    }
}

#[test]
fn limit_does_not_depend_on_the_inner_budget() {
    for spec in InstanceSpec::shipped() {
        let inst = spec.build().unwrap();
        let c = inst.constants;
        let sols: Vec<Vector> = [1, 2, 5, 20]
            .iter()
            .map(|&k| {
                let cfg = SolverConfig::new(&inst.problem, 1.0 / c.lipschitz, 0.6 / c.norm_a.powi(2), k)
                    .with_max_outer(inst.documented_budget);
                nested_primal_dual(&inst.problem, &cfg, None).unwrap().u_final
            })
            .collect();
        for i in 0..sols.len() {
            for j in i + 1..sols.len() {
                assert!(sols[i].distance(&sols[j]) <= 2e-5, "{}", inst.name);
            }
        }
    }
}

#[test]
fn cold_restart_is_much_worse_than_warm_start() {
    let inst = make_tv_denoise_1d(20, 1.0, 7).unwrap();
    let cfg = SolverConfig::new(&inst.problem, 1.0, 0.9 / 4.0, 2).with_max_outer(inst.documented_budget);
    let warm = nested_primal_dual(&inst.problem, &cfg, None).unwrap();
    let cold = nested_primal_dual(
        &inst.problem,
        &cfg.clone().with_start_mode(StartMode::Cold).unsafe_experiment(),
        None,
    )
    .unwrap();
    let (w, c) = (warm.trace.last().unwrap().r_p, cold.trace.last().unwrap().r_p);
    assert!(c >= 10.0 * w, "cold {c} warm {w}");
}

#[test]
fn oracle_pair_has_tiny_residuals_at_any_steps() {
    let inst = make_tv_denoise_1d(20, 1.0, 7).unwrap();
    let r = inst.reference().unwrap();
    for (alpha, beta) in [(0.5, 0.1), (1.0, 0.2), (1.9, 0.24)] {
        let (rp, rd) = optimality_residuals(&inst.problem, &r.u, &r.v, alpha, beta).unwrap();
        assert!(rp <= 1e-8 && rd <= 1e-8);
    }
}

#[test]
fn rate_instance_contracts_at_least_as_fast_as_the_bound() {
    let inst = make_strongly_convex_rate_instance(10, 11).unwrap();
    let r = inst.reference().unwrap();
    let c = inst.constants;
    let (alpha, beta) = (1.0, 0.6 / c.norm_a.powi(2));
    let eps = theoretical_rate(1.0, 1.0, alpha, beta, c.sigma.unwrap()).unwrap();
    let cfg = SolverConfig::new(&inst.problem, alpha, beta, 3).with_max_outer(inst.documented_budget);
    let out = nested_primal_dual(&inst.problem, &cfg, Some(&r)).unwrap();
    let report = measure_rate(&out.trace, default_window(&out.trace).unwrap(), eps).unwrap();
    assert!(report.satisfied, "{report:?}");
    // A deliberately tight bound must be rejected.
    let tight = measure_rate(
        &out.trace,
        default_window(&out.trace).unwrap(),
        report.max_measured / 2.0,
    )
    .unwrap();
    assert!(!tight.satisfied);
}

#[test]
fn identical_runs_give_identical_traces() {
    let inst = make_fused_lasso(15, 0.5, 0.5, 3).unwrap();
    let r = inst.reference().unwrap();
    let cfg = SolverConfig::new(&inst.problem, 1.0, 0.1, 5).with_max_outer(300);
    let a = nested_primal_dual(&inst.problem, &cfg, Some(&r))
        .unwrap()
        .trace
        .to_csv_string();
    let b = nested_primal_dual(&inst.problem, &cfg, Some(&r))
        .unwrap()
        .trace
        .to_csv_string();
    assert_eq!(a, b);
}
