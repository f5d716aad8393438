//! The pipelines behind each subcommand. Everything here is pure apart from
//! the explicit file writes in [`write_outputs`] and [`write_comparison`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use nestprox::diagnostics::{default_window, measure_rate, theoretical_rate};
use nestprox::problems::{Constants, Instance, InstanceSpec};
use nestprox::solver::proximal_gradient;
use nestprox::trace::format_f64;
use nestprox::verify::{verify_instance, Check};
use nestprox::{loris_verhoeven_step_solver, nested_primal_dual, Reference, SolveOutcome, SolveStatus, Vector};
use serde::{Deserialize, Serialize};

use crate::spec::{RunSpec, SolverKind, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub r_p: f64,
    pub r_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub epsilon_bound: f64,
    pub max_measured: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub name: String,
    pub seed: u64,
    pub constants: Constants,
    pub documented_budget: usize,
}

impl InstanceSummary {
    fn of(instance: &Instance) -> Self {
        InstanceSummary {
            name: instance.name.clone(),
            seed: instance.seed,
            constants: instance.constants,
            documented_budget: instance.documented_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_residuals: Residuals,
    pub distance_to_oracle: Option<f64>,
    pub rate: Option<RateSummary>,
    pub instance: InstanceSummary,
    pub config_echo: RunSpec,
    pub unsafe_used: bool,
    pub wall_time_seconds: f64,
}

#[derive(Debug)]
pub struct SolveRun {
    pub outcome: SolveOutcome,
    pub report: SolveReport,
}

/// Builds the instance and its reference pair when it carries an oracle.
pub fn prepare(spec: &InstanceSpec) -> Result<(Instance, Option<Reference>)> {
    let instance = spec
        .build()
        .with_context(|| format!("building instance {}", spec.name()))?;
    let reference = match instance.oracle_solution {
        Some(_) => Some(instance.reference()?),
        None => None,
    };
    Ok((instance, reference))
}

fn run_solver(spec: &RunSpec, instance: &Instance, reference: Option<&Reference>) -> Result<SolveOutcome> {
    let cfg = spec.solver_config(instance);
    let p = &instance.problem;
    Ok(match spec.solver {
        SolverKind::Nested => nested_primal_dual(p, &cfg, reference)?,
        SolverKind::Lv17 => loris_verhoeven_step_solver(p, &cfg, reference)?,
        SolverKind::Proxgrad => {
            ensure!(p.g().is_zero(), "invalid solver: proxgrad needs an instance with g = 0");
            proximal_gradient(p.f(), p.h(), cfg.alpha, &cfg.u0, cfg.max_outer, cfg.outer_tol)?
        }
    })
}

fn rate_summary(spec: &RunSpec, instance: &Instance, outcome: &SolveOutcome) -> Option<RateSummary> {
    if !instance.has_rate_constants() || spec.solver == SolverKind::Proxgrad {
        return None;
    }
    let c = instance.constants;
    let cfg = spec.solver_config(instance);
    let epsilon = theoretical_rate(c.mu?, c.lipschitz, cfg.alpha, cfg.beta, c.sigma?).ok()?;
    let window = default_window(&outcome.trace).ok()?;
    let report = measure_rate(&outcome.trace, window, epsilon).ok()?;
    Some(RateSummary {
        epsilon_bound: report.epsilon_bound,
        max_measured: report.max_measured,
        satisfied: report.satisfied,
    })
}

/// Runs one solve. Divergence is a result, not an error.
pub fn solve(spec: &RunSpec) -> Result<SolveRun> {
    spec.validate()?;
    let start = Instant::now();
    let (instance, reference) = prepare(&spec.instance)?;
    let outcome = run_solver(spec, &instance, reference.as_ref())?;
    let last = outcome.trace.last().context("solver produced an empty trace")?;
    let report = SolveReport {
        status: outcome.status,
        iterations: outcome.outer_iterations,
        final_residuals: Residuals {
            r_p: last.r_p,
            r_d: last.r_d,
        },
        distance_to_oracle: instance.oracle_solution.as_ref().map(|u| outcome.u_final.distance(u)),
        rate: rate_summary(spec, &instance, &outcome),
        instance: InstanceSummary::of(&instance),
        config_echo: spec.clone(),
        unsafe_used: spec.config.allow_unsafe,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(SolveRun { outcome, report })
}

fn resolve(out_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_dir.join(path)
    }
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(())
}

/// Writes the trace CSV and report JSON; returns their paths.
pub fn write_outputs(run: &SolveRun, spec: &RunSpec, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let trace_path = resolve(out_dir, &spec.outputs.trace_path);
    let report_path = resolve(out_dir, &spec.outputs.report_path);
    create_parent(&trace_path)?;
    create_parent(&report_path)?;
    let file = fs::File::create(&trace_path).with_context(|| format!("creating {}", trace_path.display()))?;
    run.outcome.trace.write_csv(std::io::BufWriter::new(file))?;
    fs::write(&report_path, serde_json::to_string_pretty(&run.report)? + "\n")
        .with_context(|| format!("writing {}", report_path.display()))?;
    Ok((trace_path, report_path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub label: String,
    pub start_mode: nestprox::StartMode,
    pub k_max: usize,
    pub status: SolveStatus,
    pub iterations: usize,
    pub final_residuals: Residuals,
    pub distance_to_oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub variants: Vec<VariantReport>,
    /// `||u_i - u_j||` between final iterates, keyed `"label_i|label_j"`.
    pub pairwise_distances: BTreeMap<String, f64>,
    pub instance: InstanceSummary,
    pub config_echo: RunSpec,
    pub unsafe_used: bool,
    pub wall_time_seconds: f64,
}

#[derive(Debug)]
pub struct CompareRun {
    pub outcomes: Vec<SolveOutcome>,
    pub report: CompareReport,
}

fn unique_labels(variants: &[Variant]) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    variants
        .iter()
        .map(|v| {
            let base = v.default_label();
            let count = seen.entry(base.clone()).or_insert(0);
            *count += 1;
            if *count == 1 {
                base
            } else {
                format!("{base}#{count}")
            }
        })
        .collect()
}

/// Runs every comparison variant on one instance and budget, concurrently.
pub fn compare(spec: &RunSpec) -> Result<CompareRun> {
    spec.validate()?;
    ensure!(
        spec.comparisons.len() >= 2,
        "invalid comparisons: need at least two variants"
    );
    ensure!(
        spec.solver == SolverKind::Nested,
        "invalid solver: compare runs the nested solver"
    );
    let start = Instant::now();
    let (instance, reference) = prepare(&spec.instance)?;
    let labels = unique_labels(&spec.comparisons);
    let variant_specs: Vec<RunSpec> = spec
        .comparisons
        .iter()
        .map(|v| {
            let mut s = spec.clone();
            s.config.start_mode = v.start_mode;
            s.config.k_max = v.k_max;
            s.comparisons.clear();
            s
        })
        .collect();
    let outcomes: Vec<Result<SolveOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = variant_specs
            .iter()
            .map(|s| {
                let (instance, reference) = (&instance, reference.as_ref());
                scope.spawn(move || run_solver(s, instance, reference))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| bail!("a comparison variant panicked")))
            .collect()
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let variants = outcomes
        .iter()
        .zip(&spec.comparisons)
        .zip(&labels)
        .map(|((o, v), label)| {
            let last = o.trace.last().expect("non-empty trace");
            VariantReport {
                label: label.clone(),
                start_mode: v.start_mode,
                k_max: v.k_max,
                status: o.status,
                iterations: o.outer_iterations,
                final_residuals: Residuals {
                    r_p: last.r_p,
                    r_d: last.r_d,
                },
                distance_to_oracle: instance.oracle_solution.as_ref().map(|u| o.u_final.distance(u)),
            }
        })
        .collect();
    let mut pairwise_distances = BTreeMap::new();
    for i in 0..outcomes.len() {
        for j in i + 1..outcomes.len() {
            pairwise_distances.insert(
                format!("{}|{}", labels[i], labels[j]),
                outcomes[i].u_final.distance(&outcomes[j].u_final),
            );
        }
    }
    let report = CompareReport {
        variants,
        pairwise_distances,
        instance: InstanceSummary::of(&instance),
        config_echo: spec.clone(),
        unsafe_used: spec.config.allow_unsafe,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(CompareRun { outcomes, report })
}

/// One row per iteration index seen by any variant, one `r_p` column per
/// variant; iterations a variant did not record are empty.
pub fn comparison_csv(run: &CompareRun) -> Result<String> {
    let mut by_n: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
    let width = run.outcomes.len();
    for (i, o) in run.outcomes.iter().enumerate() {
        for row in &o.trace.rows {
            by_n.entry(row.n).or_insert_with(|| vec![None; width])[i] = Some(row.r_p);
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = std::iter::once("n".to_string())
        .chain(run.report.variants.iter().map(|v| format!("r_p_{}", v.label)))
        .collect();
    w.write_record(&header)?;
    for (n, cols) in by_n {
        let record: Vec<String> = std::iter::once(n.to_string())
            .chain(cols.into_iter().map(|c| c.map(format_f64).unwrap_or_default()))
            .collect();
        w.write_record(&record)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn write_comparison(run: &CompareRun, spec: &RunSpec, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let trace_path = resolve(out_dir, &spec.outputs.trace_path);
    let report_path = resolve(out_dir, &spec.outputs.report_path);
    create_parent(&trace_path)?;
    create_parent(&report_path)?;
    fs::write(&trace_path, comparison_csv(run)?).with_context(|| format!("writing {}", trace_path.display()))?;
    fs::write(&report_path, serde_json::to_string_pretty(&run.report)? + "\n")
        .with_context(|| format!("writing {}", report_path.display()))?;
    Ok((trace_path, report_path))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub instance: InstanceSummary,
    pub oracle_source: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Re-derives the instance and runs every check that applies to it.
pub fn verify(spec: &InstanceSpec, oracle: Option<&Vector>) -> Result<VerifyReport> {
    let instance = spec
        .build()
        .with_context(|| format!("building instance {}", spec.name()))?;
    let checks = verify_instance(&instance, oracle)?;
    Ok(VerifyReport {
        instance: InstanceSummary::of(&instance),
        oracle_source: if oracle.is_some() { "file" } else { "built-in" }.into(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceListing {
    pub spec: InstanceSpec,
    pub summary: InstanceSummary,
    pub has_rate_constants: bool,
}

pub fn list_instances() -> Result<Vec<InstanceListing>> {
    InstanceSpec::shipped()
        .into_iter()
        .map(|spec| {
            let inst = spec.build()?;
            Ok(InstanceListing {
                summary: InstanceSummary::of(&inst),
                has_rate_constants: inst.has_rate_constants(),
                spec,
            })
        })
        .collect()
}
