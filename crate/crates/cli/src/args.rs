//! Command-line parsing and dispatch.
//!
//! Precedence, lowest first: built-in defaults, the `--config` run file,
//! then individual flags.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nestprox::problems::InstanceSpec;
use nestprox::StartMode;

use crate::run;
use crate::spec::{parse_instance_arg, parse_oracle, parse_run_spec, RunSpec, SolverKind, Variant};

/// Exit status for invalid input: bad flags, bad files, violated preconditions.
pub const EXIT_INVALID: i32 = 2;
/// Exit status when a run completed but a requested check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "nestprox",
    version,
    about = "Nested primal-dual proximal solvers with built-in diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver and write a trace CSV and a JSON report.
    Solve(RunArgs),
    /// Run several (start mode, k_max) variants on one instance and budget.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// A variant as `warm:K` or `cold:K`, optionally `=label`; repeatable.
        #[arg(long = "variant", value_name = "MODE:K[=LABEL]")]
        variants: Vec<String>,
    },
    /// Re-derive an instance's oracle and run its check suites.
    Verify(VerifyArgs),
    /// Print the shipped instances and their constants as JSON.
    ListInstances,
}

/// A step size given as an absolute value or as a multiple of the
/// instance scale: `3/L` for alpha, `0.9/A2` (meaning `0.9/||A||^2`) for beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Absolute(f64),
    Scaled(f64),
}

impl Step {
    fn value(self, unit: f64) -> f64 {
        match self {
            Step::Absolute(x) => x,
            Step::Scaled(x) => x * unit,
        }
    }
}

impl FromStr for Step {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let (num, scaled) = match s.split_once('/') {
            Some((n, "L" | "A2")) => (n, true),
            Some((_, unit)) => return Err(format!("unknown unit {unit:?}; use /L or /A2")),
            None => (s, false),
        };
        let x: f64 = num.trim().parse().map_err(|_| format!("not a number: {num:?}"))?;
        Ok(if scaled { Step::Scaled(x) } else { Step::Absolute(x) })
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON run file; flags below override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Instance as `name` or `name:key=value,...`; needed without --config.
    #[arg(long, value_name = "SPEC")]
    pub instance: Option<String>,
    #[arg(long, value_name = "nested|lv17|proxgrad")]
    pub solver: Option<SolverKind>,
    #[arg(long, value_name = "STEP")]
    pub alpha: Option<Step>,
    #[arg(long, value_name = "STEP")]
    pub beta: Option<Step>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_name = "warm|cold", value_parser = parse_start_mode)]
    pub start_mode: Option<StartMode>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    #[arg(long)]
    pub outer_tol: Option<f64>,
    /// Overrides the instance seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Allow step sizes outside the convergence conditions and cold starts.
    #[arg(long = "unsafe")]
    pub allow_unsafe: bool,
    #[arg(long, value_name = "N")]
    pub trace_every: Option<usize>,
    /// Directory for relative output paths.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Instance as `name` or `name:key=value,...`.
    #[arg(long, value_name = "SPEC", required_unless_present = "config")]
    pub instance: Option<String>,
    /// Run file whose instance is verified.
    #[arg(long, value_name = "PATH", conflicts_with = "instance")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file holding a candidate solution to check instead of the built-in one.
    #[arg(long, value_name = "PATH")]
    pub oracle: Option<PathBuf>,
    /// Also write the report to `<DIR>/verify.json`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn parse_start_mode(s: &str) -> std::result::Result<StartMode, String> {
    match s {
        "warm" => Ok(StartMode::Warm),
        "cold" => Ok(StartMode::Cold),
        other => Err(format!("expected warm or cold, got {other:?}")),
    }
}

fn parse_variant(s: &str) -> Result<Variant> {
    let (body, label) = match s.split_once('=') {
        Some((b, l)) => (b, Some(l.to_string())),
        None => (s, None),
    };
    let (mode, k) = body
        .split_once(':')
        .with_context(|| format!("variant {s:?} must look like warm:3"))?;
    Ok(Variant {
        start_mode: parse_start_mode(mode.trim()).map_err(anyhow::Error::msg)?,
        k_max: k
            .trim()
            .parse()
            .with_context(|| format!("invalid k_max in variant {s:?}"))?,
        label,
    })
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Folds the run file and flags into one validated spec.
pub fn resolve_run_spec(args: &RunArgs) -> Result<RunSpec> {
    let mut spec = match (&args.config, &args.instance) {
        (Some(path), _) => parse_run_spec(&read(path)?)?,
        (None, Some(inst)) => RunSpec::new(parse_instance_arg(inst)?),
        (None, None) => bail!("invalid instance: pass --instance or --config"),
    };
    if let (Some(_), Some(inst)) = (&args.config, &args.instance) {
        spec.instance = parse_instance_arg(inst)?;
    }
    if let Some(seed) = args.seed {
        spec.instance = spec.instance.clone().with_seed(seed);
    }
    if let Some(s) = args.solver {
        spec.solver = s;
    }
    let c = &mut spec.config;
    if let Some(k) = args.k_max {
        c.k_max = k;
    }
    if let Some(m) = args.start_mode {
        c.start_mode = m;
    }
    if let Some(n) = args.max_outer {
        c.max_outer = Some(n);
    }
    if let Some(t) = args.outer_tol {
        c.outer_tol = t;
    }
    if let Some(n) = args.trace_every {
        c.trace_every = n;
    }
    c.allow_unsafe |= args.allow_unsafe;
    let scaled = |s: Option<Step>| matches!(s, Some(Step::Scaled(_)));
    if scaled(args.alpha) || scaled(args.beta) {
        let k = spec.instance.build()?.constants;
        spec.config.alpha = args.alpha.map(|s| s.value(1.0 / k.lipschitz)).or(spec.config.alpha);
        spec.config.beta = args.beta.map(|s| s.value(1.0 / k.norm_a.powi(2))).or(spec.config.beta);
    } else {
        spec.config.alpha = args.alpha.map(|s| s.value(1.0)).or(spec.config.alpha);
        spec.config.beta = args.beta.map(|s| s.value(1.0)).or(spec.config.beta);
    }
    spec.validate()?;
    Ok(spec)
}

fn verify_instance_spec(args: &VerifyArgs) -> Result<InstanceSpec> {
    let spec = match (&args.config, &args.instance) {
        (Some(path), _) => parse_run_spec(&read(path)?)?.instance,
        (None, Some(inst)) => parse_instance_arg(inst)?,
        (None, None) => bail!("invalid instance: pass --instance or --config"),
    };
    Ok(match args.seed {
        Some(seed) => spec.with_seed(seed),
        None => spec,
    })
}

/// Runs a parsed command line and returns the process exit status.
pub fn execute(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INVALID
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve(args) => {
            let spec = resolve_run_spec(&args)?;
            let result = run::solve(&spec)?;
            let (trace, report) = run::write_outputs(&result, &spec, &args.out)?;
            let r = &result.report;
            println!(
                "{}: {} after {} iterations, r_p={:e} r_d={:e}",
                r.instance.name,
                r.status.as_str(),
                r.iterations,
                r.final_residuals.r_p,
                r.final_residuals.r_d
            );
            println!("trace: {}\nreport: {}", trace.display(), report.display());
            Ok(0)
        }
        Command::Compare { run: args, variants } => {
            let mut spec = resolve_run_spec(&args)?;
            if !variants.is_empty() {
                spec.comparisons = variants.iter().map(|v| parse_variant(v)).collect::<Result<_>>()?;
            }
            let result = run::compare(&spec)?;
            let (trace, report) = run::write_comparison(&result, &spec, &args.out)?;
            for v in &result.report.variants {
                println!(
                    "{}: {} after {} iterations, r_p={:e}",
                    v.label,
                    v.status.as_str(),
                    v.iterations,
                    v.final_residuals.r_p
                );
            }
            println!("trace: {}\nreport: {}", trace.display(), report.display());
            Ok(0)
        }
        Command::Verify(args) => {
            let spec = verify_instance_spec(&args)?;
            let oracle = match &args.oracle {
                Some(path) => {
                    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
                    Some(parse_oracle(&bytes)?)
                }
                None => None,
            };
            let report = run::verify(&spec, oracle.as_ref())?;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if let Some(dir) = &args.out {
                fs::create_dir_all(dir)?;
                let path = dir.join("verify.json");
                fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            if report.passed {
                Ok(0)
            } else {
                let failing: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                eprintln!("failed checks: {}", failing.join(", "));
                Ok(EXIT_CHECK_FAILED)
            }
        }
        Command::ListInstances => {
            println!("{}", serde_json::to_string_pretty(&run::list_instances()?)?);
            Ok(0)
        }
    }
}
