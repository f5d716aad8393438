//! Run files: one self-contained JSON document per run.
//!
//! Values resolve in three layers: built-in defaults, then the run file,
//! then command-line flags.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use nestprox::problems::{Instance, InstanceSpec};
use nestprox::{SolverConfig, StartMode, Vector};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Largest dimension accepted from a run file for the difference-operator
/// instances; the dense instance is capped lower because it is built via SVD.
pub const MAX_DIM: usize = 100_000;
pub const MAX_DENSE_DIM: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Nested,
    /// The single-inner-step recursion; needs `h = 0` and `k_max = 1`.
    Lv17,
    /// Plain proximal gradient; needs `g = 0`.
    Proxgrad,
}

impl std::str::FromStr for SolverKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nested" => Ok(SolverKind::Nested),
            "lv17" => Ok(SolverKind::Lv17),
            "proxgrad" => Ok(SolverKind::Proxgrad),
            other => bail!("unknown solver {other:?}; expected nested, lv17 or proxgrad"),
        }
    }
}

fn default_k_max() -> usize {
    3
}

fn default_outer_tol() -> f64 {
    1e-9
}

fn default_trace_every() -> usize {
    1
}

fn warm() -> StartMode {
    StartMode::Warm
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    /// Defaults to `1/L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Defaults to `0.9/||A||^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "warm")]
    pub start_mode: StartMode,
    /// Defaults to the instance's documented budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_outer: Option<usize>,
    #[serde(default = "default_outer_tol")]
    pub outer_tol: f64,
    #[serde(default = "default_trace_every")]
    pub trace_every: usize,
    #[serde(default)]
    pub allow_unsafe: bool,
}

impl Default for ConfigSpec {
    fn default() -> Self {
        ConfigSpec {
            alpha: None,
            beta: None,
            k_max: default_k_max(),
            start_mode: StartMode::Warm,
            max_outer: None,
            outer_tol: default_outer_tol(),
            trace_every: default_trace_every(),
            allow_unsafe: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "Outputs::default_trace")]
    pub trace_path: PathBuf,
    #[serde(default = "Outputs::default_report")]
    pub report_path: PathBuf,
}

impl Outputs {
    fn default_trace() -> PathBuf {
        "trace.csv".into()
    }

    fn default_report() -> PathBuf {
        "report.json".into()
    }
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            trace_path: Self::default_trace(),
            report_path: Self::default_report(),
        }
    }
}

/// One arm of a comparison run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub start_mode: StartMode,
    pub k_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Variant {
    pub fn default_label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| format!("{}-k{}", self.start_mode, self.k_max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub instance: InstanceSpec,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default)]
    pub config: ConfigSpec,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<Variant>,
}

impl RunSpec {
    pub fn new(instance: InstanceSpec) -> Self {
        RunSpec {
            instance,
            solver: SolverKind::Nested,
            config: ConfigSpec::default(),
            outputs: Outputs::default(),
            comparisons: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run specs always serialize")
    }

    /// Checks everything that does not need the built instance.
    pub fn validate(&self) -> Result<()> {
        validate_instance(&self.instance)?;
        let c = &self.config;
        if let Some(alpha) = c.alpha {
            ensure!(
                alpha.is_finite() && alpha > 0.0,
                "invalid alpha: must be positive, got {alpha}"
            );
        }
        if let Some(beta) = c.beta {
            ensure!(
                beta.is_finite() && beta > 0.0,
                "invalid beta: must be positive, got {beta}"
            );
        }
        ensure!(
            (1..=1_000_000).contains(&c.k_max),
            "invalid k_max: must be in 1..=1000000, got {}",
            c.k_max
        );
        ensure!(c.trace_every >= 1, "invalid trace_every: must be at least 1");
        ensure!(
            c.outer_tol.is_finite() && c.outer_tol >= 0.0,
            "invalid outer_tol: must be >= 0"
        );
        if let Some(n) = c.max_outer {
            ensure!(n <= 100_000_000, "invalid max_outer: at most 100000000, got {n}");
        }
        for v in &self.comparisons {
            ensure!(
                (1..=1_000_000).contains(&v.k_max),
                "invalid k_max in comparison: got {}",
                v.k_max
            );
        }
        Ok(())
    }

    /// The solver configuration for `instance`, with defaults filled in.
    /// Step-size conditions are checked later by the solver itself.
    pub fn solver_config(&self, instance: &Instance) -> SolverConfig {
        let c = &self.config;
        let k = instance.constants;
        let alpha = c.alpha.unwrap_or(1.0 / k.lipschitz);
        let beta = c.beta.unwrap_or(0.9 / k.norm_a.powi(2));
        let mut cfg = SolverConfig::new(&instance.problem, alpha, beta, c.k_max)
            .with_start_mode(c.start_mode)
            .with_max_outer(c.max_outer.unwrap_or(instance.documented_budget))
            .with_outer_tol(c.outer_tol)
            .with_trace_every(c.trace_every);
        cfg.allow_unsafe = c.allow_unsafe;
        cfg
    }
}

fn validate_instance(spec: &InstanceSpec) -> Result<()> {
    match *spec {
        InstanceSpec::Tv1d { d, lambda, .. } => {
            ensure!(
                (2..=MAX_DIM).contains(&d),
                "invalid d: tv-1d needs 2 <= d <= {MAX_DIM}, got {d}"
            );
            ensure!(
                lambda.is_finite() && lambda > 0.0,
                "invalid lambda: must be positive, got {lambda}"
            );
        }
        InstanceSpec::FusedLasso {
            d, lambda1, lambda2, ..
        } => {
            ensure!(
                (2..=MAX_DIM).contains(&d),
                "invalid d: fused-lasso needs 2 <= d <= {MAX_DIM}, got {d}"
            );
            ensure!(
                lambda1.is_finite() && lambda1 >= 0.0 && lambda2.is_finite() && lambda2 >= 0.0,
                "invalid lambda: fused-lasso weights must be finite and >= 0"
            );
        }
        InstanceSpec::StronglyConvex { d, .. } => {
            ensure!(
                (1..=MAX_DENSE_DIM).contains(&d),
                "invalid d: strongly-convex needs 1 <= d <= {MAX_DENSE_DIM}, got {d}"
            );
        }
    }
    Ok(())
}

/// Parses and validates a run file.
pub fn parse_run_spec(text: &str) -> Result<RunSpec> {
    let spec: RunSpec = serde_json::from_str(text).context("malformed run file")?;
    spec.validate()?;
    Ok(spec)
}

/// Parses `name` or `name:key=value,key=value`, e.g.
/// `tv-1d:d=20,lambda=1,seed=7`. Missing parameters take the shipped
/// instance's values.
pub fn parse_instance_arg(text: &str) -> Result<InstanceSpec> {
    let (name, params) = match text.split_once(':') {
        Some((n, p)) => (n.trim(), p),
        None => (text.trim(), ""),
    };
    let base = InstanceSpec::shipped()
        .into_iter()
        .find(|s| s.name() == name)
        .with_context(|| format!("unknown instance {name:?}; see list-instances"))?;
    let mut fields: Map<String, Value> = match serde_json::to_value(&base)? {
        Value::Object(m) => m,
        _ => unreachable!("instance specs serialize as objects"),
    };
    for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .with_context(|| format!("expected key=value, got {pair:?}"))?;
        let key = key.trim();
        ensure!(
            key != "name" && fields.contains_key(key),
            "unknown parameter {key:?} for {name}"
        );
        let value: Value = serde_json::from_str(value.trim())
            .ok()
            .filter(Value::is_number)
            .with_context(|| format!("parameter {key} needs a number, got {value:?}"))?;
        fields.insert(key.to_string(), value);
    }
    let spec: InstanceSpec = serde_json::from_value(Value::Object(fields)).context("bad instance parameters")?;
    validate_instance(&spec)?;
    Ok(spec)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OracleFile {
    Bare(Vec<f64>),
    Wrapped { u: Vec<f64> },
}

/// Reads an oracle file: a JSON array of numbers or `{"u": [...]}`.
pub fn parse_oracle(bytes: &[u8]) -> Result<Vector> {
    let file: OracleFile =
        serde_json::from_slice(bytes).context("oracle file must be a JSON array or {\"u\": [...]}")?;
    let entries = match file {
        OracleFile::Bare(u) | OracleFile::Wrapped { u } => u,
    };
    Ok(Vector::new(entries)?)
}
