//! Command-line front end for `epistemic-qm`.
//!
//! Exit codes: `0` success, `2` usage, configuration or parse errors, `3`
//! assignments on incomparable spaces, `4` evidence an agent deems impossible.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use epistemic_qm::classical::common_support;
use epistemic_qm::numerics::{subspace_intersection_rank, SUPPORT_TOL};
use epistemic_qm::quantum::quantum_compatible;
use epistemic_qm::scenarios::{
    run_improvement, run_pooling, run_reconciliation, run_scenario_with_tol, Assignment,
    ImprovementCase, Mode, PoolMethod, ScenarioConfig, Variant,
};
use epistemic_qm::Error;
use serde_json::{json, Value};

pub mod goldens;
pub mod layout;
pub mod report;
pub mod statefile;

use report::{assignment_json, bell_probabilities, render, scenario_json, Format};
use statefile::StateFile;

/// Environment variable overriding the support tolerance.
pub const TOL_ENV: &str = "EPISTEMIC_QM_TOL";

pub const ZERO_EVIDENCE_MESSAGE: &str = "impossible evidence for this agent";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SpaceMismatch | Error::DimMismatch(..) => CliError {
                code: 3,
                message: e.to_string(),
            },
            Error::ZeroEvidence(_) => CliError {
                code: 4,
                message: ZERO_EVIDENCE_MESSAGE.into(),
            },
            other => CliError::usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "epistemic-qm",
    version,
    about = "Compare, reconcile and pool classical and quantum state assignments"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a catalog scenario and print both agents' assignments and verdicts.
    Scenario {
        /// canonical, wrong_initial, not_gate, time_evolution, phase, two_wigners,
        /// benefit_of_doubt or ignorant_wigner.
        name: String,
        #[command(flatten)]
        params: ScenarioParams,
    },
    /// Check whether two state files are compatible.
    Compat { a: PathBuf, b: PathBuf },
    /// Pool Wigner's and the friend's canonical assignments.
    Pool {
        /// linear, multiplicative or supra.
        method: String,
        /// Weights `w_W,w_F`.
        #[arg(long = "w", value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Use the open-minded Wigner assignment.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run one improvement case (c1a-c1d, q2a-q2d).
    Improve {
        case: String,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run the reconciliation experiment and condition on its outcome.
    Update {
        /// classical or quantum.
        mode: String,
        #[arg(long)]
        outcome: String,
        #[arg(long, value_enum, default_value = "both")]
        agent: Agent,
        #[arg(long, default_value = "canonical")]
        scenario: String,
        #[command(flatten)]
        params: ScenarioParams,
    },
    /// Write the reference tables into a directory.
    Goldens { out_dir: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Agent {
    Wigner,
    Friend,
    Both,
}

/// Scenario parameters; angles in radians, `pi` and `pi/N` accepted.
#[derive(Debug, Default, Args)]
pub struct ScenarioParams {
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long = "omega-t", value_parser = parse_angle, allow_hyphen_values = true)]
    pub omega_t: Option<f64>,
    #[arg(long = "phi-left", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi_left: Option<f64>,
    #[arg(long = "phi-right", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi_right: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl ScenarioParams {
    fn config(&self, name: &str) -> Result<ScenarioConfig, CliError> {
        let variant: Variant = name.parse()?;
        let mut params = BTreeMap::new();
        for (key, value) in [
            ("phi", self.phi),
            ("omega_t", self.omega_t),
            ("phi_left", self.phi_left),
            ("phi_right", self.phi_right),
            ("epsilon", self.epsilon),
        ] {
            if let Some(v) = value {
                params.insert(key.to_string(), v);
            }
        }
        Ok(ScenarioConfig::new(variant, params)?)
    }
}

/// Parses a radian angle: a decimal number, `pi`, `pi/N`, optionally negated.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    let value = match body.strip_prefix("pi") {
        Some("") => PI,
        Some(rest) => {
            let n: u32 = rest
                .strip_prefix('/')
                .and_then(|d| d.parse().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("invalid angle `{s}`"))?;
            PI / f64::from(n)
        }
        None => body
            .parse::<f64>()
            .map_err(|_| format!("invalid angle `{s}`"))?,
    };
    if value.is_finite() {
        Ok(sign * value)
    } else {
        Err(format!("invalid angle `{s}`"))
    }
}

/// Support tolerance from `EPISTEMIC_QM_TOL`, or the library default.
pub fn tolerance(env: Option<&str>) -> Result<f64, CliError> {
    match env {
        None => Ok(SUPPORT_TOL),
        Some(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(CliError::usage(format!(
                "{TOL_ENV} must be a positive number, got `{s}`"
            ))),
        },
    }
}

fn compat(a: &StateFile, b: &StateFile, tol: f64) -> Result<Value, CliError> {
    match (a, b) {
        (StateFile::Classical(x), StateFile::Classical(y)) => {
            let common = common_support(x, y, tol)?;
            Ok(
                json!({"kind": "classical", "compatible": !common.is_empty(), "common_support": common}),
            )
        }
        (StateFile::Quantum { state: x, .. }, StateFile::Quantum { state: y, .. }) => {
            let compatible = quantum_compatible(x, y, tol)?;
            let rank = subspace_intersection_rank(&x.support(tol), &y.support(tol), tol)?;
            Ok(json!({"kind": "quantum", "compatible": compatible, "common_support": rank}))
        }
        _ => Err(CliError {
            code: 3,
            message: "cannot compare a classical with a quantum assignment".into(),
        }),
    }
}

fn posterior_json(a: &Assignment) -> Value {
    let mut v = json!({"posterior": assignment_json(a)});
    if let Assignment::Quantum(s) = a {
        v["bell"] = bell_probabilities(s);
    }
    v
}

fn update(
    mode: &str,
    outcome: &str,
    agent: Agent,
    scenario: &str,
    params: &ScenarioParams,
) -> Result<Value, CliError> {
    let mode: Mode = mode.parse()?;
    let cfg = params.config(scenario)?;
    let r = run_reconciliation(&cfg, mode, outcome)?;
    let mut out = json!({
        "scenario": cfg.variant().name(),
        "params": cfg.params(),
        "mode": mode,
        "outcome": outcome,
    });
    match agent {
        Agent::Wigner => out["wigner"] = posterior_json(&r.wigner?),
        Agent::Friend => out["friend"] = posterior_json(&r.friend?),
        Agent::Both => {
            // Both sides are reported; an impossible outcome is part of the result.
            for (key, side) in [("wigner", &r.wigner), ("friend", &r.friend)] {
                out[key] = match side {
                    Ok(a) => posterior_json(a),
                    Err(Error::ZeroEvidence(_)) => json!({"error": ZERO_EVIDENCE_MESSAGE}),
                    Err(e) => return Err(e.clone().into()),
                };
            }
        }
    }
    Ok(out)
}

/// Executes `cli` and returns what should be printed on stdout. `tol_env` is
/// the raw value of [`TOL_ENV`], if set.
pub fn run(cli: &Cli, tol_env: Option<&str>) -> Result<String, CliError> {
    let tol = tolerance(tol_env)?;
    let value = match &cli.command {
        Command::Scenario { name, params } => {
            scenario_json(&run_scenario_with_tol(&params.config(name)?, tol)?)
        }
        Command::Compat { a, b } => compat(&StateFile::read(a)?, &StateFile::read(b)?, tol)?,
        Command::Pool {
            method,
            weights,
            epsilon,
        } => {
            let m: PoolMethod = method.parse()?;
            let pooled = run_pooling(m, weights.as_deref(), *epsilon)?;
            json!({
                "method": m,
                "weights": weights,
                "epsilon": epsilon,
                "labels": pooled.space().labels(),
                "dist": pooled.probs(),
            })
        }
        Command::Improve { case, epsilon } => {
            let c: ImprovementCase = case.parse()?;
            let imp = run_improvement(c, *epsilon)?;
            let mut out = json!({
                "case": c,
                "epsilon": if c.needs_epsilon() { *epsilon } else { None },
                "prior": assignment_json(&imp.prior),
                "posterior": assignment_json(&imp.posterior),
            });
            if let Assignment::Quantum(s) = &imp.posterior {
                out["posterior_bell"] = bell_probabilities(s);
            }
            out
        }
        Command::Update {
            mode,
            outcome,
            agent,
            scenario,
            params,
        } => update(mode, outcome, *agent, scenario, params)?,
        Command::Goldens { out_dir } => {
            let names = goldens::write(out_dir)?;
            return Ok(names.iter().map(|n| format!("{n}\n")).collect());
        }
    };
    Ok(render(&value, cli.format))
}
