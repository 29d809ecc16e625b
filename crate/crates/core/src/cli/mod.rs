//! Command-line front end: binds a [`RunConfig`] to a verification and
//! writes the report.
//!
//! Exit codes: 0 when every asserted identity passes, 1 on a tolerance
//! failure, 2 on a config error, 3 on a mathematical precondition failure.

mod commands;
mod config;
mod suite;

pub use commands::run_command;
pub use config::{
    DTermConfig, FieldConfig, GeometryConfig, HeatConfig, LambdaConfig, ModeConfig, ModelConfig, OperatorConfig,
    OracleConfig, OutputConfig, Overrides, QuadratureConfig, RunConfig, SymbolConfig, Tolerances, TrigConfig,
};
pub use suite::{criteria, embedded_config, run_criterion, run_embedded, verify_all, Criterion, CriterionOutcome, CONFIGS};

use crate::error::Error;
use crate::report::Report;
use std::io::Write;
use std::path::Path;

pub const COMMANDS: [&str; 11] = [
    "expand-resolvent",
    "log-symbol",
    "residue",
    "verify-t14",
    "verify-t22",
    "verify-t23",
    "verify-t310",
    "verify-ex53",
    "fit",
    "oracle-zeta0",
    "verify-all",
];

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => 2,
        _ => 3,
    }
}

/// Outcome of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<Report>,
    pub error: Option<Error>,
}

fn write_outputs(report: &Report, json: Option<&Path>, csv: Option<&Path>) -> crate::Result<()> {
    if let Some(p) = json {
        report.write_json(p)?;
    }
    if let Some(p) = csv {
        report.write_csv(p)?;
    }
    Ok(())
}

/// Runs a command on an already parsed config and writes its outputs.
///
/// `verify-all` writes one progress line per criterion to `progress`.
pub fn run_config(command: &str, mut config: RunConfig, overrides: &Overrides, progress: &mut dyn Write) -> Outcome {
    if command == "verify-all" {
        let report = verify_all(progress);
        return finish(report, overrides.json_out.as_deref(), overrides.csv_out.as_deref());
    }
    config.resolve(command, overrides);
    match run_command(command, &config) {
        Ok(mut report) => {
            report.config = config.to_json();
            finish(Ok(report), config.output.json.as_deref(), config.output.csv.as_deref())
        }
        Err(e) => Outcome {
            code: exit_code(&e),
            report: None,
            error: Some(e),
        },
    }
}

fn finish(report: crate::Result<Report>, json: Option<&Path>, csv: Option<&Path>) -> Outcome {
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                code: exit_code(&e),
                report: None,
                error: Some(e),
            }
        }
    };
    if let Err(e) = write_outputs(&report, json, csv) {
        return Outcome {
            code: 3,
            report: Some(report),
            error: Some(e),
        };
    }
    Outcome {
        code: if report.pass { 0 } else { 1 },
        report: Some(report),
        error: None,
    }
}

/// Loads the config file (an empty config when absent) and runs.
pub fn run(command: &str, config_path: Option<&Path>, overrides: &Overrides, progress: &mut dyn Write) -> Outcome {
    if !COMMANDS.contains(&command) {
        return Outcome {
            code: 2,
            report: None,
            error: Some(Error::usage(format!("unknown command `{command}`"))),
        };
    }
    let config = match config_path {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                return Outcome {
                    code: exit_code(&e),
                    report: None,
                    error: Some(e),
                }
            }
        },
        None => RunConfig::default(),
    };
    run_config(command, config, overrides, progress)
}

/// One line per check, then the verdict.
pub fn summary(report: &Report) -> String {
    let mut s = String::new();
    for c in &report.checks {
        s.push_str(&format!(
            "{} {}  lhs={:.12e} rhs={:.12e} err={:.3e} tol={:.1e}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.identity,
            c.lhs,
            c.rhs,
            c.abs_err,
            c.tol
        ));
    }
    for w in &report.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s.push_str(if report.pass { "result: pass\n" } else { "result: FAIL\n" });
    s
}
