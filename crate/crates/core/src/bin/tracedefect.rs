use clap::Parser;
use std::path::PathBuf;
use tracedefect::cli::{run, summary, Overrides, COMMANDS};

/// Resolvent parametrices, log symbols, residues and trace-defect checks.
#[derive(Parser)]
#[command(name = "tracedefect", version)]
struct Args {
    /// One of: expand-resolvent, log-symbol, residue, verify-t14, verify-t22,
    /// verify-t23, verify-t310, verify-ex53, fit, oracle-zeta0, verify-all.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(COMMANDS))]
    command: String,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the tolerance the command asserts against.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of parametrix terms beyond the principal one.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    json_out: Option<PathBuf>,
    #[arg(long)]
    csv_out: Option<PathBuf>,
    /// Angle θ of the ray λ = μe^{iθ} used by the fits.
    #[arg(long, allow_hyphen_values = true)]
    ray_angle: Option<f64>,
}

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let overrides = Overrides {
        tol: args.tol,
        depth: args.depth,
        json_out: args.json_out,
        csv_out: args.csv_out,
        ray_angle: args.ray_angle,
    };
    let outcome = run(&args.command, args.config.as_deref(), &overrides, &mut std::io::stdout());
    if let Some(r) = &outcome.report {
        print!("{}", summary(r));
    }
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    std::process::exit(outcome.code);
}
