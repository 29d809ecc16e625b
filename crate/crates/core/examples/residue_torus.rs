//! Residue of log(−Δ + 1) on T²: −2π, so C₀ = −π.

use tracedefect::logresidue::{log_symbol, noncommutative_residue, XDomain};
use tracedefect::parametrix::DifferentialOperator;
use tracedefect::symexpr::ScalarField;

fn main() -> tracedefect::Result<()> {
    let p = DifferentialOperator::laplace_plus(2, ScalarField::constant(2, 1.0));
    let r = noncommutative_residue(&log_symbol(&p, 2)?.b, &XDomain::torus(2, 4))?;
    println!("res(log P) = {}", r.value);
    println!("-res/2     = {}", -r.value / 2.0);
    Ok(())
}
