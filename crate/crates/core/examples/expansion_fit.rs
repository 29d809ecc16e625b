//! Fit of Tr((P₁ − λ)^{−1} − (P₂ − λ)^{−1}) along the negative axis for a
//! pair of constant shifts on the circle.

use tracedefect::oracle::{fit_expansion, ray_samples, FitBasis, FitOptions, OperatorSpec, TraceOracle};
use tracedefect::parametrix::DifferentialOperator;
use tracedefect::symexpr::ScalarField;

fn main() -> tracedefect::Result<()> {
    let op = |c: f64| OperatorSpec::Differential(DifferentialOperator::laplace_plus(1, ScalarField::constant(1, c)));
    let oracle = TraceOracle::difference(&OperatorSpec::Identity, &op(2.0), &op(1.0), 1, 96, Some(4096))?;
    let samples = ray_samples(std::f64::consts::PI, 1e2, 1e4, 40)
        .into_iter()
        .map(|l| oracle.at(l).map(|t| (l, t)))
        .collect::<tracedefect::Result<Vec<_>>>()?;
    let basis = FitBasis::trace_expansion(1, 0.0, 2, 8).capped(-1.0);
    let fit = fit_expansion(&samples, &basis, &FitOptions::default())?;
    for (e, c) in fit.exponents.iter().zip(&fit.coefficients) {
        println!("(-lambda)^{e:+.1}: {:+.6e}", c.re);
    }
    println!("constant-term coefficient {:+.6} (drift {:.1e})", fit.target.re, fit.drift);
    Ok(())
}
