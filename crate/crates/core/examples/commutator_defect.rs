//! Commutator defect for A = cos x |D|, A′ = |D| and P = (−∂² + 2 + cos x)².

use num_rational::Rational64;
use tracedefect::logresidue::{verify_t23, VerifyOptions};
use tracedefect::parametrix::{DifferentialOperator, PolyhomSymbol};
use tracedefect::symexpr::ScalarField;

fn main() -> tracedefect::Result<()> {
    let cosx = ScalarField::cos(1, 0, 1, 1.0);
    let p = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, 2.0).add(&cosx)).pow(2);
    let d = PolyhomSymbol::radial_power(1, Rational64::from_integer(1));
    let a = d.left_multiply(&cosx);
    let opts = VerifyOptions { grid: 16, pointwise: 4, tol: 1e-6, rays: false };
    let v = verify_t23(&a, &d, &p, &opts)?;
    println!("resolvent side {}\nresidue side   {}", v.lhs, v.rhs);
    println!("pass: {}", v.report.pass);
    Ok(())
}
