//! Constant term of Tr(|D|(Q₁ − Q₂)) for a pair of fourth-order operators,
//! against the residue of |D|(log P₁ − log P₂).

use num_rational::Rational64;
use tracedefect::logresidue::{verify_t22, VerifyOptions};
use tracedefect::parametrix::{DifferentialOperator, PolyhomSymbol};
use tracedefect::symexpr::ScalarField;

fn main() -> tracedefect::Result<()> {
    let cosx = ScalarField::cos(1, 0, 1, 1.0);
    let p1 = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, 2.0).add(&cosx)).pow(2);
    let p2 = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, 1.0).add(&cosx)).pow(2);
    let a = PolyhomSymbol::radial_power(1, Rational64::from_integer(1));
    let opts = VerifyOptions { grid: 16, pointwise: 4, tol: 1e-6, rays: false };
    let v = verify_t22(&a, &p1, &p2, &opts)?;
    println!("resolvent side {}\nresidue side   {}", v.lhs, v.rhs);
    Ok(())
}
