//! Logarithm symbol of −Δ + 1 on T², evaluated at a point.

use tracedefect::logresidue::log_symbol;
use tracedefect::parametrix::DifferentialOperator;
use tracedefect::symexpr::{Point, ScalarField};

fn main() -> tracedefect::Result<()> {
    let p = DifferentialOperator::laplace_plus(2, ScalarField::constant(2, 1.0));
    let ls = log_symbol(&p, 2)?;
    let pt = Point::new(&[0.3, 1.1], &[3.0, 4.0]);
    for j in 0..=2 {
        let term = ls.b.term(j);
        println!("b_{j} = {term}\n    at |xi| = 5: {}", term.evaluate(&pt)?);
    }
    Ok(())
}
