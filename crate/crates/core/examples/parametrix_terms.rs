//! Resolvent parametrix of −∂² + 2 + cos x on the circle, with certificates.

use tracedefect::parametrix::{resolvent_expansion, DifferentialOperator};
use tracedefect::symexpr::ScalarField;

fn main() -> tracedefect::Result<()> {
    let v = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
    let p = DifferentialOperator::laplace_plus(1, v);
    let q = resolvent_expansion(&p, 4)?;
    print!("{}", q.to_text());
    Ok(())
}
