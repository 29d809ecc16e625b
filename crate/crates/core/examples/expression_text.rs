//! Prefix text form of expressions: print, parse back, differentiate.

use tracedefect::symexpr::{Expr, Point, Var};

fn main() -> tracedefect::Result<()> {
    let e: Expr = "(* (expi 1) (^ (+ (^ xi1 2) 1 (* -1 lam)) -1))".parse()?;
    println!("e        = {e}");
    println!("de/dxi1  = {}", e.diff(Var::Xi(0)));
    let pt = Point::new(&[0.5], &[2.0]).with_real_lambda(-1.0);
    println!("e at (x, xi, lambda) = (0.5, 2, -1): {}", e.evaluate(&pt)?);
    Ok(())
}
