//! Keyhole integral of log λ against a rational family, compared with the
//! real-line integral.

use num_complex::Complex64;
use tracedefect::logresidue::{contour_check, KeyholeContour, RationalFamily};

fn main() -> tracedefect::Result<()> {
    let f = RationalFamily::new(
        "two poles",
        vec![(Complex64::new(2.0, 0.0), 2), (Complex64::new(1.0, 1.5), 1)],
    );
    let k = KeyholeContour::enclosing(&f.poles())?;
    let r = contour_check(|l| Ok(f.eval(l)), &k)?;
    println!("contour   {}\nreal line {}\n|diff|    {:.3e}", r.contour_value, r.real_line_value, r.abs_diff);
    Ok(())
}
