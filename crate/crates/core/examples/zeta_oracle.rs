//! ζ(0) from heat-trace constants on closed-form spectra.

use std::f64::consts::PI;
use tracedefect::boundary::CylinderSpec;
use tracedefect::oracle::{dirichlet_product_spectrum, zeta_at_zero, HeatFitOptions, SpectrumSpec};

fn main() -> tracedefect::Result<()> {
    let opts = HeatFitOptions::default();
    let cases = [
        ("circle, m = 0", SpectrumSpec::Torus { dim: 1, mass2: 0.0 }),
        ("T2, m^2 = 1", SpectrumSpec::Torus { dim: 2, mass2: 1.0 }),
        ("interval [0, pi]", SpectrumSpec::DirichletInterval { length: PI, mass2: 0.0 }),
        ("cylinder, L = pi", dirichlet_product_spectrum(&CylinderSpec::new(PI, 1.0)?)),
    ];
    for (name, s) in cases {
        let r = zeta_at_zero(&s, &opts)?;
        println!("{name:18} zeta(0) = {:+.8} (nullity {}, drift {:.1e})", r.zeta0, r.nullity, r.drift);
    }
    Ok(())
}
