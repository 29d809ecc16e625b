//! Half-cylinder model: fitted trace defect against interior plus boundary
//! residue, and the Dirichlet kernel at the wall.

use num_complex::Complex64;
use tracedefect::boundary::{dirichlet_resolvent_sgo, verify_t310_model, CylinderSpec, T310Model};

fn main() -> tracedefect::Result<()> {
    let model = T310Model::identity(CylinderSpec::new(1.0, 0.0)?, 2.0, 1.0);
    let v = verify_t310_model(&model)?;
    println!("fitted defect {}\nresidue side  {}", v.lhs, v.rhs);

    let g = dirichlet_resolvent_sgo(1.0, &[0.5], Complex64::new(-2.0, 0.0))?;
    println!("normal trace of the Dirichlet kernel: {}", g.normal_trace());
    Ok(())
}
