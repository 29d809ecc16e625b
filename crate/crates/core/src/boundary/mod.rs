//! Half-line and cylinder model: half-plane splitting, singular Green
//! kernels of exponential class, normal traces, the boundary residue and
//! the model verifiers.

mod cylinder;

pub use cylinder::CylinderSpec;
mod halfplane;

pub use halfplane::{HalfplaneRational, PoleTerms};
mod sgo;

pub use sgo::{
    dirichlet_resolvent_sgo, dirichlet_resolvent_sgo_symbolic, dirichlet_sigma, dirichlet_sigma_symbolic, ExpKernel,
    KernelScalar, SGKernel, SGTerm,
};
mod model;

pub use model::{
    cylinder_lattice_trace, fgls_residue, identity_trace_fit, sgo_lattice_trace, sgo_log_boundary_symbol,
    sgo_mode_trace, sgo_trace_fit, verify_dirichlet_cylinder, verify_iterated, verify_t310_model, Ex53Options, FglsResidue,
    LambdaFit, ModelOperator, T310Model,
};
