//! Independent ground truth: exact Fourier compressions, resolvent traces,
//! heat-trace constants and fits of trace expansions in −λ.

mod fit;
mod matrix;
mod spectrum;
mod trace;

pub use fit::{fit_expansion, ray_samples, ExpansionFit, FitBasis, FitOptions};
pub use matrix::{box_modes, OperatorSpec, Sparse, TruncatedOperator};
pub use spectrum::{
    dirichlet_product_spectrum, heat_constant, theta, zeta_at_zero, HeatFitOptions, SpectrumSpec, ZetaReport,
};
pub use trace::{
    cauchy_taylor_coefficient, hurwitz_zeta, power_law_tail, resolvent_power_trace, resolvent_trace, resolvent_trace_estimated,
    TraceOracle, TraceValue,
};
