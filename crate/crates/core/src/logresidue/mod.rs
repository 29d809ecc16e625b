//! Log transforms of resolvent terms, the keyhole contour, log symbols,
//! noncommutative residues, C₀ densities and the two-route verifiers.

mod contour;
mod logsym;
mod residue;
mod suites;
mod transform;
mod verify;

pub use contour::{branch_jump, contour_check, ContourCheck, KeyholeContour};
pub use logsym::{
    log_commutator_symbol, log_difference_symbol, log_symbol, transform_symbol, LogSymbol,
};
pub use residue::{
    c0_density_at, c0_interior, default_sphere, noncommutative_residue, residue_of_term,
    sphere_integral, C0Report, ResidueValue, XDomain,
};
pub use suites::{contour_family, contour_suite, radial_suite, radial_terms, RationalFamily};
pub use transform::{
    log_transform, log_transform_frozen, log_transform_term, radial_reduce, transform_options,
    RadialReduction,
};
pub use verify::{
    commutator_log_symbol, verify_t14, verify_t22, verify_t23, Verification, VerifyOptions,
};
