//! Symbol algebra: differential operators, polyhomogeneous symbols, their
//! Leibniz composition and the resolvent parametrix recursion.

mod operator;
mod param;
mod recursion;
mod symbol;

pub use operator::DifferentialOperator;
pub use param::{compose_param, Certificate, FrozenTerm, ParamSymbol, ParamTerm, Piece};
pub use recursion::{
    commutator_resolvent_terms, integrability_report, parametrix_defect, resolvent_difference,
    resolvent_expansion, resolvent_expansion_with, IntegrabilityReport, ELLIPTIC_SECTOR,
};
pub use symbol::PolyhomSymbol;
