//! Symbolic-numeric operator calculus on flat tori, the half-line and
//! cylinders.
//!
//! The crate builds resolvent parametrices of elliptic differential operators,
//! the classical part of their logarithm symbols and noncommutative residues,
//! and checks the resulting trace-defect identities against independent
//! spectral computations.
//!
//! * [`symexpr`]: expression trees in x, ξ, λ and |ξ|.
//! * [`parametrix`]: symbol composition and the resolvent recursion.
//! * [`logresidue`]: log transforms, residues, C₀ densities and verifiers.
//! * [`boundary`]: half-line model kernels and the boundary residue.
//! * [`oracle`]: truncated Fourier matrices, lattice spectra, fits.
//! * [`cli`]: configuration parsing and report output.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod logresidue;
pub mod oracle;
pub mod parametrix;
pub mod quad;
pub mod report;
pub mod symexpr;

pub use error::{Error, Result};
