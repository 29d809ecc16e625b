use crate::error::{Error, Result};
use crate::parametrix::DifferentialOperator;
use crate::symexpr::ScalarField;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// S¹_C × [0, L] with P = −∂_t² + P′, P′ = −∂_θ² + m² on the boundary
/// circles, Dirichlet conditions at t = 0 and t = L.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CylinderSpec {
    #[serde(default = "two_pi")]
    pub circumference: f64,
    pub length: f64,
    #[serde(default)]
    pub mass2: f64,
}

fn two_pi() -> f64 {
    2.0 * PI
}

impl CylinderSpec {
    pub fn new(length: f64, mass2: f64) -> Result<Self> {
        let c = CylinderSpec {
            circumference: two_pi(),
            length,
            mass2,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::usage(format!("cylinder length must be positive, got {}", self.length)));
        }
        if !(self.circumference > 0.0 && self.circumference.is_finite()) {
            return Err(Error::usage("cylinder circumference must be positive"));
        }
        if !self.mass2.is_finite() {
            return Err(Error::usage("mass must be finite"));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.circumference * self.length
    }

    /// Tangential frequency of mode k.
    pub fn frequency(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.circumference
    }

    /// P′ = −∂_θ² + m² in the arc-length coordinate.
    pub fn boundary_operator(&self) -> DifferentialOperator {
        DifferentialOperator::laplace_plus(1, ScalarField::constant(1, self.mass2))
    }
}
