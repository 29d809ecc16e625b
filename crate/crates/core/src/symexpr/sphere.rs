use crate::error::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Quadrature on the unit sphere S^{n-1} carrying the factor (2π)^{-n}.
#[derive(Clone, Debug, Serialize)]
pub struct SphereRule {
    pub n: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub normalization: f64,
}

/// n = 1: the two points ±1. n = 2: `degree + 1` equispaced nodes, exact on
/// trigonometric polynomials of degree ≤ `degree`.
pub fn sphere_quadrature(n: usize, degree: usize) -> Result<SphereRule> {
    if degree < 1 {
        return Err(Error::usage("sphere rule degree must be at least 1"));
    }
    let normalization = (2.0 * PI).powi(-(n as i32));
    match n {
        1 => Ok(SphereRule {
            n,
            nodes: vec![vec![1.0], vec![-1.0]],
            weights: vec![normalization; 2],
            normalization,
        }),
        2 => {
            let count = degree + 1;
            let w = 2.0 * PI / count as f64 * normalization;
            let nodes = (0..count)
                .map(|j| {
                    let th = 2.0 * PI * j as f64 / count as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect();
            Ok(SphereRule {
                n,
                nodes,
                weights: vec![w; count],
                normalization,
            })
        }
        _ => Err(Error::usage(format!(
            "sphere quadrature supports n in {{1, 2}}, got {n}"
        ))),
    }
}

impl SphereRule {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F>(&self, mut f: F) -> Result<num_complex::Complex64>
    where
        F: FnMut(&[f64]) -> Result<num_complex::Complex64>,
    {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (node, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(node)? * *w;
        }
        Ok(acc)
    }
}
