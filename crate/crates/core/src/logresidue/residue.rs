use super::transform::transform_options;
use crate::error::{Error, Result};
use crate::parametrix::{integrability_report, ParamTerm, PolyhomSymbol};
use crate::quad::integrate_half_line;
use crate::symexpr::{sphere_quadrature, Expr, Point, SphereRule};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;
use std::f64::consts::PI;

/// The x-domain of a residue or C₀ integral.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum XDomain {
    /// (ℝ/2πℤ)^dim with `grid` trapezoid points per axis.
    Torus { dim: usize, grid: usize },
    /// S¹ × [0, length] in coordinates (θ, t); midpoint rule with `grid`
    /// points per direction.
    Cylinder { length: f64, grid: usize },
}

impl XDomain {
    pub fn torus(dim: usize, grid: usize) -> Self {
        XDomain::Torus { dim, grid }
    }

    pub fn dim(&self) -> usize {
        match self {
            XDomain::Torus { dim, .. } => *dim,
            XDomain::Cylinder { .. } => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            XDomain::Torus { dim, .. } => (2.0 * PI).powi(*dim as i32),
            XDomain::Cylinder { length, .. } => 2.0 * PI * length,
        }
    }

    /// Quadrature nodes and weights.
    pub fn nodes(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            XDomain::Torus { dim, grid } => {
                let g = (*grid).max(1);
                let h = 2.0 * PI / g as f64;
                let total = g.pow(*dim as u32);
                (0..total)
                    .map(|mut idx| {
                        let mut x = Vec::with_capacity(*dim);
                        for _ in 0..*dim {
                            x.push(h * (idx % g) as f64);
                            idx /= g;
                        }
                        (x, h.powi(*dim as i32))
                    })
                    .collect()
            }
            XDomain::Cylinder { length, grid } => {
                let g = (*grid).max(1);
                let h1 = 2.0 * PI / g as f64;
                let h2 = length / g as f64;
                (0..g * g)
                    .map(|i| (vec![h1 * (i % g) as f64, h2 * ((i / g) as f64 + 0.5)], h1 * h2))
                    .collect()
            }
        }
    }

    /// Equispaced sample points for pointwise comparisons.
    pub fn sample_points(&self, per_axis: usize) -> Vec<Vec<f64>> {
        match self {
            XDomain::Torus { dim, .. } => XDomain::Torus {
                dim: *dim,
                grid: per_axis,
            }
            .nodes()
            .into_iter()
            .map(|n| n.0)
            .collect(),
            XDomain::Cylinder { length, .. } => XDomain::Cylinder {
                length: *length,
                grid: per_axis,
            }
            .nodes()
            .into_iter()
            .map(|n| n.0)
            .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueValue {
    pub value: Complex64,
    /// x ↦ ∫_{|ξ|=1} a_{−n}(x, ξ) đS(ξ) at the quadrature nodes.
    pub samples: Vec<(Vec<f64>, Complex64)>,
    pub sphere_nodes: usize,
    pub sphere_normalization: f64,
    pub volume: f64,
    pub note: String,
}

impl ResidueValue {
    fn zero(n: usize, note: &str) -> Self {
        ResidueValue {
            value: Complex64::new(0.0, 0.0),
            samples: vec![],
            sphere_nodes: 0,
            sphere_normalization: (2.0 * PI).powi(-(n as i32)),
            volume: 0.0,
            note: note.into(),
        }
    }
}

pub fn default_sphere(n: usize) -> Result<SphereRule> {
    sphere_quadrature(n, 32)
}

/// ∫_{|ξ|=1} e(x, ξ) đS(ξ).
pub fn sphere_integral(e: &Expr, x: &[f64], rule: &SphereRule) -> Result<Complex64> {
    rule.integrate(|xi| e.evaluate(&Point::new(x, xi)))
}

/// res(a) = ∫_X ∫_{|ξ|=1} a_{−n} đS dx with đS carrying (2π)^{−n}.
/// Exactly zero when no term of degree −n exists.
pub fn noncommutative_residue(a: &PolyhomSymbol, domain: &XDomain) -> Result<ResidueValue> {
    let n = a.dim;
    let j = match a.index_of_degree(Rational64::from_integer(-(n as i64))) {
        Some(j) => j,
        None => return Ok(ResidueValue::zero(n, "no term of degree -n")),
    };
    if a.known_terms() <= j {
        return Err(Error::usage(format!(
            "symbol known only to {} terms, the residue needs term {j}",
            a.known_terms()
        )));
    }
    let term = a.term(j);
    if term.is_zero() {
        return Ok(ResidueValue::zero(n, "degree -n term vanishes identically"));
    }
    residue_of_term(&term, n, domain)
}

/// Residue integral of an explicitly given degree −n term.
pub fn residue_of_term(term: &Expr, n: usize, domain: &XDomain) -> Result<ResidueValue> {
    let rule = default_sphere(n)?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut samples = Vec::new();
    for (x, w) in domain.nodes() {
        let s = sphere_integral(term, &x[..n.min(x.len())], &rule)?;
        value += s * w;
        samples.push((x, s));
    }
    Ok(ResidueValue {
        value,
        samples,
        sphere_nodes: rule.nodes.len(),
        sphere_normalization: rule.normalization,
        volume: domain.volume(),
        note: String::new(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct C0Report {
    /// x ↦ ∫ term(x, ξ, −1) đξ at the domain quadrature nodes.
    pub density: Vec<(Vec<f64>, Complex64)>,
    pub value: Complex64,
    pub quad_error: f64,
    pub note: String,
}

/// Density ∫_{ℝⁿ} term(x, ξ, −1) đξ at one point, by radial quadrature on
/// each sphere node.
pub fn c0_density_at(term: &ParamTerm, factors: &[Expr], x: &[f64], rule: &SphereRule) -> Result<(Complex64, f64)> {
    let n = rule.n;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (node, w) in rule.nodes.iter().zip(&rule.weights) {
        let q = integrate_half_line(
            |rho| {
                if rho == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let xi: Vec<f64> = node.iter().map(|c| c * rho).collect();
                let v = term.evaluate(factors, &Point::new(x, &xi).with_real_lambda(-1.0))?;
                Ok(v * rho.powi(n as i32 - 1))
            },
            &transform_options(),
        )?;
        total += q.value * *w;
        err += q.error * w.abs();
    }
    Ok((total, err))
}

/// C₀ contribution of a strictly homogeneous term of degree −m−n:
/// ∫_X ∫_{ℝⁿ} term(x, ξ, −1) đξ dx.
pub fn c0_interior(term: &ParamTerm, factors: &[Expr], m: u32, domain: &XDomain) -> Result<C0Report> {
    let n = domain.dim();
    if term.is_zero() {
        return Ok(C0Report {
            density: domain.nodes().into_iter().map(|(x, _)| (x, Complex64::new(0.0, 0.0))).collect(),
            value: Complex64::new(0.0, 0.0),
            quad_error: 0.0,
            note: "term vanishes identically".into(),
        });
    }
    let expected = Rational64::from_integer(-(m as i64) - n as i64);
    if term.degree != expected {
        return Err(Error::usage(format!(
            "C0 density needs a term of degree {expected}, got {}",
            term.degree
        )));
    }
    let ir = integrability_report(term, factors, m, n)?;
    if !ir.integrable {
        return Err(Error::Hypothesis(format!(
            "term is not integrable at xi = 0 (min r = {:?} <= -n = -{n})",
            ir.min_r.map(|r| r.to_string())
        )));
    }
    let rule = default_sphere(n)?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut density = Vec::new();
    for (x, w) in domain.nodes() {
        let (d, e) = c0_density_at(term, factors, &x, &rule)?;
        value += d * w;
        err += e * w;
        density.push((x, d));
    }
    Ok(C0Report {
        density,
        value,
        quad_error: err,
        note: String::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parametrix::{resolvent_expansion, DifferentialOperator};
    use crate::symexpr::ScalarField;

    #[test]
    fn residue_of_inverse_radial_on_circle() {
        let a = PolyhomSymbol::radial_power(1, Rational64::from_integer(-1));
        let r = noncommutative_residue(&a, &XDomain::torus(1, 4)).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-13);
        let half = PolyhomSymbol::radial_power(1, Rational64::new(1, 2));
        let z = noncommutative_residue(&half, &XDomain::torus(1, 4)).unwrap();
        assert_eq!(z.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn c0_of_shifted_laplacian_on_t2() {
        let p = DifferentialOperator::laplace_plus(2, ScalarField::constant(2, 1.0));
        let q = resolvent_expansion(&p, 2).unwrap();
        let r = c0_interior(&q.terms[2], &q.factors, 2, &XDomain::torus(2, 2)).unwrap();
        assert!((r.density[0].1.re + 0.25 / PI).abs() < 1e-10);
        assert!((r.value.re + PI).abs() < 1e-9);
    }
}
