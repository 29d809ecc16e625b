use super::logsym::{log_commutator_symbol, log_difference_symbol, log_symbol, transform_symbol};
use super::residue::{
    c0_density_at, c0_interior, default_sphere, noncommutative_residue, sphere_integral, XDomain,
};
use crate::error::{Error, Result};
use crate::parametrix::{
    commutator_resolvent_terms, compose_param, resolvent_difference, resolvent_expansion,
    DifferentialOperator, ParamSymbol, ParamTerm, PolyhomSymbol,
};
use crate::quad::integrate_half_line;
use crate::report::{Check, CsvRow, Report};
use crate::symexpr::{Expr, Point};
use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::json;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Quadrature points per axis for x-integrals.
    pub grid: usize,
    /// Equispaced points per axis for pointwise comparisons.
    pub pointwise: usize,
    pub tol: f64,
    /// Also compare per ray (fixed cosphere directions).
    pub rays: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid: 16,
            pointwise: 8,
            tol: 1e-8,
            rays: false,
        }
    }
}

/// Outcome of a two-route C₀ computation.
#[derive(Clone, Debug)]
pub struct Verification {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub report: Report,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Compares ∫∫ term(x, ξ, −1) đξ dx with −(1/m) ∫∫ b_{−n} đS dx pointwise
/// and integrated.
fn two_route(
    report: &mut Report,
    label: &str,
    term: &ParamTerm,
    factors: &[Expr],
    m: u32,
    residue_symbol: &PolyhomSymbol,
    opts: &VerifyOptions,
) -> Result<(Complex64, Complex64)> {
    let n = residue_symbol.dim;
    let domain = XDomain::torus(n, opts.grid);
    let c0 = c0_interior(term, factors, m, &domain)?;
    let res = noncommutative_residue(residue_symbol, &domain)?;
    let lhs = c0.value;
    let rhs = -res.value / m as f64;

    let rule = default_sphere(n)?;
    let b = residue_symbol
        .index_of_degree(Rational64::from_integer(-(n as i64)))
        .map(|j| residue_symbol.term(j))
        .unwrap_or_else(Expr::zero);
    let mut worst = (0.0, zero(), zero(), vec![]);
    for x in domain.sample_points(opts.pointwise) {
        let d = if term.is_zero() {
            zero()
        } else {
            c0_density_at(term, factors, &x, &rule)?.0
        };
        let r = if b.is_zero() {
            zero()
        } else {
            -sphere_integral(&b, &x, &rule)? / m as f64
        };
        report.rows.push(CsvRow::new(&format!("{label}-density-lhs"), x[0], *x.get(1).unwrap_or(&0.0), d));
        report.rows.push(CsvRow::new(&format!("{label}-density-rhs"), x[0], *x.get(1).unwrap_or(&0.0), r));
        let dev = (d - r).norm();
        if dev >= worst.0 {
            worst = (dev, d, r, x);
        }
    }
    report.push(
        Check::abs(&format!("{label} pointwise density"), worst.1, worst.2, opts.tol)
            .with("worst_x", &worst.3)
            .with("points", domain.sample_points(opts.pointwise).len()),
    );

    if opts.rays && !term.is_zero() && !b.is_zero() {
        for x in domain.sample_points(2) {
            for node in &rule.nodes {
                let radial = integrate_half_line(
                    |rho| {
                        let xi: Vec<f64> = node.iter().map(|c| c * rho).collect();
                        Ok(term.evaluate(factors, &Point::new(&x, &xi).with_real_lambda(-1.0))?
                            * rho.powi(n as i32 - 1))
                    },
                    &super::transform::transform_options(),
                )?
                .value;
                let along = -b.evaluate(&Point::new(&x, node))? / m as f64;
                let c = Check::abs(&format!("{label} ray"), radial, along, opts.tol)
                    .with("x", &x)
                    .with("direction", node);
                report.push(c);
            }
        }
    }

    report.push(
        Check::abs(&format!("{label} integrated"), lhs, rhs, opts.tol)
            .with("c0_quad_error", c0.quad_error)
            .with("sphere_normalization", res.sphere_normalization)
            .with("residue", json!([res.value.re, res.value.im]))
            .with("residue_note", &res.note)
            .with("grid", opts.grid),
    );
    Ok((lhs, rhs))
}

fn integer_index(v: Rational64) -> Option<usize> {
    (v.is_integer() && v >= Rational64::from_integer(0)).then(|| v.to_integer() as usize)
}

/// C₀(P) = −(1/m) res(log P), pointwise and integrated.
pub fn verify_t14(p: &DifferentialOperator, opts: &VerifyOptions) -> Result<Verification> {
    let (m, n) = (p.order(), p.dim());
    let q = resolvent_expansion(p, n)?;
    let ls = log_symbol(p, n)?;
    let mut report = Report::new("verify-t14");
    let (lhs, rhs) = two_route(&mut report, "C0(P) = -res(log P)/m", &q.terms[n], &q.factors, m, &ls.b, opts)?;
    Ok(Verification { lhs, rhs, report })
}

/// C₀(A, P₁) − C₀(A, P₂) = −(1/m) res(A(log P₁ − log P₂)).
pub fn verify_t22(
    a: &PolyhomSymbol,
    p1: &DifferentialOperator,
    p2: &DifferentialOperator,
    opts: &VerifyOptions,
) -> Result<Verification> {
    if p1.order() != p2.order() || p1.dim() != p2.dim() {
        return Err(Error::usage("P1 and P2 must have equal order and dimension"));
    }
    let (m, n) = (p1.order(), p1.dim());
    let sigma = a.order;
    if Rational64::from_integer(m as i64) <= Rational64::from_integer(n as i64) + sigma {
        return Err(Error::Hypothesis(format!(
            "the trace-defect identity for A(log P1 - log P2) needs m > n + sigma (m = {m}, n = {n}, sigma = {sigma})"
        )));
    }
    let mut report = Report::new("verify-t22");
    let jstar = Rational64::from_integer(n as i64) + sigma;
    let Some(j) = integer_index(jstar) else {
        // no (−λ)^{−1} term and no degree −n term
        let l = log_difference_symbol(p1, p2, 2)?;
        let h = a.compose(&l, 2)?;
        let res = noncommutative_residue(&h, &XDomain::torus(n, opts.grid))?;
        report.push(
            Check::abs("n + sigma not integral: both sides vanish", zero(), -res.value / m as f64, 0.0)
                .with("residue_note", &res.note),
        );
        return Ok(Verification {
            lhs: zero(),
            rhs: -res.value / m as f64,
            report,
        });
    };
    let d = resolvent_difference(p1, p2, j)?;
    let s = compose_param(&ParamSymbol::from_polyhom(a, m), &d, j)?;
    let l = log_difference_symbol(p1, p2, j)?;
    let h = a.compose(&l, j)?;
    if s.truncation_warning || h.truncation_warning {
        report.warn("composition depth exceeds the known terms of A");
    }
    let (lhs, rhs) = two_route(&mut report, "C0(A,P1) - C0(A,P2) = -res(A L)/m", &s.term(j), &s.factors, m, &h, opts)?;
    Ok(Verification { lhs, rhs, report })
}

/// C₀([A, A′], P) = −(1/m) res(A[A′, log P]).
pub fn verify_t23(
    a: &PolyhomSymbol,
    a_prime: &PolyhomSymbol,
    p: &DifferentialOperator,
    opts: &VerifyOptions,
) -> Result<Verification> {
    let (m, n) = (p.order(), p.dim());
    let jstar = Rational64::from_integer(n as i64) + a.order + a_prime.order;
    let mut report = Report::new("verify-t23");
    let Some(j) = integer_index(jstar) else {
        report.push(Check::abs("n + sigma + sigma' not integral: both sides vanish", zero(), zero(), 0.0));
        return Ok(Verification {
            lhs: zero(),
            rhs: zero(),
            report,
        });
    };
    let r = commutator_resolvent_terms(a, a_prime, p, j)?;
    let h = transform_symbol(&r)?;
    if r.truncation_warning {
        report.warn("composition depth exceeds the known terms of A or A'");
    }
    let (lhs, rhs) = two_route(&mut report, "C0([A,A'],P) = -res(A[A',log P])/m", &r.term(j), &r.factors, m, &h, opts)?;
    Ok(Verification { lhs, rhs, report })
}

/// h from the commutator route, exposed for reports and examples.
pub fn commutator_log_symbol(
    a: &PolyhomSymbol,
    a_prime: &PolyhomSymbol,
    p: &DifferentialOperator,
) -> Result<PolyhomSymbol> {
    let j = integer_index(Rational64::from_integer(p.dim() as i64) + a.order + a_prime.order)
        .unwrap_or(1);
    log_commutator_symbol(a, a_prime, p, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::ScalarField;
    use std::f64::consts::PI;

    #[test]
    fn t14_shifted_laplacian_on_t2() {
        let p = DifferentialOperator::laplace_plus(2, ScalarField::constant(2, 1.0));
        let v = verify_t14(&p, &VerifyOptions { grid: 2, pointwise: 2, ..Default::default() }).unwrap();
        assert!(v.report.pass, "{}", v.report.to_json());
        assert!((v.lhs.re + PI).abs() < 1e-8);
        assert!((v.rhs.re + PI).abs() < 1e-8);
    }

    #[test]
    fn t14_rejects_non_elliptic() {
        // D has principal symbol ξ, which meets ℝ₋ at ξ = −1
        let p1 = DifferentialOperator::from_d_terms(1, vec![(vec![1], ScalarField::constant(1, 1.0))]).unwrap();
        assert!(matches!(verify_t14(&p1, &VerifyOptions::default()), Err(Error::Construction { .. })));
    }

    #[test]
    fn t22_half_order_multiplier_vanishes() {
        let p1 = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, 2.0)).pow(2);
        let p2 = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, 1.0)).pow(2);
        let a = PolyhomSymbol::radial_power(1, Rational64::new(1, 2));
        let v = verify_t22(&a, &p1, &p2, &VerifyOptions::default()).unwrap();
        assert_eq!(v.lhs, zero());
        assert_eq!(v.rhs, zero());
    }
}
