//! Fixed suites for the contour identity and the radial reduction.

use super::contour::{contour_check, KeyholeContour};
use super::residue::default_sphere;
use super::transform::radial_reduce;
use crate::error::Result;
use crate::parametrix::{
    commutator_resolvent_terms, compose_param, integrability_report, resolvent_difference, resolvent_expansion,
    DifferentialOperator, ParamSymbol, ParamTerm, PolyhomSymbol,
};
use crate::report::{Check, Report};
use crate::symexpr::{sphere_quadrature, Expr, Point, ScalarField, SphereRule};
use num_complex::Complex64;
use num_rational::Rational64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Π (p_i − λ)^{−k_i} with Σk_i ≥ 2.
#[derive(Clone, Debug)]
pub struct RationalFamily {
    pub label: String,
    pub factors: Vec<(Complex64, i32)>,
    pub anchor: Option<f64>,
}

impl RationalFamily {
    pub fn new(label: &str, factors: Vec<(Complex64, i32)>) -> Self {
        RationalFamily {
            label: label.to_string(),
            factors,
            anchor: None,
        }
    }

    pub fn eval(&self, l: Complex64) -> Complex64 {
        self.factors.iter().map(|(p, k)| (p - l).powi(-k)).product()
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.factors.iter().map(|(p, _)| *p).collect()
    }
}

pub fn contour_family() -> Vec<RationalFamily> {
    let mut fam = vec![
        RationalFamily {
            anchor: Some(1.0),
            ..RationalFamily::new("(1-l)^-2", vec![(c(1.0, 0.0), 2)])
        },
        RationalFamily {
            anchor: Some(2f64.ln()),
            ..RationalFamily::new("((1-l)(2-l))^-1", vec![(c(1.0, 0.0), 1), (c(2.0, 0.0), 1)])
        },
    ];
    fam.push(RationalFamily::new("(3-l)^-3", vec![(c(3.0, 0.0), 3)]));
    fam.push(RationalFamily::new("((1+i-l)(1-i-l))^-1", vec![(c(1.0, 1.0), 1), (c(1.0, -1.0), 1)]));
    fam.push(RationalFamily::new(
        "(0.5-l)^-1 (2+3i-l)^-2",
        vec![(c(0.5, 0.0), 1), (c(2.0, 3.0), 2)],
    ));
    fam.push(RationalFamily::new(
        "(-1+2i-l)^-1 (-1-2i-l)^-1 (4-l)^-1",
        vec![(c(-1.0, 2.0), 1), (c(-1.0, -2.0), 1), (c(4.0, 0.0), 1)],
    ));
    fam.push(RationalFamily::new("(0.2-l)^-2 (5-l)^-2", vec![(c(0.2, 0.0), 2), (c(5.0, 0.0), 2)]));
    fam
}

/// Contour against real-line values for each family member, anchors
/// against their closed forms.
pub fn contour_suite(tol: f64) -> Result<Report> {
    let mut report = Report::new("contour-identity");
    for f in contour_family() {
        let k = KeyholeContour::enclosing(&f.poles())?;
        let r = contour_check(|l| Ok(f.eval(l)), &k)?;
        report.push(
            Check::abs(&format!("{}: contour = real line", f.label), r.contour_value, r.real_line_value, tol)
                .with("contour", r.contour)
                .with("real_line_error", r.real_line_error),
        );
        if let Some(a) = f.anchor {
            report.push(Check::abs(&format!("{}: contour = {a}", f.label), r.contour_value, c(a, 0.0), tol));
            report.push(Check::abs(&format!("{}: real line = {a}", f.label), r.real_line_value, c(a, 0.0), tol));
        }
    }
    Ok(report)
}

fn reduce_term(term: &ParamTerm, factors: &[Expr], x: &[f64], rule: &SphereRule, m: u32) -> Result<(Complex64, Complex64)> {
    let r = radial_reduce(
        |xi, l| term.evaluate(factors, &Point::new(x, xi).with_lambda(l)),
        rule,
        m,
    )?;
    Ok((r.lhs, r.rhs))
}

/// Terms of degree −m−n produced by the recursion, labelled.
pub fn radial_terms() -> Result<Vec<(String, ParamSymbol, usize, u32)>> {
    let mut out = Vec::new();
    let v = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
    let ops = [
        ("T1 -d^2 + 2 + cos x", DifferentialOperator::laplace_plus(1, v.clone())),
        ("T1 (-d^2 + 2 + cos x)^2", DifferentialOperator::laplace_plus(1, v.clone()).pow(2)),
        ("T2 -Lap + 1", DifferentialOperator::laplace_plus(2, ScalarField::constant(2, 1.0))),
        (
            "T2 -Lap + 2 + cos x1",
            DifferentialOperator::laplace_plus(2, ScalarField::constant(2, 2.0).add(&ScalarField::cos(2, 0, 1, 1.0))),
        ),
    ];
    for (label, p) in ops {
        let n = p.dim();
        let q = resolvent_expansion(&p, n)?;
        let m = p.order();
        out.push((format!("{label}: q_{n}"), q, n, m));
    }
    // difference and commutator terms at j = n + sigma
    let p1 = DifferentialOperator::laplace_plus(1, v.add(&ScalarField::constant(1, 1.0))).pow(2);
    let p2 = DifferentialOperator::laplace_plus(1, v.clone()).pow(2);
    let a = PolyhomSymbol::radial_power(1, Rational64::from_integer(1));
    let d = resolvent_difference(&p1, &p2, 2)?;
    out.push(("A(Q1 - Q2), A = |D|".into(), compose_param(&ParamSymbol::from_polyhom(&a, 4), &d, 2)?, 2, 4));
    let e = PolyhomSymbol::multiplication(&ScalarField::mode(1, &[1], c(1.0, 0.0)));
    let ap = a.left_multiply(&ScalarField::cos(1, 0, 1, 1.0));
    out.push(("[A, A']Q".into(), commutator_resolvent_terms(&e, &ap, &p2, 2)?, 2, 4));
    Ok(out)
}

/// The two closed-form anchors and every recursion-produced term of the
/// right degree whose certificates give r > −n.
pub fn radial_suite(anchor_tol: f64, tol: f64) -> Result<Report> {
    let mut report = Report::new("radial-reduction");
    let r1 = radial_reduce(|xi, l| Ok((c(xi[0] * xi[0], 0.0) - l).powf(-1.5)), &sphere_quadrature(1, 2)?, 2)?;
    let pi = std::f64::consts::PI;
    report.push(Check::abs("n=1 (xi^2 - l)^-3/2: lhs = 1/pi", r1.lhs, c(1.0 / pi, 0.0), anchor_tol));
    report.push(Check::abs("n=1 (xi^2 - l)^-3/2: rhs = 1/pi", r1.rhs, c(1.0 / pi, 0.0), anchor_tol));
    let r2 = radial_reduce(
        |xi, l| Ok((c(xi[0] * xi[0] + xi[1] * xi[1], 0.0) - l).powi(-2)),
        &sphere_quadrature(2, 8)?,
        2,
    )?;
    report.push(Check::abs("n=2 (|xi|^2 - l)^-2: lhs = 1/(4 pi)", r2.lhs, c(0.25 / pi, 0.0), anchor_tol));
    report.push(Check::abs("n=2 (|xi|^2 - l)^-2: rhs = 1/(4 pi)", r2.rhs, c(0.25 / pi, 0.0), anchor_tol));

    let mut skipped = 0;
    for (label, q, j, m) in radial_terms()? {
        let term = q.term(j);
        let n = q.dim;
        let ir = integrability_report(&term, &q.factors, m, n)?;
        if !ir.integrable || term.is_zero() {
            skipped += 1;
            continue;
        }
        let rule = default_sphere(n)?;
        let xs: Vec<Vec<f64>> = [0.3, 1.9, 4.4].iter().map(|t| vec![*t; n]).collect();
        for x in xs {
            let (lhs, rhs) = reduce_term(&term, &q.factors, &x, &rule, m)?;
            report.push(
                Check::abs(&format!("{label} at x = {:?}", x), lhs, rhs, tol)
                    .with("min_r", ir.min_r.map(|r| r.to_string())),
            );
        }
    }
    if skipped > 0 {
        report.warn(format!("{skipped} term(s) skipped: zero or not integrable at xi = 0"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_evaluates_products() {
        let f = &contour_family()[1];
        assert!((f.eval(c(0.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn radial_suite_passes() {
        let r = radial_suite(1e-8, 1e-6).unwrap();
        assert!(r.pass, "{}", r.to_json());
        assert!(r.checks.len() > 10);
    }

    #[test]
    fn contour_suite_passes() {
        let r = contour_suite(1e-8).unwrap();
        assert!(r.pass, "{}", r.to_json());
    }
}
