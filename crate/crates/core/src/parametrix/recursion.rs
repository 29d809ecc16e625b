use super::operator::DifferentialOperator;
use super::param::{compose_param, Certificate, ParamSymbol, ParamTerm, Piece};
use super::symbol::PolyhomSymbol;
use crate::error::{Error, Result};
use crate::symexpr::{multi_factorial, multi_indices, Expr, Point};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;
use std::collections::HashMap;

/// Default half-angle of the excluded sector around ℝ₋.
pub const ELLIPTIC_SECTOR: f64 = 0.05;

/// q_{−m−j}, j = 0…depth, for the resolvent of P.
pub fn resolvent_expansion(p: &DifferentialOperator, depth: usize) -> Result<ParamSymbol> {
    resolvent_expansion_with(p, depth, ELLIPTIC_SECTOR)
}

pub fn resolvent_expansion_with(
    p: &DifferentialOperator,
    depth: usize,
    sector: f64,
) -> Result<ParamSymbol> {
    p.check_elliptic(sector)?;
    let m = p.order();
    let n = p.dim();
    let factors = vec![p.principal()];
    let q0 = ParamTerm {
        degree: Rational64::from_integer(-(m as i64)),
        pieces: vec![Piece {
            coeff: Expr::one(),
            powers: vec![1],
        }],
    };
    let parts: Vec<Expr> = (0..=m).map(|l| p.symbol_part(l)).collect();
    let mut dparts: HashMap<(u32, Vec<u32>), Expr> = HashMap::new();
    let mut dq: HashMap<(usize, Vec<u32>), ParamTerm> = HashMap::new();
    let mut terms = vec![q0];
    for j in 1..=depth {
        let degree = Rational64::from_integer(-((m as usize + j) as i64));
        let mut acc = ParamTerm::zero(degree + Rational64::from_integer(m as i64));
        for k in 0..j {
            for l in 0..=(j - k).min(m as usize) {
                let a = j - k - l;
                for alpha in multi_indices(n, a as u32) {
                    let dp = dparts
                        .entry((l as u32, alpha.clone()))
                        .or_insert_with(|| parts[l].diff_multi(&alpha, true))
                        .clone();
                    if dp.is_zero() {
                        continue;
                    }
                    let dqk = dq
                        .entry((k, alpha.clone()))
                        .or_insert_with(|| terms[k].dx(&alpha, &factors))
                        .clone();
                    if dqk.is_zero() {
                        continue;
                    }
                    let w = Expr::rational(Rational64::new(1, multi_factorial(&alpha)));
                    let d = Rational64::from_integer(m as i64 - l as i64 - a as i64);
                    acc = acc.add(&dqk.mul_expr(&(w * dp), d));
                }
            }
        }
        terms.push(acc.mul_factor(0, 1, m).neg());
    }
    Ok(ParamSymbol {
        dim: n,
        m,
        order: Rational64::from_integer(-(m as i64)),
        factors,
        terms,
        complete_to: Some(depth),
        truncation_warning: false,
    })
}

/// Termwise difference of the two resolvent expansions. The leading term is
/// written as (p₂ − p₁)(p₁ − λ)^{−1}(p₂ − λ)^{−1}.
pub fn resolvent_difference(
    p1: &DifferentialOperator,
    p2: &DifferentialOperator,
    depth: usize,
) -> Result<ParamSymbol> {
    if p1.order() != p2.order() || p1.dim() != p2.dim() {
        return Err(Error::usage(format!(
            "resolvent difference needs equal orders and dimensions, got ({}, {}) and ({}, {})",
            p1.order(),
            p1.dim(),
            p2.order(),
            p2.dim()
        )));
    }
    let q1 = resolvent_expansion(p1, depth)?;
    let q2 = resolvent_expansion(p2, depth)?;
    let mut d = q1.sub(&q2)?;
    if d.factors.len() == 2 {
        d.terms[0] = ParamTerm {
            degree: d.terms[0].degree,
            pieces: vec![Piece {
                coeff: &d.factors[1] - &d.factors[0],
                powers: vec![1, 1],
            }],
        };
    }
    Ok(d)
}

/// Symbol of A Q_λ [P, A′] Q_λ, whose trace equals that of A[A′, Q_λ].
pub fn commutator_resolvent_terms(
    a: &PolyhomSymbol,
    a_prime: &PolyhomSymbol,
    p: &DifferentialOperator,
    depth: usize,
) -> Result<ParamSymbol> {
    let n = p.dim() as i64;
    let m = Rational64::from_integer(p.order() as i64);
    if m <= Rational64::from_integer(n) + a.order + a_prime.order {
        return Err(Error::Hypothesis(format!(
            "commutator identity requires m > n + σ + σ′ (m = {}, n = {}, σ = {}, σ′ = {})",
            m, n, a.order, a_prime.order
        )));
    }
    let q = resolvent_expansion(p, depth)?;
    let ps = p.symbol();
    let comm = ps.compose(a_prime, depth)?.sub(&a_prime.compose(&ps, depth)?)?;
    let mm = p.order();
    let la = ParamSymbol::from_polyhom(a, mm);
    let lc = ParamSymbol::from_polyhom(&comm, mm);
    let aq = compose_param(&la, &q, depth)?;
    let aqc = compose_param(&aq, &lc, depth)?;
    let mut out = compose_param(&aqc, &q, depth)?;
    if a_prime.known_terms() < depth {
        out.truncation_warning = true;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityReport {
    pub n: usize,
    pub certificates: Vec<Certificate>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub min_r: Option<Rational64>,
    pub integrable: bool,
    /// Fitted exponent of |term(ξ, −1)| as |ξ| → 0 along sampled directions.
    pub numeric_slope: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

fn ser_opt_rational<S: serde::Serializer>(
    r: &Option<Rational64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Classifies ξ-integrability at 0 by r > −n and probes it radially on
/// |ξ| ∈ [1e−4, 1] at λ = −1.
pub fn integrability_report(term: &ParamTerm, factors: &[Expr], m: u32, n: usize) -> Result<IntegrabilityReport> {
    let certificates = term.certificates(m);
    let min_r = certificates.iter().map(|c| c.r).min();
    let integrable = min_r.map_or(true, |r| r > Rational64::from_integer(-(n as i64)));
    let dir: Vec<f64> = if n == 1 { vec![1.0] } else { vec![0.3f64.cos(), 0.3f64.sin()] };
    let x = vec![0.7; n];
    let mut samples = Vec::new();
    for k in 0..=16 {
        let rho = 10f64.powf(-4.0 + 0.25 * k as f64);
        let xi: Vec<f64> = dir.iter().map(|d| d * rho).collect();
        let v = term.evaluate(factors, &Point::new(&x, &xi).with_real_lambda(-1.0))?;
        samples.push((rho, v.norm()));
    }
    let numeric_slope = if samples[0].1 > 0.0 && samples[4].1 > 0.0 {
        Some((samples[4].1.ln() - samples[0].1.ln()) / (samples[4].0.ln() - samples[0].0.ln()))
    } else {
        None
    };
    Ok(IntegrabilityReport {
        n,
        certificates,
        min_r,
        integrable,
        numeric_slope,
        samples,
    })
}

/// Largest |(p − λ) # q − 1| over sampled points, with each point's ⟨ξ⟩.
pub fn parametrix_defect(p: &DifferentialOperator, q: &ParamSymbol, points: &[Point]) -> Result<Vec<(f64, f64)>> {
    let depth = q.complete_to.unwrap_or(q.terms.len().saturating_sub(1));
    let mut q = q.clone();
    q.terms.truncate(depth + 1);
    let pl = ParamSymbol::shifted_operator_symbol(p);
    // p is a polynomial in ξ, so the product of p − λ with the truncated sum has
    // finitely many terms; keep all of them
    let comp = compose_param(&pl, &q, depth + p.order() as usize)?;
    points
        .iter()
        .map(|pt| {
            let v = comp.evaluate_sum(pt)? - Complex64::new(1.0, 0.0);
            let japanese = (1.0 + pt.xi_norm().powi(2)).sqrt();
            Ok((japanese, v.norm()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::ScalarField;

    fn schrodinger(v: ScalarField) -> DifferentialOperator {
        DifferentialOperator::laplace_plus(1, v)
    }

    fn lam() -> Expr {
        Expr::lambda()
    }

    fn at(e: &Expr, xi: f64, l: Complex64) -> Complex64 {
        e.evaluate(&Point::new(&[0.4], &[xi]).with_lambda(l)).unwrap()
    }

    #[test]
    fn constant_mass_terms() {
        let q = resolvent_expansion(&schrodinger(ScalarField::constant(1, 3.0)), 3).unwrap();
        let f = &q.factors;
        assert!(q.terms[1].is_zero());
        assert!(q.terms[3].is_zero());
        let expected = Expr::int(-3) * (Expr::xi(0).powi(2) - lam()).powi(-2);
        let l = Complex64::new(-0.6, 0.2);
        let got = q.terms[2].to_expr(f);
        assert!((at(&got, 1.3, l) - at(&expected, 1.3, l)).norm() < 1e-14);
    }

    #[test]
    fn variable_potential_third_term() {
        // q_{−5} = −2iξ v′ (ξ² − λ)^{−3}
        let v = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
        let q = resolvent_expansion(&schrodinger(v.clone()), 3).unwrap();
        let expected = Expr::mul_all(vec![
            Expr::complex(Complex64::new(0.0, -2.0)),
            Expr::xi(0),
            v.derivative(0).to_expr(),
            (Expr::xi(0).powi(2) - lam()).powi(-3),
        ]);
        let got = q.terms[3].to_expr(&q.factors);
        for (xi, l) in [(0.7, Complex64::new(-1.0, 0.0)), (2.1, Complex64::new(-0.3, 0.5))] {
            assert!((at(&got, xi, l) - at(&expected, xi, l)).norm() < 1e-13);
        }
    }

    #[test]
    fn certificate_bounds() {
        let v = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
        let p = schrodinger(v).pow(2);
        let q = resolvent_expansion(&p, 4).unwrap();
        for (j, t) in q.terms.iter().enumerate().skip(1) {
            for c in t.certificates(4) {
                assert!(c.nu >= 2 && c.nu <= 2 * j as i32 + 1, "j={j} nu={}", c.nu);
                assert_eq!(c.r, Rational64::from_integer(-(j as i64) + (c.nu as i64 - 1) * 4));
            }
        }
        assert!(q.check_homogeneity().unwrap());
    }

    #[test]
    fn parametrix_identity() {
        let v = ScalarField::constant(2, 2.0).add(&ScalarField::cos(2, 1, 1, 0.5));
        let p = DifferentialOperator::laplace_plus(2, v);
        let q = resolvent_expansion(&p, 3).unwrap();
        let pts: Vec<Point> = [(3.0, -1.0), (6.0, -4.0), (12.0, -20.0)]
            .iter()
            .map(|&(r, l)| Point::new(&[0.3, 1.1], &[r * 0.6, r * 0.8]).with_real_lambda(l))
            .collect();
        let d = parametrix_defect(&p, &q, &pts).unwrap();
        for (jb, e) in &d {
            assert!(e * jb.powi(4) < 50.0, "defect {e} at <xi> = {jb}");
        }
    }

    #[test]
    fn difference_leading_term_and_q4() {
        let p1 = schrodinger(ScalarField::constant(1, 2.0));
        let p2 = schrodinger(ScalarField::constant(1, 1.0));
        let d = resolvent_difference(&p1, &p2, 2).unwrap();
        assert!(d.terms[0].is_zero());
        let expected = -(Expr::xi(0).powi(2) - lam()).powi(-2);
        let l = Complex64::new(-2.0, 0.0);
        assert!((at(&d.terms[2].to_expr(&d.factors), 0.8, l) - at(&expected, 0.8, l)).norm() < 1e-14);
        let same = resolvent_difference(&p1, &p1, 3).unwrap();
        assert!(same.terms.iter().all(ParamTerm::is_zero));
    }

    #[test]
    fn commutator_hypothesis() {
        let p = schrodinger(ScalarField::constant(1, 1.0));
        let a = PolyhomSymbol::constant(1, Complex64::new(1.0, 0.0));
        let ap = PolyhomSymbol::radial_power(1, Rational64::from_integer(1));
        assert!(matches!(
            commutator_resolvent_terms(&a, &ap, &p, 2),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn integrability_threshold() {
        let p1 = schrodinger(ScalarField::constant(1, 2.0));
        let p2 = schrodinger(ScalarField::constant(1, 1.0));
        let d = resolvent_difference(&p1, &p2, 2).unwrap();
        let r = integrability_report(&d.terms[2], &d.factors, 2, 1).unwrap();
        assert!(r.integrable);
        assert!(r.numeric_slope.unwrap().abs() < 1e-3);
        let bad = ParamTerm {
            degree: Rational64::from_integer(-5),
            pieces: vec![Piece {
                coeff: Expr::radial().recip(),
                powers: vec![2],
            }],
        };
        let r = integrability_report(&bad, &d.factors[..1], 2, 1).unwrap();
        assert!(!r.integrable);
        assert!((r.numeric_slope.unwrap() + 1.0).abs() < 1e-3);
    }
}
