use crate::error::{Error, Result};
use crate::parametrix::{FrozenTerm, ParamTerm};
use crate::quad::{integrate_half_line, integrate_negative_axis, QuadOptions, QuadResult};
use crate::symexpr::{Expr, SphereRule};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

/// Tolerances for the improper integrals on (−∞, 0] and (0, ∞).
pub fn transform_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 4000,
        initial_pieces: 8,
    }
}

/// T[f] = −∫_{−∞}^0 f(t) dt by adaptive quadrature.
pub fn log_transform<F>(mut f: F) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut q = integrate_negative_axis(|t| f(t), &transform_options())?;
    q.value = -q.value;
    Ok(q)
}

/// Numeric T of a frozen term, refusing terms whose decay certificate fails.
pub fn log_transform_frozen(t: &FrozenTerm) -> Result<QuadResult> {
    if let Some(nu) = t.powers.iter().map(|p| p.iter().sum::<i32>()).min() {
        if nu < 2 {
            return Err(Error::Hypothesis(format!(
                "log transform needs O(λ^(-1-ε)) decay; a piece has only {nu} resolvent factor(s)"
            )));
        }
    }
    log_transform(|s| Ok(t.at(Complex64::new(s, 0.0))))
}

fn binom_neg(a: i64, k: i64) -> Rational64 {
    // binom(−a, k) = (−1)^k C(a+k−1, k)
    let mut c = Rational64::from_integer(1);
    for i in 0..k {
        c = c * Rational64::from_integer(a + i) / Rational64::from_integer(i + 1);
    }
    if k % 2 == 1 {
        -c
    } else {
        c
    }
}

/// T[(p − λ)^{−k}] = −p^{1−k}/(k−1), k ≥ 2.
fn t_single(p: &Expr, k: i64) -> Expr {
    Expr::mul_all(vec![Expr::frac(-1, k - 1), p.powi(1 - k)])
}

/// Closed form of T on one piece.
fn t_piece(coeff: &Expr, powers: &[i32], factors: &[Expr]) -> Result<Expr> {
    let active: Vec<(usize, i64)> = powers
        .iter()
        .enumerate()
        .filter(|(_, &k)| k != 0)
        .map(|(i, &k)| (i, k as i64))
        .collect();
    if active.iter().any(|&(_, k)| k < 0) {
        return Err(Error::Hypothesis(
            "log transform of a piece with positive powers of (p − λ)".into(),
        ));
    }
    let nu: i64 = active.iter().map(|a| a.1).sum();
    if nu < 2 {
        return Err(Error::Hypothesis(format!(
            "log transform needs O(λ^(-1-ε)) decay; a piece has only {nu} resolvent factor(s)"
        )));
    }
    match active.as_slice() {
        [(i, k)] => Ok(coeff * &t_single(&factors[*i], *k)),
        [(i, a), (j, b)] => {
            let (pi, pj) = (&factors[*i], &factors[*j]);
            let d = pj - pi;
            let mut parts = Vec::new();
            for k in 1..=*a {
                let ak = Expr::mul_all(vec![Expr::rational(binom_neg(*b, a - k)), d.powi(-b - a + k)]);
                parts.push(if k == 1 {
                    Expr::mul_all(vec![ak, pi.ln() - pj.ln()])
                } else {
                    ak * t_single(pi, k)
                });
            }
            let md = -&d;
            for k in 2..=*b {
                let bk = Expr::mul_all(vec![Expr::rational(binom_neg(*a, b - k)), md.powi(-a - (b - k))]);
                parts.push(bk * t_single(pj, k));
            }
            Ok(coeff * &Expr::add_all(parts))
        }
        _ => Err(Error::usage(
            "closed-form log transform supports at most two distinct resolvent factors",
        )),
    }
}

/// T of a resolvent-type term in closed form; the result has degree
/// `term.degree + m` in ξ.
pub fn log_transform_term(term: &ParamTerm, factors: &[Expr]) -> Result<Expr> {
    Ok(Expr::add_all(
        term.pieces
            .iter()
            .map(|p| t_piece(&p.coeff, &p.powers, factors))
            .collect::<Result<Vec<_>>>()?,
    ))
}

/// Both sides of the radial reduction
/// ∫_{ℝⁿ} f(ξ, −1) đξ = (1/m) ∫_{|ξ|=1} ∫_{−∞}^0 f(ξ, t) dt đS(ξ).
#[derive(Clone, Debug, Serialize)]
pub struct RadialReduction {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub diff: f64,
    pub quad_error: f64,
}

/// `f(ξ, λ)` must be quasi-homogeneous of degree −m−n and integrable at 0.
pub fn radial_reduce<F>(mut f: F, rule: &SphereRule, m: u32) -> Result<RadialReduction>
where
    F: FnMut(&[f64], Complex64) -> Result<Complex64>,
{
    let n = rule.n;
    let opts = transform_options();
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (node, w) in rule.nodes.iter().zip(&rule.weights) {
        let radial = integrate_half_line(
            |rho| {
                let xi: Vec<f64> = node.iter().map(|c| c * rho).collect();
                Ok(f(&xi, Complex64::new(-1.0, 0.0))? * rho.powi(n as i32 - 1))
            },
            &opts,
        )?;
        let along = integrate_negative_axis(|t| f(node, Complex64::new(t, 0.0)), &opts)?;
        lhs += radial.value * *w;
        rhs += along.value * *w / m as f64;
        err += (radial.error + along.error) * w.abs();
    }
    Ok(RadialReduction {
        lhs,
        rhs,
        diff: (lhs - rhs).norm(),
        quad_error: err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parametrix::Piece;
    use crate::symexpr::{sphere_quadrature, Point};
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn anchors_on_real_line() {
        let q = log_transform(|t| Ok((c(1.0) - t).powi(-2))).unwrap();
        assert!((q.value + 1.0).norm() < 1e-11);
        let q = log_transform(|t| Ok(((c(1.0) - t) * (c(2.0) - t)).inv())).unwrap();
        assert!((q.value + 2f64.ln()).norm() < 1e-11);
    }

    fn check_closed_vs_numeric(powers: Vec<i32>, factors: Vec<Expr>) {
        let term = ParamTerm {
            degree: Rational64::from_integer(0),
            pieces: vec![Piece {
                coeff: Expr::xi(0),
                powers,
            }],
        };
        let closed = log_transform_term(&term, &factors).unwrap();
        for xi in [0.6, 1.7] {
            let cl = closed.evaluate(&Point::new(&[0.2], &[xi])).unwrap();
            let fr = term.freeze(&factors, &[0.2], &[xi]).unwrap();
            let nu = log_transform_frozen(&fr).unwrap();
            assert!((cl - nu.value).norm() < 1e-10 * (1.0 + cl.norm()), "{cl} vs {}", nu.value);
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let p1 = Expr::xi(0).powi(2) + Expr::int(2);
        let p2 = Expr::xi(0).powi(2) + Expr::int(1);
        check_closed_vs_numeric(vec![3], vec![p1.clone()]);
        check_closed_vs_numeric(vec![1, 1], vec![p1.clone(), p2.clone()]);
        check_closed_vs_numeric(vec![2, 3], vec![p1.clone(), p2.clone()]);
        check_closed_vs_numeric(vec![3, 1], vec![p1, p2]);
    }

    #[test]
    fn slow_decay_refused() {
        let term = ParamTerm {
            degree: Rational64::from_integer(-2),
            pieces: vec![Piece {
                coeff: Expr::one(),
                powers: vec![1],
            }],
        };
        assert!(matches!(
            log_transform_term(&term, &[Expr::xi(0).powi(2)]),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn radial_anchors() {
        let r1 = radial_reduce(
            |xi, l| Ok((c(xi[0] * xi[0]) - l).powf(-1.5)),
            &sphere_quadrature(1, 2).unwrap(),
            2,
        )
        .unwrap();
        assert!((r1.lhs - c(1.0 / PI)).norm() < 1e-10);
        assert!((r1.rhs - c(1.0 / PI)).norm() < 1e-10);
        let r2 = radial_reduce(
            |xi, l| Ok((c(xi[0] * xi[0] + xi[1] * xi[1]) - l).powi(-2)),
            &sphere_quadrature(2, 8).unwrap(),
            2,
        )
        .unwrap();
        assert!((r2.lhs - c(0.25 / PI)).norm() < 1e-10);
        assert!(r2.diff < 1e-10);
    }
}
