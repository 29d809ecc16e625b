use super::eval::Point;
use super::expr::{rat_f64, Expr};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct HomogeneityOptions {
    /// Dimension of ξ.
    pub n: usize,
    /// Dimension of x (0 when the expression has no x-dependence).
    pub x_dim: usize,
    /// Weight of λ; `None` when λ is absent.
    pub lambda_weight: Option<u32>,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl HomogeneityOptions {
    pub fn new(n: usize, lambda_weight: Option<u32>) -> Self {
        HomogeneityOptions {
            n,
            x_dim: n,
            lambda_weight,
            samples: 24,
            tol: 1e-10,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneityReport {
    pub degree: String,
    pub samples: usize,
    pub max_rel_deviation: f64,
    pub worst_point: Option<(Vec<f64>, Vec<f64>, Option<[f64; 2]>, f64)>,
    pub pass: bool,
}

/// Tests e(x, tξ, t^m λ) = t^d e(x, ξ, λ) at random points and t ∈ [0.5, 4].
pub fn homogeneity_check(
    e: &Expr,
    degree: Rational64,
    opts: &HomogeneityOptions,
) -> Result<HomogeneityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let d = rat_f64(degree);
    let mut worst = 0.0_f64;
    let mut worst_point = None;
    for _ in 0..opts.samples {
        let x: Vec<f64> = (0..opts.x_dim)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        let xi: Vec<f64> = loop {
            let v: Vec<f64> = (0..opts.n).map(|_| rng.random_range(-2.0..2.0)).collect();
            if v.iter().map(|a| a * a).sum::<f64>().sqrt() > 0.2 {
                break v;
            }
        };
        let lam = opts.lambda_weight.map(|_| {
            let r = rng.random_range(0.5..3.0);
            let phi = rng.random_range(-0.6..0.6);
            -Complex64::from_polar(r, phi)
        });
        let t = rng.random_range(0.5..4.0);
        let base = Point {
            x: x.clone(),
            xi: xi.clone(),
            lambda: lam,
            radial: None,
        };
        let scaled = Point {
            x: x.clone(),
            xi: xi.iter().map(|v| v * t).collect(),
            lambda: lam.map(|l| l * t.powi(opts.lambda_weight.unwrap_or(0) as i32)),
            radial: None,
        };
        let at = |p: &Point| {
            e.evaluate(p).map_err(|err| {
                Error::domain(
                    e.to_string(),
                    format!("evaluation failed at x={:?}, xi={:?}, lam={:?}: {err}", p.x, p.xi, p.lambda),
                )
            })
        };
        let v0 = at(&base)?;
        let v1 = at(&scaled)?;
        let expected = v0 * t.powf(d);
        let scale = expected.norm().max(v1.norm());
        let dev = if scale < 1e-300 {
            0.0
        } else {
            (v1 - expected).norm() / scale
        };
        if dev > worst || worst_point.is_none() {
            worst = worst.max(dev);
            worst_point = Some((x, xi, lam.map(|l| [l.re, l.im]), t));
        }
    }
    Ok(HomogeneityReport {
        degree: degree.to_string(),
        samples: opts.samples,
        max_rel_deviation: worst,
        worst_point,
        pass: worst <= opts.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::field::ScalarField;

    #[test]
    fn resolvent_factor_is_homogeneous() {
        let q = (Expr::xi(0).powi(2) - Expr::lambda()).recip();
        let r = homogeneity_check(&q, Rational64::from_integer(-2), &HomogeneityOptions::new(1, Some(2)))
            .unwrap();
        assert!(r.pass);
        assert!(r.max_rel_deviation < 1e-12);
    }

    #[test]
    fn hand_recursion_term_is_homogeneous() {
        let v = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
        let vp = v.derivative(0).to_expr();
        let q = (Expr::xi(0).powi(2) - Expr::lambda()).recip();
        let term = Expr::complex(Complex64::new(0.0, -2.0)) * Expr::xi(0) * vp * q.powi(3);
        let r = homogeneity_check(&term, Rational64::from_integer(-5), &HomogeneityOptions::new(1, Some(2)))
            .unwrap();
        assert!(r.pass);
    }

    #[test]
    fn inhomogeneous_witness_fails() {
        let e = Expr::xi(0).powi(2) + Expr::one();
        let r = homogeneity_check(&e, Rational64::from_integer(2), &HomogeneityOptions::new(1, None))
            .unwrap();
        assert!(!r.pass);
        assert!(r.max_rel_deviation > 1e-3);
    }
}
