use super::symbol::PolyhomSymbol;
use crate::error::{Error, Result};
use crate::symexpr::{multi_indices, xi_monomial, Expr, ScalarField};
use num_complex::Complex64;
use num_rational::Rational64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Σ_α c_α(x) D^α with D = −i∂ and trigonometric coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialOperator {
    dim: usize,
    coeffs: BTreeMap<Vec<u32>, ScalarField>,
}

fn binom(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl DifferentialOperator {
    pub fn zero(dim: usize) -> Self {
        DifferentialOperator {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    /// Terms given as coefficients of D^α.
    pub fn from_d_terms(dim: usize, terms: Vec<(Vec<u32>, ScalarField)>) -> Result<Self> {
        let mut op = Self::zero(dim);
        for (alpha, c) in terms {
            if alpha.len() != dim || c.dim() != dim {
                return Err(Error::usage(format!(
                    "term {alpha:?} does not match dimension {dim}"
                )));
            }
            op.add_term(&alpha, &c);
        }
        Ok(op)
    }

    /// Terms given as coefficients of ∂^α = i^{|α|} D^α.
    pub fn from_partial_terms(dim: usize, terms: Vec<(Vec<u32>, ScalarField)>) -> Result<Self> {
        let converted = terms
            .into_iter()
            .map(|(a, c)| {
                let k: u32 = a.iter().sum();
                let s = c.scale(i_pow(k));
                (a, s)
            })
            .collect();
        Self::from_d_terms(dim, converted)
    }

    /// −Δ + v
    pub fn laplace_plus(dim: usize, potential: ScalarField) -> Self {
        let mut op = Self::zero(dim);
        for j in 0..dim {
            let mut a = vec![0; dim];
            a[j] = 2;
            op.add_term(&a, &ScalarField::constant(dim, 1.0));
        }
        op.add_term(&vec![0; dim], &potential);
        op
    }

    fn add_term(&mut self, alpha: &[u32], c: &ScalarField) {
        let e = self
            .coeffs
            .entry(alpha.to_vec())
            .or_insert_with(|| ScalarField::zero(self.dim));
        *e = e.add(c);
        if e.is_zero() {
            self.coeffs.remove(alpha);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|a| a.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &ScalarField)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, alpha: &[u32]) -> ScalarField {
        self.coeffs
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| ScalarField::zero(self.dim))
    }

    /// Largest coefficient frequency.
    pub fn bandwidth(&self) -> i64 {
        self.coeffs.values().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut op = Self::zero(self.dim);
        for (a, c) in &self.coeffs {
            op.add_term(a, &c.scale(s));
        }
        op
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut op = self.clone();
        for (a, c) in &other.coeffs {
            op.add_term(a, c);
        }
        op
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Exact product via (a D^α)(b D^β) = a Σ_{γ≤α} C(α,γ) (D^γ b) D^{α−γ+β}.
    pub fn compose(&self, other: &Self) -> Self {
        let mut op = Self::zero(self.dim);
        for (alpha, a) in &self.coeffs {
            for (beta, b) in &other.coeffs {
                let mut gammas: Vec<Vec<u32>> = vec![vec![]];
                for &ai in alpha {
                    gammas = gammas
                        .into_iter()
                        .flat_map(|g| {
                            (0..=ai).map(move |gi| {
                                let mut g2 = g.clone();
                                g2.push(gi);
                                g2
                            })
                        })
                        .collect();
                }
                for gamma in gammas {
                    let c: i64 = alpha.iter().zip(&gamma).map(|(&a, &g)| binom(a, g)).product();
                    let k: u32 = gamma.iter().sum();
                    let dgb = b
                        .derivative_multi(&gamma)
                        .scale(i_pow(3 * k) * c as f64);
                    let new_alpha: Vec<u32> = alpha
                        .iter()
                        .zip(&gamma)
                        .zip(beta)
                        .map(|((&a, &g), &bb)| a - g + bb)
                        .collect();
                    op.add_term(&new_alpha, &a.mul(&dgb));
                }
            }
        }
        op
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::zero(self.dim);
        acc.add_term(&vec![0; self.dim], &ScalarField::constant(self.dim, 1.0));
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    /// p_{m−l}(x, ξ) = Σ_{|α|=m−l} c_α(x) ξ^α.
    pub fn symbol_part(&self, l: u32) -> Expr {
        let m = self.order();
        if l > m {
            return Expr::zero();
        }
        let deg = m - l;
        Expr::add_all(
            multi_indices(self.dim, deg)
                .into_iter()
                .filter_map(|a| {
                    self.coeffs
                        .get(&a)
                        .map(|c| c.to_expr() * xi_monomial(&a))
                })
                .collect(),
        )
    }

    pub fn principal(&self) -> Expr {
        self.symbol_part(0)
    }

    /// Exact full symbol as a polyhomogeneous symbol of order m.
    pub fn symbol(&self) -> PolyhomSymbol {
        let m = self.order();
        PolyhomSymbol::exact(
            self.dim,
            Rational64::from_integer(m as i64),
            (0..=m).map(|l| self.symbol_part(l)).collect(),
        )
    }

    fn principal_value(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        let m = self.order();
        self.coeffs
            .iter()
            .filter(|(a, _)| a.iter().sum::<u32>() == m)
            .map(|(a, c)| {
                let mono: f64 = a.iter().zip(xi).map(|(&k, &v)| v.powi(k as i32)).product();
                c.eval(x) * mono
            })
            .sum()
    }

    /// Requires |p_m| > 0 and p_m outside the closed sector of half-angle
    /// `sector` around ℝ₋, sampled on an x-grid times the unit cosphere.
    pub fn check_elliptic(&self, sector: f64) -> Result<()> {
        if self.order() == 0 {
            return Err(Error::Construction {
                reason: "operator of order 0 is not elliptic of positive order".into(),
                witness: "-".into(),
            });
        }
        let nx = 16usize;
        let dirs: Vec<Vec<f64>> = match self.dim {
            1 => vec![vec![1.0], vec![-1.0]],
            2 => (0..48)
                .map(|j| {
                    let t = 2.0 * PI * (j as f64 + 0.5) / 48.0;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
            d => return Err(Error::usage(format!("dimension {d} not supported"))),
        };
        let grid: Vec<Vec<f64>> = if self.dim == 1 {
            (0..nx).map(|i| vec![2.0 * PI * i as f64 / nx as f64]).collect()
        } else {
            (0..nx * nx)
                .map(|i| {
                    vec![
                        2.0 * PI * (i / nx) as f64 / nx as f64,
                        2.0 * PI * (i % nx) as f64 / nx as f64,
                    ]
                })
                .collect()
        };
        for x in &grid {
            for d in &dirs {
                let p = self.principal_value(x, d);
                let bad = p.norm() <= 1e-12 || (PI - p.arg().abs()) <= sector;
                if bad {
                    return Err(Error::Construction {
                        reason: "principal symbol meets the excluded sector around the negative axis"
                            .into(),
                        witness: format!("x={x:?}, xi={d:?}, p_m={p}"),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Point;

    fn v() -> ScalarField {
        ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0))
    }

    #[test]
    fn laplacian_symbol() {
        let p = DifferentialOperator::laplace_plus(2, ScalarField::constant(2, 1.0));
        assert_eq!(p.order(), 2);
        let s = p.principal();
        let val = s.evaluate(&Point::new(&[0.0, 0.0], &[1.0, 2.0])).unwrap();
        assert!((val.re - 5.0).abs() < 1e-15);
        assert!(p.symbol_part(1).is_zero());
    }

    #[test]
    fn partial_terms_convert() {
        let p = DifferentialOperator::from_partial_terms(
            1,
            vec![(vec![2], ScalarField::constant(1, -1.0))],
        )
        .unwrap();
        assert_eq!(p, DifferentialOperator::laplace_plus(1, ScalarField::zero(1)));
    }

    #[test]
    fn square_of_schrodinger_operator() {
        // (D² + v)² = D⁴ + 2v D² − 2i v' D + (v² − v'')
        let p = DifferentialOperator::laplace_plus(1, v());
        let p2 = p.pow(2);
        assert_eq!(p2.order(), 4);
        assert_eq!(p2.coefficient(&[2]), v().scale(Complex64::new(2.0, 0.0)));
        assert_eq!(
            p2.coefficient(&[1]),
            v().derivative(0).scale(Complex64::new(0.0, -2.0))
        );
        let expected0 = v().mul(&v()).sub(&v().derivative(0).derivative(0));
        assert_eq!(p2.coefficient(&[0]), expected0);
    }

    #[test]
    fn ellipticity() {
        let p = DifferentialOperator::laplace_plus(1, v());
        assert!(p.check_elliptic(0.1).is_ok());
        let bad = p.scale(Complex64::new(-1.0, 0.0));
        match bad.check_elliptic(0.1) {
            Err(Error::Construction { witness, .. }) => assert!(witness.contains("p_m")),
            other => panic!("expected construction error, got {other:?}"),
        }
    }
}
