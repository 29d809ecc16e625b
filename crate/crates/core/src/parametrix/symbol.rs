use crate::error::{Error, Result};
use crate::symexpr::{
    homogeneity_check, multi_factorial, multi_indices, Expr, HomogeneityOptions, Point,
    ScalarField,
};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use std::collections::HashMap;

/// Σ_j a_{order−j}(x, ξ), each term positively homogeneous in ξ.
///
/// `complete_to = Some(J)` means terms beyond index J are unknown rather
/// than zero.
#[derive(Clone, Debug)]
pub struct PolyhomSymbol {
    pub dim: usize,
    pub order: Rational64,
    terms: Vec<Expr>,
    pub complete_to: Option<usize>,
    pub truncation_warning: bool,
}

impl PolyhomSymbol {
    pub fn new(dim: usize, order: Rational64, terms: Vec<Expr>, complete_to: Option<usize>) -> Self {
        PolyhomSymbol {
            dim,
            order,
            terms,
            complete_to,
            truncation_warning: false,
        }
    }

    pub fn exact(dim: usize, order: Rational64, terms: Vec<Expr>) -> Self {
        Self::new(dim, order, terms, None)
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::exact(dim, Rational64::zero(), vec![Expr::complex(c)])
    }

    /// |ξ|^s
    pub fn radial_power(dim: usize, s: Rational64) -> Self {
        Self::exact(dim, s, vec![Expr::radial().rpow(s)])
    }

    /// Multiplication by a coefficient field.
    pub fn multiplication(f: &ScalarField) -> Self {
        Self::exact(f.dim(), Rational64::zero(), vec![f.to_expr()])
    }

    /// Left multiplication of every term by a field.
    pub fn left_multiply(&self, f: &ScalarField) -> Self {
        let g = f.to_expr();
        let mut s = self.clone();
        s.terms = self.terms.iter().map(|t| &g * t).collect();
        s
    }

    pub fn terms(&self) -> &[Expr] {
        &self.terms
    }

    /// Term of index j; zero past the stored terms.
    pub fn term(&self, j: usize) -> Expr {
        self.terms.get(j).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn degree_of(&self, j: usize) -> Rational64 {
        self.order - Rational64::from_integer(j as i64)
    }

    /// Index of the term of the given degree, if the degree lies on the
    /// lattice order − ℕ.
    pub fn index_of_degree(&self, d: Rational64) -> Option<usize> {
        let j = self.order - d;
        if j.is_integer() && j >= Rational64::zero() {
            Some(j.to_integer() as usize)
        } else {
            None
        }
    }

    /// Number of terms known exactly, `usize::MAX` for exact symbols.
    pub fn known_terms(&self) -> usize {
        self.complete_to.map(|j| j + 1).unwrap_or(usize::MAX)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut s = self.clone();
        s.terms = self.terms.iter().map(|t| t.scale(c)).collect();
        s
    }

    fn aligned(&self, other: &Self) -> Result<(Rational64, usize, usize)> {
        if self.dim != other.dim {
            return Err(Error::usage("symbols of different dimension"));
        }
        let diff = self.order - other.order;
        if !diff.is_integer() {
            return Err(Error::usage(format!(
                "orders {} and {} differ by a non-integer",
                self.order, other.order
            )));
        }
        let d = diff.to_integer();
        Ok(if d >= 0 {
            (self.order, 0, d as usize)
        } else {
            (other.order, (-d) as usize, 0)
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (order, sa, sb) = self.aligned(other)?;
        let len = (self.terms.len() + sa).max(other.terms.len() + sb);
        let terms = (0..len)
            .map(|j| {
                let a = if j >= sa { self.term(j - sa) } else { Expr::zero() };
                let b = if j >= sb { other.term(j - sb) } else { Expr::zero() };
                a + b
            })
            .collect();
        let ca = self.complete_to.map(|c| c + sa);
        let cb = other.complete_to.map(|c| c + sb);
        let complete_to = match (ca, cb) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Ok(PolyhomSymbol {
            dim: self.dim,
            order,
            terms,
            complete_to,
            truncation_warning: self.truncation_warning || other.truncation_warning,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Sum of the stored terms at a point.
    pub fn evaluate_sum(&self, p: &Point) -> Result<Complex64> {
        Ok(Expr::evaluate_many(&self.terms, p)?.into_iter().sum())
    }

    /// Homogeneity of every stored term.
    pub fn check_homogeneity(&self) -> Result<bool> {
        for (j, t) in self.terms.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            let r = homogeneity_check(t, self.degree_of(j), &HomogeneityOptions::new(self.dim, None))?;
            if !r.pass {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Leibniz product a # b truncated after `depth` + 1 terms:
    /// (a#b)_{j} = Σ_{|α|+j1+j2=j} (1/α!) ∂_ξ^α a_{j1} D_x^α b_{j2}.
    pub fn compose(&self, other: &Self, depth: usize) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::usage("symbols of different dimension"));
        }
        let n = self.dim;
        let mut da: HashMap<(usize, Vec<u32>), Expr> = HashMap::new();
        let mut db: HashMap<(usize, Vec<u32>), Expr> = HashMap::new();
        let mut terms = Vec::with_capacity(depth + 1);
        for j in 0..=depth {
            let mut acc = Vec::new();
            for k in 0..=j {
                let sign = match k % 4 {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, -1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, 1.0),
                };
                for alpha in multi_indices(n, k as u32) {
                    let w = Rational64::new(1, multi_factorial(&alpha));
                    for j1 in 0..=(j - k) {
                        let j2 = j - k - j1;
                        let a = da
                            .entry((j1, alpha.clone()))
                            .or_insert_with(|| self.term(j1).diff_multi(&alpha, true))
                            .clone();
                        if a.is_zero() {
                            continue;
                        }
                        let b = db
                            .entry((j2, alpha.clone()))
                            .or_insert_with(|| other.term(j2).diff_multi(&alpha, false))
                            .clone();
                        if b.is_zero() {
                            continue;
                        }
                        acc.push(Expr::mul_all(vec![
                            Expr::rational(w),
                            Expr::complex(sign),
                            a,
                            b,
                        ]));
                    }
                }
            }
            terms.push(Expr::add_all(acc));
        }
        let known = self.known_terms().min(other.known_terms());
        Ok(PolyhomSymbol {
            dim: n,
            order: self.order + other.order,
            terms,
            complete_to: Some(depth.min(known.saturating_sub(1))),
            truncation_warning: self.truncation_warning
                || other.truncation_warning
                || depth + 1 > known,
        })
    }
}
