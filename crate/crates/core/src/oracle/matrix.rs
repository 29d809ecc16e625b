use crate::error::{Error, Result};
use crate::parametrix::DifferentialOperator;
use crate::symexpr::ScalarField;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use std::collections::{BTreeMap, HashMap};

/// Finite Fourier vector Σ u_k e^{ik·x}.
pub type Sparse = BTreeMap<Vec<i64>, Complex64>;

/// Operators with exact action on trigonometric polynomials.
#[derive(Clone, Debug)]
pub enum OperatorSpec {
    Identity,
    Differential(DifferentialOperator),
    Multiplication(ScalarField),
    /// |D|^s, zero on the constant mode.
    RadialMultiplier(Rational64),
    Scaled(Complex64, Box<OperatorSpec>),
    Sum(Vec<OperatorSpec>),
    /// Composition; the last factor acts first.
    Product(Vec<OperatorSpec>),
}

fn add_into(out: &mut Sparse, k: Vec<i64>, v: Complex64) {
    if v == Complex64::new(0.0, 0.0) {
        return;
    }
    *out.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v;
}

impl OperatorSpec {
    pub fn commutator(a: OperatorSpec, b: OperatorSpec) -> Self {
        OperatorSpec::Sum(vec![
            OperatorSpec::Product(vec![a.clone(), b.clone()]),
            OperatorSpec::Scaled(Complex64::new(-1.0, 0.0), Box::new(OperatorSpec::Product(vec![b, a]))),
        ])
    }

    pub fn difference(a: OperatorSpec, b: OperatorSpec) -> Self {
        OperatorSpec::Sum(vec![a, OperatorSpec::Scaled(Complex64::new(-1.0, 0.0), Box::new(b))])
    }

    pub fn apply(&self, v: &Sparse) -> Sparse {
        let mut out = Sparse::new();
        match self {
            OperatorSpec::Identity => return v.clone(),
            OperatorSpec::Differential(op) => {
                for (l, u) in v {
                    for (alpha, c) in op.terms() {
                        let f: f64 = alpha.iter().zip(l).map(|(&a, &li)| (li as f64).powi(a as i32)).product();
                        if f == 0.0 {
                            continue;
                        }
                        for (k, ck) in c.modes() {
                            let m: Vec<i64> = l.iter().zip(k).map(|(a, b)| a + b).collect();
                            add_into(&mut out, m, u * ck * f);
                        }
                    }
                }
            }
            OperatorSpec::Multiplication(c) => {
                for (l, u) in v {
                    for (k, ck) in c.modes() {
                        let m: Vec<i64> = l.iter().zip(k).map(|(a, b)| a + b).collect();
                        add_into(&mut out, m, u * ck);
                    }
                }
            }
            OperatorSpec::RadialMultiplier(s) => {
                let p = *s.numer() as f64 / *s.denom() as f64;
                for (l, u) in v {
                    let r = l.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
                    if r > 0.0 {
                        add_into(&mut out, l.clone(), u * r.powf(p));
                    }
                }
            }
            OperatorSpec::Scaled(c, inner) => {
                for (k, u) in inner.apply(v) {
                    add_into(&mut out, k, u * c);
                }
            }
            OperatorSpec::Sum(parts) => {
                for p in parts {
                    for (k, u) in p.apply(v) {
                        add_into(&mut out, k, u);
                    }
                }
            }
            OperatorSpec::Product(factors) => {
                let mut w = v.clone();
                for f in factors.iter().rev() {
                    w = f.apply(&w);
                }
                return w;
            }
        }
        out
    }

    /// Image of e^{ik·x}: the column of matrix entries (l, k).
    pub fn column(&self, k: &[i64]) -> Sparse {
        let mut e = Sparse::new();
        e.insert(k.to_vec(), Complex64::new(1.0, 0.0));
        self.apply(&e)
    }

    /// Largest frequency shift.
    pub fn bandwidth(&self) -> i64 {
        match self {
            OperatorSpec::Identity | OperatorSpec::RadialMultiplier(_) => 0,
            OperatorSpec::Differential(op) => op.bandwidth(),
            OperatorSpec::Multiplication(c) => c.degree(),
            OperatorSpec::Scaled(_, inner) => inner.bandwidth(),
            OperatorSpec::Sum(p) => p.iter().map(|o| o.bandwidth()).max().unwrap_or(0),
            OperatorSpec::Product(p) => p.iter().map(|o| o.bandwidth()).sum(),
        }
    }
}

/// Compression of an operator to the modes with max |k_i| ≤ K.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub dim: usize,
    pub cutoff: i64,
    pub modes: Vec<Vec<i64>>,
    pub matrix: DMatrix<Complex64>,
}

pub fn box_modes(dim: usize, k: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|m| {
                (-k..=k).map(move |v| {
                    let mut m2 = m.clone();
                    m2.push(v);
                    m2
                })
            })
            .collect();
    }
    out
}

impl TruncatedOperator {
    pub fn build(spec: &OperatorSpec, dim: usize, cutoff: i64) -> Result<Self> {
        let bw = spec.bandwidth();
        if cutoff <= bw {
            return Err(Error::usage(format!(
                "cutoff K = {cutoff} does not exceed the coefficient bandwidth {bw}"
            )));
        }
        let modes = box_modes(dim, cutoff);
        let index: HashMap<&Vec<i64>, usize> = modes.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let n = modes.len();
        let mut matrix = DMatrix::<Complex64>::zeros(n, n);
        for (j, k) in modes.iter().enumerate() {
            for (l, v) in spec.column(k) {
                if let Some(&i) = index.get(&l) {
                    matrix[(i, j)] = v;
                }
            }
        }
        Ok(TruncatedOperator {
            dim,
            cutoff,
            modes,
            matrix,
        })
    }

    pub fn size(&self) -> usize {
        self.modes.len()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.matrix.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
        let n = self.size();
        (0..n).all(|i| (0..=i).all(|j| (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm() <= tol * scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minus_laplace() -> OperatorSpec {
        OperatorSpec::Differential(DifferentialOperator::laplace_plus(1, ScalarField::zero(1)))
    }

    #[test]
    fn laplacian_is_diagonal() {
        let t = TruncatedOperator::build(&minus_laplace(), 1, 2).unwrap();
        let d: Vec<f64> = (0..5).map(|i| t.matrix[(i, i)].re).collect();
        assert_eq!(d, vec![4.0, 1.0, 0.0, 1.0, 4.0]);
        assert!(t.is_hermitian(0.0));
    }

    #[test]
    fn cosine_multiplication_band() {
        let t = TruncatedOperator::build(&OperatorSpec::Multiplication(ScalarField::cos(1, 0, 1, 1.0)), 1, 2).unwrap();
        assert_eq!(t.matrix[(1, 0)].re, 0.5);
        assert_eq!(t.matrix[(0, 1)].re, 0.5);
        assert_eq!(t.matrix[(0, 0)].re, 0.0);
        assert_eq!(t.matrix[(2, 0)].re, 0.0);
    }

    #[test]
    fn radial_multiplier_and_cutoff_guard() {
        let t = TruncatedOperator::build(&OperatorSpec::RadialMultiplier(Rational64::from_integer(1)), 1, 3).unwrap();
        let d: Vec<f64> = (0..7).map(|i| t.matrix[(i, i)].re).collect();
        assert_eq!(d, vec![3.0, 2.0, 1.0, 0.0, 1.0, 2.0, 3.0]);
        let wide = OperatorSpec::Multiplication(ScalarField::cos(1, 0, 4, 1.0));
        assert!(TruncatedOperator::build(&wide, 1, 3).is_err());
    }

    #[test]
    fn product_is_exact_compression() {
        // (cos x)² = 1/2 + cos(2x)/2, exact even at the box edge
        let c = OperatorSpec::Multiplication(ScalarField::cos(1, 0, 1, 1.0));
        let t = TruncatedOperator::build(&OperatorSpec::Product(vec![c.clone(), c]), 1, 3).unwrap();
        assert!((t.matrix[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((t.matrix[(6, 6)].re - 0.5).abs() < 1e-15);
    }
}
