use super::expr::Expr;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// Finite trigonometric polynomial Σ c_k e^{ik·x} on the torus T^n.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl ScalarField {
    pub fn zero(dim: usize) -> Self {
        ScalarField {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::mode(dim, &vec![0; dim], Complex64::new(c, 0.0))
    }

    pub fn mode(dim: usize, k: &[i64], c: Complex64) -> Self {
        let mut f = Self::zero(dim);
        f.add_mode(k, c);
        f
    }

    /// `amp · cos(k x_axis)`
    pub fn cos(dim: usize, axis: usize, k: i64, amp: f64) -> Self {
        let mut kv = vec![0; dim];
        kv[axis] = k;
        let mut f = Self::mode(dim, &kv, Complex64::new(amp / 2.0, 0.0));
        kv[axis] = -k;
        f.add_mode(&kv, Complex64::new(amp / 2.0, 0.0));
        f
    }

    /// `amp · sin(k x_axis)`
    pub fn sin(dim: usize, axis: usize, k: i64, amp: f64) -> Self {
        let mut kv = vec![0; dim];
        kv[axis] = k;
        let mut f = Self::mode(dim, &kv, Complex64::new(0.0, -amp / 2.0));
        kv[axis] = -k;
        f.add_mode(&kv, Complex64::new(0.0, amp / 2.0));
        f
    }

    pub fn from_modes(dim: usize, modes: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut f = Self::zero(dim);
        for (k, c) in modes {
            if k.len() != dim {
                return Err(Error::usage(format!(
                    "frequency {k:?} does not match dimension {dim}"
                )));
            }
            f.add_mode(k, *c);
        }
        Ok(f)
    }

    pub fn add_mode(&mut self, k: &[i64], c: Complex64) {
        assert_eq!(k.len(), self.dim, "frequency dimension mismatch");
        let e = self.coeffs.entry(k.to_vec()).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if e.norm() == 0.0 {
            self.coeffs.remove(k);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn mean(&self) -> Complex64 {
        self.coefficient(&vec![0; self.dim])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|k| k.iter().all(|&v| v == 0))
    }

    /// Largest |k_i| over all modes.
    pub fn degree(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|k| k.iter().map(|v| v.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Hermitian symmetry c_{-k} = conj(c_k).
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|(k, c)| {
            let mk: Vec<i64> = k.iter().map(|v| -v).collect();
            (self.coefficient(&mk) - c.conj()).norm() <= 1e-14 * c.norm().max(1.0)
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut f = Self::zero(self.dim);
        for (k, c) in &self.coeffs {
            f.add_mode(k, c * s);
        }
        f
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut f = self.clone();
        for (k, c) in &other.coeffs {
            f.add_mode(k, *c);
        }
        f
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut f = Self::zero(self.dim);
        for (k1, c1) in &self.coeffs {
            for (k2, c2) in &other.coeffs {
                let k: Vec<i64> = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                f.add_mode(&k, c1 * c2);
            }
        }
        f
    }

    /// ∂/∂x_axis
    pub fn derivative(&self, axis: usize) -> Self {
        let mut f = Self::zero(self.dim);
        for (k, c) in &self.coeffs {
            f.add_mode(k, c * Complex64::new(0.0, k[axis] as f64));
        }
        f
    }

    /// ∂^α
    pub fn derivative_multi(&self, alpha: &[u32]) -> Self {
        let mut f = self.clone();
        for (axis, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                f = f.derivative(axis);
            }
        }
        f
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let ph: f64 = k.iter().zip(x).map(|(a, b)| *a as f64 * b).sum();
                c * Complex64::new(ph.cos(), ph.sin())
            })
            .sum()
    }

    pub fn to_expr(&self) -> Expr {
        Expr::add_all(
            self.coeffs
                .iter()
                .map(|(k, c)| {
                    let coeff = if c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() < 1e15 {
                        Expr::int(c.re as i64)
                    } else if c.im == 0.0 && (2.0 * c.re).fract() == 0.0 && c.re.abs() < 1e15 {
                        Expr::frac((2.0 * c.re) as i64, 2)
                    } else {
                        Expr::complex(*c)
                    };
                    coeff * Expr::expi(k)
                })
                .collect(),
        )
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}
