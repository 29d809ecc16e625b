use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Σ_k c_k (ξ − p)^{−k}, k = 1..terms.len().
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoleTerms {
    pub location: Complex64,
    pub terms: Vec<Complex64>,
}

impl PoleTerms {
    pub fn is_upper(&self) -> bool {
        self.location.im > 0.0
    }
}

/// Rational function of ξ_n in exact partial-fraction form.
///
/// Under u(x) = ∫ e^{ixξ} û(ξ) đξ the upper poles carry the part supported
/// in x > 0 and the lower poles the part in x < 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfplaneRational {
    pub poles: Vec<PoleTerms>,
    /// Polynomial part, ascending coefficients.
    pub polynomial: Vec<Complex64>,
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![c(0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn trim(p: &mut Vec<Complex64>) {
    while p.last().is_some_and(|z| *z == c(0.0)) {
        p.pop();
    }
}

/// Taylor coefficients of N(p + h), ascending.
fn shift(n: &[Complex64], p: Complex64) -> Vec<Complex64> {
    let mut out = n.to_vec();
    // repeated synthetic division
    let len = out.len();
    for i in 0..len {
        for j in (i..len - 1).rev() {
            let t = out[j + 1] * p;
            out[j] += t;
        }
    }
    out
}

fn binom_neg(m: u32, j: usize) -> f64 {
    // C(−m, j) = (−1)^j C(m + j − 1, j)
    let mut v = 1.0;
    for i in 0..j {
        v *= (m as f64 + i as f64) / (i as f64 + 1.0);
    }
    if j % 2 == 1 {
        -v
    } else {
        v
    }
}

fn series_mul(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![c(0.0); len];
    for i in 0..len.min(a.len()) {
        for j in 0..(len - i).min(b.len()) {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

impl HalfplaneRational {
    pub fn from_partial_fractions(poles: Vec<PoleTerms>) -> Self {
        HalfplaneRational {
            poles,
            polynomial: vec![],
        }
    }

    /// N(ξ)/Π(ξ − p_i)^{m_i}; numerator in ascending coefficients.
    pub fn from_factored(numerator: &[Complex64], poles: &[(Complex64, u32)]) -> Result<Self> {
        let scale = poles.iter().map(|(p, _)| p.norm()).fold(1.0, f64::max);
        for (p, _) in poles {
            if p.im.abs() <= 1e-14 * scale {
                return Err(Error::domain(
                    format!("pole {p}"),
                    "real pole: the half-plane split needs Re sigma > 0",
                ));
            }
        }
        for (i, (p, _)) in poles.iter().enumerate() {
            if poles[..i].iter().any(|(q, _)| (p - q).norm() <= 1e-14 * scale) {
                return Err(Error::usage("repeated pole listed twice; merge multiplicities"));
            }
        }
        let mut den = vec![c(1.0)];
        for (p, m) in poles {
            for _ in 0..*m {
                den = poly_mul(&den, &[-p, c(1.0)]);
            }
        }
        let mut num = numerator.to_vec();
        trim(&mut num);
        // long division N = Q D + R
        let dd = den.len() - 1;
        let mut quotient = vec![];
        if num.len() > dd {
            quotient = vec![c(0.0); num.len() - dd];
            for i in (0..quotient.len()).rev() {
                let q = num[i + dd] / den[dd];
                quotient[i] = q;
                for (j, dj) in den.iter().enumerate() {
                    num[i + j] -= q * dj;
                }
            }
            num.truncate(dd);
        }
        let mut out = Vec::new();
        for (idx, (p, m)) in poles.iter().enumerate() {
            let m = *m as usize;
            if m == 0 {
                continue;
            }
            let mut g = shift(&num, *p);
            g.resize(m, c(0.0));
            for (jdx, (q, mq)) in poles.iter().enumerate() {
                if jdx == idx || *mq == 0 {
                    continue;
                }
                let d = p - q;
                let s: Vec<Complex64> = (0..m).map(|j| d.powi(-(*mq as i32) - j as i32) * binom_neg(*mq, j)).collect();
                g = series_mul(&g, &s, m);
            }
            out.push(PoleTerms {
                location: *p,
                terms: (1..=m).map(|k| g[m - k]).collect(),
            });
        }
        trim(&mut quotient);
        Ok(HalfplaneRational {
            poles: out,
            polynomial: quotient,
        })
    }

    pub fn is_proper(&self) -> bool {
        self.polynomial.iter().all(|z| *z == c(0.0))
    }

    pub fn evaluate(&self, xi: Complex64) -> Complex64 {
        let mut s = c(0.0);
        for (k, a) in self.polynomial.iter().enumerate() {
            s += a * xi.powi(k as i32);
        }
        for p in &self.poles {
            for (k, a) in p.terms.iter().enumerate() {
                s += a * (xi - p.location).powi(-(k as i32) - 1);
            }
        }
        s
    }

    /// (plus, minus): the upper-pole and lower-pole parts.
    pub fn split(&self) -> Result<(Self, Self)> {
        if !self.is_proper() {
            return Err(Error::usage("half-plane split needs a strictly proper rational function"));
        }
        let (up, down): (Vec<_>, Vec<_>) = self.poles.iter().cloned().partition(|p| p.is_upper());
        Ok((Self::from_partial_fractions(up), Self::from_partial_fractions(down)))
    }

    /// u(x) = ∫ e^{ixξ} r(ξ) đξ by residues; the mean of the one-sided
    /// limits at x = 0.
    pub fn inverse_transform(&self, x: f64) -> Result<Complex64> {
        if !self.is_proper() {
            return Err(Error::usage("inverse transform needs a strictly proper rational function"));
        }
        if x == 0.0 {
            return Ok((self.inverse_transform(f64::MIN_POSITIVE)? + self.inverse_transform(-f64::MIN_POSITIVE)?) * 0.5);
        }
        let i = Complex64::i();
        let mut s = c(0.0);
        for p in &self.poles {
            if p.is_upper() != (x > 0.0) {
                continue;
            }
            let e = (i * x * p.location).exp();
            let mut fact = 1.0;
            for (k, a) in p.terms.iter().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                }
                s += a * (i * x).powi(k as i32) / fact * e;
            }
        }
        Ok(if x > 0.0 { s * i } else { -s * i })
    }

    /// Σ_j c_j e^{−s_j|x|} when the transform is even with simple poles.
    pub fn to_exp_kernel(&self) -> Result<Vec<(Complex64, Complex64)>> {
        if self.poles.iter().any(|p| p.terms.len() > 1) {
            return Err(Error::usage("exponential kernel form needs simple poles"));
        }
        // rounding scale of the residue sums, not of their (cancelling) value
        let scale: f64 = self.poles.iter().map(|p| p.terms[0].norm()).sum();
        for x in [0.37, 1.3, 2.9] {
            let (a, b) = (self.inverse_transform(x)?, self.inverse_transform(-x)?);
            if (a - b).norm() > 1e-12 * scale {
                return Err(Error::usage("kernel is not even in the normal variable"));
            }
        }
        Ok(self
            .poles
            .iter()
            .filter(|p| p.is_upper())
            .map(|p| (Complex64::i() * p.terms[0], -Complex64::i() * p.location))
            .collect())
    }
}
