use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

/// Members (−λ)^{e} for each exponent, optionally log(−λ)(−λ)^{−1}.
#[derive(Clone, Debug, Serialize)]
pub struct FitBasis {
    pub exponents: Vec<f64>,
    pub log_term: bool,
}

impl FitBasis {
    /// Exponents (n + σ − j)/m − 1 for j = 0..count.
    pub fn trace_expansion(n: usize, sigma: f64, m: u32, count: usize) -> Self {
        FitBasis {
            exponents: (0..count).map(|j| (n as f64 + sigma - j as f64) / m as f64 - 1.0).collect(),
            log_term: false,
        }
    }

    pub fn with_log(mut self) -> Self {
        self.log_term = true;
        self
    }

    /// Drops exponents above `max`.
    pub fn capped(mut self, max: f64) -> Self {
        self.exponents.retain(|e| *e <= max + 1e-12);
        self
    }

    pub fn size(&self) -> usize {
        self.exponents.len() + usize::from(self.log_term)
    }

    fn column(&self, j: usize, lambda: Complex64) -> Complex64 {
        let z = -lambda;
        if j < self.exponents.len() {
            z.powf(self.exponents[j])
        } else {
            z.ln() / z
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub max_condition: f64,
    pub target_exponent: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_condition: 1e13,
            target_exponent: -1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionFit {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<Complex64>,
    pub log_coefficient: Option<Complex64>,
    pub residual_norm: f64,
    pub relative_residual: f64,
    pub condition_number: f64,
    pub ray_angle: f64,
    pub lambda_range: (f64, f64),
    pub samples: usize,
    pub target_exponent: f64,
    pub target: Complex64,
    /// Target coefficient refitted on the lower and upper halves of the
    /// |λ| range.
    pub subrange_targets: Vec<Complex64>,
    pub drift: f64,
}

impl ExpansionFit {
    pub fn coefficient_of(&self, exponent: f64) -> Option<Complex64> {
        self.exponents
            .iter()
            .position(|e| (e - exponent).abs() < 1e-12)
            .map(|i| self.coefficients[i])
    }

    pub fn evaluate(&self, lambda: Complex64) -> Complex64 {
        let z = -lambda;
        let mut s: Complex64 = self.exponents.iter().zip(&self.coefficients).map(|(e, c)| c * z.powf(*e)).sum();
        if let Some(c) = self.log_coefficient {
            s += c * z.ln() / z;
        }
        s
    }
}

/// λ = μ e^{iθ} for geometric μ in [μ_min, μ_max].
pub fn ray_samples(angle: f64, mu_min: f64, mu_max: f64, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|i| {
            let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            Complex64::from_polar(mu_min * (mu_max / mu_min).powf(t), angle)
        })
        .collect()
}

struct Solved {
    coef: Vec<Complex64>,
    residual: f64,
    scale: f64,
    condition: f64,
}

fn solve(samples: &[(Complex64, Complex64)], basis: &FitBasis, max_condition: f64) -> Result<Solved> {
    let nb = basis.size();
    let lead = basis.exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(-1.0);
    let w: Vec<f64> = samples.iter().map(|(l, _)| (-*l).norm().powf(-lead)).collect();
    let mut m = DMatrix::from_fn(samples.len(), nb, |i, j| basis.column(j, samples[i].0) * w[i]);
    let rhs = DVector::from_iterator(samples.len(), samples.iter().zip(&w).map(|((_, v), w)| v * *w));
    let norms: Vec<f64> = (0..nb).map(|j| m.column(j).norm()).collect();
    if norms.iter().any(|n| *n == 0.0) {
        return Err(Error::Fit("a basis column vanishes on the samples".into()));
    }
    for j in 0..nb {
        let n = norms[j];
        m.column_mut(j).iter_mut().for_each(|z| *z /= n);
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = smax / smin;
    if !(condition <= max_condition) {
        return Err(Error::Fit(format!(
            "condition number {condition:.3e} exceeds {max_condition:.1e}; shrink the basis or widen the lambda range"
        )));
    }
    let y = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Fit(format!("least squares failed: {e}")))?;
    let residual = (&m * &y - &rhs).norm();
    Ok(Solved {
        coef: y.iter().zip(&norms).map(|(c, n)| c / *n).collect(),
        residual,
        scale: rhs.norm(),
        condition,
    })
}

/// Least-squares fit of a trace expansion in powers of −λ. Rows are scaled
/// by |λ|^{−lead} and columns to unit norm before the SVD solve.
pub fn fit_expansion(samples: &[(Complex64, Complex64)], basis: &FitBasis, opts: &FitOptions) -> Result<ExpansionFit> {
    let nb = basis.size();
    if nb == 0 {
        return Err(Error::usage("empty fit basis"));
    }
    if samples.len() < 2 * nb {
        return Err(Error::Fit(format!(
            "{} samples for {nb} basis members; at least twice as many needed",
            samples.len()
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
    let lo = sorted[0].0.norm();
    let hi = sorted[sorted.len() - 1].0.norm();
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::Fit(format!(
            "lambda range [{lo:.3e}, {hi:.3e}] spans less than two decades"
        )));
    }
    let target_idx = basis
        .exponents
        .iter()
        .position(|e| (e - opts.target_exponent).abs() < 1e-12)
        .ok_or_else(|| Error::usage(format!("target exponent {} not in the basis", opts.target_exponent)))?;
    let full = solve(&sorted, basis, opts.max_condition)?;
    let half = sorted.len() / 2;
    let mut subrange_targets = Vec::new();
    for part in [&sorted[..half], &sorted[half..]] {
        if part.len() >= nb {
            if let Ok(s) = solve(part, basis, f64::INFINITY) {
                subrange_targets.push(s.coef[target_idx]);
            }
        }
    }
    let target = full.coef[target_idx];
    let drift = subrange_targets.iter().map(|c| (c - target).norm()).fold(0.0, f64::max);
    let ne = basis.exponents.len();
    Ok(ExpansionFit {
        exponents: basis.exponents.clone(),
        coefficients: full.coef[..ne].to_vec(),
        log_coefficient: basis.log_term.then(|| full.coef[ne]),
        residual_norm: full.residual,
        relative_residual: full.residual / full.scale.max(f64::MIN_POSITIVE),
        condition_number: full.condition,
        ray_angle: sorted[0].0.arg(),
        lambda_range: (lo, hi),
        samples: sorted.len(),
        target_exponent: opts.target_exponent,
        target,
        subrange_targets,
        drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn synthetic_round_trip() {
        let lams = ray_samples(PI, 10.0, 1e4, 30);
        let s: Vec<_> = lams
            .iter()
            .map(|l| (*l, (-*l).powf(-0.5) + (-*l).powf(-1.0) * 2.0))
            .collect();
        let basis = FitBasis {
            exponents: vec![-0.5, -1.0, -1.5],
            log_term: false,
        };
        let f = fit_expansion(&s, &basis, &FitOptions::default()).unwrap();
        assert!((f.coefficients[0] - 1.0).norm() < 1e-9);
        assert!((f.target - 2.0).norm() < 1e-9);
        assert!(f.drift < 1e-9);
    }

    #[test]
    fn log_member_is_recovered() {
        let lams = ray_samples(PI, 10.0, 1e5, 40);
        let s: Vec<_> = lams
            .iter()
            .map(|l| {
                let z = -*l;
                (*l, z.powf(-0.5) * 3.0 + z.ln() / z * 0.25 - z.inv())
            })
            .collect();
        let basis = FitBasis {
            exponents: vec![-0.5, -1.0, -1.5, -2.0],
            log_term: true,
        };
        let f = fit_expansion(&s, &basis, &FitOptions::default()).unwrap();
        assert!((f.log_coefficient.unwrap() - 0.25).norm() < 1e-8);
        assert!((f.target + 1.0).norm() < 1e-7);
    }

    #[test]
    fn too_few_samples_or_decades() {
        let basis = FitBasis::trace_expansion(1, 0.0, 2, 4);
        let s: Vec<_> = ray_samples(PI, 1.0, 1e3, 5).into_iter().map(|l| (l, l)).collect();
        assert!(matches!(fit_expansion(&s, &basis, &FitOptions::default()), Err(Error::Fit(_))));
        let s: Vec<_> = ray_samples(PI, 1.0, 10.0, 20).into_iter().map(|l| (l, l)).collect();
        assert!(matches!(fit_expansion(&s, &basis, &FitOptions::default()), Err(Error::Fit(_))));
    }

    #[test]
    fn basis_exponents() {
        let b = FitBasis::trace_expansion(1, 1.0, 4, 5);
        assert_eq!(b.exponents, vec![-0.5, -0.75, -1.0, -1.25, -1.5]);
    }
}
