use crate::boundary::CylinderSpec;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// θ(t) = Σ_{k∈ℤ} e^{−tk²}, through Poisson summation for small t.
pub fn theta(t: f64) -> f64 {
    if t <= 0.0 {
        return f64::INFINITY;
    }
    if t < 1.0 {
        let q = PI * PI / t;
        let mut s = 1.0;
        for k in 1..50 {
            let term = (-(q * (k * k) as f64)).exp();
            s += 2.0 * term;
            if term < 1e-300 {
                break;
            }
        }
        (PI / t).sqrt() * s
    } else {
        let mut s = 1.0;
        for k in 1..50 {
            let term = (-(t * (k * k) as f64)).exp();
            s += 2.0 * term;
            if term < 1e-300 {
                break;
            }
        }
        s
    }
}

/// Eigenvalue families with a known heat trace.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectrumSpec {
    /// |k|² + m² on (ℝ/2πℤ)^dim.
    Torus { dim: usize, mass2: f64 },
    /// (πj/L)² + m², j ≥ 1.
    DirichletInterval { length: f64, mass2: f64 },
    /// (πj/L)² + (2πk/C)² + m², j ≥ 1, k ∈ ℤ.
    DirichletCylinder { circumference: f64, length: f64, mass2: f64 },
    /// Eigenvalues of a truncation on T¹ with cutoff K; the modes |k| > K
    /// are modelled as k² + shift.
    Listed {
        eigenvalues: Vec<f64>,
        dim: usize,
        order: u32,
        cutoff: Option<i64>,
        tail_shift: f64,
    },
}

impl SpectrumSpec {
    pub fn dim(&self) -> usize {
        match self {
            SpectrumSpec::Torus { dim, .. } => *dim,
            SpectrumSpec::DirichletInterval { .. } => 1,
            SpectrumSpec::DirichletCylinder { .. } => 2,
            SpectrumSpec::Listed { dim, .. } => *dim,
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            SpectrumSpec::Listed { order, .. } => *order,
            _ => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::usage(m.to_string()));
        match self {
            SpectrumSpec::Torus { dim, mass2 } => {
                if !(1..=3).contains(dim) {
                    return bad("torus dimension must be 1, 2 or 3");
                }
                if *mass2 < 0.0 {
                    return bad("negative mass: the heat trace constant is not a zeta value");
                }
            }
            SpectrumSpec::DirichletInterval { length, mass2 } => {
                if !(*length > 0.0) || *mass2 < 0.0 {
                    return bad("interval needs L > 0 and m^2 >= 0");
                }
            }
            SpectrumSpec::DirichletCylinder {
                circumference,
                length,
                mass2,
            } => {
                if !(*length > 0.0 && *circumference > 0.0) || *mass2 < 0.0 {
                    return bad("cylinder needs L > 0, C > 0 and m^2 >= 0");
                }
            }
            SpectrumSpec::Listed { eigenvalues, .. } => {
                if eigenvalues.is_empty() {
                    return bad("empty eigenvalue list");
                }
                if eigenvalues.iter().any(|e| !e.is_finite()) {
                    return bad("non-finite eigenvalue");
                }
            }
        }
        Ok(())
    }

    /// Tr e^{−tP}.
    pub fn heat_trace(&self, t: f64) -> f64 {
        match self {
            SpectrumSpec::Torus { dim, mass2 } => (-t * mass2).exp() * theta(t).powi(*dim as i32),
            SpectrumSpec::DirichletInterval { length, mass2 } => {
                (-t * mass2).exp() * 0.5 * (theta(t * PI * PI / (length * length)) - 1.0)
            }
            SpectrumSpec::DirichletCylinder {
                circumference,
                length,
                mass2,
            } => {
                let w = 2.0 * PI / circumference;
                (-t * mass2).exp() * theta(t * w * w) * 0.5 * (theta(t * PI * PI / (length * length)) - 1.0)
            }
            SpectrumSpec::Listed {
                eigenvalues,
                cutoff,
                tail_shift,
                ..
            } => {
                let mut s: f64 = eigenvalues.iter().map(|e| (-t * e).exp()).sum();
                if let Some(k) = cutoff {
                    // Σ_{|k|>K} e^{−t k²}
                    let mut tail = 0.0;
                    let mut j = k + 1;
                    loop {
                        let term = (-t * (j * j) as f64).exp();
                        tail += 2.0 * term;
                        if term < 1e-18 * tail.max(1e-300) || j > k + 1_000_000 {
                            break;
                        }
                        j += 1;
                    }
                    s += (-t * tail_shift).exp() * tail;
                }
                s
            }
        }
    }

    /// Eigenvalues below the threshold (algebraic multiplicity).
    pub fn nullity(&self, threshold: f64) -> usize {
        match self {
            SpectrumSpec::Torus { mass2, .. } => usize::from(mass2.abs() < threshold),
            SpectrumSpec::DirichletInterval { length, mass2 } => usize::from((PI / length).powi(2) + mass2 < threshold),
            SpectrumSpec::DirichletCylinder { length, mass2, .. } => {
                usize::from((PI / length).powi(2) + mass2 < threshold)
            }
            SpectrumSpec::Listed { eigenvalues, .. } => eigenvalues.iter().filter(|e| e.abs() < threshold).count(),
        }
    }

    /// Largest t at which exponentially small corrections (closed geodesics,
    /// truncation edge) stay below roughly e^{−36}.
    pub fn max_clean_t(&self) -> f64 {
        let geo = |len: f64| len * len / 36.0;
        match self {
            SpectrumSpec::Torus { .. } => geo(PI),
            SpectrumSpec::DirichletInterval { length, .. } => geo(*length),
            SpectrumSpec::DirichletCylinder {
                circumference, length, ..
            } => geo(*length).min(geo(circumference / 2.0)),
            SpectrumSpec::Listed { .. } => geo(PI),
        }
    }

    /// Smallest t at which the listed truncation is trusted.
    pub fn min_clean_t(&self) -> f64 {
        match self {
            SpectrumSpec::Listed { eigenvalues, .. } => {
                let top = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                40.0 / top.max(1.0)
            }
            _ => 0.0,
        }
    }

    /// Eigenvalues with frequency labels, ascending, at most `max` entries.
    pub fn listing(&self, max: usize) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = match self {
            SpectrumSpec::Torus { dim, mass2 } => {
                let r = ((max as f64).powf(1.0 / *dim as f64).ceil() as i64).max(1);
                crate::oracle::box_modes(*dim, r)
                    .into_iter()
                    .map(|k| {
                        let lab = k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
                        (lab, k.iter().map(|v| (v * v) as f64).sum::<f64>() + mass2)
                    })
                    .collect()
            }
            SpectrumSpec::DirichletInterval { length, mass2 } => (1..=max as i64)
                .map(|j| (j.to_string(), (PI * j as f64 / length).powi(2) + mass2))
                .collect(),
            SpectrumSpec::DirichletCylinder {
                circumference,
                length,
                mass2,
            } => {
                let r = (max as f64).sqrt().ceil() as i64 + 1;
                let mut v = Vec::new();
                for k in -r..=r {
                    for j in 1..=r {
                        let e = (2.0 * PI * k as f64 / circumference).powi(2) + (PI * j as f64 / length).powi(2) + mass2;
                        v.push((format!("{k},{j}"), e));
                    }
                }
                v
            }
            SpectrumSpec::Listed { eigenvalues, .. } => {
                eigenvalues.iter().enumerate().map(|(i, e)| (i.to_string(), *e)).collect()
            }
        };
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out.truncate(max);
        out
    }

    /// Text export: one `frequency eigenvalue` pair per line.
    pub fn to_text(&self, max: usize) -> String {
        let mut s = String::from("# frequency eigenvalue\n");
        for (lab, e) in self.listing(max) {
            let _ = writeln!(s, "{lab} {e:.17e}");
        }
        s
    }

    /// Reads the text export back as a listed spectrum (no tail model).
    pub fn from_text(text: &str, dim: usize, order: u32) -> Result<Self> {
        let mut eigenvalues = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(_), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Config {
                    line: i + 1,
                    column: 1,
                    message: "expected `frequency eigenvalue`".into(),
                });
            };
            eigenvalues.push(v.parse::<f64>().map_err(|e| Error::Config {
                line: i + 1,
                column: line.find(v).unwrap_or(0) + 1,
                message: e.to_string(),
            })?);
        }
        let s = SpectrumSpec::Listed {
            eigenvalues,
            dim,
            order,
            cutoff: None,
            tail_shift: 0.0,
        };
        s.validate()?;
        Ok(s)
    }
}

/// Eigenvalues (πj/L)² + k² + m² of the Dirichlet cylinder.
pub fn dirichlet_product_spectrum(cyl: &CylinderSpec) -> SpectrumSpec {
    SpectrumSpec::DirichletCylinder {
        circumference: cyl.circumference,
        length: cyl.length,
        mass2: cyl.mass2,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatFitOptions {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Basis members t^{(j−n)/m}, j = 0..terms.
    pub terms: usize,
    pub drift_tol: f64,
    pub null_threshold: f64,
}

impl Default for HeatFitOptions {
    fn default() -> Self {
        HeatFitOptions {
            t_min: 1e-3,
            t_max: 0.25,
            points: 60,
            terms: 14,
            drift_tol: 1e-6,
            null_threshold: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaReport {
    pub zeta0: f64,
    pub nullity: usize,
    pub c0: f64,
    /// |c0 on the first grid − c0 on the second|.
    pub drift: f64,
    pub t_range: (f64, f64),
    pub second_range: (f64, f64),
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub relative_residual: f64,
}

/// t⁰ coefficient of h on a geometric grid in the given power basis, with
/// all fitted coefficients and the relative residual.
pub fn heat_constant<F>(h: F, exponents: &[f64], t_min: f64, t_max: f64, points: usize) -> Result<(f64, Vec<f64>, f64)>
where
    F: Fn(f64) -> f64,
{
    let zero = exponents
        .iter()
        .position(|e| e.abs() < 1e-12)
        .ok_or_else(|| Error::usage("heat basis lacks t^0"))?;
    if points < 2 * exponents.len() || !(t_max > t_min && t_min > 0.0) {
        return Err(Error::Oracle(format!(
            "heat fit needs at least {} points on a nonempty range, got {points} on [{t_min:.3e}, {t_max:.3e}]",
            2 * exponents.len()
        )));
    }
    let ts: Vec<f64> = (0..points)
        .map(|i| t_min * (t_max / t_min).powf(i as f64 / (points - 1) as f64))
        .collect();
    let lead = exponents.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = ts.iter().map(|t| t.powf(-lead)).collect();
    let mut m = DMatrix::from_fn(points, exponents.len(), |i, j| ts[i].powf(exponents[j]) * w[i]);
    let rhs = DVector::from_iterator(points, ts.iter().zip(&w).map(|(t, w)| h(*t) * w));
    let norms: Vec<f64> = (0..exponents.len()).map(|j| m.column(j).norm()).collect();
    for (j, n) in norms.iter().enumerate() {
        m.column_mut(j).iter_mut().for_each(|z| *z /= n);
    }
    let svd = m.clone().svd(true, true);
    let y = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Oracle(format!("heat fit failed: {e}")))?;
    let coef: Vec<f64> = y.iter().zip(&norms).map(|(c, n)| c / n).collect();
    let rel = (&m * &y - &rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    Ok((coef[zero], coef, rel))
}

/// ζ(P, 0) = c₀ − ν₀ with c₀ the t⁰ coefficient of the full heat trace.
pub fn zeta_at_zero(spec: &SpectrumSpec, opts: &HeatFitOptions) -> Result<ZetaReport> {
    spec.validate()?;
    let (n, m) = (spec.dim() as f64, spec.order() as f64);
    let exponents: Vec<f64> = (0..opts.terms).map(|j| (j as f64 - n) / m).collect();
    let t_max = opts.t_max.min(spec.max_clean_t());
    // a clipped window keeps its ratio, so rescaled geometries fit alike
    let t_min = (opts.t_min * t_max / opts.t_max).max(spec.min_clean_t());
    if !(t_max > 4.0 * t_min) {
        return Err(Error::Oracle(format!(
            "usable t range [{t_min:.3e}, {t_max:.3e}] is too narrow; raise the cutoff"
        )));
    }
    let h = |t: f64| spec.heat_trace(t);
    let (c0, coefficients, rel) = heat_constant(h, &exponents, t_min, t_max, opts.points)?;
    let second = (t_min * 1.5, t_max * 0.75);
    let (c0b, _, _) = heat_constant(h, &exponents, second.0, second.1, opts.points)?;
    let drift = (c0 - c0b).abs();
    if drift > opts.drift_tol {
        return Err(Error::Oracle(format!(
            "heat-trace constant drifts by {drift:.3e} between grids (tolerance {:.1e})",
            opts.drift_tol
        )));
    }
    let nullity = spec.nullity(opts.null_threshold);
    Ok(ZetaReport {
        zeta0: c0 - nullity as f64,
        nullity,
        c0,
        drift,
        t_range: (t_min, t_max),
        second_range: second,
        exponents,
        coefficients,
        relative_residual: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_branches_agree() {
        let direct = |t: f64| 1.0 + 2.0 * (1..200).map(|k| (-t * (k * k) as f64).exp()).sum::<f64>();
        for t in [0.05, 0.5, 0.99, 1.0, 3.0] {
            assert!((theta(t) - direct(t)).abs() < 1e-12 * direct(t), "t={t}");
        }
    }

    #[test]
    fn circle_laplacian_zeta() {
        let r = zeta_at_zero(&SpectrumSpec::Torus { dim: 1, mass2: 0.0 }, &HeatFitOptions::default()).unwrap();
        assert_eq!(r.nullity, 1);
        assert!(r.c0.abs() < 1e-6);
        assert!((r.zeta0 + 1.0).abs() < 1e-6);
    }

    #[test]
    fn shifted_torus_constant() {
        let r = zeta_at_zero(&SpectrumSpec::Torus { dim: 2, mass2: 1.0 }, &HeatFitOptions::default()).unwrap();
        assert!((r.c0 + PI).abs() < 1e-6, "{}", r.c0);
    }

    #[test]
    fn dirichlet_interval_zeta() {
        let r = zeta_at_zero(
            &SpectrumSpec::DirichletInterval { length: PI, mass2: 0.0 },
            &HeatFitOptions::default(),
        )
        .unwrap();
        assert_eq!(r.nullity, 0);
        assert!((r.zeta0 + 0.5).abs() < 1e-6);
    }

    #[test]
    fn text_round_trip() {
        let s = SpectrumSpec::DirichletInterval { length: PI, mass2: 0.0 };
        let t = s.to_text(5);
        assert!(t.lines().nth(1).unwrap().starts_with("1 1.0"));
        let back = SpectrumSpec::from_text(&t, 1, 2).unwrap();
        let SpectrumSpec::Listed { eigenvalues, .. } = back else { panic!() };
        assert_eq!(eigenvalues.len(), 5);
        assert!((eigenvalues[4] - 25.0).abs() < 1e-12);
        assert!(matches!(SpectrumSpec::from_text("1 2 3\n", 1, 2), Err(Error::Config { line: 1, .. })));
    }
}
