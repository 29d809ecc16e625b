use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_negative_axis, QuadOptions, QuadResult};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Positively oriented boundary of {r′ < |λ| < R, |arg λ| < π − θ′}.
///
/// Going around: the outer arc counterclockwise, the upper ray inward, the
/// inner arc clockwise, the lower ray outward.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KeyholeContour {
    pub inner_radius: f64,
    pub half_angle: f64,
    pub outer_radius: f64,
    /// Initial subintervals per segment for the adaptive rule.
    pub resolution: usize,
}

const BLOWUP: f64 = 1e12;

impl KeyholeContour {
    pub fn new(inner_radius: f64, half_angle: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius > 0.0 && outer_radius > inner_radius && half_angle > 0.0 && half_angle < PI / 2.0) {
            return Err(Error::usage(format!(
                "invalid keyhole r'={inner_radius}, theta'={half_angle}, R={outer_radius}"
            )));
        }
        Ok(KeyholeContour {
            inner_radius,
            half_angle,
            outer_radius,
            resolution: 8,
        })
    }

    /// A contour enclosing the given poles, none of which may lie on ℝ₋.
    pub fn enclosing(poles: &[Complex64]) -> Result<Self> {
        let mut rmin = f64::INFINITY;
        let mut rmax: f64 = 1.0;
        let mut theta: f64 = 0.2;
        for p in poles {
            let r = p.norm();
            let gap = PI - p.arg().abs();
            if r == 0.0 || gap <= 1e-9 {
                return Err(Error::Contour(format!("pole {p} lies on the cut")));
            }
            rmin = rmin.min(r);
            rmax = rmax.max(r);
            theta = theta.min(0.5 * gap);
        }
        let inner = if rmin.is_finite() { 0.5 * rmin } else { 0.5 };
        Self::new(inner, theta, 2.0 * rmax + 1.0)
    }

    /// Whether a point lies strictly inside the enclosed region.
    pub fn encloses(&self, z: Complex64) -> bool {
        let r = z.norm();
        r > self.inner_radius && r < self.outer_radius && z.arg().abs() < PI - self.half_angle
    }

    /// (1/2πi) ∮ log λ · f(λ) dλ with the principal logarithm.
    pub fn log_integral<F>(&self, mut f: F) -> Result<Complex64>
    where
        F: FnMut(Complex64) -> Result<Complex64>,
    {
        let phi = PI - self.half_angle;
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_intervals: 4000,
            initial_pieces: self.resolution,
        };
        let mut guarded = |lam: Complex64| -> Result<Complex64> {
            let v = f(lam)?;
            if !(v.norm() < BLOWUP) {
                return Err(Error::Contour(format!(
                    "integrand blows up at lambda = {lam}; the contour meets a pole"
                )));
            }
            Ok(lam.ln() * v)
        };
        let i = Complex64::new(0.0, 1.0);
        let (r, big) = (self.inner_radius, self.outer_radius);
        let mut total = Complex64::new(0.0, 0.0);
        // outer arc, counterclockwise
        total += integrate(
            |t| {
                let lam = Complex64::from_polar(big, t);
                Ok(guarded(lam)? * i * lam)
            },
            -phi,
            phi,
            &opts,
        )
        .and_then(converged)?;
        // upper ray inward: λ = s e^{iφ}, s: R → r′
        let up = Complex64::from_polar(1.0, phi);
        total -= integrate(|s| Ok(guarded(up * s)? * up), r, big, &opts).and_then(converged)?;
        // inner arc, clockwise
        total -= integrate(
            |t| {
                let lam = Complex64::from_polar(r, t);
                Ok(guarded(lam)? * i * lam)
            },
            -phi,
            phi,
            &opts,
        )
        .and_then(converged)?;
        // lower ray outward
        let down = up.conj();
        total += integrate(|s| Ok(guarded(down * s)? * down), r, big, &opts).and_then(converged)?;
        Ok(total / (2.0 * PI * i))
    }
}

fn converged(q: QuadResult) -> Result<Complex64> {
    if q.converged {
        Ok(q.value)
    } else {
        Err(Error::Contour(format!(
            "segment quadrature stalled (error estimate {:.3e}); a pole is near the contour",
            q.error
        )))
    }
}

/// Both sides of the contour/real-axis identity
/// (1/2πi) ∮ log λ f dλ = ∫_{−∞}^0 f(t) dt.
#[derive(Clone, Debug, Serialize)]
pub struct ContourCheck {
    pub contour: KeyholeContour,
    pub contour_value: Complex64,
    pub real_line_value: Complex64,
    pub real_line_error: f64,
    pub abs_diff: f64,
}

pub fn contour_check<F>(mut f: F, contour: &KeyholeContour) -> Result<ContourCheck>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let contour_value = contour.log_integral(&mut f)?;
    let q = integrate_negative_axis(
        |t| f(Complex64::new(t, 0.0)),
        &QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_intervals: 4000,
            initial_pieces: 8,
        },
    )?;
    Ok(ContourCheck {
        contour: *contour,
        contour_value,
        real_line_value: q.value,
        real_line_error: q.error,
        abs_diff: (contour_value - q.value).norm(),
    })
}

/// log(s e^{iπ}) − log(s e^{−iπ}) as limits from above and below the cut.
pub fn branch_jump(s: f64) -> Complex64 {
    let eps = 1e-300;
    Complex64::new(-s, eps).ln() - Complex64::new(-s, -eps).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn double_pole_anchor() {
        let k = KeyholeContour::enclosing(&[c(1.0)]).unwrap();
        let r = contour_check(|l| Ok((c(1.0) - l).powi(-2)), &k).unwrap();
        assert!((r.contour_value - c(1.0)).norm() < 1e-10);
        assert!((r.real_line_value - c(1.0)).norm() < 1e-10);
    }

    #[test]
    fn two_simple_poles_anchor() {
        let k = KeyholeContour::enclosing(&[c(1.0), c(2.0)]).unwrap();
        let r = contour_check(|l| Ok(((c(1.0) - l) * (c(2.0) - l)).inv()), &k).unwrap();
        assert!((r.contour_value - c(2f64.ln())).norm() < 1e-10);
        assert!(r.abs_diff < 1e-10);
    }

    #[test]
    fn closed_contour_gives_log_of_simple_pole() {
        let p = Complex64::new(2.0, 1.5);
        let k = KeyholeContour::enclosing(&[p]).unwrap();
        let v = k.log_integral(|l| Ok((p - l).inv())).unwrap();
        assert!((v + p.ln()).norm() < 1e-10);
    }

    #[test]
    fn jump_and_pole_on_contour() {
        assert!((branch_jump(3.0) - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-12);
        let k = KeyholeContour::new(0.5, 0.1, 4.0).unwrap();
        let r = k.log_integral(|l| Ok((c(4.0) - l).inv()));
        assert!(matches!(r, Err(Error::Contour(_)) | Err(Error::Quadrature(_))));
    }
}
