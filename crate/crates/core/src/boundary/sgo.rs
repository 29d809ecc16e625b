use super::halfplane::HalfplaneRational;
use crate::error::{Error, Result};
use crate::symexpr::Expr;
use num_complex::Complex64;
use std::fmt::Debug;

/// Coefficient arithmetic shared by numeric and symbolic kernels.
pub trait KernelScalar: Clone + Debug {
    fn from_i64(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn powi(&self, k: i64) -> Self;
    /// Zero relative to `scale`.
    fn vanishes(&self, scale: &Self) -> bool;
    /// None when the sign of the real part cannot be decided.
    fn positive_real_part(&self) -> Option<bool>;
}

impl KernelScalar for Complex64 {
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, k: i64) -> Self {
        Complex64::powi(self, k as i32)
    }
    fn vanishes(&self, scale: &Self) -> bool {
        self.norm() <= 1e-13 * scale.norm()
    }
    fn positive_real_part(&self) -> Option<bool> {
        Some(self.re > 0.0)
    }
}

impl KernelScalar for Expr {
    fn from_i64(n: i64) -> Self {
        Expr::int(n)
    }
    fn add(&self, o: &Self) -> Self {
        Expr::add_all(vec![self.clone(), o.clone()])
    }
    fn sub(&self, o: &Self) -> Self {
        Expr::add_all(vec![self.clone(), -o])
    }
    fn mul(&self, o: &Self) -> Self {
        Expr::mul_all(vec![self.clone(), o.clone()])
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, k: i64) -> Self {
        Expr::powi(self, k)
    }
    fn vanishes(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
    fn positive_real_part(&self) -> Option<bool> {
        self.as_constant().map(|c| c.re > 0.0)
    }
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// c x^a y^b e^{−αx − βy} on the half-line.
#[derive(Clone, Debug, PartialEq)]
pub struct SGTerm<T> {
    pub coeff: T,
    pub x_power: u32,
    pub y_power: u32,
    pub x_rate: T,
    pub y_rate: T,
}

/// Singular Green kernel of exponential class in the normal variables.
#[derive(Clone, Debug, PartialEq)]
pub struct SGKernel<T> {
    pub terms: Vec<SGTerm<T>>,
}

/// Σ_j c_j e^{−s_j|x − y|}: a full-line kernel restricted to the half-line.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpKernel<T> {
    pub terms: Vec<(T, T)>,
}

fn check_rate<T: KernelScalar>(r: &T) -> Result<()> {
    if r.positive_real_part() == Some(false) {
        return Err(Error::domain(format!("{r:?}"), "exponential rate needs Re > 0"));
    }
    Ok(())
}

impl<T: KernelScalar> ExpKernel<T> {
    pub fn new(terms: Vec<(T, T)>) -> Result<Self> {
        for (_, s) in &terms {
            check_rate(s)?;
        }
        Ok(ExpKernel { terms })
    }
}

impl ExpKernel<Complex64> {
    /// Inverse transform in ξ_n of an even rational symbol with simple poles.
    pub fn from_rational(r: &HalfplaneRational) -> Result<Self> {
        ExpKernel::new(r.to_exp_kernel()?)
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|(c, s)| c * (-s * t.abs()).exp()).sum()
    }
}

impl<T: KernelScalar> SGKernel<T> {
    pub fn new(terms: Vec<SGTerm<T>>) -> Result<Self> {
        for t in &terms {
            check_rate(&t.x_rate)?;
            check_rate(&t.y_rate)?;
        }
        Ok(SGKernel { terms })
    }

    /// c e^{−ρ(x + y)}
    pub fn exponential(c: T, rho: T) -> Result<Self> {
        SGKernel::new(vec![SGTerm {
            coeff: c,
            x_power: 0,
            y_power: 0,
            x_rate: rho.clone(),
            y_rate: rho,
        }])
    }

    pub fn scale(&self, c: &T) -> Self {
        SGKernel {
            terms: self
                .terms
                .iter()
                .map(|t| SGTerm {
                    coeff: t.coeff.mul(c),
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(o.scale(&T::from_i64(-1)).terms);
        SGKernel { terms }
    }

    /// ∫_0^∞ g(x, x) dx
    pub fn normal_trace(&self) -> T {
        let mut s = T::from_i64(0);
        for t in &self.terms {
            let n = t.x_power + t.y_power;
            let v = t
                .coeff
                .mul(&T::from_i64(factorial(n)))
                .mul(&t.x_rate.add(&t.y_rate).powi(-(n as i64) - 1));
            s = s.add(&v);
        }
        s
    }

    /// Kernel of the composition self ∘ other.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for f in &self.terms {
            for g in &other.terms {
                let n = f.y_power + g.x_power;
                let c = f
                    .coeff
                    .mul(&g.coeff)
                    .mul(&T::from_i64(factorial(n)))
                    .mul(&f.y_rate.add(&g.x_rate).powi(-(n as i64) - 1));
                out.push(SGTerm {
                    coeff: c,
                    x_power: f.x_power,
                    y_power: g.y_power,
                    x_rate: f.x_rate.clone(),
                    y_rate: g.y_rate.clone(),
                });
            }
        }
        SGKernel { terms: out }
    }

    /// Kernel of self ∘ r₊ K e₊ for K a full-line exponential kernel.
    pub fn compose_exp(&self, k: &ExpKernel<T>) -> Result<Self> {
        let mut out = Vec::new();
        for f in &self.terms {
            let b = f.y_power;
            let bf = factorial(b);
            for (kc, s) in &k.terms {
                let base = f.coeff.mul(kc);
                // z > y
                let sum_rate = f.y_rate.add(s);
                check_rate(&sum_rate)?;
                for i in 0..=b {
                    let c = base
                        .mul(&T::from_i64(bf / factorial(i)))
                        .mul(&sum_rate.powi(-((b - i) as i64) - 1));
                    out.push(SGTerm {
                        coeff: c,
                        x_power: f.x_power,
                        y_power: i,
                        x_rate: f.x_rate.clone(),
                        y_rate: f.y_rate.clone(),
                    });
                }
                // z < y
                let gamma = s.sub(&f.y_rate);
                if gamma.vanishes(s) {
                    out.push(SGTerm {
                        coeff: base.mul(&T::from_i64(b as i64 + 1).powi(-1)),
                        x_power: f.x_power,
                        y_power: b + 1,
                        x_rate: f.x_rate.clone(),
                        y_rate: s.clone(),
                    });
                    continue;
                }
                for i in 0..=b {
                    let sign = if (b - i) % 2 == 0 { 1 } else { -1 };
                    let c = base
                        .mul(&T::from_i64(sign * bf / factorial(i)))
                        .mul(&gamma.powi(-((b - i) as i64) - 1));
                    out.push(SGTerm {
                        coeff: c,
                        x_power: f.x_power,
                        y_power: i,
                        x_rate: f.x_rate.clone(),
                        y_rate: f.y_rate.clone(),
                    });
                }
                let sign = if b % 2 == 0 { -1 } else { 1 };
                out.push(SGTerm {
                    coeff: base.mul(&T::from_i64(sign * bf)).mul(&gamma.powi(-(b as i64) - 1)),
                    x_power: f.x_power,
                    y_power: 0,
                    x_rate: f.x_rate.clone(),
                    y_rate: s.clone(),
                });
            }
        }
        Ok(SGKernel { terms: out })
    }
}

impl SGKernel<Complex64> {
    pub fn evaluate(&self, x: f64, y: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * x.powi(t.x_power as i32) * y.powi(t.y_power as i32) * (-t.x_rate * x - t.y_rate * y).exp())
            .sum()
    }
}

/// σ = (|ξ′|² + m² − λ)^{1/2} on the principal branch.
pub fn dirichlet_sigma(mass2: f64, xi_prime: &[f64], lambda: Complex64) -> Result<Complex64> {
    let s2 = Complex64::new(xi_prime.iter().map(|v| v * v).sum::<f64>() + mass2, 0.0) - lambda;
    if s2.im == 0.0 && s2.re <= 0.0 {
        return Err(Error::domain(
            format!("|xi'|^2 + m^2 - lambda = {}", s2.re),
            "lambda lies in the spectrum of the boundary model",
        ));
    }
    Ok(s2.sqrt())
}

/// Singular Green part −e^{−σ(x+y)}/(2σ) of the Dirichlet resolvent of
/// −∂²_x + |ξ′|² + m² on the half-line.
pub fn dirichlet_resolvent_sgo(mass2: f64, xi_prime: &[f64], lambda: Complex64) -> Result<SGKernel<Complex64>> {
    let sigma = dirichlet_sigma(mass2, xi_prime, lambda)?;
    SGKernel::exponential(-(sigma * 2.0).inv(), sigma)
}

/// Same kernel with σ kept symbolic in |ξ′| and λ.
pub fn dirichlet_resolvent_sgo_symbolic(mass2: f64) -> SGKernel<Expr> {
    let sigma = dirichlet_sigma_symbolic(mass2);
    SGKernel {
        terms: vec![SGTerm {
            coeff: -(Expr::int(2).mul(&sigma).powi(-1)),
            x_power: 0,
            y_power: 0,
            x_rate: sigma.clone(),
            y_rate: sigma,
        }],
    }
}

pub fn dirichlet_sigma_symbolic(mass2: f64) -> Expr {
    Expr::add_all(vec![Expr::radial().powi(2), Expr::real(mass2), -Expr::lambda()]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Point;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quad_trace(g: &SGKernel<Complex64>) -> Complex64 {
        crate::quad::integrate_half_line(|x| Ok(g.evaluate(x, x)), &Default::default()).unwrap().value
    }

    #[test]
    fn dirichlet_condition_holds() {
        let lam = cx(-3.0, 1.0);
        let g = dirichlet_resolvent_sgo(1.0, &[2.0], lam).unwrap();
        let sigma = dirichlet_sigma(1.0, &[2.0], lam).unwrap();
        for y in [0.1, 0.7, 2.5] {
            let free = (-sigma * y).exp() / (sigma * 2.0);
            assert!((free + g.evaluate(0.0, y)).norm() < 1e-15);
        }
    }

    #[test]
    fn normal_trace_closed_form() {
        let lam = cx(-5.0, 2.0);
        let g = dirichlet_resolvent_sgo(0.5, &[1.5], lam).unwrap();
        let want = -(cx(1.5 * 1.5 + 0.5, 0.0) - lam).inv() * 0.25;
        assert!((g.normal_trace() - want).norm() < 1e-15);
        assert!((quad_trace(&g) - want).norm() < 1e-12);
    }

    #[test]
    fn symbolic_normal_trace_is_exact() {
        let t = dirichlet_resolvent_sgo_symbolic(2.0).normal_trace();
        let base = Expr::add_all(vec![Expr::radial().powi(2), Expr::real(2.0), -Expr::lambda()]);
        let want = Expr::mul_all(vec![Expr::frac(-1, 4), base.powi(-1)]);
        assert_eq!(t, want);
        let p = Point::new(&[], &[1.2]).with_lambda(cx(-0.5, 0.3));
        let num = dirichlet_resolvent_sgo(2.0, &[1.2], cx(-0.5, 0.3)).unwrap().normal_trace();
        let mut p = p;
        p.radial = Some(1.2);
        assert!((t.evaluate(&p).unwrap() - num).norm() < 1e-14);
    }

    #[test]
    fn quasi_homogeneous_kernel() {
        // g(tξ′, t²λ; x/t, y/t) = t g(ξ′, λ; x, y) at m = 0
        let lam = cx(-1.0, 0.5);
        let g = dirichlet_resolvent_sgo(0.0, &[0.8], lam).unwrap();
        for t in [2.0, 7.5] {
            let gt = dirichlet_resolvent_sgo(0.0, &[0.8 * t], lam * t * t).unwrap();
            let (x, y) = (0.3, 1.1);
            assert!((gt.evaluate(x / t, y / t) - g.evaluate(x, y) / t).norm() < 1e-14);
        }
    }

    #[test]
    fn spectrum_point_is_rejected() {
        assert!(matches!(
            dirichlet_resolvent_sgo(1.0, &[1.0], cx(3.0, 0.0)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn compose_with_exponential_kernel() {
        // tr(c e^{−ρ(x+z)} ∘ e^{−s|z−y|}) = c/(ρ(ρ+s))
        let (c, rho, s) = (cx(0.7, 0.2), cx(1.3, 0.4), cx(2.1, -0.5));
        let g = SGKernel::exponential(c, rho).unwrap();
        let k = ExpKernel::new(vec![(cx(1.0, 0.0), s)]).unwrap();
        let h = g.compose_exp(&k).unwrap();
        assert!((h.normal_trace() - c / (rho * (rho + s))).norm() < 1e-14);
        assert!((quad_trace(&h) - c / (rho * (rho + s))).norm() < 1e-11);
    }

    #[test]
    fn compose_polynomial_weights_against_quadrature() {
        let g = SGKernel::new(vec![SGTerm {
            coeff: cx(1.0, 0.0),
            x_power: 1,
            y_power: 2,
            x_rate: cx(1.0, 0.2),
            y_rate: cx(0.9, -0.1),
        }])
        .unwrap();
        let k = ExpKernel::new(vec![(cx(0.5, 0.0), cx(1.7, 0.3)), (cx(-0.2, 0.1), cx(0.9, -0.1))]).unwrap();
        let h = g.compose_exp(&k).unwrap();
        let opts = crate::quad::QuadOptions::default();
        for (x, y) in [(0.4, 0.9), (1.5, 0.2), (0.1, 3.0)] {
            let direct = crate::quad::integrate_half_line(|z| Ok(g.evaluate(x, z) * k.evaluate(z - y)), &opts).unwrap().value;
            assert!((h.evaluate(x, y) - direct).norm() < 1e-11, "{x} {y}");
        }
        let g2 = g.compose(&g);
        let direct = crate::quad::integrate_half_line(|z| Ok(g.evaluate(0.5, z) * g.evaluate(z, 1.2)), &opts).unwrap().value;
        assert!((g2.evaluate(0.5, 1.2) - direct).norm() < 1e-12);
    }
    #[test]
    fn weighted_kernel_traces_and_zero() {
        for w in [0.3, 1.0, 4.0] {
            let g = SGKernel::exponential(cx(w, 0.0), cx(w, 0.0)).unwrap();
            assert!((g.normal_trace() - 0.5).norm() < 1e-15);
        }
        let zero: SGKernel<Complex64> = SGKernel::new(vec![]).unwrap();
        assert_eq!(zero.normal_trace(), cx(0.0, 0.0));
        let g = SGKernel::exponential(cx(1.0, 0.0), cx(1.0, 0.0)).unwrap();
        assert!(g.compose(&zero).terms.is_empty());
        let k = ExpKernel::new(vec![]).unwrap();
        assert!(g.compose_exp(&k).unwrap().terms.is_empty());
    }

    #[test]
    fn weighted_kernel_against_truncated_resolvent() {
        // |ξ′|e^{−|ξ′|(x+z)} ∘ e^{−σ|z−y|}/(2σ)
        let (w, sigma) = (1.4, cx(2.0, 0.7));
        let g = SGKernel::exponential(cx(w, 0.0), cx(w, 0.0)).unwrap();
        let k = ExpKernel::new(vec![((sigma * 2.0).inv(), sigma)]).unwrap();
        let h = g.compose_exp(&k).unwrap();
        let opts = crate::quad::QuadOptions::default();
        for (x, y) in [(0.2, 0.5), (1.0, 2.0), (3.0, 0.1)] {
            let direct = crate::quad::integrate_half_line(|z| Ok(g.evaluate(x, z) * k.evaluate(z - y)), &opts)
                .unwrap()
                .value;
            assert!((h.evaluate(x, y) - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn composition_is_associative() {
        let a = SGKernel::exponential(cx(1.0, 0.2), cx(0.8, 0.1)).unwrap();
        let b = SGKernel::new(vec![SGTerm {
            coeff: cx(0.5, 0.0),
            x_power: 1,
            y_power: 0,
            x_rate: cx(1.2, 0.0),
            y_rate: cx(0.6, -0.2),
        }])
        .unwrap();
        let c = SGKernel::exponential(cx(-0.3, 0.4), cx(2.0, 0.5)).unwrap();
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        for (x, y) in [(0.1, 0.2), (1.5, 0.7), (2.0, 3.0)] {
            assert!((left.evaluate(x, y) - right.evaluate(x, y)).norm() < 1e-12);
        }
        assert!((left.normal_trace() - right.normal_trace()).norm() < 1e-12);
    }

    #[test]
    fn growing_rate_is_rejected() {
        assert!(matches!(SGKernel::exponential(cx(1.0, 0.0), cx(-0.5, 1.0)), Err(Error::Domain { .. })));
    }
}
