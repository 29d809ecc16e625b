use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use std::f64::consts::PI;
use tracedefect::boundary::{
    dirichlet_resolvent_sgo, fgls_residue, identity_trace_fit, CylinderSpec, HalfplaneRational, LambdaFit, SGKernel,
    SGTerm, T310Model,
};
use tracedefect::logresidue::{noncommutative_residue, XDomain};
use tracedefect::oracle::{zeta_at_zero, HeatFitOptions, OperatorSpec, SpectrumSpec, TraceOracle, TruncatedOperator};
use tracedefect::parametrix::{DifferentialOperator, PolyhomSymbol};
use tracedefect::symexpr::ScalarField;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn off_axis() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, 0.3..3.0f64, any::<bool>()).prop_map(|(re, im, up)| Complex64::new(re, if up { im } else { -im }))
}

fn rational() -> impl Strategy<Value = HalfplaneRational> {
    (
        prop::collection::vec((off_axis(), 1u32..=2), 2..=3),
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..=2),
    )
        .prop_filter("distinct poles", |(p, _)| {
            p.iter().enumerate().all(|(i, a)| p[..i].iter().all(|b| (a.0 - b.0).norm() > 0.2))
        })
        .prop_map(|(poles, num)| {
            let num: Vec<Complex64> = num.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            HalfplaneRational::from_factored(&num, &poles).unwrap()
        })
        .prop_filter("strictly proper", |r| r.is_proper())
}

fn kernel() -> impl Strategy<Value = SGKernel<Complex64>> {
    prop::collection::vec((-2.0..2.0f64, 0u32..=2, 0u32..=2, 0.5..3.0f64, -1.0..1.0f64, 0.5..3.0f64), 1..=3).prop_map(
        |terms| {
            SGKernel::new(
                terms
                    .into_iter()
                    .map(|(k, a, b, xr, xi, yr)| SGTerm {
                        coeff: c(k),
                        x_power: a,
                        y_power: b,
                        x_rate: Complex64::new(xr, xi),
                        y_rate: c(yr),
                    })
                    .collect(),
            )
            .unwrap()
        },
    )
}

/// Composite Simpson on [0, b].
fn simpson(f: impl Fn(f64) -> Complex64, b: f64, n: usize) -> Complex64 {
    let h = b / n as f64;
    let mut s = f(0.0) + f(b);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn split_parts_sum_back(r in rational(), re in -4.0..4.0f64, im in -4.0..4.0f64) {
        let (plus, minus) = r.split().unwrap();
        let xi = Complex64::new(re, im);
        prop_assume!(r.poles.iter().all(|p| (p.location - xi).norm() > 0.1));
        let whole = r.evaluate(xi);
        let parts = plus.evaluate(xi) + minus.evaluate(xi);
        prop_assert!((whole - parts).norm() <= 1e-12 * (1.0 + whole.norm()), "{whole} vs {parts}");
        let (pp, pm) = plus.split().unwrap();
        prop_assert_eq!(pp, plus.clone());
        prop_assert!(pm.poles.is_empty());
        // supports: the plus part lives on x > 0, the minus part on x < 0
        let x = 0.2 + re.abs();
        prop_assert_eq!(plus.inverse_transform(-x).unwrap(), c(0.0));
        prop_assert_eq!(minus.inverse_transform(x).unwrap(), c(0.0));
    }

    #[test]
    fn inverse_transform_of_the_free_symbol(sigma in 0.2..4.0f64, x in -5.0..5.0f64) {
        let r = HalfplaneRational::from_factored(&[c(1.0)], &[(Complex64::new(0.0, sigma), 1), (Complex64::new(0.0, -sigma), 1)])
            .unwrap();
        let got = r.inverse_transform(x).unwrap();
        let want = (-sigma * x.abs()).exp() / (2.0 * sigma);
        prop_assert!((got - want).norm() <= 1e-13, "{got} vs {want}");
    }

    #[test]
    fn dirichlet_kernel_cancels_the_free_one_at_the_wall(
        mass2 in 0.0..4.0f64,
        xi in -3.0..3.0f64,
        lam_re in -5.0..0.5f64,
        lam_im in 0.1..3.0f64,
        y in 0.0..4.0f64,
    ) {
        let lambda = Complex64::new(lam_re, lam_im);
        let g = dirichlet_resolvent_sgo(mass2, &[xi], lambda).unwrap();
        let sigma = (c(xi * xi + mass2) - lambda).sqrt();
        let free = (-sigma * y).exp() / (sigma * 2.0);
        let sum = free + g.evaluate(0.0, y);
        prop_assert!(sum.norm() <= 1e-13 * free.norm().max(1.0), "{sum}");
    }

    #[test]
    fn normal_trace_matches_quadrature(k in kernel()) {
        let slow = k.terms.iter().map(|t| (t.x_rate + t.y_rate).re).fold(f64::INFINITY, f64::min);
        let b = 60.0 / slow;
        let quad = simpson(|x| k.evaluate(x, x), b, 20000);
        let exact = k.normal_trace();
        prop_assert!((quad - exact).norm() <= 1e-10 * (1.0 + exact.norm()), "{quad} vs {exact}");
    }

    #[test]
    fn composition_matches_quadrature(f in kernel(), g in kernel(), x in 0.0..2.0f64, y in 0.0..2.0f64) {
        let slow = f.terms.iter().map(|t| t.y_rate.re).chain(g.terms.iter().map(|t| t.x_rate.re)).fold(f64::INFINITY, f64::min);
        let quad = simpson(|z| f.evaluate(x, z) * g.evaluate(z, y), 40.0 / slow, 20000);
        let exact = f.compose(&g).evaluate(x, y);
        prop_assert!((quad - exact).norm() <= 1e-10 * (1.0 + exact.norm()), "{quad} vs {exact}");
    }

    #[test]
    fn fgls_without_boundary_is_the_residue(s in prop_oneof![Just((-1i64, 1i64)), Just((-2, 1)), Just((1, 2)), Just((-3, 1))], dim in 1usize..=2) {
        let a = PolyhomSymbol::radial_power(dim, Rational64::new(s.0, s.1));
        let dom = XDomain::torus(dim, 4);
        let plain = noncommutative_residue(&a, &dom).unwrap().value;
        let f = fgls_residue(Some(&a), None, &dom, 2, 1.0).unwrap();
        prop_assert_eq!(f.total, plain);
    }
}

fn smooth(amp: f64) -> ScalarField {
    ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, amp))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn spectral_trace_matches_a_direct_solve(amp in -0.9..0.9f64, lam_re in -20.0..-0.5f64, lam_im in -5.0..5.0f64) {
        // commutator [cos x, |D|] against the resolvent of −∂² + 2 + amp cos x
        let a = OperatorSpec::commutator(
            OperatorSpec::Multiplication(ScalarField::cos(1, 0, 1, 1.0)),
            OperatorSpec::RadialMultiplier(Rational64::from_integer(1)),
        );
        let p = OperatorSpec::Differential(DifferentialOperator::laplace_plus(1, smooth(amp)));
        let k = 24;
        let lambda = Complex64::new(lam_re, lam_im);
        let spectral = TraceOracle::single(&a, &p, 1, k, None).unwrap().at(lambda).unwrap();
        let at = TruncatedOperator::build(&a, 1, k).unwrap().matrix;
        let pt = TruncatedOperator::build(&p, 1, k).unwrap().matrix;
        let shifted = pt - DMatrix::<Complex64>::identity(at.nrows(), at.ncols()) * lambda;
        let direct = (at * shifted.try_inverse().unwrap()).trace();
        prop_assert!((spectral - direct).norm() <= 1e-9 * (1.0 + direct.norm()), "{spectral} vs {direct}");
    }

    #[test]
    fn truncation_converges_for_the_difference(a1 in -0.9..0.9f64, a2 in -0.9..0.9f64, mu in 1.0..50.0f64) {
        let p1 = OperatorSpec::Differential(DifferentialOperator::laplace_plus(1, smooth(a1)));
        let mut v2 = smooth(a2);
        v2 = v2.add(&ScalarField::constant(1, 0.5));
        let p2 = OperatorSpec::Differential(DifferentialOperator::laplace_plus(1, v2));
        let lambda = c(-mu);
        let at = |k: i64| TraceOracle::difference(&OperatorSpec::Identity, &p1, &p2, 1, k, Some(4096)).unwrap().at(lambda).unwrap();
        let (small, large) = (at(48), at(96));
        prop_assert!((small - large).norm() < 1e-7, "{small} vs {large}");
    }

    #[test]
    fn model_fit_is_stable_under_a_range_shift(m1 in 0.5..3.0f64, m2 in 0.5..3.0f64) {
        prop_assume!((m1 - m2).abs() > 0.2);
        let cyl = CylinderSpec::new(1.0, 0.0).unwrap();
        let mut model = T310Model::identity(cyl, m1, m2);
        let base = model.lambda_fit();
        let first = identity_trace_fit(&model, 1).unwrap().target;
        model.fit = Some(LambdaFit { mu_min: base.mu_min * 2.0, mu_max: base.mu_max * 2.0, ..base });
        let second = identity_trace_fit(&model, 1).unwrap().target;
        prop_assert!((first - second).norm() < 1e-4, "{first} vs {second}");
    }

    #[test]
    fn zeta_at_zero_matches_closed_forms(mass2 in 0.1..3.0f64, length in 0.5..4.0f64) {
        let opts = HeatFitOptions::default();
        let torus1 = zeta_at_zero(&SpectrumSpec::Torus { dim: 1, mass2 }, &opts).unwrap();
        prop_assert!(torus1.zeta0.abs() < 1e-6, "T1: {}", torus1.zeta0);
        let torus2 = zeta_at_zero(&SpectrumSpec::Torus { dim: 2, mass2 }, &opts).unwrap();
        prop_assert!((torus2.zeta0 + PI * mass2).abs() < 1e-6, "T2: {}", torus2.zeta0);
        let interval = zeta_at_zero(&SpectrumSpec::DirichletInterval { length, mass2 }, &opts).unwrap();
        prop_assert!((interval.zeta0 + 0.5).abs() < 1e-6, "interval: {}", interval.zeta0);
        let circumference = 2.0 * PI;
        let cyl = zeta_at_zero(&SpectrumSpec::DirichletCylinder { circumference, length, mass2 }, &opts).unwrap();
        let want = -circumference * length * mass2 / (4.0 * PI);
        prop_assert!((cyl.zeta0 - want).abs() < 1e-6, "cylinder: {} vs {want}", cyl.zeta0);
    }
}

#[test]
fn massless_circle_counts_its_kernel() {
    let r = zeta_at_zero(&SpectrumSpec::Torus { dim: 1, mass2: 0.0 }, &HeatFitOptions::default()).unwrap();
    assert_eq!(r.nullity, 1);
    assert!((r.zeta0 + 1.0).abs() < 1e-6);
}
