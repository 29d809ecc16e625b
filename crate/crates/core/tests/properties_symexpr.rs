use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use std::f64::consts::PI;
use tracedefect::symexpr::{sphere_quadrature, Expr, Point, Var};

/// Expressions over x1, x2, xi1, xi2, lambda and |xi|; negative and
/// fractional powers only of bases bounded away from zero at the sample
/// points below.
fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::x(0)),
        Just(Expr::x(1)),
        Just(Expr::xi(0)),
        Just(Expr::xi(1)),
        Just(Expr::lambda()),
        Just(Expr::radial()),
        (-4i64..=4).prop_map(Expr::int),
        (-5i64..=5, 1i64..=4).prop_map(|(a, b)| Expr::frac(a, b)),
        (-2i64..=2, -2i64..=2).prop_map(|(a, b)| Expr::expi(&[a, b])),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let safe = || Expr::add_all(vec![Expr::int(2), Expr::xi(0).powi(2), Expr::xi(1).powi(2), -Expr::lambda()]);
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add_all),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::mul_all),
            (inner.clone(), 0i64..=3).prop_map(|(e, k)| e.powi(k)),
            (inner.clone(), 1i64..=3).prop_map(move |(e, k)| e * safe().powi(-k)),
            (inner.clone(), prop_oneof![Just((1, 2)), Just((-1, 2)), Just((-3, 2))])
                .prop_map(move |(e, (a, b))| e * safe().rpow(Rational64::new(a, b))),
        ]
    })
}

fn point() -> impl Strategy<Value = Point> {
    (0.0..2.0 * PI, 0.0..2.0 * PI, 0.4..3.0f64, 0.0..2.0 * PI, 0.3..4.0f64, -1.0..1.0f64).prop_map(
        |(x1, x2, r, th, mu, im)| {
            Point::new(&[x1, x2], &[r * th.cos(), r * th.sin()]).with_lambda(Complex64::new(-mu, im))
        },
    )
}

fn shifted(p: &Point, v: Var, h: f64) -> Point {
    let mut q = p.clone();
    match v {
        Var::X(i) => q.x[i as usize] += h,
        Var::Xi(i) => q.xi[i as usize] += h,
        Var::Lambda => q.lambda = q.lambda.map(|l| l + h),
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derivative_matches_finite_difference(e in expr(), p in point(), which in 0usize..5) {
        let v = [Var::X(0), Var::X(1), Var::Xi(0), Var::Xi(1), Var::Lambda][which];
        let f0 = e.evaluate(&p).unwrap();
        prop_assume!(f0.norm() < 1e6);
        let d = e.diff(v).evaluate(&p).unwrap();
        // fourth-order central difference
        let h = 1e-3;
        let f = |s: f64| e.evaluate(&shifted(&p, v, s * h)).unwrap();
        let fd = (f(-2.0) - f(2.0) + (f(1.0) - f(-1.0)) * 8.0) / (12.0 * h);
        let scale = 1.0 + d.norm() + f0.norm();
        prop_assert!((d - fd).norm() <= 1e-6 * scale, "{e}: d = {d}, fd = {fd}");
    }

    #[test]
    fn text_form_round_trips(e in expr(), p in point()) {
        let text = e.to_string();
        let back: Expr = text.parse().unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        let (a, b) = (e.evaluate(&p).unwrap(), back.evaluate(&p).unwrap());
        prop_assert!((a - b).norm() <= 1e-13 * (1.0 + a.norm()), "{text}: {a} vs {b}");
    }

    #[test]
    fn evaluation_is_deterministic(e in expr(), p in point()) {
        let a = e.evaluate(&p).unwrap();
        let b = e.clone().evaluate(&p).unwrap();
        prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
        prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn circle_rule_is_exact_on_trig_monomials(d in 1usize..40, a in 0u32..40, b in 0u32..40) {
        prop_assume!((a + b) as usize <= d);
        let rule = sphere_quadrature(2, d).unwrap();
        let got = rule.integrate(|w| Ok(Complex64::new(w[0].powi(a as i32) * w[1].powi(b as i32), 0.0))).unwrap();
        // ∫ cos^a sin^b over the circle, by the beta function
        let exact = if a % 2 == 1 || b % 2 == 1 {
            0.0
        } else {
            let dfact = |k: u32| (1..=k).rev().step_by(2).map(f64::from).product::<f64>();
            2.0 * PI * dfact(a.saturating_sub(1)) * dfact(b.saturating_sub(1)) / dfact(a + b)
        } / (4.0 * PI * PI);
        let floor = 1.0 / (2.0 * PI);
        prop_assert!((got.re - exact).abs() <= 1e-12 * exact.abs().max(floor), "d={d} a={a} b={b}: {} vs {exact}", got.re);
        prop_assert_eq!(got.im, 0.0);
    }
}

#[test]
fn sphere_weights_carry_the_normalization() {
    let one = sphere_quadrature(1, 1).unwrap();
    assert_eq!(one.nodes, vec![vec![1.0], vec![-1.0]]);
    assert_eq!(one.weights, vec![1.0 / (2.0 * PI); 2]);
    for d in [1, 5, 32] {
        let r = sphere_quadrature(2, d).unwrap();
        assert!((r.total_weight() - 2.0 * PI / (4.0 * PI * PI)).abs() < 1e-15);
    }
}
