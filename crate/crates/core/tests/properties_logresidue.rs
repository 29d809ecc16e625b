use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use std::f64::consts::PI;
use tracedefect::logresidue::{
    default_sphere, contour_check, log_difference_symbol, log_symbol, noncommutative_residue, radial_reduce, verify_t22,
    KeyholeContour, RationalFamily, VerifyOptions, XDomain,
};
use tracedefect::parametrix::{integrability_report, resolvent_expansion, DifferentialOperator, PolyhomSymbol};
use tracedefect::symexpr::{Point, ScalarField};

fn field(dim: usize, mean: f64) -> impl Strategy<Value = ScalarField> {
    prop::collection::vec((0usize..dim, 1i64..=2, -0.8..0.8f64, any::<bool>()), 0..3).prop_map(move |modes| {
        let mut f = ScalarField::constant(dim, mean);
        for (axis, k, amp, cosine) in modes {
            f = f.add(&if cosine { ScalarField::cos(dim, axis, k, amp) } else { ScalarField::sin(dim, axis, k, amp) });
        }
        f
    })
}

/// Poles off the closed negative half-line: positive reals or a complex
/// point at least 0.3 from ℝ.
fn pole() -> impl Strategy<Value = Complex64> {
    prop_oneof![
        (0.2..6.0f64).prop_map(|r| Complex64::new(r, 0.0)),
        (-3.0..6.0f64, 0.3..4.0f64, any::<bool>()).prop_map(|(re, im, up)| Complex64::new(re, if up { im } else { -im })),
    ]
}

fn family() -> impl Strategy<Value = RationalFamily> {
    prop::collection::vec((pole(), 1i32..=3), 1..=3)
        .prop_filter("total power at least 2", |f| f.iter().map(|p| p.1).sum::<i32>() >= 2)
        .prop_map(|f| RationalFamily::new("random", f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn contour_matches_real_line(f in family()) {
        let k = KeyholeContour::enclosing(&f.poles()).unwrap();
        let r = contour_check(|l| Ok(f.eval(l)), &k).unwrap();
        let scale = 1.0f64.max(r.real_line_value.norm());
        prop_assert!(r.abs_diff <= 1e-8 * scale, "{:?}: {} vs {}", f.factors, r.contour_value, r.real_line_value);
    }

    #[test]
    fn radial_reduction_on_produced_terms(v in field(2, 2.5), b in field(2, 0.0), x in prop::collection::vec(0.0..2.0 * PI, 2)) {
        let p = DifferentialOperator::laplace_plus(2, v)
            .add(&DifferentialOperator::from_partial_terms(2, vec![(vec![0, 1], b)]).unwrap());
        let q = resolvent_expansion(&p, 2).unwrap();
        let term = &q.terms[2];
        let ir = integrability_report(term, &q.factors, 2, 2).unwrap();
        prop_assume!(ir.integrable && !term.is_zero());
        let r = radial_reduce(
            |xi, l| term.evaluate(&q.factors, &Point::new(&x, xi).with_lambda(l)),
            &default_sphere(2).unwrap(),
            2,
        )
        .unwrap();
        prop_assert!((r.lhs - r.rhs).norm() <= 1e-6, "{} vs {}", r.lhs, r.rhs);
    }

    #[test]
    fn principal_log_matches_the_contour(
        v in field(1, 2.5),
        square in any::<bool>(),
        x in 0.0..2.0 * PI,
        xi in prop_oneof![0.5..3.0f64, -3.0..-0.5f64],
    ) {
        let mut p = DifferentialOperator::laplace_plus(1, v);
        if square {
            p = p.pow(2);
        }
        let m = p.order();
        let ls = log_symbol(&p, 0).unwrap();
        let pt = Point::new(&[x], &[xi]);
        let closed = ls.b.term(0).evaluate(&pt).unwrap();
        // (1/2πi)∮ log λ (p_m − λ)^{-1} dλ = −log p_m on the closed keyhole
        let pm = p.principal().evaluate(&pt).unwrap();
        let k = KeyholeContour::enclosing(&[pm]).unwrap();
        let contour = k.log_integral(|l| Ok((pm - l).inv())).unwrap();
        let from_contour = -contour - Complex64::new(m as f64 * xi.abs().ln(), 0.0);
        prop_assert!((closed - from_contour).norm() <= 1e-4, "{closed} vs {from_contour}");
    }

    #[test]
    fn residue_is_exactly_zero_without_a_degree_minus_n_term(
        mass2 in 0.1..5.0f64,
        s in prop_oneof![Just((1i64, 2i64)), Just((-1, 3)), Just((5, 2)), Just((2, 1))],
    ) {
        // −∂² + c on T1 has only even-degree terms below the top
        let p = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, mass2));
        let r = noncommutative_residue(&log_symbol(&p, 3).unwrap().b, &XDomain::torus(1, 8)).unwrap();
        prop_assert_eq!(r.value.re.to_bits(), 0f64.to_bits());
        prop_assert_eq!(r.value.im.to_bits(), 0f64.to_bits());
        let a = PolyhomSymbol::radial_power(2, Rational64::new(s.0, s.1));
        let r = noncommutative_residue(&a, &XDomain::torus(2, 4)).unwrap();
        prop_assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fourth_order_defect_is_half_the_second_order_log_difference(
        v1 in field(1, 2.5),
        v2 in field(1, 1.5),
    ) {
        let p1 = DifferentialOperator::laplace_plus(1, v1);
        let p2 = DifferentialOperator::laplace_plus(1, v2);
        let a = PolyhomSymbol::radial_power(1, Rational64::from_integer(1));
        let opts = VerifyOptions { grid: 16, pointwise: 4, tol: 1e-6, rays: false };
        let four = verify_t22(&a, &p1.pow(2), &p2.pow(2), &opts).unwrap();
        // log P² = 2 log P, and C₀ = −res/4 at order 4
        let l = log_difference_symbol(&p1, &p2, 2).unwrap();
        let h = a.compose(&l, 2).unwrap();
        let res = noncommutative_residue(&h, &XDomain::torus(1, 16)).unwrap().value;
        let two = -res * 0.5;
        prop_assert!((four.lhs - two).norm() <= 1e-6, "{} vs {two}", four.lhs);
    }
}
