use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use std::f64::consts::PI;
use tracedefect::parametrix::{parametrix_defect, resolvent_difference, resolvent_expansion, DifferentialOperator};
use tracedefect::symexpr::{Point, ScalarField};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Real trigonometric field of degree ≤ 2 with the given mean.
fn field(dim: usize, mean: f64) -> impl Strategy<Value = ScalarField> {
    prop::collection::vec((0usize..dim, 1i64..=2, -0.8..0.8f64, any::<bool>()), 0..3).prop_map(move |modes| {
        let mut f = ScalarField::constant(dim, mean);
        for (axis, k, amp, cosine) in modes {
            let g = if cosine {
                ScalarField::cos(dim, axis, k, amp)
            } else {
                ScalarField::sin(dim, axis, k, amp)
            };
            f = f.add(&g);
        }
        f
    })
}

/// −Δ + b·∂₁ + v with smooth b, v on T¹ or T².
fn operator() -> impl Strategy<Value = DifferentialOperator> {
    (1usize..=2).prop_flat_map(|dim| {
        (field(dim, 0.0), field(dim, 2.5), any::<bool>()).prop_map(move |(b, v, drift)| {
            let p = DifferentialOperator::laplace_plus(dim, v);
            if !drift {
                return p;
            }
            let mut a = vec![0; dim];
            a[0] = 1;
            p.add(&DifferentialOperator::from_partial_terms(dim, vec![(a, b)]).unwrap())
        })
    })
}

fn sample(dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(0.0..2.0 * PI, dim), 0.0..2.0 * PI).prop_map(move |(x, th)| {
        let w = if dim == 1 { vec![if th < PI { 1.0 } else { -1.0 }] } else { vec![th.cos(), th.sin()] };
        (x, w)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parametrix_defect_decays_like_the_next_degree(
        p in operator(),
        depth in 1usize..=3,
        s in sample(2),
        mu in 0.2..2.0f64,
    ) {
        let n = p.dim();
        let q = resolvent_expansion(&p, depth).unwrap();
        let m = p.order() as i32;
        let pts: Vec<Point> = [16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|t: &f64| {
                let xi: Vec<f64> = s.1[..n.min(s.1.len())].iter().map(|w| w * t).collect();
                let xi = if n == 1 { vec![s.1[0].signum() * t] } else { xi };
                Point::new(&s.0[..n], &xi).with_real_lambda(-mu * t.powi(m))
            })
            .collect();
        let d = parametrix_defect(&p, &q, &pts).unwrap();
        let scaled: Vec<f64> = d.iter().map(|(jb, e)| e * jb.powi(depth as i32 + 1)).collect();
        // fitted constant C in |defect| ≤ C⟨ξ⟩^{−J−1}
        let c_fit = scaled.iter().cloned().fold(0.0, f64::max);
        prop_assert!(scaled[3] <= 1.5 * scaled[0] + 1e-9, "C = {c_fit}, scaled = {scaled:?}");
    }

    #[test]
    fn certificates_are_sound(p in operator(), depth in 1usize..=3, s in sample(2), t in 1.5..4.0f64) {
        let n = p.dim();
        let m = p.order();
        let q = resolvent_expansion(&p, depth).unwrap();
        for (j, term) in q.terms.iter().enumerate() {
            for (piece, cert) in term.pieces.iter().zip(term.certificates(m)) {
                let ji = j as i64;
                if j >= 1 {
                    prop_assert!(cert.nu >= 2 && cert.nu as i64 <= 2 * ji + 1, "j={j} nu={}", cert.nu);
                }
                prop_assert_eq!(cert.r, Rational64::from_integer(-ji + (cert.nu as i64 - 1) * m as i64));
                // the λ-free coefficient really is homogeneous of degree r in ξ
                let xi: Vec<f64> = if n == 1 { vec![s.1[0]] } else { s.1.clone() };
                let a = piece.coeff.evaluate(&Point::new(&s.0[..n], &xi)).unwrap();
                let txi: Vec<f64> = xi.iter().map(|v| v * t).collect();
                let b = piece.coeff.evaluate(&Point::new(&s.0[..n], &txi)).unwrap();
                let r = *cert.r.numer() as f64 / *cert.r.denom() as f64;
                let want = a * t.powf(r);
                prop_assert!((b - want).norm() <= 1e-10 * (1.0 + want.norm()), "j={j}: {b} vs {want}");
            }
        }
    }

    #[test]
    fn constant_mass_partial_sum_is_the_taylor_truncation(
        dim in 1usize..=2,
        mass2 in 0.1..5.0f64,
        depth in 0usize..=5,
        r in 0.3..4.0f64,
        th in 0.0..2.0 * PI,
        lam_re in -6.0..-0.1f64,
        lam_im in -2.0..2.0f64,
    ) {
        let p = DifferentialOperator::laplace_plus(dim, ScalarField::constant(dim, mass2));
        let q = resolvent_expansion(&p, depth).unwrap();
        let xi = if dim == 1 { vec![r] } else { vec![r * th.cos(), r * th.sin()] };
        let lam = Complex64::new(lam_re, lam_im);
        let pt = Point::new(&vec![0.4; dim], &xi).with_lambda(lam);
        let sum: Complex64 = q.terms.iter().map(|t| t.evaluate(&q.factors, &pt).unwrap()).sum();
        let base = c(r * r) - lam;
        let taylor: Complex64 = (0..=depth / 2).map(|k| c(-mass2).powi(k as i32) * base.powi(-(k as i32) - 1)).sum();
        prop_assert!((sum - taylor).norm() <= 1e-12 * taylor.norm(), "{sum} vs {taylor}");
    }

    #[test]
    fn difference_terms_decay_like_lambda_squared(
        v1 in field(1, 2.5),
        v2 in field(1, 1.5),
        square in any::<bool>(),
        x in 0.0..2.0 * PI,
        xi in 0.5..2.0f64,
    ) {
        let mut p1 = DifferentialOperator::laplace_plus(1, v1);
        let mut p2 = DifferentialOperator::laplace_plus(1, v2);
        if square {
            p1 = p1.pow(2);
            p2 = p2.pow(2);
        }
        let d = resolvent_difference(&p1, &p2, 3).unwrap();
        for (j, t) in d.terms.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            let at = |mu: f64| t.evaluate(&d.factors, &Point::new(&[x], &[xi]).with_real_lambda(-mu)).unwrap().norm();
            let (a, b) = (at(1e4), at(1e5));
            if a < 1e-300 && b < 1e-300 {
                continue;
            }
            let slope = (b / a).log10();
            prop_assert!(slope <= -1.95, "term {j}: slope {slope}");
        }
    }
}
