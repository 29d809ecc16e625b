use super::transform::log_transform_term;
use crate::error::{Error, Result};
use crate::parametrix::{
    commutator_resolvent_terms, resolvent_difference, resolvent_expansion, DifferentialOperator,
    ParamSymbol, PolyhomSymbol, ELLIPTIC_SECTOR,
};
use crate::symexpr::Expr;
use num_rational::Rational64;

/// symb(log P) = m·log|ξ| + b(x, ξ) with b classical of order 0.
#[derive(Clone, Debug)]
pub struct LogSymbol {
    pub m: u32,
    pub b: PolyhomSymbol,
}

impl LogSymbol {
    /// The non-classical leading piece m·log|ξ| as an expression.
    pub fn log_part(&self) -> Expr {
        Expr::int(self.m as i64) * Expr::radial().ln()
    }

    /// Full symbol as a polyhomogeneous-style term list: the first entry
    /// carries m·log|ξ| + b₀.
    pub fn full(&self) -> PolyhomSymbol {
        let mut terms = self.b.terms().to_vec();
        terms[0] = &terms[0] + &self.log_part();
        PolyhomSymbol::new(self.b.dim, Rational64::from_integer(0), terms, self.b.complete_to)
    }
}

/// Applies T termwise to a resolvent-type symbol, producing a λ-free
/// symbol of order `order + m`.
pub fn transform_symbol(q: &ParamSymbol) -> Result<PolyhomSymbol> {
    let terms = q
        .terms
        .iter()
        .map(|t| log_transform_term(t, &q.factors))
        .collect::<Result<Vec<_>>>()?;
    let mut s = PolyhomSymbol::new(
        q.dim,
        q.order + Rational64::from_integer(q.m as i64),
        terms,
        q.complete_to,
    );
    s.truncation_warning = q.truncation_warning;
    Ok(s)
}

/// b₀ = log p_m − m log|ξ| in closed form and b_{−j} = T[q_{−m−j}].
pub fn log_symbol(p: &DifferentialOperator, depth: usize) -> Result<LogSymbol> {
    p.check_elliptic(ELLIPTIC_SECTOR).map_err(|e| match e {
        Error::Construction { witness, .. } => Error::Construction {
            reason: "principal symbol leaves the domain of the principal logarithm".into(),
            witness,
        },
        other => other,
    })?;
    let q = resolvent_expansion(p, depth)?;
    let m = p.order();
    let b0 = p.principal().ln() - Expr::int(m as i64) * Expr::radial().ln();
    let mut terms = vec![b0];
    for t in q.terms.iter().skip(1) {
        terms.push(log_transform_term(t, &q.factors)?);
    }
    Ok(LogSymbol {
        m,
        b: PolyhomSymbol::new(p.dim(), Rational64::from_integer(0), terms, Some(depth)),
    })
}

/// l = b(P₁) − b(P₂) through l_{−j} = T[𝔮_{−m−j}]; the logarithmic parts
/// cancel.
pub fn log_difference_symbol(
    p1: &DifferentialOperator,
    p2: &DifferentialOperator,
    depth: usize,
) -> Result<PolyhomSymbol> {
    transform_symbol(&resolvent_difference(p1, p2, depth)?)
}

/// Symbol of A[A′, log P], h_{σ+σ′−j} = T[r_{σ+σ′−m−j}].
pub fn log_commutator_symbol(
    a: &PolyhomSymbol,
    a_prime: &PolyhomSymbol,
    p: &DifferentialOperator,
    depth: usize,
) -> Result<PolyhomSymbol> {
    transform_symbol(&commutator_resolvent_terms(a, a_prime, p, depth)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{Point, ScalarField};
    use num_complex::Complex64;

    fn at(e: &Expr, x: f64, xi: f64) -> Complex64 {
        e.evaluate(&Point::new(&[x], &[xi])).unwrap()
    }

    #[test]
    fn mass_term_of_log() {
        let p = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, 3.0));
        let l = log_symbol(&p, 4).unwrap();
        assert!(at(&l.b.term(0), 0.0, 2.0).norm() < 1e-15);
        assert!((at(&l.b.term(2), 0.0, 2.0) - Complex64::new(0.75, 0.0)).norm() < 1e-14);
        assert!(at(&l.b.term(1), 0.0, 2.0).norm() < 1e-15);
        // log(1 + m²/ξ²) = m²/ξ² − m⁴/(2ξ⁴) + …
        assert!((at(&l.b.term(4), 0.0, 2.0) - Complex64::new(-4.5 / 16.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn variable_potential_log_term() {
        let v = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
        let p = DifferentialOperator::laplace_plus(1, v.clone());
        let l = log_symbol(&p, 2).unwrap();
        for x in [0.0, 1.3] {
            let want = v.eval(&[x]) / 1.69;
            assert!((at(&l.b.term(2), x, 1.3) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn difference_matches_b_difference() {
        let p1 = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, 2.0));
        let p2 = DifferentialOperator::laplace_plus(1, ScalarField::constant(1, 1.0));
        let l = log_difference_symbol(&p1, &p2, 4).unwrap();
        let b1 = log_symbol(&p1, 4).unwrap();
        let b2 = log_symbol(&p2, 4).unwrap();
        for j in 0..=4 {
            let d = at(&b1.b.term(j), 0.3, 1.7) - at(&b2.b.term(j), 0.3, 1.7);
            assert!((at(&l.term(j), 0.3, 1.7) - d).norm() < 1e-12, "j={j}");
        }
        assert!((at(&l.term(2), 0.0, 2.0).re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn fourth_order_pair_doubles() {
        let v1 = ScalarField::constant(1, 3.0).add(&ScalarField::cos(1, 0, 1, 1.0));
        let v2 = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
        let p1 = DifferentialOperator::laplace_plus(1, v1).pow(2);
        let p2 = DifferentialOperator::laplace_plus(1, v2).pow(2);
        let l = log_difference_symbol(&p1, &p2, 2).unwrap();
        for x in [0.0, 0.9, 2.5] {
            assert!((at(&l.term(2), x, 1.4) - Complex64::new(2.0 / 1.96, 0.0)).norm() < 1e-12);
        }
    }
}
