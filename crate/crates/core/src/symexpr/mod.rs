//! Expression engine: exact trees in x, ξ, λ and |ξ| with differentiation,
//! evaluation, a prefix text form, trigonometric coefficient fields and
//! cosphere quadrature.

mod eval;
mod expr;
mod field;
mod homogeneity;
mod sphere;
mod text;

pub use eval::Point;
pub use expr::{rat, Expr, Node, Var};
pub use field::ScalarField;
pub use homogeneity::{homogeneity_check, HomogeneityOptions, HomogeneityReport};
pub use sphere::{sphere_quadrature, SphereRule};


/// Multi-indices α ∈ ℕⁿ with |α| = k, in lexicographic order.
pub fn multi_indices(n: usize, k: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    if n == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in multi_indices(n - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// α! = Π α_i!
pub fn multi_factorial(alpha: &[u32]) -> i64 {
    alpha
        .iter()
        .map(|&a| (1..=a as i64).product::<i64>())
        .product()
}

/// ξ^α as an expression.
pub fn xi_monomial(alpha: &[u32]) -> Expr {
    Expr::mul_all(
        alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| Expr::xi(i).powi(a as i64))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(multi_indices(1, 3), vec![vec![3]]);
        assert_eq!(multi_indices(3, 0), vec![vec![0, 0, 0]]);
        assert_eq!(multi_factorial(&[2, 3]), 12);
    }
}
