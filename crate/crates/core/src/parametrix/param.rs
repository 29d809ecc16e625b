use super::symbol::PolyhomSymbol;
use crate::error::{Error, Result};
use crate::symexpr::{
    homogeneity_check, multi_factorial, multi_indices, Expr, HomogeneityOptions, Point, Var,
};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// c(x, ξ) · Π_i (p_i(x, ξ) − λ)^{−powers_i}, with c free of λ.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub coeff: Expr,
    pub powers: Vec<i32>,
}

impl Piece {
    /// Number ν of resolvent factors.
    pub fn nu(&self) -> i32 {
        self.powers.iter().sum()
    }
}

/// (ν, r): resolvent-factor count and degree of the λ-free part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub nu: i32,
    #[serde(serialize_with = "ser_rational")]
    pub r: Rational64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// A quasi-homogeneous term of degree `degree` (weights ξ:1, λ:m).
#[derive(Clone, Debug, PartialEq)]
pub struct ParamTerm {
    pub degree: Rational64,
    pub pieces: Vec<Piece>,
}

/// A term frozen at fixed (x, ξ): a rational function of λ.
#[derive(Clone, Debug)]
pub struct FrozenTerm {
    pub coeffs: Vec<Complex64>,
    pub powers: Vec<Vec<i32>>,
    pub factor_values: Vec<Complex64>,
}

impl FrozenTerm {
    pub fn at(&self, lambda: Complex64) -> Complex64 {
        let inv: Vec<Complex64> = self.factor_values.iter().map(|p| (p - lambda).inv()).collect();
        self.coeffs
            .iter()
            .zip(&self.powers)
            .map(|(c, pw)| {
                pw.iter()
                    .zip(&inv)
                    .fold(*c, |acc, (&k, q)| if k == 0 { acc } else { acc * q.powi(k) })
            })
            .sum()
    }
}

fn i_pow_neg(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

impl ParamTerm {
    pub fn zero(degree: Rational64) -> Self {
        ParamTerm {
            degree,
            pieces: vec![],
        }
    }

    /// A λ-free expression of the given degree.
    pub fn lifted(e: Expr, degree: Rational64, n_factors: usize) -> Self {
        Self::canonical(
            degree,
            vec![Piece {
                coeff: e,
                powers: vec![0; n_factors],
            }],
        )
    }

    fn canonical(degree: Rational64, pieces: Vec<Piece>) -> Self {
        let mut map: BTreeMap<Vec<i32>, Vec<Expr>> = BTreeMap::new();
        for p in pieces {
            if !p.coeff.is_zero() {
                map.entry(p.powers).or_default().push(p.coeff);
            }
        }
        let pieces = map
            .into_iter()
            .filter_map(|(powers, cs)| {
                let coeff = Expr::add_all(cs);
                (!coeff.is_zero()).then_some(Piece { coeff, powers })
            })
            .collect();
        ParamTerm { degree, pieces }
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree, other.degree);
        Self::canonical(
            self.degree,
            self.pieces.iter().chain(&other.pieces).cloned().collect(),
        )
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::canonical(
            self.degree,
            self.pieces
                .iter()
                .map(|p| Piece {
                    coeff: p.coeff.scale(c),
                    powers: p.powers.clone(),
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for a in &self.pieces {
            for b in &other.pieces {
                out.push(Piece {
                    coeff: &a.coeff * &b.coeff,
                    powers: a.powers.iter().zip(&b.powers).map(|(x, y)| x + y).collect(),
                });
            }
        }
        Self::canonical(self.degree + other.degree, out)
    }

    /// Multiplication by a λ-free expression of degree `d`.
    pub fn mul_expr(&self, e: &Expr, d: Rational64) -> Self {
        Self::canonical(
            self.degree + d,
            self.pieces
                .iter()
                .map(|p| Piece {
                    coeff: e * &p.coeff,
                    powers: p.powers.clone(),
                })
                .collect(),
        )
    }

    /// Multiplication by (p_i − λ)^{−k}.
    pub fn mul_factor(&self, i: usize, k: i32, m: u32) -> Self {
        let mut t = self.clone();
        for p in &mut t.pieces {
            p.powers[i] += k;
        }
        t.degree -= Rational64::from_integer(k as i64 * m as i64);
        t
    }

    /// ∂_v using ∂(p − λ)^{−ν} = −ν (p − λ)^{−ν−1} ∂p.
    pub fn diff(&self, v: Var, factors: &[Expr]) -> Self {
        let dfac: Vec<Expr> = factors.iter().map(|f| f.diff(v)).collect();
        let mut out = Vec::new();
        for p in &self.pieces {
            let dc = p.coeff.diff(v);
            if !dc.is_zero() {
                out.push(Piece {
                    coeff: dc,
                    powers: p.powers.clone(),
                });
            }
            for (i, &k) in p.powers.iter().enumerate() {
                if k == 0 || dfac[i].is_zero() {
                    continue;
                }
                let mut powers = p.powers.clone();
                powers[i] += 1;
                out.push(Piece {
                    coeff: Expr::mul_all(vec![Expr::int(-(k as i64)), p.coeff.clone(), dfac[i].clone()]),
                    powers,
                });
            }
        }
        let shift = match v {
            Var::Xi(_) => Rational64::from_integer(-1),
            _ => Rational64::from_integer(0),
        };
        Self::canonical(self.degree + shift, out)
    }

    pub fn dxi(&self, alpha: &[u32], factors: &[Expr]) -> Self {
        let mut t = self.clone();
        for (i, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                t = t.diff(Var::Xi(i as u8), factors);
            }
        }
        t
    }

    /// D_x^α = (−i)^{|α|} ∂_x^α.
    pub fn dx(&self, alpha: &[u32], factors: &[Expr]) -> Self {
        let mut t = self.clone();
        for (i, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                t = t.diff(Var::X(i as u8), factors);
            }
        }
        t.scale(i_pow_neg(alpha.iter().sum()))
    }

    pub fn certificates(&self, m: u32) -> Vec<Certificate> {
        self.pieces
            .iter()
            .map(|p| Certificate {
                nu: p.nu(),
                r: self.degree + Rational64::from_integer(p.nu() as i64 * m as i64),
            })
            .collect()
    }

    pub fn min_nu(&self) -> Option<i32> {
        self.pieces.iter().map(Piece::nu).min()
    }

    pub fn to_expr(&self, factors: &[Expr]) -> Expr {
        let lam = Expr::lambda();
        Expr::add_all(
            self.pieces
                .iter()
                .map(|p| {
                    let mut fs = vec![p.coeff.clone()];
                    for (f, &k) in factors.iter().zip(&p.powers) {
                        if k != 0 {
                            fs.push((f - &lam).powi(-(k as i64)));
                        }
                    }
                    Expr::mul_all(fs)
                })
                .collect(),
        )
    }

    pub fn freeze(&self, factors: &[Expr], x: &[f64], xi: &[f64]) -> Result<FrozenTerm> {
        let p = Point::new(x, xi);
        let mut exprs: Vec<Expr> = self.pieces.iter().map(|p| p.coeff.clone()).collect();
        exprs.extend(factors.iter().cloned());
        let vals = Expr::evaluate_many(&exprs, &p)?;
        let (c, f) = vals.split_at(self.pieces.len());
        Ok(FrozenTerm {
            coeffs: c.to_vec(),
            powers: self.pieces.iter().map(|p| p.powers.clone()).collect(),
            factor_values: f.to_vec(),
        })
    }

    pub fn evaluate(&self, factors: &[Expr], p: &Point) -> Result<Complex64> {
        let lam = p
            .lambda
            .ok_or_else(|| Error::usage("λ must be assigned to evaluate a resolvent term"))?;
        Ok(self.freeze(factors, &p.x, &p.xi)?.at(lam))
    }

    fn remap(&self, map: &[usize], n_new: usize) -> Self {
        ParamTerm::canonical(
            self.degree,
            self.pieces
                .iter()
                .map(|p| {
                    let mut powers = vec![0; n_new];
                    for (i, &k) in p.powers.iter().enumerate() {
                        powers[map[i]] += k;
                    }
                    Piece {
                        coeff: p.coeff.clone(),
                        powers,
                    }
                })
                .collect(),
        )
    }
}

/// Σ_j terms of degree order − j in (x, ξ, λ), built from λ-free
/// coefficients and the resolvent factors (p_i − λ)^{−1}.
#[derive(Clone, Debug)]
pub struct ParamSymbol {
    pub dim: usize,
    pub m: u32,
    pub order: Rational64,
    pub factors: Vec<Expr>,
    pub terms: Vec<ParamTerm>,
    pub complete_to: Option<usize>,
    pub truncation_warning: bool,
}

const PROBE_POINTS: [([f64; 2], [f64; 2]); 5] = [
    ([0.3, 1.7], [0.8, -0.35]),
    ([2.9, 0.4], [-1.3, 0.6]),
    ([4.4, 5.2], [0.45, 1.1]),
    ([1.1, 3.3], [-0.7, -1.9]),
    ([5.9, 2.2], [1.6, 0.2]),
];

fn same_factor(a: &Expr, b: &Expr, dim: usize) -> bool {
    if a == b {
        return true;
    }
    PROBE_POINTS.iter().all(|(x, xi)| {
        let p = Point::new(&x[..dim], &xi[..dim]);
        match (a.evaluate(&p), b.evaluate(&p)) {
            (Ok(u), Ok(v)) => (u - v).norm() <= 1e-13 * (1.0 + u.norm()),
            _ => false,
        }
    })
}

fn unify_factors(a: &[Expr], b: &[Expr], dim: usize) -> (Vec<Expr>, Vec<usize>, Vec<usize>) {
    let mut out: Vec<Expr> = a.to_vec();
    let map_a = (0..a.len()).collect();
    let mut map_b = Vec::with_capacity(b.len());
    for f in b {
        match out.iter().position(|g| same_factor(g, f, dim)) {
            Some(i) => map_b.push(i),
            None => {
                out.push(f.clone());
                map_b.push(out.len() - 1);
            }
        }
    }
    (out, map_a, map_b)
}

impl ParamSymbol {
    /// A λ-free symbol viewed as a resolvent-type symbol with no factors.
    pub fn from_polyhom(s: &PolyhomSymbol, m: u32) -> Self {
        ParamSymbol {
            dim: s.dim,
            m,
            order: s.order,
            factors: vec![],
            terms: s
                .terms()
                .iter()
                .enumerate()
                .map(|(j, t)| ParamTerm::lifted(t.clone(), s.degree_of(j), 0))
                .collect(),
            complete_to: s.complete_to,
            truncation_warning: s.truncation_warning,
        }
    }

    /// Symbol of p − λ: (p_m − λ) + p_{m−1} + … + p_0.
    pub fn shifted_operator_symbol(p: &super::DifferentialOperator) -> Self {
        let m = p.order();
        let mut terms = vec![ParamTerm::canonical(
            Rational64::from_integer(m as i64),
            vec![Piece {
                coeff: Expr::one(),
                powers: vec![-1],
            }],
        )];
        for l in 1..=m {
            terms.push(ParamTerm::lifted(
                p.symbol_part(l),
                Rational64::from_integer((m - l) as i64),
                1,
            ));
        }
        ParamSymbol {
            dim: p.dim(),
            m,
            order: Rational64::from_integer(m as i64),
            factors: vec![p.principal()],
            terms,
            complete_to: None,
            truncation_warning: false,
        }
    }

    pub fn degree_of(&self, j: usize) -> Rational64 {
        self.order - Rational64::from_integer(j as i64)
    }

    pub fn term(&self, j: usize) -> ParamTerm {
        self.terms
            .get(j)
            .cloned()
            .unwrap_or_else(|| ParamTerm::zero(self.degree_of(j)))
    }

    pub fn known_terms(&self) -> usize {
        self.complete_to.map(|j| j + 1).unwrap_or(usize::MAX)
    }

    /// Index of the term of degree d.
    pub fn index_of_degree(&self, d: Rational64) -> Option<usize> {
        let j = self.order - d;
        (j.is_integer() && j >= Rational64::from_integer(0)).then(|| j.to_integer() as usize)
    }

    fn remapped(&self, factors: Vec<Expr>, map: &[usize]) -> Self {
        let n = factors.len();
        ParamSymbol {
            factors,
            terms: self.terms.iter().map(|t| t.remap(map, n)).collect(),
            ..self.clone()
        }
    }

    fn common_m(&self, other: &Self) -> Result<u32> {
        match (self.factors.is_empty(), other.factors.is_empty()) {
            (true, _) => Ok(other.m),
            (_, true) => Ok(self.m),
            _ if self.m == other.m => Ok(self.m),
            _ => Err(Error::usage(format!(
                "resolvent factors of different orders {} and {}",
                self.m, other.m
            ))),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.order != other.order {
            return Err(Error::usage("difference of symbols with different order or dimension"));
        }
        let m = self.common_m(other)?;
        let (factors, ma, mb) = unify_factors(&self.factors, &other.factors, self.dim);
        let a = self.remapped(factors.clone(), &ma);
        let b = other.remapped(factors.clone(), &mb);
        let len = a.terms.len().max(b.terms.len());
        let complete_to = match (a.complete_to, b.complete_to) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        Ok(ParamSymbol {
            dim: self.dim,
            m,
            order: self.order,
            terms: (0..len).map(|j| a.term(j).add(&b.term(j).neg())).collect(),
            factors,
            complete_to,
            truncation_warning: a.truncation_warning || b.truncation_warning,
        })
    }

    /// Sum of the stored terms at a point with λ assigned.
    pub fn evaluate_sum(&self, p: &Point) -> Result<Complex64> {
        self.terms.iter().map(|t| t.evaluate(&self.factors, p)).sum()
    }

    /// Quasi-homogeneity of every term (weights ξ:1, λ:m).
    pub fn check_homogeneity(&self) -> Result<bool> {
        for t in &self.terms {
            if t.is_zero() {
                continue;
            }
            let e = t.to_expr(&self.factors);
            let r = homogeneity_check(&e, t.degree, &HomogeneityOptions::new(self.dim, Some(self.m)))?;
            if !r.pass {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Prefix text form with certificates as annotations.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let complete = self
            .complete_to
            .map(|j| j.to_string())
            .unwrap_or_else(|| "exact".into());
        let _ = writeln!(
            s,
            "(paramsymbol (dim {}) (m {}) (order {}) (complete {}) (warning {})",
            self.dim, self.m, self.order, complete, self.truncation_warning
        );
        for (i, f) in self.factors.iter().enumerate() {
            let _ = writeln!(s, "  (factor {} {})", i + 1, f);
        }
        for (j, t) in self.terms.iter().enumerate() {
            let _ = writeln!(s, "  (term {} (degree {})", j, t.degree);
            for (p, c) in t.pieces.iter().zip(t.certificates(self.m)) {
                let pw: Vec<String> = p.powers.iter().map(|k| k.to_string()).collect();
                let _ = writeln!(
                    s,
                    "    (piece (nu {}) (r {}) (powers {}) {})",
                    c.nu,
                    c.r,
                    pw.join(" "),
                    p.coeff
                );
            }
            let _ = writeln!(s, "  )");
        }
        s.push_str(")\n");
        s
    }
}

/// Leibniz product a # b in which λ is a constant.
pub fn compose_param(a: &ParamSymbol, b: &ParamSymbol, depth: usize) -> Result<ParamSymbol> {
    if a.dim != b.dim {
        return Err(Error::usage("symbols of different dimension"));
    }
    let m = a.common_m(b)?;
    let (factors, ma, mb) = unify_factors(&a.factors, &b.factors, a.dim);
    let a = a.remapped(factors.clone(), &ma);
    let b = b.remapped(factors.clone(), &mb);
    let n = a.dim;
    let mut da: HashMap<(usize, Vec<u32>), ParamTerm> = HashMap::new();
    let mut db: HashMap<(usize, Vec<u32>), ParamTerm> = HashMap::new();
    let mut terms = Vec::with_capacity(depth + 1);
    let order = a.order + b.order;
    for j in 0..=depth {
        let mut acc = ParamTerm::zero(order - Rational64::from_integer(j as i64));
        for k in 0..=j {
            for alpha in multi_indices(n, k as u32) {
                let w = 1.0 / multi_factorial(&alpha) as f64;
                for j1 in 0..=(j - k) {
                    let j2 = j - k - j1;
                    let ta = da
                        .entry((j1, alpha.clone()))
                        .or_insert_with(|| a.term(j1).dxi(&alpha, &factors))
                        .clone();
                    if ta.is_zero() {
                        continue;
                    }
                    let tb = db
                        .entry((j2, alpha.clone()))
                        .or_insert_with(|| b.term(j2).dx(&alpha, &factors))
                        .clone();
                    if tb.is_zero() {
                        continue;
                    }
                    let mut prod = ta.mul(&tb);
                    if w != 1.0 {
                        prod = prod.scale(Complex64::new(w, 0.0));
                    }
                    acc = acc.add(&prod);
                }
            }
        }
        terms.push(acc);
    }
    let known = a.known_terms().min(b.known_terms());
    Ok(ParamSymbol {
        dim: n,
        m,
        order,
        factors,
        terms,
        complete_to: Some(depth.min(known.saturating_sub(1))),
        truncation_warning: a.truncation_warning || b.truncation_warning || depth + 1 > known,
    })
}
