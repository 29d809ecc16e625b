use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A variable of the symbol calculus. Indices are zero-based; the text form
/// prints them one-based (`x1`, `xi1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(u8),
    Xi(u8),
    Lambda,
}

impl Var {
    fn mask(self) -> u64 {
        match self {
            Var::X(i) => 1 << (i as u64 & 15),
            Var::Xi(i) => 1 << (16 + (i as u64 & 15)),
            Var::Lambda => 1 << 32,
        }
    }
}

const XI_MASK: u64 = 0xffff << 16;

#[derive(Debug)]
pub enum Node {
    Rat(Rational64),
    Cplx(Complex64),
    Var(Var),
    /// The radial token |ξ|.
    Radial,
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, i64),
    /// Principal-branch power with rational exponent.
    RPow(Expr, Rational64),
    /// e^{i k·x}
    ExpI(Vec<i64>),
    /// Principal logarithm; only produced by log symbols.
    Ln(Expr),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    hash: u64,
    deps: u64,
}

/// Immutable, cheaply clonable expression tree.
///
/// Constructors fold constants, flatten sums and products, collect like terms
/// and merge powers of a common base. No other rewriting happens.
#[derive(Clone, Debug)]
pub struct Expr(Arc<Inner>);

fn mix(h: u64, v: u64) -> u64 {
    let mut z = h ^ v.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Num {
    R(Rational64),
    C(Complex64),
}

impl Num {
    fn one() -> Num {
        Num::R(Rational64::one())
    }
    fn zero() -> Num {
        Num::R(Rational64::zero())
    }
    fn is_zero(&self) -> bool {
        match self {
            Num::R(r) => r.is_zero(),
            Num::C(c) => c.re == 0.0 && c.im == 0.0,
        }
    }
    fn is_one(&self) -> bool {
        match self {
            Num::R(r) => r.is_one(),
            Num::C(_) => false,
        }
    }
    pub(crate) fn to_c(self) -> Complex64 {
        match self {
            Num::R(r) => Complex64::new(rat_f64(r), 0.0),
            Num::C(c) => c,
        }
    }
    fn add(self, o: Num) -> Num {
        if let (Num::R(a), Num::R(b)) = (self, o) {
            if let Some(s) = a.checked_add(&b) {
                return Num::R(s);
            }
        }
        Num::C(self.to_c() + o.to_c()).normalize()
    }
    fn mul(self, o: Num) -> Num {
        if let (Num::R(a), Num::R(b)) = (self, o) {
            if let Some(s) = a.checked_mul(&b) {
                return Num::R(s);
            }
        }
        Num::C(self.to_c() * o.to_c()).normalize()
    }
    fn powi(self, k: i64) -> Option<Num> {
        if self.is_zero() && k < 0 {
            return None;
        }
        if let Num::R(r) = self {
            if k.unsigned_abs() <= 64 {
                let mut acc = Rational64::one();
                let mut ok = true;
                for _ in 0..k.unsigned_abs() {
                    match acc.checked_mul(&r) {
                        Some(v) => acc = v,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    return Some(Num::R(if k < 0 { acc.recip() } else { acc }));
                }
            }
        }
        Some(Num::C(self.to_c().powi(k as i32)).normalize())
    }
    /// Real dyadic values with small denominators become exact rationals.
    fn normalize(self) -> Num {
        if let Num::C(c) = self {
            if c.im == 0.0 && c.re.is_finite() {
                for den in [1i64, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024] {
                    let v = c.re * den as f64;
                    if v.fract() == 0.0 && v.abs() < 1e15 {
                        return Num::R(Rational64::new(v as i64, den));
                    }
                }
            }
        }
        self
    }
    fn to_expr(self) -> Expr {
        match self.normalize() {
            Num::R(r) => Expr::from_node(Node::Rat(r)),
            Num::C(c) => Expr::from_node(Node::Cplx(Complex64::new(clean(c.re), clean(c.im)))),
        }
    }
}

pub(crate) fn rat_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Expr {
    pub(crate) fn from_node(node: Node) -> Expr {
        let (hash, deps) = match &node {
            Node::Rat(r) => (mix(mix(1, *r.numer() as u64), *r.denom() as u64), 0),
            Node::Cplx(c) => (mix(mix(2, c.re.to_bits()), c.im.to_bits()), 0),
            Node::Var(v) => {
                let code = match v {
                    Var::X(i) => *i as u64,
                    Var::Xi(i) => 100 + *i as u64,
                    Var::Lambda => 1000,
                };
                (mix(3, code), v.mask())
            }
            Node::Radial => (mix(4, 0), XI_MASK),
            Node::Add(ts) => ts
                .iter()
                .fold((mix(5, ts.len() as u64), 0), |(h, d), t| (mix(h, t.0.hash), d | t.0.deps)),
            Node::Mul(ts) => ts
                .iter()
                .fold((mix(6, ts.len() as u64), 0), |(h, d), t| (mix(h, t.0.hash), d | t.0.deps)),
            Node::Pow(b, k) => (mix(mix(7, b.0.hash), *k as u64), b.0.deps),
            Node::RPow(b, r) => (
                mix(mix(mix(8, b.0.hash), *r.numer() as u64), *r.denom() as u64),
                b.0.deps,
            ),
            Node::ExpI(k) => {
                let h = k.iter().fold(mix(9, k.len() as u64), |h, &v| mix(h, v as u64));
                let d = k
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .fold(0, |d, (i, _)| d | Var::X(i as u8).mask());
                (h, d)
            }
            Node::Ln(b) => (mix(10, b.0.hash), b.0.deps),
        };
        Expr(Arc::new(Inner { node, hash, deps }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn zero() -> Expr {
        Expr::from_node(Node::Rat(Rational64::zero()))
    }
    pub fn one() -> Expr {
        Expr::from_node(Node::Rat(Rational64::one()))
    }
    pub fn int(n: i64) -> Expr {
        Expr::from_node(Node::Rat(Rational64::from_integer(n)))
    }
    pub fn rational(r: Rational64) -> Expr {
        Expr::from_node(Node::Rat(r))
    }
    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::rational(Rational64::new(n, d))
    }
    pub fn real(x: f64) -> Expr {
        Num::C(Complex64::new(x, 0.0)).to_expr()
    }
    pub fn complex(c: Complex64) -> Expr {
        Num::C(c).to_expr()
    }
    pub fn var(v: Var) -> Expr {
        Expr::from_node(Node::Var(v))
    }
    pub fn x(i: usize) -> Expr {
        Expr::var(Var::X(i as u8))
    }
    pub fn xi(i: usize) -> Expr {
        Expr::var(Var::Xi(i as u8))
    }
    pub fn lambda() -> Expr {
        Expr::var(Var::Lambda)
    }
    pub fn radial() -> Expr {
        Expr::from_node(Node::Radial)
    }
    pub fn expi(freq: &[i64]) -> Expr {
        let mut k = freq.to_vec();
        while k.last() == Some(&0) {
            k.pop();
        }
        if k.is_empty() {
            Expr::one()
        } else {
            Expr::from_node(Node::ExpI(k))
        }
    }

    pub(crate) fn as_num(&self) -> Option<Num> {
        match self.node() {
            Node::Rat(r) => Some(Num::R(*r)),
            Node::Cplx(c) => Some(Num::C(*c)),
            _ => None,
        }
    }

    /// Numeric value when the expression is a constant leaf.
    pub fn as_constant(&self) -> Option<Complex64> {
        self.as_num().map(Num::to_c)
    }

    pub fn is_zero(&self) -> bool {
        self.as_num().map(|n| n.is_zero()).unwrap_or(false)
    }
    pub fn is_one(&self) -> bool {
        self.as_num().map(|n| n.is_one()).unwrap_or(false)
    }

    /// True when the expression may depend on `v`.
    pub fn depends_on(&self, v: Var) -> bool {
        self.0.deps & v.mask() != 0
    }
    pub fn depends_on_lambda(&self) -> bool {
        self.depends_on(Var::Lambda)
    }

    pub fn add_all(terms: Vec<Expr>) -> Expr {
        let mut flat: Vec<Expr> = Vec::with_capacity(terms.len());
        for t in terms {
            match t.node() {
                Node::Add(ts) => flat.extend(ts.iter().cloned()),
                _ => flat.push(t),
            }
        }
        let mut constant = Num::zero();
        let mut groups: BTreeMap<Expr, Num> = BTreeMap::new();
        for t in flat {
            if let Some(n) = t.as_num() {
                constant = constant.add(n);
                continue;
            }
            let (c, rest) = t.split_coeff();
            groups
                .entry(rest)
                .and_modify(|e| *e = e.add(c))
                .or_insert(c);
        }
        let mut out = Vec::with_capacity(groups.len() + 1);
        if !constant.is_zero() {
            out.push(constant.to_expr());
        }
        for (rest, c) in groups {
            if c.is_zero() {
                continue;
            }
            out.push(Expr::attach_coeff(c, rest));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Add(out)),
        }
    }

    fn split_coeff(&self) -> (Num, Expr) {
        if let Node::Mul(fs) = self.node() {
            if let Some(c) = fs[0].as_num() {
                let rest = if fs.len() == 2 {
                    fs[1].clone()
                } else {
                    Expr::from_node(Node::Mul(fs[1..].to_vec()))
                };
                return (c, rest);
            }
        }
        (Num::one(), self.clone())
    }

    fn attach_coeff(c: Num, rest: Expr) -> Expr {
        if c.is_one() {
            return rest;
        }
        let mut fs = vec![c.to_expr()];
        match rest.node() {
            Node::Mul(inner) => fs.extend(inner.iter().cloned()),
            _ => fs.push(rest),
        }
        Expr::from_node(Node::Mul(fs))
    }

    pub fn mul_all(factors: Vec<Expr>) -> Expr {
        let mut flat: Vec<Expr> = Vec::with_capacity(factors.len());
        for f in factors {
            match f.node() {
                Node::Mul(fs) => flat.extend(fs.iter().cloned()),
                _ => flat.push(f),
            }
        }
        let mut coeff = Num::one();
        let mut freq: Vec<i64> = Vec::new();
        let mut bases: BTreeMap<Expr, Rational64> = BTreeMap::new();
        for f in flat {
            if let Some(n) = f.as_num() {
                coeff = coeff.mul(n);
                continue;
            }
            let (base, e) = match f.node() {
                Node::ExpI(k) => {
                    if freq.len() < k.len() {
                        freq.resize(k.len(), 0);
                    }
                    for (a, b) in freq.iter_mut().zip(k) {
                        *a += b;
                    }
                    continue;
                }
                Node::Pow(b, k) => (b.clone(), Rational64::from_integer(*k)),
                Node::RPow(b, r) => (b.clone(), *r),
                _ => (f.clone(), Rational64::one()),
            };
            *bases.entry(base).or_insert_with(Rational64::zero) += e;
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        let mut out = Vec::with_capacity(bases.len() + 2);
        let ei = Expr::expi(&freq);
        if !ei.is_one() {
            out.push(ei);
        }
        for (b, e) in bases {
            if e.is_zero() {
                continue;
            }
            out.push(Expr::raw_power(b, e));
        }
        if out.is_empty() {
            return coeff.to_expr();
        }
        if !coeff.is_one() {
            out.insert(0, coeff.to_expr());
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::from_node(Node::Mul(out))
        }
    }

    fn raw_power(b: Expr, e: Rational64) -> Expr {
        if e.is_integer() {
            let k = e.to_integer();
            if k == 1 {
                b
            } else {
                Expr::from_node(Node::Pow(b, k))
            }
        } else {
            Expr::from_node(Node::RPow(b, e))
        }
    }

    pub fn powi(&self, k: i64) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k == 1 {
            return self.clone();
        }
        if let Some(n) = self.as_num() {
            return match n.powi(k) {
                Some(v) => v.to_expr(),
                None => Expr::from_node(Node::Pow(self.clone(), k)),
            };
        }
        match self.node() {
            Node::Pow(b, j) => Expr::raw_power(b.clone(), Rational64::from_integer(j * k)),
            Node::RPow(b, r) => b.rpow(*r * Rational64::from_integer(k)),
            Node::Mul(fs) => Expr::mul_all(fs.iter().map(|f| f.powi(k)).collect()),
            Node::ExpI(f) => Expr::expi(&f.iter().map(|v| v * k).collect::<Vec<_>>()),
            _ => Expr::from_node(Node::Pow(self.clone(), k)),
        }
    }

    /// Principal-branch power with a rational exponent.
    pub fn rpow(&self, r: Rational64) -> Expr {
        if r.is_integer() {
            return self.powi(r.to_integer());
        }
        if self.is_one() {
            return Expr::one();
        }
        if let Some(c) = self.as_constant() {
            if c.im == 0.0 && c.re > 0.0 {
                return Expr::real(c.re.powf(rat_f64(r)));
            }
        }
        Expr::from_node(Node::RPow(self.clone(), r))
    }

    pub fn sqrt(&self) -> Expr {
        self.rpow(Rational64::new(1, 2))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn ln(&self) -> Expr {
        if self.is_one() {
            return Expr::zero();
        }
        Expr::from_node(Node::Ln(self.clone()))
    }

    pub fn scale(&self, c: Complex64) -> Expr {
        Expr::mul_all(vec![Expr::complex(c), self.clone()])
    }

    pub fn scale_rat(&self, r: Rational64) -> Expr {
        Expr::mul_all(vec![Expr::rational(r), self.clone()])
    }

    fn rank(&self) -> u8 {
        match self.node() {
            Node::Rat(_) => 0,
            Node::Cplx(_) => 1,
            Node::ExpI(_) => 2,
            Node::Var(_) => 3,
            Node::Radial => 4,
            Node::Pow(..) => 5,
            Node::RPow(..) => 6,
            Node::Mul(_) => 7,
            Node::Add(_) => 8,
            Node::Ln(_) => 9,
        }
    }

    fn deep_cmp(&self, other: &Expr) -> Ordering {
        match (self.node(), other.node()) {
            (Node::Add(a), Node::Add(b)) | (Node::Mul(a), Node::Mul(b)) => {
                a.len().cmp(&b.len()).then_with(|| {
                    for (x, y) in a.iter().zip(b) {
                        let c = x.cmp(y);
                        if c != Ordering::Equal {
                            return c;
                        }
                    }
                    Ordering::Equal
                })
            }
            (Node::Pow(a, j), Node::Pow(b, k)) => j.cmp(k).then_with(|| a.cmp(b)),
            (Node::RPow(a, j), Node::RPow(b, k)) => j.cmp(k).then_with(|| a.cmp(b)),
            (Node::Ln(a), Node::Ln(b)) => a.cmp(b),
            _ => Ordering::Equal,
        }
    }

    /// Number of nodes counted as a tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Add(ts) | Node::Mul(ts) => 1 + ts.iter().map(Expr::size).sum::<usize>(),
            Node::Pow(b, _) | Node::RPow(b, _) | Node::Ln(b) => 1 + b.size(),
            _ => 1,
        }
    }

    /// Exact partial derivative.
    pub fn diff(&self, v: Var) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        match self.node() {
            Node::Rat(_) | Node::Cplx(_) => Expr::zero(),
            Node::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Radial => match v {
                Var::Xi(i) => Expr::mul_all(vec![Expr::xi(i as usize), Expr::radial().recip()]),
                _ => Expr::zero(),
            },
            Node::Add(ts) => Expr::add_all(ts.iter().map(|t| t.diff(v)).collect()),
            Node::Mul(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let d = fs[i].diff(v);
                    if d.is_zero() {
                        continue;
                    }
                    let mut prod: Vec<Expr> = Vec::with_capacity(fs.len());
                    for (j, f) in fs.iter().enumerate() {
                        prod.push(if i == j { d.clone() } else { f.clone() });
                    }
                    terms.push(Expr::mul_all(prod));
                }
                Expr::add_all(terms)
            }
            Node::Pow(b, k) => Expr::mul_all(vec![Expr::int(*k), b.powi(k - 1), b.diff(v)]),
            Node::RPow(b, r) => Expr::mul_all(vec![
                Expr::rational(*r),
                b.rpow(*r - Rational64::one()),
                b.diff(v),
            ]),
            Node::ExpI(k) => match v {
                Var::X(i) => {
                    let ki = k.get(i as usize).copied().unwrap_or(0);
                    Expr::mul_all(vec![
                        Expr::complex(Complex64::new(0.0, ki as f64)),
                        self.clone(),
                    ])
                }
                _ => Expr::zero(),
            },
            Node::Ln(b) => Expr::mul_all(vec![b.diff(v), b.recip()]),
        }
    }

    /// Mixed partial derivative ∂^α in the given variable family.
    pub fn diff_multi(&self, alpha: &[u32], xi: bool) -> Expr {
        let mut e = self.clone();
        for (i, &a) in alpha.iter().enumerate() {
            let v = if xi { Var::Xi(i as u8) } else { Var::X(i as u8) };
            for _ in 0..a {
                e = e.diff(v);
                if e.is_zero() {
                    return e;
                }
            }
        }
        e
    }

    /// Substitutes λ by a constant.
    pub fn substitute_lambda(&self, value: Complex64) -> Expr {
        self.map_leaves(&|n| match n {
            Node::Var(Var::Lambda) => Some(Expr::complex(value)),
            _ => None,
        })
    }

    pub(crate) fn map_leaves(&self, f: &dyn Fn(&Node) -> Option<Expr>) -> Expr {
        if let Some(r) = f(self.node()) {
            return r;
        }
        match self.node() {
            Node::Add(ts) => Expr::add_all(ts.iter().map(|t| t.map_leaves(f)).collect()),
            Node::Mul(ts) => Expr::mul_all(ts.iter().map(|t| t.map_leaves(f)).collect()),
            Node::Pow(b, k) => b.map_leaves(f).powi(*k),
            Node::RPow(b, r) => b.map_leaves(f).rpow(*r),
            Node::Ln(b) => b.map_leaves(f).ln(),
            _ => self.clone(),
        }
    }

    /// Exponent of a constant rational power such as `2^(1/2)`; used by tests.
    pub fn rational_exponent(&self) -> Option<Rational64> {
        match self.node() {
            Node::RPow(_, r) => Some(*r),
            Node::Pow(_, k) => Some(Rational64::from_integer(*k)),
            _ => None,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let r = self.rank().cmp(&other.rank());
        if r != Ordering::Equal {
            return r;
        }
        match (self.node(), other.node()) {
            (Node::Rat(a), Node::Rat(b)) => a.cmp(b),
            (Node::Cplx(a), Node::Cplx(b)) => a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)),
            (Node::Var(a), Node::Var(b)) => a.cmp(b),
            (Node::Radial, Node::Radial) => Ordering::Equal,
            (Node::ExpI(a), Node::ExpI(b)) => a.cmp(b),
            _ => self
                .0
                .hash
                .cmp(&other.0.hash)
                .then_with(|| self.deep_cmp(other)),
        }
    }
}

impl std::hash::Hash for Expr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $body(self, rhs)
            }
        }
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $body(self.clone(), rhs.clone())
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $body(self, rhs.clone())
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $body(self.clone(), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add_all(vec![a, b]));
binop!(Mul, mul, |a, b| Expr::mul_all(vec![a, b]));
binop!(Sub, sub, |a: Expr, b: Expr| Expr::add_all(vec![
    a,
    Expr::mul_all(vec![Expr::int(-1), b])
]));
binop!(Div, div, |a: Expr, b: Expr| Expr::mul_all(vec![a, b.recip()]));

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul_all(vec![Expr::int(-1), self])
    }
}
impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -(self.clone())
    }
}

/// Rational helper usable in const-like contexts.
pub fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn like_terms_cancel() {
        let a = Expr::xi(0) * Expr::x(0).powi(2);
        let b = Expr::x(0).powi(2) * Expr::xi(0);
        assert!((a.clone() - b).is_zero());
        assert_eq!((a.clone() + a.clone()), Expr::int(2) * a);
    }

    #[test]
    fn powers_merge_through_roots() {
        let s = (Expr::xi(0).powi(2) + Expr::int(1)).sqrt();
        let two_s = Expr::int(2) * s.clone();
        let prod = s.recip() * two_s.recip();
        let expected = Expr::frac(1, 2) * (Expr::xi(0).powi(2) + Expr::int(1)).recip();
        assert_eq!(prod, expected);
    }

    #[test]
    fn expi_combines() {
        let e = Expr::expi(&[1]) * Expr::expi(&[-1]);
        assert!(e.is_one());
        assert_eq!(Expr::expi(&[2, 0]), Expr::expi(&[2]));
    }

    #[test]
    fn derivative_of_radial() {
        let d = Expr::radial().diff(Var::Xi(0));
        assert_eq!(d, Expr::xi(0) * Expr::radial().recip());
        assert!(Expr::radial().diff(Var::X(0)).is_zero());
    }

    #[test]
    fn dependency_masks() {
        let e = Expr::expi(&[0, 3]) * Expr::lambda();
        assert!(e.depends_on(Var::X(1)));
        assert!(!e.depends_on(Var::X(0)));
        assert!(e.depends_on_lambda());
        assert!(Expr::radial().depends_on(Var::Xi(1)));
    }

    #[test]
    fn rational_folding_overflow_falls_back_to_float() {
        let big = Expr::rational(Rational64::new(i64::MAX / 2, 1));
        let p = big.clone() * big;
        assert!(p.as_constant().unwrap().re > 1e36);
    }
}
