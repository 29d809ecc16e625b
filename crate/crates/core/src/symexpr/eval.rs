use super::expr::{rat_f64, Expr, Node, Var};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;

/// An assignment of the variables x, ξ, λ and optionally |ξ|.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub lambda: Option<Complex64>,
    pub radial: Option<f64>,
}

impl Point {
    pub fn new(x: &[f64], xi: &[f64]) -> Self {
        Point {
            x: x.to_vec(),
            xi: xi.to_vec(),
            lambda: None,
            radial: None,
        }
    }

    pub fn with_lambda(mut self, lambda: Complex64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_real_lambda(self, lambda: f64) -> Self {
        self.with_lambda(Complex64::new(lambda, 0.0))
    }

    pub fn xi_norm(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

struct Evaluator<'a> {
    p: &'a Point,
    radial: Option<f64>,
    cache: HashMap<usize, Complex64>,
}

impl<'a> Evaluator<'a> {
    fn eval(&mut self, e: &Expr) -> Result<Complex64> {
        let composite = matches!(
            e.node(),
            Node::Add(_) | Node::Mul(_) | Node::Pow(..) | Node::RPow(..) | Node::Ln(_)
        );
        if composite {
            if let Some(v) = self.cache.get(&e.ptr_id()) {
                return Ok(*v);
            }
        }
        let v = match e.node() {
            Node::Rat(r) => Complex64::new(rat_f64(*r), 0.0),
            Node::Cplx(c) => *c,
            Node::Var(Var::X(i)) => Complex64::new(
                *self
                    .p
                    .x
                    .get(*i as usize)
                    .ok_or_else(|| Error::usage(format!("unassigned variable x{}", i + 1)))?,
                0.0,
            ),
            Node::Var(Var::Xi(i)) => Complex64::new(
                *self
                    .p
                    .xi
                    .get(*i as usize)
                    .ok_or_else(|| Error::usage(format!("unassigned variable xi{}", i + 1)))?,
                0.0,
            ),
            Node::Var(Var::Lambda) => self
                .p
                .lambda
                .ok_or_else(|| Error::usage("unassigned variable lam"))?,
            Node::Radial => Complex64::new(
                self.radial
                    .ok_or_else(|| Error::usage("unassigned radial token |xi|"))?,
                0.0,
            ),
            Node::Add(ts) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in ts {
                    acc += self.eval(t)?;
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in fs {
                    acc *= self.eval(f)?;
                }
                acc
            }
            Node::Pow(b, k) => {
                let bv = self.eval(b)?;
                if *k < 0 && bv.re == 0.0 && bv.im == 0.0 {
                    return Err(Error::domain(e.to_string(), "division by zero"));
                }
                if k.unsigned_abs() <= i32::MAX as u64 {
                    bv.powi(*k as i32)
                } else {
                    bv.powf(*k as f64)
                }
            }
            Node::RPow(b, r) => {
                let bv = self.eval(b)?;
                if bv.re == 0.0 && bv.im == 0.0 {
                    if rat_f64(*r) < 0.0 {
                        return Err(Error::domain(e.to_string(), "division by zero"));
                    }
                    Complex64::new(0.0, 0.0)
                } else if on_cut(bv) {
                    return Err(Error::domain(
                        e.to_string(),
                        format!("base {bv} lies on the branch cut"),
                    ));
                } else {
                    (bv.ln() * rat_f64(*r)).exp()
                }
            }
            Node::ExpI(k) => {
                let mut phase = 0.0;
                for (i, &ki) in k.iter().enumerate() {
                    if ki != 0 {
                        let xi = self.p.x.get(i).ok_or_else(|| {
                            Error::usage(format!("unassigned variable x{}", i + 1))
                        })?;
                        phase += ki as f64 * xi;
                    }
                }
                Complex64::new(phase.cos(), phase.sin())
            }
            Node::Ln(b) => {
                let bv = self.eval(b)?;
                if on_cut(bv) {
                    return Err(Error::domain(
                        e.to_string(),
                        format!("logarithm argument {bv} lies on the branch cut"),
                    ));
                }
                bv.ln()
            }
        };
        if composite {
            self.cache.insert(e.ptr_id(), v);
        }
        Ok(v)
    }
}

fn resolve_radial(p: &Point, need: bool) -> Result<Option<f64>> {
    let computed = if p.xi.is_empty() {
        None
    } else {
        Some(p.xi_norm())
    };
    match (p.radial, computed) {
        (Some(r), Some(c)) => {
            if (r - c).abs() > 1e-9 * c.max(1.0) {
                return Err(Error::usage(format!(
                    "|xi| = {r} inconsistent with xi components (norm {c})"
                )));
            }
            Ok(Some(r))
        }
        (Some(r), None) => Ok(Some(r)),
        (None, c) => {
            if need && c.is_none() {
                return Err(Error::usage("unassigned radial token |xi|"));
            }
            Ok(c)
        }
    }
}

impl Expr {
    /// Evaluates in double-precision complex arithmetic.
    pub fn evaluate(&self, p: &Point) -> Result<Complex64> {
        let radial = resolve_radial(p, false)?;
        let mut ev = Evaluator {
            p,
            radial,
            cache: HashMap::new(),
        };
        ev.eval(self)
    }

    /// Evaluates several expressions at one point sharing a cache.
    pub fn evaluate_many(exprs: &[Expr], p: &Point) -> Result<Vec<Complex64>> {
        let radial = resolve_radial(p, false)?;
        let mut ev = Evaluator {
            p,
            radial,
            cache: HashMap::new(),
        };
        exprs.iter().map(|e| ev.eval(e)).collect()
    }
}
