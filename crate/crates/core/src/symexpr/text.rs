//! Prefix text form.
//!
//! ```text
//! 3   -1/2   (c 1.5 -2)      rational and complex constants
//! x1  xi2  lam  |xi|          variables and the radial token
//! (+ a b ...)  (* a b ...)    sums and products
//! (^ a -2)  (rpow a 1/2)      integer and rational powers
//! (expi 1 0)  (ln a)          e^{i k.x} and the principal logarithm
//! ```

use super::expr::{Expr, Node, Var};
use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::Rational64;
use std::fmt;

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::Xi(i) => write!(f, "xi{}", i + 1),
            Var::Lambda => write!(f, "lam"),
        }
    }
}

fn write_rat(f: &mut fmt::Formatter<'_>, r: &Rational64) -> fmt::Result {
    if *r.denom() == 1 {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Rat(r) => write_rat(f, r),
            Node::Cplx(c) => write!(f, "(c {:?} {:?})", c.re, c.im),
            Node::Var(v) => write!(f, "{v}"),
            Node::Radial => write!(f, "|xi|"),
            Node::Add(ts) | Node::Mul(ts) => {
                let op = if matches!(self.node(), Node::Add(_)) { "+" } else { "*" };
                write!(f, "({op}")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            Node::Pow(b, k) => write!(f, "(^ {b} {k})"),
            Node::RPow(b, r) => {
                write!(f, "(rpow {b} ")?;
                write_rat(f, r)?;
                write!(f, ")")
            }
            Node::ExpI(k) => {
                write!(f, "(expi")?;
                for v in k {
                    write!(f, " {v}")?;
                }
                write!(f, ")")
            }
            Node::Ln(b) => write!(f, "(ln {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<(Tok, usize)> {
    let mut out = Vec::new();
    let bytes: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push((Tok::Open, i));
            i += 1;
        } else if c == ')' {
            out.push((Tok::Close, i));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() && !bytes[i].is_whitespace() && bytes[i] != '(' && bytes[i] != ')'
            {
                i += 1;
            }
            out.push((Tok::Atom(bytes[start..i].iter().collect()), start));
        }
    }
    out
}

fn parse_rat(s: &str) -> Option<Rational64> {
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.parse().ok()?;
        let d: i64 = d.parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Rational64::new(n, d))
    } else {
        s.parse::<i64>().ok().map(Rational64::from_integer)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> Error {
        let at = self.toks.get(self.pos).map(|t| t.1).unwrap_or(usize::MAX);
        if at == usize::MAX {
            Error::usage(format!("expression parse error at end of input: {msg}"))
        } else {
            Error::usage(format!("expression parse error at offset {at}: {msg}"))
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn atom(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Atom(a)) => Ok(a),
            _ => {
                self.pos -= 1;
                Err(self.err("expected atom"))
            }
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.next() {
            Some(Tok::Close) => Ok(()),
            _ => {
                self.pos -= 1;
                Err(self.err("expected ')'"))
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Tok::Atom(a)) => self.leaf(&a),
            Some(Tok::Open) => {
                let op = self.atom()?;
                let e = match op.as_str() {
                    "+" | "*" => {
                        let mut items = Vec::new();
                        while self.toks.get(self.pos).map(|t| &t.0) != Some(&Tok::Close) {
                            if self.pos >= self.toks.len() {
                                return Err(self.err("unterminated list"));
                            }
                            items.push(self.expr()?);
                        }
                        if op == "+" {
                            Expr::add_all(items)
                        } else {
                            Expr::mul_all(items)
                        }
                    }
                    "^" => {
                        let b = self.expr()?;
                        let k = self.atom()?;
                        let k: i64 = k.parse().map_err(|_| self.err("integer exponent"))?;
                        b.powi(k)
                    }
                    "rpow" => {
                        let b = self.expr()?;
                        let r = self.atom()?;
                        let r = parse_rat(&r).ok_or_else(|| self.err("rational exponent"))?;
                        b.rpow(r)
                    }
                    "expi" => {
                        let mut k = Vec::new();
                        while let Some(Tok::Atom(_)) = self.toks.get(self.pos).map(|t| &t.0) {
                            let a = self.atom()?;
                            k.push(a.parse::<i64>().map_err(|_| self.err("integer frequency"))?);
                        }
                        Expr::expi(&k)
                    }
                    "ln" => self.expr()?.ln(),
                    "c" => {
                        let re = self.atom()?;
                        let im = self.atom()?;
                        let re: f64 = re.parse().map_err(|_| self.err("real part"))?;
                        let im: f64 = im.parse().map_err(|_| self.err("imaginary part"))?;
                        Expr::complex(Complex64::new(re, im))
                    }
                    other => return Err(self.err(&format!("unknown operator '{other}'"))),
                };
                self.close()?;
                Ok(e)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("unexpected token"))
            }
        }
    }

    fn leaf(&mut self, a: &str) -> Result<Expr> {
        if a == "lam" {
            return Ok(Expr::lambda());
        }
        if a == "|xi|" {
            return Ok(Expr::radial());
        }
        if let Some(rest) = a.strip_prefix("xi") {
            if let Ok(i) = rest.parse::<usize>() {
                if (1..=16).contains(&i) {
                    return Ok(Expr::xi(i - 1));
                }
            }
        } else if let Some(rest) = a.strip_prefix('x') {
            if let Ok(i) = rest.parse::<usize>() {
                if (1..=16).contains(&i) {
                    return Ok(Expr::x(i - 1));
                }
            }
        }
        if let Some(r) = parse_rat(a) {
            return Ok(Expr::rational(r));
        }
        self.pos -= 1;
        Err(self.err(&format!("unknown atom '{a}'")))
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        let mut p = Parser {
            toks: tokenize(s),
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_and_parses() {
        let e: Expr = "(* -2 (c 0 1) xi1 (^ (+ (^ xi1 2) (* -1 lam)) -3))".parse().unwrap();
        let again: Expr = e.to_string().parse().unwrap();
        assert_eq!(e, again);
        assert!(e.to_string().contains("lam"));
    }

    #[test]
    fn rational_powers_and_logs() {
        let e: Expr = "(ln (rpow (+ 1 |xi|) 1/2))".parse().unwrap();
        assert_eq!(e.to_string(), "(ln (rpow (+ 1 |xi|) 1/2))");
    }

    #[test]
    fn rejects_garbage() {
        assert!("(+ 1".parse::<Expr>().is_err());
        assert!("(foo 1)".parse::<Expr>().is_err());
        assert!("y3".parse::<Expr>().is_err());
        assert!("1 2".parse::<Expr>().is_err());
    }
}
