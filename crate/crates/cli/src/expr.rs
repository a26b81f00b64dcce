//! Parser for polynomial expressions such as `1/7 + 3/5*x^3` or `x*y - 2*(y + 1)^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use sadic_core::Poly;

/// Variable names accepted for `m` variables: `x, y, z, w` when `m ≤ 4`, and `x1 … xm` always.
fn var_index(name: &str, m: usize) -> Option<usize> {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if let Some(i) = SHORT.iter().position(|s| *s == name) {
        return (i < m).then_some(i);
    }
    let i: usize = name.strip_prefix('x')?.parse().ok()?;
    (1..=m).contains(&i).then(|| i - 1)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            let lit: String = cs[start..i].iter().collect();
            let q = sadic_core::arith::parse_rational(&lit).map_err(|e| e.to_string())?;
            out.push(Tok::Num(q));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    m: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, String> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.constant_term().is_zero() {
                    return Err("division is only allowed by nonzero constants".into());
                }
                acc = acc.scale(&d.constant_term().recip());
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                acc = acc.mul(&self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, String> {
        if self.eat('-') {
            return Ok(self.unary()?.scale(&-BigRational::one()));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(e)) if e.is_integer() && e >= BigRational::zero() && e.numer() <= &BigInt::from(64) => {
                    self.pos += 1;
                    let k: u32 = e.to_integer().try_into().unwrap();
                    return Ok(base.pow(k));
                }
                _ => return Err("exponent must be an integer between 0 and 64".into()),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, String> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Poly::constant(self.m, q))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = var_index(&name, self.m).ok_or_else(|| format!("unknown variable {name:?} for {} variable(s)", self.m))?;
                Ok(Poly::var(self.m, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err("missing ')'".into());
                }
                Ok(e)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

/// Parses `s` as a polynomial in `m` variables.
pub fn parse_poly(s: &str, m: usize) -> Result<Poly, String> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser { toks, pos: 0, m };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input at token {}", p.pos + 1));
    }
    Ok(out)
}
