//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int};
use crate::error::{Error, Result};
use crate::padic::PAdic;

/// Minimal ring interface used by generic evaluation and difference quotients.
pub trait Scalar: Clone {
    fn s_add(&self, o: &Self) -> Self;
    fn s_sub(&self, o: &Self) -> Self;
    fn s_mul(&self, o: &Self) -> Self;
    fn s_div(&self, o: &Self) -> Result<Self>;
}

impl Scalar for BigRational {
    fn s_add(&self, o: &Self) -> Self {
        self + o
    }
    fn s_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn s_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn s_div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / o)
        }
    }
}

impl Scalar for PAdic {
    fn s_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn s_sub(&self, o: &Self) -> Self {
        PAdic::sub(self, o)
    }
    fn s_mul(&self, o: &Self) -> Self {
        PAdic::mul(self, o)
    }
    fn s_div(&self, o: &Self) -> Result<Self> {
        PAdic::div(self, o)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&i| factorial(i)).product()
    }

    /// All multi-indices in `d` variables of the given total order, lexicographically descending.
    pub fn of_order(d: usize, order: u32) -> Vec<MultiIndex> {
        fn rec(d: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if cur.len() + 1 == d {
                cur.push(left);
                out.push(MultiIndex(cur.clone()));
                cur.pop();
                return;
            }
            for i in (0..=left).rev() {
                cur.push(i);
                rec(d, left - i, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if d == 0 {
            if order == 0 {
                out.push(MultiIndex(vec![]));
            }
            return out;
        }
        rec(d, order, &mut Vec::new(), &mut out);
        out
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

#[derive(Serialize, Deserialize)]
struct PolyRecord {
    nvars: usize,
    terms: Vec<TermRecord>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exp: Vec<u32>,
    #[serde(with = "arith::rational_str")]
    coeff: BigRational,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRecord {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRecord { exp: e.clone(), coeff: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRecord::deserialize(d)?;
        Poly::from_terms(r.nvars, r.terms.into_iter().map(|t| (t.exp, t.coeff)))
            .map_err(serde::de::Error::custom)
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exp: Vec<u32>, c: BigRational) -> Self {
        let mut p = Self::zero(exp.len());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::InvalidArgument(format!(
                    "exponent {e:?} has wrong length for {nvars} variables"
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Univariate polynomial from coefficients in increasing degree.
    pub fn univariate(coeffs: &[BigRational]) -> Self {
        let mut p = Self::zero(1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(vec![i as u32], c.clone());
        }
        p
    }

    pub fn univariate_int(coeffs: &[i64]) -> Self {
        Self::univariate(&coeffs.iter().map(|&c| int(c)).collect::<Vec<_>>())
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut r = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Self::constant(self.nvars, BigRational::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                r.add_term(e2, c * int(e[i] as i64));
            }
        }
        r
    }

    /// `∂_β f`.
    pub fn partial_multi(&self, beta: &MultiIndex) -> Poly {
        let mut r = self.clone();
        for (i, &k) in beta.0.iter().enumerate() {
            for _ in 0..k {
                r = r.partial(i);
            }
        }
        r
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Evaluates over any [`Scalar`] type, lifting coefficients with `lift`.
    pub fn eval_with<T: Scalar>(&self, x: &[T], lift: impl Fn(&BigRational) -> T) -> T {
        assert_eq!(x.len(), self.nvars, "point has wrong dimension");
        let zero = lift(&BigRational::zero());
        let maxdeg: Vec<u32> = (0..self.nvars).map(|i| self.degree_in(i)).collect();
        let powers: Vec<Vec<T>> = x
            .iter()
            .zip(&maxdeg)
            .map(|(xi, &m)| {
                let mut v = vec![lift(&BigRational::one())];
                for k in 1..=m as usize {
                    let next = v[k - 1].s_mul(xi);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = zero;
        for (e, c) in &self.terms {
            let mut t = lift(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.s_mul(&powers[i][k as usize]);
                }
            }
            acc = acc.s_add(&t);
        }
        acc
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        self.eval_with(x, |c| c.clone())
    }

    /// Evaluation at p-adic points; coefficients are lifted at precision `prec`.
    pub fn eval_padic(&self, x: &[PAdic], p: u64, prec: u32) -> Result<PAdic> {
        for c in self.terms.values() {
            if arith::valuation_rat(c, p).is_none() {
                return Err(Error::Internal("zero coefficient stored".into()));
            }
        }
        Ok(self.eval_with(x, |c| {
            PAdic::from_rational(c, p, prec).expect("prime checked by caller")
        }))
    }

    /// Substitutes polynomial `subs[i]` (all in a common variable set) for variable `i`.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars, "substitution count mismatch");
        let nv = subs.first().map_or(0, |s| s.nvars);
        let mut cache: Vec<Vec<Poly>> = subs
            .iter()
            .map(|s| vec![Poly::constant(nv, BigRational::one()), s.clone()])
            .collect();
        let mut r = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&subs[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][k as usize]);
            }
            r = r.add(&t);
        }
        r
    }

    /// `y ↦ f(c + y)`.
    pub fn shift(&self, c: &[BigRational]) -> Poly {
        let subs: Vec<Poly> = (0..self.nvars)
            .map(|i| Poly::var(self.nvars, i).add(&Poly::constant(self.nvars, c[i].clone())))
            .collect();
        self.compose(&subs)
    }

    /// `y ↦ f(A y)` where `a[i][j]` is row `i`, column `j`.
    pub fn linear_change(&self, a: &[Vec<BigRational>]) -> Poly {
        let subs: Vec<Poly> = a
            .iter()
            .map(|row| {
                let mut s = Poly::zero(self.nvars);
                for (j, c) in row.iter().enumerate() {
                    s = s.add(&Poly::var(self.nvars, j).scale(c));
                }
                s
            })
            .collect();
        self.compose(&subs)
    }

    /// Coefficients of `ξ ↦ f(x + ξ e_i)` in increasing degree.
    pub fn line_taylor(&self, x: &[BigRational], dir: &[BigRational]) -> Vec<BigRational> {
        let t = Poly::var(1, 0);
        let subs: Vec<Poly> = x
            .iter()
            .zip(dir)
            .map(|(xi, di)| Poly::constant(1, xi.clone()).add(&t.scale(di)))
            .collect();
        let g = self.compose(&subs);
        (0..=g.degree()).map(|k| g.coeff(&[k])).collect()
    }

    /// Coefficients of a univariate polynomial in increasing degree.
    pub fn univariate_coeffs(&self) -> Vec<BigRational> {
        assert_eq!(self.nvars, 1, "not univariate");
        (0..=self.degree()).map(|k| self.coeff(&[k])).collect()
    }

    /// Least common multiple of coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Smallest coefficient valuation; `None` for the zero polynomial.
    pub fn min_coeff_valuation(&self, p: u64) -> Option<i64> {
        self.terms.values().filter_map(|c| arith::valuation_rat(c, p)).min()
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.min_coeff_valuation(p).map_or(true, |v| v >= 0)
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }
}

macro_rules! poly_op {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                Poly::$m(self, rhs)
            }
        }
    };
}
poly_op!(Add, add);
poly_op!(Sub, sub);
poly_op!(Mul, mul);

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", arith::rational_to_string(c))?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    #[test]
    fn ring_ops() {
        let f = x().add(&Poly::constant(1, int(1)));
        let g = f.pow(3);
        assert_eq!(g.univariate_coeffs(), vec![int(1), int(3), int(3), int(1)]);
        assert_eq!(g.partial(0).univariate_coeffs(), vec![int(3), int(6), int(3)]);
        assert!(f.sub(&f).is_zero());
        assert_eq!(g.eval(&[int(2)]), int(27));
    }

    #[test]
    fn padic_eval_matches_rational() {
        let f = Poly::univariate(&[rat(1, 2), int(-3), int(0), int(7)]);
        let xr = rat(5, 4);
        let xp = PAdic::from_rational(&xr, 3, 20).unwrap();
        let v = f.eval_padic(&[xp], 3, 20).unwrap();
        assert!(v.agrees_with(&f.eval(&[xr])));
    }

    #[test]
    fn shifts_and_changes() {
        let f = Poly::var(2, 0).mul(&Poly::var(2, 1));
        let a = vec![vec![int(1), int(5)], vec![int(5), int(1)]];
        let g = f.linear_change(&a);
        assert_eq!(g.coeff(&[2, 0]), int(5));
        assert_eq!(g.coeff(&[0, 2]), int(5));
        assert_eq!(g.coeff(&[1, 1]), int(26));
        let h = f.shift(&[int(1), int(2)]);
        assert_eq!(h.eval(&[int(0), int(0)]), int(2));
        assert_eq!(f.line_taylor(&[int(1), int(2)], &[int(1), int(0)]), vec![int(2), int(2)]);
    }

    #[test]
    fn multi_indices() {
        let all = MultiIndex::of_order(2, 2);
        assert_eq!(all.len(), 3);
        assert_eq!(MultiIndex(vec![2, 3]).factorial(), BigInt::from(12));
        assert_eq!(binomial(5, 2), BigInt::from(10));
    }

    #[test]
    fn serde_round_trip() {
        let f = Poly::from_terms(2, vec![(vec![1, 2], rat(-3, 7)), (vec![0, 0], int(2))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
