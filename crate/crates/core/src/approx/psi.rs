//! Approximating functions on integer vectors.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int};
use crate::error::{Error, Result};
use crate::padic::{place_norm, Place};
use crate::real::PowProd;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ApproxFunction {
    /// `ψ(‖a‖) = c·‖a‖^{-e}` with the archimedean sup norm.
    Power {
        #[serde(with = "arith::rational_str")]
        c: BigRational,
        #[serde(with = "arith::rational_str")]
        e: BigRational,
    },
    /// `ψ(‖a‖) = ‖a‖^{-e} (ln(‖a‖+1))^{-b}`.
    PowerLog { e: u32, b: u32 },
    Constant {
        #[serde(with = "arith::rational_str")]
        c: BigRational,
    },
    Zero,
    /// `Ψ_0(a) = ∏_{a_i≠0} |a_i|_S^{-1}`.
    Psi0,
    /// `Ψ(a) = c·∏ max(1,|a_i|_S)^{-e}`.
    Product {
        #[serde(with = "arith::rational_str")]
        c: BigRational,
        #[serde(with = "arith::rational_str")]
        e: BigRational,
    },
    /// `ψ(‖a‖_v) = c·‖a‖_v^{-e}` with `‖a‖_v = max |a_i|^{1/v_i}`.
    Quasinorm {
        #[serde(with = "arith::rational_str")]
        c: BigRational,
        #[serde(with = "arith::rational_str")]
        e: BigRational,
        #[serde(with = "arith::rational_vec_str")]
        weights: Vec<BigRational>,
    },
}

/// A positive value that is exact, an exact power product, or only known as a float.
#[derive(Clone, Debug, PartialEq)]
pub enum PsiValue {
    Exact(BigRational),
    Pow(PowProd),
    Real(f64),
}

impl PsiValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            PsiValue::Exact(q) => arith::to_f64(q),
            PsiValue::Pow(p) => p.to_f64(),
            PsiValue::Real(x) => *x,
        }
    }

    /// Orders a nonnegative rational `r` against this value.
    pub fn cmp_with(&self, r: &BigRational) -> Result<Ordering> {
        match self {
            PsiValue::Exact(q) => Ok(r.cmp(q)),
            PsiValue::Pow(p) => Ok(p.cmp_rational(r).reverse()),
            PsiValue::Real(x) => {
                if r.is_zero() {
                    return Ok(if *x > 0.0 { Ordering::Less } else { Ordering::Equal });
                }
                let rl = arith::to_f64(r).ln();
                let xl = x.ln();
                if (rl - xl).abs() <= 1e-12 * (1.0 + rl.abs().max(xl.abs())) {
                    return Err(Error::IndeterminateComparison(format!("{r} vs {x:e}")));
                }
                Ok(if rl < xl { Ordering::Less } else { Ordering::Greater })
            }
        }
    }
}

fn int_place_norm(a: i128, places: &[Place]) -> BigRational {
    let q = BigRational::from_integer(BigInt::from(a));
    places
        .iter()
        .map(|&pl| place_norm(&q, pl))
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// `|a|_S` of an integer.
pub fn s_norm_int(a: i128, places: &[Place]) -> BigRational {
    int_place_norm(a, places)
}

/// `‖a‖_S = max_i |a_i|_S`.
pub fn s_norm_vec(a: &[i128], places: &[Place]) -> BigRational {
    a.iter().map(|&x| int_place_norm(x, places)).max().unwrap_or_else(BigRational::zero)
}

pub fn height(a: &[i128]) -> i128 {
    a.iter().map(|x| x.abs()).max().unwrap_or(0)
}

impl ApproxFunction {
    pub fn power(e: i64) -> Self {
        ApproxFunction::Power { c: BigRational::one(), e: int(e) }
    }

    /// True for the kinds that depend on `a` only through its height.
    pub fn is_single_variable(&self) -> bool {
        matches!(
            self,
            ApproxFunction::Power { .. } | ApproxFunction::PowerLog { .. } | ApproxFunction::Constant { .. } | ApproxFunction::Zero
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ApproxFunction::Power { c, e } | ApproxFunction::Product { c, e } => {
                if !c.is_positive() || e.is_negative() {
                    return Err(Error::InvalidArgument("need c > 0 and e >= 0".into()));
                }
            }
            ApproxFunction::Constant { c } if !c.is_positive() => {
                return Err(Error::InvalidArgument("constant must be positive".into()));
            }
            ApproxFunction::Quasinorm { c, e, weights } => {
                if !c.is_positive() || e.is_negative() {
                    return Err(Error::InvalidArgument("need c > 0 and e >= 0".into()));
                }
                if weights.iter().any(|w| !w.is_positive()) || weights.iter().sum::<BigRational>() != int(weights.len() as i64) {
                    return Err(Error::InvalidArgument("weights must be positive and sum to n".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `ψ(k)` for a single-variable kind.
    pub fn eval_height(&self, k: i128) -> Result<PsiValue> {
        match self {
            ApproxFunction::Zero => Ok(PsiValue::Exact(BigRational::zero())),
            ApproxFunction::Constant { c } => Ok(PsiValue::Exact(c.clone())),
            ApproxFunction::Power { c, e } => {
                if k <= 0 {
                    return Err(Error::InvalidArgument("ψ is undefined at height 0".into()));
                }
                let kq = BigRational::from_integer(BigInt::from(k));
                Ok(PsiValue::Pow(PowProd::rational(c.clone()).mul(&PowProd::power(kq, -e))))
            }
            ApproxFunction::PowerLog { e, b } => {
                if k <= 0 {
                    return Err(Error::InvalidArgument("ψ is undefined at height 0".into()));
                }
                let kf = k as f64;
                Ok(PsiValue::Real(kf.powi(-(*e as i32)) * (kf + 1.0).ln().powi(-(*b as i32))))
            }
            _ => Err(Error::InvalidArgument("not a single-variable kind".into())),
        }
    }

    /// `Ψ(a)` with `|·|_S` taken over `places`.
    pub fn eval(&self, a: &[i128], places: &[Place]) -> Result<PsiValue> {
        match self {
            ApproxFunction::Zero | ApproxFunction::Constant { .. } => self.eval_height(height(a)),
            ApproxFunction::Power { .. } | ApproxFunction::PowerLog { .. } => self.eval_height(height(a)),
            ApproxFunction::Psi0 => {
                let mut v = BigRational::one();
                for &x in a.iter().filter(|x| **x != 0) {
                    v /= int_place_norm(x, places);
                }
                Ok(PsiValue::Exact(v))
            }
            ApproxFunction::Product { c, e } => {
                let mut r = PowProd::rational(c.clone());
                for &x in a {
                    let m = int_place_norm(x, places).max(BigRational::one());
                    r = r.mul(&PowProd::power(m, -e));
                }
                Ok(PsiValue::Pow(r))
            }
            ApproxFunction::Quasinorm { c, e, weights } => {
                if weights.len() != a.len() {
                    return Err(Error::InvalidArgument("weights and vector differ in length".into()));
                }
                let mut best: Option<PowProd> = None;
                for (&x, w) in a.iter().zip(weights) {
                    if x == 0 {
                        continue;
                    }
                    let term = PowProd::power(BigRational::from_integer(BigInt::from(x.abs())), w.recip());
                    if best.as_ref().map_or(true, |b| term.cmp_prod(b) == Ordering::Greater) {
                        best = Some(term);
                    }
                }
                let norm = best.ok_or_else(|| Error::InvalidArgument("ψ is undefined at the zero vector".into()))?;
                Ok(PsiValue::Pow(PowProd::rational(c.clone()).mul(&norm.powr(&-e))))
            }
        }
    }

    /// Checks `Ψ(a) ≥ Ψ(a')` on one comparable pair (`|a_i|_S ≤ |a'_i|_S` for all `i`).
    pub fn monotone_on(&self, a: &[i128], b: &[i128], places: &[Place]) -> Result<bool> {
        let comparable = a
            .iter()
            .zip(b)
            .all(|(&x, &y)| int_place_norm(x, places) <= int_place_norm(y, places));
        if !comparable {
            return Ok(true);
        }
        let va = self.eval(a, places)?;
        let vb = self.eval(b, places)?;
        Ok(match (&va, &vb) {
            (PsiValue::Exact(x), _) => vb.cmp_with(x)? != Ordering::Less,
            (_, PsiValue::Exact(y)) => va.cmp_with(y)? != Ordering::Greater,
            (PsiValue::Pow(x), PsiValue::Pow(y)) => x.cmp_prod(y) != Ordering::Less,
            _ => va.to_f64() >= vb.to_f64() * (1.0 - 1e-12),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn examples() {
        let psi = ApproxFunction::power(3);
        assert_eq!(psi.eval(&[2, 1], &[Place::Finite(3)]).unwrap().cmp_with(&rat(1, 8)).unwrap(), Ordering::Equal);
        let v = ApproxFunction::Psi0.eval(&[2, 0, 3], &[Place::Infinite]).unwrap();
        assert_eq!(v, PsiValue::Exact(rat(1, 6)));
        let q = ApproxFunction::Quasinorm { c: int(1), e: int(3), weights: vec![int(1), int(1)] };
        for a in [[2i128, 1], [-5, 3], [0, 7]] {
            let x = q.eval(&a, &[Place::Infinite]).unwrap();
            let y = psi.eval(&a, &[Place::Infinite]).unwrap();
            match (x, y) {
                (PsiValue::Pow(x), PsiValue::Pow(y)) => assert_eq!(x.cmp_prod(&y), Ordering::Equal),
                _ => unreachable!(),
            }
        }
        assert!(psi.eval(&[0, 0], &[Place::Infinite]).is_err());
    }

    #[test]
    fn weighted_quasinorm() {
        let q = ApproxFunction::Quasinorm { c: int(1), e: int(1), weights: vec![rat(1, 2), rat(3, 2)] };
        let v = q.eval(&[3, 8], &[Place::Infinite]).unwrap();
        assert_eq!(v.cmp_with(&rat(1, 9)).unwrap(), Ordering::Equal);
        assert!(q.validate().is_ok());
        let bad = ApproxFunction::Quasinorm { c: int(1), e: int(1), weights: vec![rat(1, 2), rat(1, 2)] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn real_values_compare() {
        let psi = ApproxFunction::PowerLog { e: 3, b: 2 };
        let v = psi.eval_height(10).unwrap();
        let f = 1e-3 / 10f64.ln().powi(2) / 11f64.ln().powi(2) * 10f64.ln().powi(2);
        assert!((v.to_f64() - f).abs() < 1e-15);
        assert_eq!(v.cmp_with(&rat(1, 1_000_000)).unwrap(), Ordering::Less);
        assert_eq!(v.cmp_with(&BigRational::zero()).unwrap(), Ordering::Less);
    }
}
