//! Exact comparisons of positive reals of the form `∏ b_i^{e_i}` with rational `b_i, e_i`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowProd {
    /// `(base, exponent)` pairs with positive bases.
    #[serde(with = "pairs")]
    factors: Vec<(BigRational, BigRational)>,
}

mod pairs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[(BigRational, BigRational)], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|(b, e)| (arith::rational_to_string(b), arith::rational_to_string(e)))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigRational, BigRational)>, D::Error> {
        let raw = Vec::<(String, String)>::deserialize(d)?;
        raw.iter()
            .map(|(b, e)| {
                Ok((
                    arith::parse_rational(b).map_err(serde::de::Error::custom)?,
                    arith::parse_rational(e).map_err(serde::de::Error::custom)?,
                ))
            })
            .collect()
    }
}

fn pow_signed(b: &BigRational, e: &BigInt) -> BigRational {
    let m = e.abs().to_usize().expect("exponent too large for exact comparison");
    let r = num_traits::pow(b.clone(), m);
    if e.is_negative() {
        r.recip()
    } else {
        r
    }
}

impl PowProd {
    pub fn one() -> Self {
        PowProd { factors: Vec::new() }
    }

    /// `q` itself; panics unless `q > 0`.
    pub fn rational(q: BigRational) -> Self {
        assert!(q.is_positive(), "PowProd needs a positive base");
        Self::power(q, BigRational::one())
    }

    pub fn power(base: BigRational, exp: BigRational) -> Self {
        assert!(base.is_positive(), "PowProd needs a positive base");
        let mut r = Self::one();
        r.push(base, exp);
        r
    }

    /// `2^e`.
    pub fn pow2(exp: BigRational) -> Self {
        Self::power(int(2), exp)
    }

    fn push(&mut self, base: BigRational, exp: BigRational) {
        if exp.is_zero() || base.is_one() {
            return;
        }
        if let Some(f) = self.factors.iter_mut().find(|f| f.0 == base) {
            f.1 += exp;
        } else {
            self.factors.push((base, exp));
        }
        self.factors.retain(|f| !f.1.is_zero());
    }

    pub fn mul(&self, o: &PowProd) -> PowProd {
        let mut r = self.clone();
        for (b, e) in &o.factors {
            r.push(b.clone(), e.clone());
        }
        r
    }

    pub fn mul_rational(&self, q: &BigRational) -> PowProd {
        self.mul(&Self::rational(q.clone()))
    }

    pub fn powr(&self, e: &BigRational) -> PowProd {
        let mut r = Self::one();
        for (b, x) in &self.factors {
            r.push(b.clone(), x * e);
        }
        r
    }

    pub fn recip(&self) -> PowProd {
        self.powr(&-BigRational::one())
    }

    pub fn ln(&self) -> f64 {
        self.factors
            .iter()
            .map(|(b, e)| arith::to_f64(e) * arith::to_f64(b).ln())
            .sum()
    }

    pub fn to_f64(&self) -> f64 {
        self.ln().exp()
    }

    /// Exact value when every exponent is an integer.
    pub fn to_rational(&self) -> Option<BigRational> {
        let mut r = BigRational::one();
        for (b, e) in &self.factors {
            if !e.is_integer() {
                return None;
            }
            r *= pow_signed(b, &e.to_integer());
        }
        Some(r)
    }

    /// Exact comparison with `1`.
    fn cmp_one(&self) -> Ordering {
        if self.factors.is_empty() {
            return Ordering::Equal;
        }
        let ln = self.ln();
        let scale: f64 = self
            .factors
            .iter()
            .map(|(b, e)| (arith::to_f64(e) * arith::to_f64(b).ln()).abs())
            .sum();
        if ln.abs() > 1e-9 * (1.0 + scale) && ln.is_finite() {
            return if ln > 0.0 { Ordering::Greater } else { Ordering::Less };
        }
        let d = self
            .factors
            .iter()
            .fold(BigInt::one(), |acc, (_, e)| acc.lcm(e.denom()));
        let mut num = BigRational::one();
        let mut den = BigRational::one();
        for (b, e) in &self.factors {
            let k = (e * BigRational::from_integer(d.clone())).to_integer();
            if k.is_positive() {
                num *= pow_signed(b, &k);
            } else {
                den *= pow_signed(b, &-k);
            }
        }
        num.cmp(&den)
    }

    pub fn cmp_prod(&self, o: &PowProd) -> Ordering {
        self.mul(&o.recip()).cmp_one()
    }

    /// Compares with a nonnegative rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        if !q.is_positive() {
            return Ordering::Greater;
        }
        self.cmp_prod(&Self::rational(q.clone()))
    }
}

impl fmt::Display for PowProd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(b, e)| {
                if e.is_one() {
                    arith::rational_to_string(b)
                } else {
                    format!("{}^({})", arith::rational_to_string(b), arith::rational_to_string(e))
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn comparisons() {
        let a = PowProd::power(int(8), rat(2, 3));
        assert_eq!(a.cmp_rational(&int(4)), Ordering::Equal);
        assert_eq!(a.cmp_rational(&rat(399, 100)), Ordering::Greater);
        let c = PowProd::power(int(2), rat(5, 2));
        assert_eq!(c.cmp_rational(&rat(5657, 1000)), Ordering::Less);
        assert_eq!(c.to_rational(), None);
        assert_eq!(PowProd::pow2(int(-3)).to_rational(), Some(rat(1, 8)));
        let x = PowProd::power(int(3), rat(1, 2)).mul(&PowProd::power(int(2), rat(1, 2)));
        assert_eq!(x.cmp_prod(&PowProd::power(int(6), rat(1, 2))), Ordering::Equal);
    }

    #[test]
    fn near_ties_are_exact() {
        let a = PowProd::power(int(4), rat(1, 4));
        let b = PowProd::power(int(2), rat(1, 2));
        assert_eq!(a.cmp_prod(&b), Ordering::Equal);
        let c = PowProd::power(int(4), rat(1, 4)).mul_rational(&rat(1_000_000_001, 1_000_000_000));
        assert_eq!(c.cmp_prod(&b), Ordering::Greater);
    }
}
