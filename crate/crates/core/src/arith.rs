//! Integer and rational helpers shared by every module.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidPrime(p))
    }
}

pub fn pow_int(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

pub fn pow_uint(p: u64, e: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize)
}

/// `p^e` as an exact rational, for any sign of `e`.
pub fn pow_rat(p: u64, e: i64) -> BigRational {
    let m = pow_int(p, e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(m)
    } else {
        BigRational::new(BigInt::one(), m)
    }
}

/// `p^e` if it fits in `u64`.
pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut r: u64 = 1;
    for _ in 0..e {
        r = r.checked_mul(p)?;
    }
    Some(r)
}

/// Valuation of a nonzero integer; `None` for zero.
pub fn valuation_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    if let Some(mut m) = n.abs().to_u64() {
        let mut v = 0;
        while m % p == 0 {
            m /= p;
            v += 1;
        }
        return Some(v);
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

pub fn valuation_i64(n: i64, p: u64) -> Option<i64> {
    if n == 0 {
        return None;
    }
    let mut m = n.unsigned_abs();
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    Some(v)
}

/// Valuation of a rational; `None` for zero.
pub fn valuation_rat(q: &BigRational, p: u64) -> Option<i64> {
    let vn = valuation_int(q.numer(), p)?;
    let vd = valuation_int(q.denom(), p).unwrap_or(0);
    Some(vn - vd)
}

/// `|q|_p` as an exact rational.
pub fn p_norm(q: &BigRational, p: u64) -> BigRational {
    match valuation_rat(q, p) {
        None => BigRational::zero(),
        Some(v) => pow_rat(p, -v),
    }
}

/// Largest norm among the entries, zero for an empty slice.
pub fn sup_p_norm(qs: &[BigRational], p: u64) -> BigRational {
    qs.iter()
        .map(|q| p_norm(q, p))
        .max()
        .unwrap_or_else(BigRational::zero)
}

pub fn sup_abs(qs: &[BigRational]) -> BigRational {
    qs.iter()
        .map(|q| q.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Residue in `[0, p^n)` of a `p`-integral rational.
pub fn rat_mod_pow(q: &BigRational, p: u64, n: u32) -> Result<BigInt> {
    let m = pow_int(p, n);
    let inv = mod_inverse(q.denom(), &m).ok_or_else(|| {
        Error::InvalidArgument(format!("{q} is not {p}-integral"))
    })?;
    Ok((q.numer() * inv).mod_floor(&m))
}

/// Residue in `[0, p^n)` of the unit part `q / p^v` where `v = v_p(q)`.
pub fn unit_residue(q: &BigRational, p: u64, n: u32) -> Result<(i64, BigUint)> {
    let v = valuation_rat(q, p).ok_or(Error::DivisionByZero)?;
    let u = q / pow_rat(p, v);
    let r = rat_mod_pow(&u, p, n)?;
    Ok((v, r.to_biguint().expect("nonnegative residue")))
}

pub fn floor_rat(q: &BigRational) -> BigInt {
    q.floor().to_integer()
}

/// Nearest integer, halves rounded up.
pub fn round_rat(q: &BigRational) -> BigInt {
    (q + rat(1, 2)).floor().to_integer()
}

/// Largest `k` with `p^k <= x` for positive rational `x`.
pub fn floor_log(p: u64, x: &BigRational) -> i64 {
    assert!(x.is_positive(), "floor_log needs a positive argument");
    let pr = int(p as i64);
    let mut k: i64 = 0;
    let mut pk = BigRational::one();
    if &pk <= x {
        loop {
            let next = &pk * &pr;
            if &next > x {
                return k;
            }
            pk = next;
            k += 1;
        }
    } else {
        loop {
            pk /= &pr;
            k -= 1;
            if &pk <= x {
                return k;
            }
        }
    }
}

/// Largest `k` with `p^k < x` for positive rational `x`.
pub fn floor_log_strict(p: u64, x: &BigRational) -> i64 {
    let k = floor_log(p, x);
    if &pow_rat(p, k) == x {
        k - 1
    } else {
        k
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
            let scaled = if shift > 0 {
                q / BigRational::from_integer(BigInt::one() << shift as usize)
            } else {
                q * BigRational::from_integer(BigInt::one() << (-shift) as usize)
            };
            let f = scaled.numer().to_f64().unwrap_or(0.0) / scaled.denom().to_f64().unwrap_or(1.0);
            f * 2f64.powi(shift as i32)
        }
    }
}

pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `n`, `n/d` or a finite decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse rational from {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = w.abs() * &scale + f;
        let n = if neg { -mag } else { mag };
        return Ok(BigRational::new(n, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn bigint_sign(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod rational_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", q.numer(), q.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod rational_vec_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(qs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        qs.iter()
            .map(|q| format!("{}/{}", q.numer(), q.denom()))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod rational_opt_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&format!("{}/{}", q.numer(), q.denom())),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigRational>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation_rat(&rat(1, 3), 3), Some(-1));
        assert_eq!(valuation_rat(&rat(18, 5), 3), Some(2));
        assert_eq!(valuation_rat(&int(0), 3), None);
        assert_eq!(p_norm(&int(10), 5), rat(1, 5));
    }

    #[test]
    fn residues() {
        assert_eq!(rat_mod_pow(&rat(1, 2), 3, 2).unwrap(), BigInt::from(5));
        let (v, u) = unit_residue(&int(10), 5, 3).unwrap();
        assert_eq!((v, u), (1, BigUint::from(2u32)));
        assert!(rat_mod_pow(&rat(1, 3), 3, 2).is_err());
    }

    #[test]
    fn logs() {
        assert_eq!(floor_log(3, &int(9)), 2);
        assert_eq!(floor_log_strict(3, &int(9)), 1);
        assert_eq!(floor_log(3, &rat(1, 10)), -3);
        assert_eq!(floor_log(2, &rat(1, 2)), -1);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(round_rat(&rat(-5, 2)), BigInt::from(-2));
        assert!((to_f64(&rat(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
    }
}
