//! Rationals that are simultaneously close to a real target and a p-adic target.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{self, pow_int, pow_rat};
use crate::error::{Error, Result};
use crate::padic::PAdic;

/// Exponent `e` with `ε = p^{-e}`, or an error when `ε` is not a power of `p`.
pub fn p_power_exponent(eps: &BigRational, p: u64) -> Result<i64> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument("ε_p must be positive".into()));
    }
    let v = arith::valuation_rat(eps, p).unwrap();
    if pow_rat(p, v) != *eps {
        return Err(Error::InvalidArgument(format!("{eps} is not a power of {p}")));
    }
    Ok(-v)
}

/// A rational `r = c/p^k` with `|r − ξ_∞| ≤ ε_∞`, `|r − ξ_p|_p ≤ ε_p` and `|r|_q ≤ 1` for `q ≠ p`.
///
/// Needs `ε_∞ ≥ ½ ε_p^{-1} p` and `ξ_p` known modulo `ε_p`.
pub fn strong_approx(xi_inf: &BigRational, xi_p: &PAdic, eps_inf: &BigRational, eps_p: &BigRational) -> Result<BigRational> {
    let p = xi_p.prime();
    let e = p_power_exponent(eps_p, p)?;
    if *eps_inf < pow_rat(p, e + 1) / arith::int(2) {
        return Err(Error::Precondition("ε_∞ must be at least p/(2ε_p)".into()));
    }
    if let Some(k) = xi_p.absolute_precision() {
        if k < e {
            return Err(Error::InsufficientPrecision { needed: e, available: k });
        }
    }
    let r0 = match (xi_p.valuation_lower_bound(), xi_p.to_rational()) {
        (Some(v), Some(q)) if v < e => {
            let k = (-v).max(0);
            let m = pow_int(p, (e + k) as u32);
            let c = (q * BigRational::from_integer(pow_int(p, k as u32))).to_integer().mod_floor(&m);
            BigRational::new(c, pow_int(p, k as u32))
        }
        _ => BigRational::zero(),
    };
    let within = |r: &BigRational| (r - xi_inf).abs() <= *eps_inf;
    if within(&r0) {
        return Ok(r0);
    }
    let step = pow_rat(p, e);
    let shift: BigInt = arith::round_rat(&((xi_inf - &r0) / &step));
    let r = r0 + step * BigRational::from_integer(shift);
    if !within(&r) {
        return Err(Error::Internal("shifted rational left the archimedean window".into()));
    }
    Ok(r)
}

/// Whether `r` has only powers of `p` in its denominator.
pub fn only_p_denominator(r: &BigRational, p: u64) -> bool {
    let mut d = r.denom().clone();
    let pb = BigInt::from(p);
    while (&d % &pb).is_zero() {
        d /= &pb;
    }
    d == BigInt::from(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn check(r: &BigRational, xi_inf: &BigRational, xi_p: &BigRational, eps_inf: &BigRational, eps_p: &BigRational, p: u64) {
        assert!((r - xi_inf).abs() <= *eps_inf);
        assert!(arith::p_norm(&(r - xi_p), p) <= *eps_p);
        assert!(only_p_denominator(r, p));
    }

    #[test]
    fn examples() {
        let z = PAdic::from_rational(&rat(7, 5), 3, 10).unwrap();
        let r = strong_approx(&rat(1, 2), &z, &rat(3, 2), &int(1)).unwrap();
        assert_eq!(r, int(0));
        let five = PAdic::from_int(5, 3, 10).unwrap();
        let r = strong_approx(&int(0), &five, &rat(27, 2), &rat(1, 9)).unwrap();
        assert_eq!(r, int(5));
        let q = rat(2, 3);
        let x = PAdic::from_rational(&q, 3, 10).unwrap();
        let r = strong_approx(&int(-6), &x, &int(3), &int(1)).unwrap();
        check(&r, &int(-6), &q, &int(3), &int(1), 3);
        assert!(!r.is_integer());
        assert!(strong_approx(&int(0), &five, &int(1), &rat(1, 9)).is_err());
    }

    #[test]
    fn negative_exponent_targets() {
        let q = rat(5, 81);
        let x = PAdic::from_rational(&q, 3, 10).unwrap();
        for (xi, eps_p) in [(int(100), int(9)), (rat(-7, 2), rat(1, 27))] {
            let eps_inf = pow_rat(3, p_power_exponent(&eps_p, 3).unwrap() + 1);
            let r = strong_approx(&xi, &x, &eps_inf, &eps_p).unwrap();
            check(&r, &xi, &q, &eps_inf, &eps_p, 3);
        }
    }
}
