//! Newton iteration for simple roots of one-variable polynomials over `Z_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{self, pow_int};
use crate::error::{Error, Result};
use crate::padic::PAdic;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HenselRoot {
    pub p: u64,
    /// `ξ₀` modulo `p^N`.
    pub residue: BigInt,
    /// `N`.
    pub precision: u32,
    /// `v(ξ₀)`, capped at `N` when `ξ₀ ≡ 0`.
    pub valuation: i64,
    /// True when `g(0) = 0` exactly, so `ξ₀ = 0` exactly.
    pub exact_zero: bool,
    /// `v(g(0))` and `v(g′(0))`.
    pub v_g0: Option<i64>,
    pub v_g1: i64,
    /// `v(g(ξ_k))` before each step, capped at the working modulus.
    pub log: Vec<i64>,
}

impl HenselRoot {
    pub fn to_padic(&self) -> Result<PAdic> {
        if self.exact_zero {
            return Ok(PAdic::zero(self.p));
        }
        if self.residue.is_zero() {
            return Ok(PAdic::small(self.p, self.precision as i64));
        }
        let v = self.valuation;
        PAdic::from_bigint(&self.residue, self.p, (self.precision as i64 - v) as u32)
    }

    /// Upper bound `p^{-v}` on `|ξ₀|_p`.
    pub fn norm_bound(&self) -> BigRational {
        if self.exact_zero {
            BigRational::zero()
        } else {
            arith::pow_rat(self.p, -self.valuation)
        }
    }
}

fn eval_mod(coeffs: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    coeffs.iter().rev().fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(m))
}

fn val(x: &BigInt, p: u64, cap: i64) -> i64 {
    arith::valuation_int(x, p).map_or(cap, |v| v.min(cap))
}

/// Root `ξ₀` of `g` with `|ξ₀|_p ≤ |g(0)|_p / |g′(0)|_p`, correct modulo `p^N`.
///
/// Needs p-integral coefficients and `|g(0)|_p < |g′(0)|_p²`.
pub fn hensel_root(g: &Poly, p: u64, precision: u32) -> Result<HenselRoot> {
    arith::check_prime(p)?;
    if g.nvars() != 1 {
        return Err(Error::InvalidArgument("g must be univariate".into()));
    }
    if precision == 0 {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    let deg = g.degree() as usize;
    let coeffs: Vec<BigRational> = (0..=deg).map(|k| g.coeff(&[k as u32])).collect();
    if coeffs.iter().any(|c| arith::valuation_rat(c, p).map_or(false, |v| v < 0)) {
        return Err(Error::Precondition("coefficients must be p-integral".into()));
    }
    let g0 = &coeffs[0];
    let g1 = coeffs.get(1).cloned().unwrap_or_else(BigRational::zero);
    let v_g1 = arith::valuation_rat(&g1, p).ok_or_else(|| Error::Precondition("g′(0) = 0".into()))?;
    let v_g0 = arith::valuation_rat(g0, p);
    if let Some(v0) = v_g0 {
        if v0 <= 2 * v_g1 {
            return Err(Error::Precondition(format!("Hensel condition fails: v(g(0)) = {v0}, v(g′(0)) = {v_g1}")));
        }
    } else {
        return Ok(HenselRoot {
            p,
            residue: BigInt::zero(),
            precision,
            valuation: precision as i64,
            exact_zero: true,
            v_g0: None,
            v_g1,
            log: vec![],
        });
    }
    let d = v_g1;
    let top = precision as i64 + 2 * d + 1;
    let m = pow_int(p, top as u32);
    let pb = BigInt::from(p);
    let res: Vec<BigInt> = coeffs.iter().map(|c| arith::rat_mod_pow(c, p, top as u32)).collect::<Result<_>>()?;
    let dres: Vec<BigInt> = res.iter().enumerate().skip(1).map(|(k, c)| (c * BigInt::from(k)).mod_floor(&m)).collect();
    let mut xi = BigInt::zero();
    let mut log = Vec::new();
    for _ in 0..128 {
        let gv = eval_mod(&res, &xi, &m);
        let vg = val(&gv, p, top);
        log.push(vg);
        if vg >= precision as i64 + 2 * d {
            let mod_n = pow_int(p, precision);
            let residue = xi.mod_floor(&mod_n);
            let valuation = val(&residue, p, precision as i64);
            return Ok(HenselRoot { p, residue, precision, valuation, exact_zero: false, v_g0, v_g1, log });
        }
        let dv = eval_mod(&dres, &xi, &m);
        if val(&dv, p, top) != d {
            return Err(Error::Internal("derivative valuation drifted".into()));
        }
        let pd = pb.pow(d as u32);
        let m_low = pow_int(p, (top - d) as u32);
        let num = (&gv / &pd).mod_floor(&m_low);
        let unit = (&dv / &pd).mod_floor(&m_low);
        let inv = arith::mod_inverse(&unit, &m_low).ok_or_else(|| Error::Internal("derivative unit not invertible".into()))?;
        xi = (&xi - num * inv).mod_floor(&m);
    }
    Err(Error::InsufficientPrecision { needed: top, available: log.last().copied().unwrap_or(0) })
}

/// Coefficients of `ξ ↦ h(x + ξ e_i)` for a polynomial `h` and a rational point `x`.
pub fn shift_along(h: &Poly, x: &[BigRational], i: usize) -> Poly {
    let deg = h.degree_in(i);
    let mut coeffs = Vec::with_capacity(deg as usize + 1);
    let mut d = h.clone();
    let mut fact = BigInt::from(1);
    for k in 0..=deg {
        if k > 0 {
            d = d.partial(i);
            fact *= BigInt::from(k);
        }
        coeffs.push(d.eval(x) / BigRational::from_integer(fact.clone()));
    }
    Poly::univariate(&coeffs)
}

/// Checks the root by evaluating `g` exactly at the residue; returns `v(g(ξ₀))`.
pub fn residual_valuation(g: &Poly, root: &HenselRoot) -> Option<i64> {
    let x = BigRational::from_integer(root.residue.clone());
    arith::valuation_rat(&g.eval(&[x]), root.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn linear_root() {
        let g = Poly::univariate(&[int(-6), int(1)]);
        let r = hensel_root(&g, 3, 20).unwrap();
        assert_eq!(r.residue, BigInt::from(6));
        assert_eq!(r.log.len(), 2);
        assert_eq!(r.valuation, 1);
    }

    #[test]
    fn quadratic_over_z5() {
        let g = Poly::univariate_int(&[5, 1, 1]);
        let r = hensel_root(&g, 5, 40).unwrap();
        assert_eq!(r.valuation, 1);
        assert!(residual_valuation(&g, &r).map_or(true, |v| v >= 40));
        assert!(r.norm_bound() <= rat(1, 5));
        for w in r.log.windows(2) {
            assert!(w[1] >= 2 * w[0] || w[1] >= 40);
        }
    }

    #[test]
    fn nonunit_derivative() {
        let g = Poly::univariate_int(&[3 * 3 * 3 * 2, 3, 1]);
        let r = hensel_root(&g, 3, 30).unwrap();
        assert_eq!(r.v_g1, 1);
        assert!(residual_valuation(&g, &r).map_or(true, |v| v >= 30));
        assert!(r.valuation >= r.v_g0.unwrap() - r.v_g1);
        let bad = Poly::univariate_int(&[9, 3, 1]);
        assert!(hensel_root(&bad, 3, 10).is_err());
        let exact = Poly::univariate_int(&[0, 1, 7]);
        assert!(hensel_root(&exact, 3, 10).unwrap().exact_zero);
    }

    #[test]
    fn shifted_polynomial() {
        let h = Poly::univariate_int(&[1, 2, 3]);
        let g = shift_along(&h, &[rat(1, 2)], 0);
        for t in [int(0), int(3), rat(-2, 7)] {
            assert_eq!(g.eval(&[t.clone()]), h.eval(&[rat(1, 2) + t]));
        }
    }
}
