//! Shared fixtures for the criterion benches.

use num_bigint::BigInt;
use num_rational::BigRational;
use sadic_core::lattice::GammaLattice;
use sadic_core::{PAdic, Poly};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(x, x², …, xⁿ)` in one variable.
pub fn veronese(n: u32) -> Vec<Poly> {
    (1..=n).map(|k| Poly::var(1, 0).pow(k)).collect()
}

/// A p-adic unit with `prec` digits.
pub fn unit(p: u64, prec: u32) -> PAdic {
    PAdic::from_rational(&rat(1_234_567, 89), p, prec).unwrap()
}

/// The divisible lattice attached to `(y, y²)` at level `j`.
pub fn lattice(p: u64, j: u32, y: i64) -> GammaLattice {
    GammaLattice::from_rationals(&[rat(y, 1), rat(y * y, 1)], p, j, true).unwrap()
}

/// `x³ + p·x + p²` with integer coefficients.
pub fn cubic(p: i64) -> Poly {
    Poly::univariate_int(&[p * p, p, 0, 1])
}
