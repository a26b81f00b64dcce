//! Finite-precision p-adic numbers, S-adic vectors and balls.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, check_prime, pow_int, pow_rat, pow_uint};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero,
    /// `p^val * unit` with `unit` known modulo `p^prec`.
    Unit { val: i64, unit: BigUint, prec: u32 },
    /// Known only to lie in `p^abs_prec Z_p`.
    Small { abs_prec: i64 },
}

/// A p-adic number `p^v * u` with the unit `u` known to `N` digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PAdicRecord", into = "PAdicRecord")]
pub struct PAdic {
    p: u64,
    repr: Repr,
}

/// Serialized layout: digits are least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicRecord {
    pub p: u64,
    pub v: Option<i64>,
    pub digits: Vec<u64>,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisible_by_exp: Option<i64>,
}

impl PAdic {
    pub fn zero(p: u64) -> Self {
        PAdic { p, repr: Repr::Zero }
    }

    /// A value only known to be divisible by `p^abs_prec`.
    pub fn small(p: u64, abs_prec: i64) -> Self {
        PAdic { p, repr: Repr::Small { abs_prec } }
    }

    pub fn from_rational(q: &BigRational, p: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if prec == 0 {
            return Err(Error::InvalidArgument("precision must be at least 1".into()));
        }
        if q.is_zero() {
            return Ok(Self::zero(p));
        }
        let (val, unit) = arith::unit_residue(q, p, prec)?;
        Ok(PAdic { p, repr: Repr::Unit { val, unit, prec } })
    }

    pub fn from_int(n: i64, p: u64, prec: u32) -> Result<Self> {
        Self::from_rational(&arith::int(n), p, prec)
    }

    pub fn from_bigint(n: &BigInt, p: u64, prec: u32) -> Result<Self> {
        Self::from_rational(&BigRational::from_integer(n.clone()), p, prec)
    }

    pub fn from_parts(p: u64, val: i64, unit: BigUint, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if prec == 0 {
            return Err(Error::InvalidArgument("precision must be at least 1".into()));
        }
        let m = pow_uint(p, prec);
        let unit = unit % &m;
        if (&unit % p).is_zero() {
            return Err(Error::InvalidArgument("unit part divisible by p".into()));
        }
        Ok(PAdic { p, repr: Repr::Unit { val, unit, prec } })
    }

    fn unit_from_residue(p: u64, vmin: i64, s: BigInt, abs_prec: i64) -> Self {
        if s.is_zero() {
            return Self::small(p, abs_prec);
        }
        let extra = arith::valuation_int(&s, p).unwrap();
        let val = vmin + extra;
        let prec = (abs_prec - val) as u32;
        let unit = (s / pow_int(p, extra as u32)).to_biguint().unwrap() % pow_uint(p, prec);
        PAdic { p, repr: Repr::Unit { val, unit, prec } }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// True when the value is certainly nonzero.
    pub fn is_determinate(&self) -> bool {
        !matches!(self.repr, Repr::Small { .. })
    }

    /// `None` stands for the infinite valuation of a certified zero.
    pub fn valuation(&self) -> Result<Option<i64>> {
        match &self.repr {
            Repr::Zero => Ok(None),
            Repr::Unit { val, .. } => Ok(Some(*val)),
            Repr::Small { abs_prec } => Err(Error::IndeterminateValuation { abs_prec: *abs_prec }),
        }
    }

    pub fn norm(&self) -> Result<BigRational> {
        Ok(match self.valuation()? {
            None => BigRational::zero(),
            Some(v) => pow_rat(self.p, -v),
        })
    }

    /// A lower bound on the valuation that is always available.
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Unit { val, .. } => Some(*val),
            Repr::Small { abs_prec } => Some(*abs_prec),
        }
    }

    /// Number of known unit digits; `None` for zero and for indeterminate values.
    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Unit { prec, .. } => Some(*prec),
            _ => None,
        }
    }

    /// Exponent `k` such that the value is known modulo `p^k`; `None` when exact.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::Unit { val, prec, .. } => Some(val + *prec as i64),
            Repr::Small { abs_prec } => Some(*abs_prec),
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    pub fn digits(&self) -> Vec<u64> {
        let mut out = Vec::new();
        if let Repr::Unit { unit, prec, .. } = &self.repr {
            let mut u = unit.clone();
            for _ in 0..*prec {
                let (q, r) = u.div_rem(&BigUint::from(self.p));
                out.push(r.to_u64().unwrap());
                u = q;
            }
        }
        out
    }

    /// The canonical rational `p^v * unit` with `unit` in `[1, p^N)`.
    pub fn to_rational(&self) -> Option<BigRational> {
        match &self.repr {
            Repr::Zero => Some(BigRational::zero()),
            Repr::Unit { val, unit, .. } => {
                Some(BigRational::from_integer(BigInt::from(unit.clone())) * pow_rat(self.p, *val))
            }
            Repr::Small { .. } => None,
        }
    }

    /// True when `q` is congruent to this value to its absolute precision.
    pub fn agrees_with(&self, q: &BigRational) -> bool {
        match self.absolute_precision() {
            None => q.is_zero(),
            Some(k) => {
                let diff = match self.to_rational() {
                    Some(r) => q - r,
                    None => q.clone(),
                };
                match arith::valuation_rat(&diff, self.p) {
                    None => true,
                    Some(v) => v >= k,
                }
            }
        }
    }

    /// Drops digits so that at most `prec` unit digits remain.
    pub fn truncate(&self, prec: u32) -> PAdic {
        match &self.repr {
            Repr::Unit { val, unit, prec: old } if *old > prec && prec > 0 => PAdic {
                p: self.p,
                repr: Repr::Unit { val: *val, unit: unit % pow_uint(self.p, prec), prec },
            },
            _ => self.clone(),
        }
    }

    /// Lowers the absolute precision to `p^k`.
    pub fn truncate_abs(&self, k: i64) -> PAdic {
        match &self.repr {
            Repr::Zero => Self::small(self.p, k),
            Repr::Small { abs_prec } => Self::small(self.p, (*abs_prec).min(k)),
            Repr::Unit { val, prec, .. } => {
                if *val >= k {
                    Self::small(self.p, k)
                } else if val + (*prec as i64) > k {
                    self.truncate((k - val) as u32)
                } else {
                    self.clone()
                }
            }
        }
    }

    fn same_prime(&self, other: &PAdic) {
        assert_eq!(self.p, other.p, "p-adic operation on different primes");
    }

    pub fn checked_add(&self, other: &PAdic) -> Result<PAdic> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(self.add_impl(other))
    }

    fn add_impl(&self, other: &PAdic) -> PAdic {
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) => other.clone(),
            (_, Repr::Zero) => self.clone(),
            (Repr::Small { abs_prec }, _) => other.truncate_abs(*abs_prec),
            (_, Repr::Small { abs_prec }) => self.truncate_abs(*abs_prec),
            (
                Repr::Unit { val: va, unit: ua, prec: na },
                Repr::Unit { val: vb, unit: ub, prec: nb },
            ) => {
                let vmin = (*va).min(*vb);
                let abs_prec = (va + *na as i64).min(vb + *nb as i64);
                let m = pow_int(p, (abs_prec - vmin) as u32);
                let a = BigInt::from(ua.clone()) * pow_int(p, (va - vmin) as u32);
                let b = BigInt::from(ub.clone()) * pow_int(p, (vb - vmin) as u32);
                let s = (a + b).mod_floor(&m);
                Self::unit_from_residue(p, vmin, s, abs_prec)
            }
        }
    }

    pub fn add(&self, other: &PAdic) -> PAdic {
        self.same_prime(other);
        self.add_impl(other)
    }

    pub fn neg(&self) -> PAdic {
        match &self.repr {
            Repr::Unit { val, unit, prec } => {
                let m = pow_uint(self.p, *prec);
                PAdic {
                    p: self.p,
                    repr: Repr::Unit { val: *val, unit: &m - unit, prec: *prec },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &PAdic) -> PAdic {
        self.same_prime(other);
        self.add_impl(&other.neg())
    }

    pub fn mul(&self, other: &PAdic) -> PAdic {
        self.same_prime(other);
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => Self::zero(p),
            (Repr::Small { abs_prec: a }, Repr::Small { abs_prec: b }) => Self::small(p, a + b),
            (Repr::Small { abs_prec }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::Small { abs_prec }) => Self::small(p, abs_prec + val),
            (
                Repr::Unit { val: va, unit: ua, prec: na },
                Repr::Unit { val: vb, unit: ub, prec: nb },
            ) => {
                let prec = (*na).min(*nb);
                let unit = (ua * ub) % pow_uint(p, prec);
                PAdic { p, repr: Repr::Unit { val: va + vb, unit, prec } }
            }
        }
    }

    pub fn inv(&self) -> Result<PAdic> {
        match &self.repr {
            Repr::Zero => Err(Error::DivisionByZero),
            Repr::Small { abs_prec } => Err(Error::IndeterminateValuation { abs_prec: *abs_prec }),
            Repr::Unit { val, unit, prec } => {
                let m = pow_int(self.p, *prec);
                let inv = arith::mod_inverse(&BigInt::from(unit.clone()), &m)
                    .expect("unit is invertible");
                Ok(PAdic {
                    p: self.p,
                    repr: Repr::Unit { val: -val, unit: inv.to_biguint().unwrap(), prec: *prec },
                })
            }
        }
    }

    pub fn div(&self, other: &PAdic) -> Result<PAdic> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> PAdic {
        let mut r = match &self.repr {
            Repr::Zero if e > 0 => return Self::zero(self.p),
            _ => PAdic::from_int(1, self.p, self.precision().unwrap_or(DEFAULT_PRECISION))
                .expect("valid prime"),
        };
        if e == 0 {
            return r;
        }
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// Compares norms, erroring when either is indeterminate.
    pub fn cmp_norm(&self, other: &PAdic) -> Result<Ordering> {
        let a = self.valuation()?;
        let b = other.valuation()?;
        Ok(match (a, b) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(x), Some(y)) => y.cmp(&x),
        })
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::Small { abs_prec } => write!(f, "O({}^{})", self.p, abs_prec),
            Repr::Unit { val, unit, prec } => {
                write!(f, "{}*{}^{} + O({}^{})", unit, self.p, val, self.p, val + *prec as i64)
            }
        }
    }
}

impl From<PAdic> for PAdicRecord {
    fn from(x: PAdic) -> Self {
        let digits = x.digits();
        match x.repr {
            Repr::Zero => PAdicRecord { p: x.p, v: None, digits, n: 0, divisible_by_exp: None },
            Repr::Small { abs_prec } => PAdicRecord {
                p: x.p,
                v: None,
                digits,
                n: 0,
                divisible_by_exp: Some(abs_prec),
            },
            Repr::Unit { val, prec, .. } => PAdicRecord {
                p: x.p,
                v: Some(val),
                digits,
                n: prec,
                divisible_by_exp: None,
            },
        }
    }
}

impl TryFrom<PAdicRecord> for PAdic {
    type Error = Error;

    fn try_from(r: PAdicRecord) -> Result<Self> {
        check_prime(r.p)?;
        match (r.v, r.divisible_by_exp) {
            (None, None) => Ok(PAdic::zero(r.p)),
            (None, Some(k)) => Ok(PAdic::small(r.p, k)),
            (Some(v), _) => {
                if r.digits.len() != r.n as usize {
                    return Err(Error::InvalidArgument("digit count differs from N".into()));
                }
                let mut u = BigUint::zero();
                for &d in r.digits.iter().rev() {
                    if d >= r.p {
                        return Err(Error::InvalidArgument(format!("digit {d} out of range")));
                    }
                    u = u * r.p + d;
                }
                PAdic::from_parts(r.p, v, u, r.n)
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl std::ops::$tr<&PAdic> for &PAdic {
            type Output = PAdic;
            fn $m(self, rhs: &PAdic) -> PAdic {
                PAdic::$imp(self, rhs)
            }
        }
        impl std::ops::$tr<PAdic> for PAdic {
            type Output = PAdic;
            fn $m(self, rhs: PAdic) -> PAdic {
                PAdic::$imp(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for &PAdic {
    type Output = PAdic;
    fn neg(self) -> PAdic {
        PAdic::neg(self)
    }
}

/// A place of Q: the real place or a finite prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Norm of a rational at a place.
pub fn place_norm(q: &BigRational, place: Place) -> BigRational {
    match place {
        Place::Infinite => q.abs(),
        Place::Finite(p) => arith::p_norm(q, p),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    Real(#[serde(with = "arith::rational_vec_str")] Vec<BigRational>),
    PAdic(Vec<PAdic>),
}

/// An element of the product of completions over a finite set of places.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SAdicVector {
    entries: Vec<(Place, Component)>,
}

impl SAdicVector {
    pub fn new(mut entries: Vec<(Place, Component)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!("place {} repeated", w[0].0)));
            }
        }
        let mut dim = None;
        for (place, comp) in &entries {
            let len = match (place, comp) {
                (Place::Infinite, Component::Real(v)) => v.len(),
                (Place::Finite(p), Component::PAdic(v)) => {
                    check_prime(*p)?;
                    if v.iter().any(|x| x.prime() != *p) {
                        return Err(Error::PrimeMismatch(*p, v[0].prime()));
                    }
                    v.len()
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "component type does not match place {place}"
                    )))
                }
            };
            if *dim.get_or_insert(len) != len {
                return Err(Error::InvalidArgument("components differ in dimension".into()));
            }
        }
        Ok(SAdicVector { entries })
    }

    /// The diagonal image of a rational vector.
    pub fn diagonal(places: &[Place], x: &[BigRational], prec: u32) -> Result<Self> {
        let entries = places
            .iter()
            .map(|&pl| {
                Ok((
                    pl,
                    match pl {
                        Place::Infinite => Component::Real(x.to_vec()),
                        Place::Finite(p) => Component::PAdic(
                            x.iter().map(|q| PAdic::from_rational(q, p, prec)).collect::<Result<_>>()?,
                        ),
                    },
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn l(&self) -> usize {
        self.entries.len()
    }

    pub fn places(&self) -> Vec<Place> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn entries(&self) -> &[(Place, Component)] {
        &self.entries
    }

    pub fn place_norm(&self, place: Place) -> Result<BigRational> {
        let comp = self
            .entries
            .iter()
            .find(|e| e.0 == place)
            .map(|e| &e.1)
            .ok_or_else(|| Error::InvalidArgument(format!("place {place} not present")))?;
        match comp {
            Component::Real(v) => Ok(arith::sup_abs(v)),
            Component::PAdic(v) => {
                let mut best = BigRational::zero();
                for x in v {
                    let n = x.norm()?;
                    if n > best {
                        best = n;
                    }
                }
                Ok(best)
            }
        }
    }
}

/// `|x|_S`: the maximum over places of the sup norm at that place.
pub fn sadic_norm(x: &SAdicVector) -> Result<BigRational> {
    let mut best = BigRational::zero();
    for pl in x.places() {
        let n = x.place_norm(pl)?;
        if n > best {
            best = n;
        }
    }
    Ok(best)
}

/// `max_i |a_i|^{1/v_i}` for weights summing to the dimension.
pub fn quasinorm_v(a: &[i64], v: &[BigRational]) -> Result<f64> {
    if a.len() != v.len() || a.is_empty() {
        return Err(Error::InvalidArgument("weights and vector differ in length".into()));
    }
    if v.iter().any(|w| !w.is_positive()) {
        return Err(Error::InvalidArgument("weights must be positive".into()));
    }
    let total: BigRational = v.iter().sum();
    if total != arith::int(v.len() as i64) {
        return Err(Error::InvalidArgument("weights must sum to the dimension".into()));
    }
    Ok(a.iter()
        .zip(v)
        .map(|(&ai, w)| (ai.unsigned_abs() as f64).powf(1.0 / arith::to_f64(w)))
        .fold(0.0, f64::max))
}

/// The closed ball `{x : |x_i - c_i|_p <= p^{-k}}` in `Q_p^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PAdicBall {
    pub p: u64,
    #[serde(with = "arith::rational_vec_str")]
    pub center: Vec<BigRational>,
    pub k: i64,
}

impl PAdicBall {
    pub fn new(p: u64, center: Vec<BigRational>, k: i64) -> Result<Self> {
        check_prime(p)?;
        let center = if k >= 0 && center.iter().all(|c| arith::valuation_rat(c, p).map_or(true, |v| v >= 0)) {
            center
                .iter()
                .map(|c| arith::rat_mod_pow(c, p, k as u32).map(BigRational::from_integer))
                .collect::<Result<Vec<_>>>()?
        } else {
            center
        };
        Ok(PAdicBall { p, center, k })
    }

    /// `Z_p^d`.
    pub fn unit(p: u64, d: usize) -> Result<Self> {
        Self::new(p, vec![BigRational::zero(); d], 0)
    }

    pub fn from_integers(p: u64, center: &[i64], k: i64) -> Result<Self> {
        Self::new(p, center.iter().map(|&c| arith::int(c)).collect(), k)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn radius(&self) -> BigRational {
        pow_rat(self.p, -self.k)
    }

    /// Haar measure `p^{-kd}` with `Z_p` of measure one.
    pub fn measure(&self) -> BigRational {
        pow_rat(self.p, -self.k * self.dim() as i64)
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.center).all(|(xi, ci)| {
                arith::valuation_rat(&(xi - ci), self.p).map_or(true, |v| v >= self.k)
            })
    }

    pub fn contains_ball(&self, other: &PAdicBall) -> bool {
        other.k >= self.k && self.contains(&other.center)
    }

    pub fn is_disjoint(&self, other: &PAdicBall) -> bool {
        !(self.contains_ball(other) || other.contains_ball(self))
    }

    /// The `p^d` sub-balls of radius `p^{-(k+1)}`.
    pub fn children(&self) -> Vec<PAdicBall> {
        let d = self.dim();
        let step = pow_rat(self.p, self.k);
        let total = (self.p as usize).pow(d as u32);
        (0..total)
            .map(|mut idx| {
                let center = (0..d)
                    .map(|i| {
                        let digit = (idx % self.p as usize) as i64;
                        idx /= self.p as usize;
                        &self.center[i] + &step * arith::int(digit)
                    })
                    .collect();
                PAdicBall::new(self.p, center, self.k + 1).unwrap()
            })
            .collect()
    }

    /// Integer center coordinates when the ball sits inside `Z_p^d`.
    pub fn integer_center(&self) -> Option<Vec<BigInt>> {
        if self.k < 0 {
            return None;
        }
        self.center.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn from_rational_examples() {
        let a = PAdic::from_rational(&rat(1, 3), 3, 4).unwrap();
        assert_eq!(a.valuation().unwrap(), Some(-1));
        assert_eq!(a.unit().unwrap(), &BigUint::from(1u32));
        let z = PAdic::from_rational(&int(0), 5, 4).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.norm().unwrap(), int(0));
        let t = PAdic::from_int(10, 5, 3).unwrap();
        assert_eq!(t.valuation().unwrap(), Some(1));
        assert_eq!(t.unit().unwrap(), &BigUint::from(2u32));
        assert!(PAdic::from_int(3, 4, 3).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let one = PAdic::from_int(1, 3, 3).unwrap();
        let three = PAdic::from_int(3, 3, 3).unwrap();
        let s = &one + &three;
        assert_eq!(s.valuation().unwrap(), Some(0));
        assert_eq!(s.unit().unwrap(), &BigUint::from(4u32));
        assert_eq!(s.precision(), Some(3));

        let a = PAdic::from_int(3, 3, 5).unwrap();
        let b = PAdic::from_int(9, 3, 5).unwrap();
        assert_eq!((&a * &b).norm().unwrap(), rat(1, 27));

        let x = PAdic::from_int(1, 3, 5).unwrap();
        let y = PAdic::from_int(-1, 3, 5).unwrap();
        let c = &x + &y;
        assert!(!c.is_determinate());
        assert_eq!(c.absolute_precision(), Some(5));
        assert!(matches!(c.norm(), Err(Error::IndeterminateValuation { abs_prec: 5 })));
        assert!(c.inv().is_err());
    }

    #[test]
    fn cancellation_tracks_precision() {
        let a = PAdic::from_int(1 + 9, 3, 4).unwrap();
        let b = PAdic::from_int(-1, 3, 4).unwrap();
        let s = &a + &b;
        assert_eq!(s.valuation().unwrap(), Some(2));
        assert_eq!(s.precision(), Some(2));
        assert_eq!(s.absolute_precision(), Some(4));
    }

    #[test]
    fn inverse_and_division() {
        let a = PAdic::from_rational(&rat(2, 9), 3, 6).unwrap();
        let inv = a.inv().unwrap();
        assert!(inv.agrees_with(&rat(9, 2)));
        let q = PAdic::from_int(5, 3, 6).unwrap().div(&a).unwrap();
        assert!(q.agrees_with(&rat(45, 2)));
        assert_eq!(PAdic::zero(3).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn serde_round_trip() {
        for x in [
            PAdic::from_rational(&rat(-7, 12), 3, 9).unwrap(),
            PAdic::zero(5),
            PAdic::small(7, 4),
        ] {
            let s = serde_json::to_string(&x).unwrap();
            let y: PAdic = serde_json::from_str(&s).unwrap();
            assert_eq!(x, y);
        }
        let r: PAdicRecord = PAdic::from_int(10, 3, 3).unwrap().into();
        assert_eq!(r.digits, vec![1, 0, 1]);
    }

    #[test]
    fn sadic_norm_examples() {
        let three = PAdic::from_int(3, 3, 8).unwrap();
        let x = SAdicVector::new(vec![
            (Place::Infinite, Component::Real(vec![rat(1, 2)])),
            (Place::Finite(3), Component::PAdic(vec![three])),
        ])
        .unwrap();
        assert_eq!(x.l(), 2);
        assert_eq!(sadic_norm(&x).unwrap(), rat(1, 2));

        let y = SAdicVector::diagonal(&[Place::Finite(5)], &[int(25)], 8).unwrap();
        assert_eq!(sadic_norm(&y).unwrap(), rat(1, 25));

        let z = SAdicVector::diagonal(
            &[Place::Infinite, Place::Finite(2), Place::Finite(3)],
            &[int(6)],
            8,
        )
        .unwrap();
        assert_eq!(z.l(), 3);
        assert_eq!(sadic_norm(&z).unwrap(), int(6));

        let bad = SAdicVector::new(vec![(Place::Infinite, Component::PAdic(vec![]))]);
        assert!(bad.is_err());
    }

    #[test]
    fn quasinorm_examples() {
        assert_eq!(quasinorm_v(&[4, 2], &[int(1), int(1)]).unwrap(), 4.0);
        assert!(quasinorm_v(&[4, 2], &[int(2), int(0)]).is_err());
        let q = quasinorm_v(&[8, 2], &[rat(3, 2), rat(1, 2)]).unwrap();
        assert!((q - 4.0).abs() < 1e-12);
        assert!(quasinorm_v(&[1, 1], &[int(1), int(2)]).is_err());
    }

    #[test]
    fn balls() {
        let b = PAdicBall::unit(3, 2).unwrap();
        assert_eq!(b.measure(), int(1));
        let kids = b.children();
        assert_eq!(kids.len(), 9);
        assert!(kids.iter().all(|c| c.measure() == rat(1, 9) && b.contains_ball(c)));
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(kids[i].is_disjoint(&kids[j]), i != j);
            }
        }
        let c = PAdicBall::from_integers(5, &[7], 1).unwrap();
        assert_eq!(c.integer_center().unwrap(), vec![BigInt::from(2)]);
    }
}
