//! Membership predicates for the approximation sets and exhaustive witness search.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::psi::{height, s_norm_vec, ApproxFunction};
use crate::arith::{self, int};
use crate::error::{Error, Result};
use crate::lattice::{smallness_exponent, GammaLattice, IVec, DEFAULT_BUDGET};
use crate::padic::{place_norm, PAdic, Place};
use crate::poly::Poly;
use crate::real::PowProd;

/// Coordinates of a point, one rational vector per place.
pub type SPoint = Vec<Vec<BigRational>>;

/// A map `f` and inhomogeneous term `Θ` over a finite set of places.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSystem {
    pub places: Vec<Place>,
    pub f: Vec<Poly>,
    /// `Θ_ν`, one per place.
    pub theta: Vec<Poly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NonzeroConvention {
    /// `a ∈ Z^n ∖ {0}`.
    #[default]
    Coefficients,
    /// `(a_0, a) ∈ Z^{n+1} ∖ {0}`.
    Full,
}

impl NonzeroConvention {
    pub fn admits(self, a0: i128, a: &[i128]) -> bool {
        match self {
            NonzeroConvention::Coefficients => a.iter().any(|&x| x != 0),
            NonzeroConvention::Full => a0 != 0 || a.iter().any(|&x| x != 0),
        }
    }
}

/// A norm that is rational or the square root of a rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormValue {
    Exact(BigRational),
    SqrtOf(BigRational),
}

impl NormValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(q) => arith::to_f64(q),
            NormValue::SqrtOf(q) => arith::to_f64(q).sqrt(),
        }
    }

    pub fn cmp_pow(&self, bound: &PowProd) -> Ordering {
        match self {
            NormValue::Exact(q) => bound.cmp_rational(q).reverse(),
            NormValue::SqrtOf(q) => bound.powr(&int(2)).cmp_rational(q).reverse(),
        }
    }
}

/// Euclidean norm at the real place, sup norm at a finite place.
pub fn vector_norm(g: &[BigRational], place: Place) -> NormValue {
    match place {
        Place::Infinite => NormValue::SqrtOf(g.iter().map(|x| x * x).sum()),
        Place::Finite(p) => NormValue::Exact(arith::sup_p_norm(g, p)),
    }
}

impl SSystem {
    pub fn new(places: Vec<Place>, f: Vec<Poly>, theta: Option<Vec<Poly>>) -> Result<Self> {
        if places.is_empty() {
            return Err(Error::InvalidArgument("S must be nonempty".into()));
        }
        let mut sorted = places.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != places.len() {
            return Err(Error::InvalidArgument("places must be distinct".into()));
        }
        for pl in &places {
            if let Place::Finite(p) = pl {
                arith::check_prime(*p)?;
            }
        }
        let m = f.first().map(|g| g.nvars()).ok_or_else(|| Error::InvalidArgument("f is empty".into()))?;
        if f.iter().any(|g| g.nvars() != m) {
            return Err(Error::InvalidArgument("coordinate functions differ in arity".into()));
        }
        let theta = theta.unwrap_or_else(|| vec![Poly::zero(m); places.len()]);
        if theta.len() != places.len() || theta.iter().any(|t| t.nvars() != m) {
            return Err(Error::InvalidArgument("one Θ per place with matching arity".into()));
        }
        Ok(SSystem { places: sorted, f, theta })
    }

    pub fn l(&self) -> usize {
        self.places.len()
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn m(&self) -> usize {
        self.f[0].nvars()
    }

    pub fn has_infinity(&self) -> bool {
        self.places.contains(&Place::Infinite)
    }

    fn check_point(&self, x: &SPoint) -> Result<()> {
        if x.len() != self.l() || x.iter().any(|c| c.len() != self.m()) {
            return Err(Error::InvalidArgument("point does not match the system".into()));
        }
        Ok(())
    }

    /// `a_0 + a·f(x_ν) (+ Θ_ν(x_ν))` at each place.
    pub fn values(&self, x: &SPoint, a0: i128, a: &[i128], with_theta: bool) -> Result<Vec<BigRational>> {
        self.check_point(x)?;
        if a.len() != self.n() {
            return Err(Error::InvalidArgument("coefficient vector has wrong length".into()));
        }
        Ok(x.iter()
            .enumerate()
            .map(|(k, xv)| {
                let mut v = BigRational::from_integer(BigInt::from(a0));
                for (ai, fi) in a.iter().zip(&self.f) {
                    if *ai != 0 {
                        v += fi.eval(xv) * BigRational::from_integer(BigInt::from(*ai));
                    }
                }
                if with_theta {
                    v += self.theta[k].eval(xv);
                }
                v
            })
            .collect())
    }

    /// `max_ν |v_ν|_ν`.
    pub fn s_norm(&self, values: &[BigRational]) -> BigRational {
        values
            .iter()
            .zip(&self.places)
            .map(|(v, &pl)| place_norm(v, pl))
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// `∇(a·f_ν (+ Θ_ν))(x_ν)` at the place with index `nu`.
    pub fn gradient(&self, x: &SPoint, a: &[i128], nu: usize, with_theta: bool) -> Result<Vec<BigRational>> {
        self.check_point(x)?;
        let xv = &x[nu];
        Ok((0..self.m())
            .map(|i| {
                let mut g = BigRational::zero();
                for (ai, fi) in a.iter().zip(&self.f) {
                    if *ai != 0 {
                        g += fi.partial(i).eval(xv) * BigRational::from_integer(BigInt::from(*ai));
                    }
                }
                if with_theta {
                    g += self.theta[nu].partial(i).eval(xv);
                }
                g
            })
            .collect())
    }

    pub fn place_index(&self, place: Place) -> Option<usize> {
        self.places.iter().position(|&p| p == place)
    }
}

/// Tests `|a_0 + a·f(x) + Θ(x)|_S^l ≤ Ψ(ã)` (or `Ψ(a)` when `∞ ∈ S`).
pub fn is_approximable(sys: &SSystem, x: &SPoint, a0: i128, a: &[i128], psi: &ApproxFunction) -> Result<bool> {
    let vals = sys.values(x, a0, a, true)?;
    let lhs = num_traits::pow(sys.s_norm(&vals), sys.l());
    let bound = if sys.has_infinity() {
        psi.eval(a, &sys.places)?
    } else {
        let mut full = vec![a0];
        full.extend_from_slice(a);
        psi.eval(&full, &sys.places)?
    };
    Ok(bound.cmp_with(&lhs)? != Ordering::Greater)
}

/// The same test for a single `p`-adic place with a finite-precision point.
pub fn is_approximable_padic(
    x: &[PAdic],
    f: &[Poly],
    theta: Option<&Poly>,
    a0: i128,
    a: &[i128],
    psi: &ApproxFunction,
) -> Result<bool> {
    let p = x.first().map(|v| v.prime()).ok_or_else(|| Error::InvalidArgument("empty point".into()))?;
    let prec = x.iter().filter_map(|v| v.precision()).min().unwrap_or(crate::padic::DEFAULT_PRECISION);
    let mut poly = Poly::constant(x.len(), BigRational::from_integer(BigInt::from(a0)));
    for (ai, fi) in a.iter().zip(f) {
        poly = poly.add(&fi.scale(&BigRational::from_integer(BigInt::from(*ai))));
    }
    if let Some(t) = theta {
        poly = poly.add(t);
    }
    let val = poly.eval_padic(x, p, prec)?;
    let norm = val.norm()?;
    let mut full = vec![a0];
    full.extend_from_slice(a);
    Ok(psi.eval(&full, &[Place::Finite(p)])?.cmp_with(&norm)? != Ordering::Greater)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub a0: i128,
    pub a: IVec,
    /// `|a_0 + a·f(x) + Θ(x)|_S`.
    #[serde(with = "arith::rational_str")]
    pub value: BigRational,
    /// `|·|_ν` at each place.
    #[serde(with = "arith::rational_vec_str")]
    pub profile: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionList {
    pub height_bound: i128,
    pub solutions: Vec<Witness>,
    pub complete: bool,
    pub examined: u64,
}

fn witness(sys: &SSystem, x: &SPoint, a0: i128, a: &[i128]) -> Result<Witness> {
    let vals = sys.values(x, a0, a, true)?;
    let profile: Vec<BigRational> = vals.iter().zip(&sys.places).map(|(v, &pl)| place_norm(v, pl)).collect();
    let value = profile.iter().max().cloned().unwrap_or_else(BigRational::zero);
    Ok(Witness { a0, a: a.to_vec(), value, profile })
}

fn odometer(n: usize, t: i128, mut visit: impl FnMut(&[i128]) -> bool) {
    let mut a = vec![-t; n];
    loop {
        if !visit(&a) {
            return;
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if a[i] < t {
                a[i] += 1;
                break;
            }
            a[i] = -t;
            i += 1;
        }
    }
}

/// Smallest `v` with `p^{-v} ≤ ψ(h)`, or `None` when `ψ(h) = 0`.
pub(crate) fn needed_valuation(psi: &ApproxFunction, h: i128, p: u64) -> Result<Option<i64>> {
    let v = psi.eval_height(h)?;
    let mut k = 0i64;
    loop {
        if v.cmp_with(&arith::pow_rat(p, -k))? != Ordering::Greater {
            return Ok(Some(k));
        }
        k += 1;
        if k > 4000 {
            return Ok(None);
        }
    }
}

/// All `(a_0, a)` with height `≤ T` satisfying the approximation inequality at `x`.
pub fn solution_search(
    sys: &SSystem,
    x: &SPoint,
    psi: &ApproxFunction,
    t: i128,
    conv: NonzeroConvention,
    budget: u64,
) -> Result<SolutionList> {
    if t < 1 {
        return Err(Error::InvalidArgument("height bound must be at least 1".into()));
    }
    psi.validate()?;
    sys.check_point(x)?;
    if psi == &ApproxFunction::Zero {
        return Ok(SolutionList { height_bound: t, solutions: vec![], complete: true, examined: 0 });
    }
    if let [Place::Finite(p)] = sys.places[..] {
        if psi.is_single_variable() {
            if let Some(r) = search_single_prime(sys, x, psi, t, conv, budget, p)? {
                return Ok(r);
            }
        }
    }
    search_general(sys, x, psi, t, conv, budget)
}

fn search_single_prime(
    sys: &SSystem,
    x: &SPoint,
    psi: &ApproxFunction,
    t: i128,
    conv: NonzeroConvention,
    budget: u64,
    p: u64,
) -> Result<Option<SolutionList>> {
    let mut need = Vec::with_capacity(t as usize + 1);
    need.push(0);
    for h in 1..=t {
        match needed_valuation(psi, h, p)? {
            Some(v) => need.push(v),
            None => return Ok(None),
        }
    }
    let kmax = *need.iter().max().unwrap() + 1;
    let cap = crate::measure::max_exponent(p) as i64;
    if kmax > cap {
        return Ok(None);
    }
    let k = kmax as u32;
    let m = arith::pow_int(p, k).to_i128().unwrap();
    let xs = &x[0];
    let residue = |q: &BigRational| -> Result<i128> {
        Ok(arith::rat_mod_pow(q, p, k)?.to_i128().unwrap())
    };
    let ys: Vec<i128> = sys.f.iter().map(|fi| residue(&fi.eval(xs))).collect::<Result<_>>()?;
    let th = residue(&sys.theta[0].eval(xs))?;
    let n = sys.n();
    let total = ((2 * t + 1) as f64).powi(n as i32 + 1);
    let mut outer: Vec<i128> = (-t..=t).collect();
    let mut complete = true;
    if total > budget as f64 {
        let per = ((2 * t + 1) as f64).powi(n as i32);
        let keep = ((budget as f64 / per).floor() as usize).max(1);
        outer.truncate(keep);
        complete = false;
    }
    let block = |first: i128| -> Vec<(i128, IVec)> {
        let mut out = Vec::new();
        odometer(n.saturating_sub(1), t, |rest| {
            let mut a = Vec::with_capacity(n);
            a.push(first);
            a.extend_from_slice(rest);
            let base = a.iter().zip(&ys).fold(th, |acc, (ai, yi)| (acc + ai * yi).rem_euclid(m));
            let ha = height(&a);
            for a0 in -t..=t {
                if !conv.admits(a0, &a) {
                    continue;
                }
                let h = ha.max(a0.abs());
                let r = (base + a0).rem_euclid(m);
                let ok = if h == 0 {
                    false
                } else if r == 0 {
                    true
                } else {
                    let mut v = 0i64;
                    let mut rr = r;
                    while rr % p as i128 == 0 {
                        rr /= p as i128;
                        v += 1;
                    }
                    v >= need[h as usize]
                };
                if ok {
                    out.push((a0, a.clone()));
                }
            }
            true
        });
        out
    };
    let hits: Vec<(i128, IVec)> = if n == 0 {
        vec![]
    } else {
        outer.par_iter().map(|&f0| block(f0)).flatten().collect()
    };
    let mut solutions = Vec::with_capacity(hits.len());
    for (a0, a) in hits {
        let w = witness(sys, x, a0, &a)?;
        let h = height(&a).max(a0.abs());
        if psi.eval_height(h)?.cmp_with(&w.value)? != Ordering::Greater {
            solutions.push(w);
        } else {
            return Err(Error::Internal("residue filter admitted a non-solution".into()));
        }
    }
    sort_witnesses(&mut solutions);
    let examined = (outer.len() as f64 * ((2 * t + 1) as f64).powi(n as i32)) as u64;
    Ok(Some(SolutionList { height_bound: t, solutions, complete, examined }))
}

fn sort_witnesses(w: &mut [Witness]) {
    w.sort_by(|x, y| (height(&x.a).max(x.a0.abs()), &x.a, x.a0).cmp(&(height(&y.a).max(y.a0.abs()), &y.a, y.a0)));
}

fn search_general(
    sys: &SSystem,
    x: &SPoint,
    psi: &ApproxFunction,
    t: i128,
    conv: NonzeroConvention,
    budget: u64,
) -> Result<SolutionList> {
    let n = sys.n();
    let inf = sys.place_index(Place::Infinite);
    let fvals: Vec<Vec<BigRational>> = x.iter().map(|xv| sys.f.iter().map(|fi| fi.eval(xv)).collect()).collect();
    let tvals: Vec<BigRational> = x.iter().zip(&sys.theta).map(|(xv, th)| th.eval(xv)).collect();
    let l = sys.l();
    let check = |a0: i128, a: &[i128]| -> Result<Option<Witness>> {
        let profile: Vec<BigRational> = (0..l)
            .map(|k| {
                let mut v = BigRational::from_integer(BigInt::from(a0)) + &tvals[k];
                for (ai, fv) in a.iter().zip(&fvals[k]) {
                    if *ai != 0 {
                        v += fv * BigRational::from_integer(BigInt::from(*ai));
                    }
                }
                place_norm(&v, sys.places[k])
            })
            .collect();
        let value = profile.iter().max().cloned().unwrap();
        let lhs = num_traits::pow(value.clone(), l);
        let arg: Vec<i128> = if inf.is_some() { a.to_vec() } else { std::iter::once(a0).chain(a.iter().copied()).collect() };
        if height(&arg) == 0 && !matches!(psi, ApproxFunction::Psi0 | ApproxFunction::Product { .. } | ApproxFunction::Constant { .. }) {
            return Ok(None);
        }
        let bound = psi.eval(&arg, &sys.places)?;
        if bound.cmp_with(&lhs)? != Ordering::Greater {
            Ok(Some(Witness { a0, a: a.to_vec(), value, profile }))
        } else {
            Ok(None)
        }
    };
    let a0_range = |a: &[i128]| -> Result<(i128, i128)> {
        match inf {
            None => Ok((-t, t)),
            Some(k) => {
                let mut s = tvals[k].clone();
                for (ai, fv) in a.iter().zip(&fvals[k]) {
                    s += fv * BigRational::from_integer(BigInt::from(*ai));
                }
                let psi_f = if height(a) == 0 && !matches!(psi, ApproxFunction::Constant { .. }) {
                    1.0
                } else {
                    psi.eval(a, &sys.places)?.to_f64()
                };
                let b = if psi_f <= 1.0 { int(1) } else { int(psi_f.ceil() as i64 + 1) };
                let lo = (-&s - &b).ceil().to_integer().to_i128().unwrap();
                let hi = (-&s + &b).floor().to_integer().to_i128().unwrap();
                Ok((lo, hi))
            }
        }
    };
    let mut outer: Vec<i128> = (-t..=t).collect();
    let per = ((2 * t + 1) as f64).powi(n as i32 - 1) * if inf.is_some() { 3.0 } else { (2 * t + 1) as f64 };
    let mut complete = true;
    if per * outer.len() as f64 > budget as f64 {
        outer.truncate(((budget as f64 / per).floor() as usize).max(1));
        complete = false;
    }
    let results: Vec<Result<Vec<Witness>>> = outer
        .par_iter()
        .map(|&first| {
            let mut out = Vec::new();
            let mut err = None;
            odometer(n - 1, t, |rest| {
                let mut a = vec![first];
                a.extend_from_slice(rest);
                let (lo, hi) = match a0_range(&a) {
                    Ok(r) => r,
                    Err(e) => {
                        err = Some(e);
                        return false;
                    }
                };
                for a0 in lo..=hi {
                    if !conv.admits(a0, &a) {
                        continue;
                    }
                    match check(a0, &a) {
                        Ok(Some(w)) => out.push(w),
                        Ok(None) => {}
                        Err(e) => {
                            err = Some(e);
                            return false;
                        }
                    }
                }
                true
            });
            match err {
                Some(e) => Err(e),
                None => Ok(out),
            }
        })
        .collect();
    let mut solutions = Vec::new();
    for r in results {
        solutions.extend(r?);
    }
    sort_witnesses(&mut solutions);
    let examined = (per * outer.len() as f64) as u64;
    Ok(SolutionList { height_bound: t, solutions, complete, examined })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhiMethod {
    Exhaustive,
    Lattice,
    Both,
    /// Both when the exhaustive box is small, the lattice otherwise.
    #[default]
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiVerdict {
    pub member: bool,
    pub witness: Option<IVec>,
    /// Exponent `j` with `|L|_p < δQ^{-(n+1)}` iff `p^j | L`.
    pub j: u32,
    pub methods: Vec<PhiMethod>,
}

const EXHAUSTIVE_AUTO_LIMIT: f64 = 2e6;

/// Whether some nonzero `(a_0, a)` with `‖·‖ ≤ Q` has `|a_0 + a·f(x)|_p < δQ^{-(n+1)}`.
pub fn phi_membership(
    x: &[BigRational],
    f: &[Poly],
    p: u64,
    q: &BigRational,
    delta: &BigRational,
    method: PhiMethod,
) -> Result<PhiVerdict> {
    if q <= &BigRational::one() {
        return Err(Error::Precondition("Q must exceed 1".into()));
    }
    if !delta.is_positive() || delta >= &BigRational::one() {
        return Err(Error::Precondition("δ must lie in (0,1)".into()));
    }
    let n = f.len();
    let j = smallness_exponent(p, q, delta, n);
    if j < 1 || j > 60 {
        return Err(Error::BudgetExceeded(format!("smallness exponent {j} out of range")));
    }
    let j = j as u32;
    let ys: Vec<BigRational> = f.iter().map(|fi| fi.eval(x)).collect();
    if ys.iter().any(|y| arith::valuation_rat(y, p).is_some_and(|v| v < 0)) {
        return Err(Error::Precondition("f(x) must be p-integral".into()));
    }
    let qf = q.floor().to_integer().to_i128().ok_or_else(|| Error::BudgetExceeded("Q too large".into()))?;
    let box_count = ((2 * qf + 1) as f64).powi(n as i32 + 1);
    let methods = match method {
        PhiMethod::Auto if box_count <= EXHAUSTIVE_AUTO_LIMIT => vec![PhiMethod::Exhaustive, PhiMethod::Lattice],
        PhiMethod::Auto => vec![PhiMethod::Lattice],
        PhiMethod::Both => vec![PhiMethod::Exhaustive, PhiMethod::Lattice],
        m => vec![m],
    };
    let lat = GammaLattice::from_rationals(&ys, p, j, false)?;
    let m = lat.modulus;
    let mut verdicts = Vec::new();
    for meth in &methods {
        let w = match meth {
            PhiMethod::Exhaustive => {
                if box_count > DEFAULT_BUDGET as f64 {
                    return Err(Error::BudgetExceeded(format!("{box_count} vectors in the height box")));
                }
                let mut found = None;
                odometer(n, qf, |a| {
                    let base = a.iter().zip(&lat.y_residues).fold(0i128, |acc, (ai, yi)| (acc + ai * yi).rem_euclid(m));
                    let nonzero_a = a.iter().any(|&v| v != 0);
                    for a0 in -qf..=qf {
                        if (a0 != 0 || nonzero_a) && (base + a0).rem_euclid(m) == 0 {
                            let mut v = vec![a0];
                            v.extend_from_slice(a);
                            found = Some(v);
                            return false;
                        }
                    }
                    true
                });
                found
            }
            _ => lat.short_vector_within(qf, DEFAULT_BUDGET)?,
        };
        if let Some(v) = &w {
            let l: BigRational = ys
                .iter()
                .zip(&v[1..])
                .fold(BigRational::from_integer(BigInt::from(v[0])), |acc, (y, a)| acc + y * BigRational::from_integer(BigInt::from(*a)));
            let bound = delta / num_traits::pow(q.clone(), n + 1);
            if !(arith::p_norm(&l, p) < bound && height(v) <= qf) {
                return Err(Error::Internal("Φ witness fails its own inequality".into()));
            }
        }
        verdicts.push(w);
    }
    let member = verdicts[0].is_some();
    if verdicts.iter().any(|w| w.is_some() != member) {
        return Err(Error::Internal("exhaustive and lattice Φ verdicts disagree".into()));
    }
    Ok(PhiVerdict { member, witness: verdicts.into_iter().flatten().next(), j, methods })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceSplit {
    pub place: Place,
    pub gradient_norm: f64,
    pub threshold: PowProd,
    /// `‖∇‖_ν > ‖a‖_S^{φ(ν)}`.
    pub large: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeSplit {
    #[serde(with = "arith::rational_str")]
    pub norm_a: BigRational,
    pub places: Vec<PlaceSplit>,
    pub large: bool,
    pub small_at: Vec<Place>,
}

/// Exponent `φ(ν)`: `1 − ε` at the real place, `−ε` at a prime.
pub fn phi_exponent(place: Place, eps: &BigRational) -> BigRational {
    match place {
        Place::Infinite => BigRational::one() - eps,
        Place::Finite(_) => -eps.clone(),
    }
}

/// Large-derivative versus small-derivative classification of a witness; equality counts as small.
pub fn derivative_split(sys: &SSystem, x: &SPoint, a: &[i128], eps: &BigRational) -> Result<DerivativeSplit> {
    let norm_a = s_norm_vec(a, &sys.places);
    if norm_a.is_zero() {
        return Err(Error::Precondition("a must be nonzero".into()));
    }
    let mut places = Vec::new();
    for (k, &pl) in sys.places.iter().enumerate() {
        let g = sys.gradient(x, a, k, true)?;
        let nv = vector_norm(&g, pl);
        let threshold = PowProd::power(norm_a.clone(), phi_exponent(pl, eps));
        let large = nv.cmp_pow(&threshold) == Ordering::Greater;
        places.push(PlaceSplit { place: pl, gradient_norm: nv.to_f64(), threshold, large });
    }
    let small_at: Vec<Place> = places.iter().filter(|s| !s.large).map(|s| s.place).collect();
    Ok(DerivativeSplit { norm_a, large: small_at.is_empty(), places, small_at })
}
