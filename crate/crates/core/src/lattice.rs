//! The lattices of integer vectors making a linear form in `y` p-adically small:
//! explicit bases, membership, box enumeration and sup-norm successive minima.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, pow_int};
use crate::error::{Error, Result};
use crate::maps::rational_determinant;
use crate::padic::PAdic;

/// Integer vectors are stored with 128-bit coordinates.
pub type IVec = Vec<i128>;

/// Lattice with basis columns `(M,0,…,0)` and `(c_i, 0,…, d_i,…,0)`.
///
/// With `divisible = true` this is `{q : |q_0 + Σ q_i y_i|_p ≤ p^{-j}, p | q_i}` of covolume
/// `p^{j+n}` (with `c_i ≡ p y_i`, `d_i = −p`); otherwise it is the plain congruence lattice
/// `{q : q_0 + Σ q_i y_i ≡ 0 mod p^j}` of covolume `p^j` (with `c_i ≡ −y_i`, `d_i = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaLattice {
    pub p: u64,
    pub j: u32,
    pub n: usize,
    pub divisible: bool,
    /// `y_i mod p^j`.
    pub y_residues: Vec<i128>,
    pub modulus: i128,
    pub first_row: Vec<i128>,
    pub diagonal: Vec<i128>,
    pub covolume: i128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MinimaStrategy {
    /// Residue-class enumeration of growing boxes.
    #[default]
    Plain,
    /// LLL preprocessing then Euclidean-ball enumeration filtered by the sup norm.
    Reduced,
    /// Plain when the box enumeration is small, Reduced otherwise.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimaResult {
    #[serde(with = "arith::rational_str")]
    pub q: BigRational,
    /// Sup-norm successive minima `μ_k`; `λ_k = μ_k / Q`.
    pub mu: Vec<i128>,
    #[serde(with = "arith::rational_vec_str")]
    pub lambdas: Vec<BigRational>,
    pub witnesses: Vec<IVec>,
    pub complete: bool,
    pub visited: u64,
    pub strategy: MinimaStrategy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinkowskiReport {
    pub covolume: i128,
    #[serde(with = "arith::rational_str")]
    pub q: BigRational,
    /// `λ_1^{n+1} (2Q)^{n+1}`.
    #[serde(with = "arith::rational_str")]
    pub first_min_lhs: BigRational,
    /// `λ_1⋯λ_{n+1} (2Q)^{n+1}`.
    #[serde(with = "arith::rational_str")]
    pub product_lhs: BigRational,
    /// `2^{n+1} covol`.
    #[serde(with = "arith::rational_str")]
    pub rhs: BigRational,
    pub first_min_holds: bool,
    pub product_holds: bool,
    pub lambda1_exceeds_one: bool,
    /// `Some(ok)` when `λ_1 > 1` and `covol ≤ Q^{n+1} p^{n+2}/δ`, checking `λ_{n+1} ≤ p^{n+2}/δ`.
    pub last_min_bound: Option<bool>,
}

pub const DEFAULT_BUDGET: u64 = 200_000_000;

fn residues_of(y: &[PAdic], p: u64, j: u32) -> Result<Vec<i128>> {
    let m = pow_int(p, j);
    y.iter()
        .map(|yi| {
            if yi.prime() != p {
                return Err(Error::PrimeMismatch(p, yi.prime()));
            }
            if let Some(v) = yi.valuation_lower_bound() {
                if yi.is_determinate() && v < 0 {
                    return Err(Error::Precondition("|y_i|_p must be at most 1".into()));
                }
            }
            if let Some(a) = yi.absolute_precision() {
                if a < j as i64 + 1 {
                    return Err(Error::InsufficientPrecision { needed: j as i64 + 1, available: a });
                }
            }
            let r = yi.to_rational().unwrap_or_else(BigRational::zero);
            Ok(arith::rat_mod_pow(&r, p, j)?.mod_floor(&m).to_i128().expect("modulus fits"))
        })
        .collect()
}

impl GammaLattice {
    fn check(p: u64, j: u32) -> Result<i128> {
        arith::check_prime(p)?;
        if j == 0 {
            return Err(Error::Precondition("j must be at least 1".into()));
        }
        arith::checked_pow(p, j)
            .filter(|&m| m < 1 << 62)
            .map(|m| m as i128)
            .ok_or_else(|| Error::BudgetExceeded(format!("{p}^{j} exceeds the 62-bit budget")))
    }

    /// The lattice with divisibility side conditions, covolume `p^{j+n}`.
    pub fn build_gamma(y: &[PAdic], j: u32) -> Result<Self> {
        let p = y.first().map(|v| v.prime()).ok_or_else(|| Error::InvalidArgument("empty y".into()))?;
        Self::check(p, j)?;
        Self::from_residues(p, j, residues_of(y, p, j)?, true)
    }

    /// The plain congruence lattice, covolume `p^j`.
    pub fn build_congruence(y: &[PAdic], j: u32) -> Result<Self> {
        let p = y.first().map(|v| v.prime()).ok_or_else(|| Error::InvalidArgument("empty y".into()))?;
        Self::check(p, j)?;
        Self::from_residues(p, j, residues_of(y, p, j)?, false)
    }

    /// Either lattice from exact `p`-integral rationals.
    pub fn from_rationals(y: &[BigRational], p: u64, j: u32, divisible: bool) -> Result<Self> {
        let m = Self::check(p, j)?;
        if y.is_empty() {
            return Err(Error::InvalidArgument("empty y".into()));
        }
        let ys = y
            .iter()
            .map(|q| {
                if arith::valuation_rat(q, p).is_some_and(|v| v < 0) {
                    return Err(Error::Precondition("|y_i|_p must be at most 1".into()));
                }
                Ok(arith::rat_mod_pow(q, p, j)?.to_i128().expect("residue fits").rem_euclid(m))
            })
            .collect::<Result<_>>()?;
        Self::from_residues(p, j, ys, divisible)
    }

    /// Builds from residues `y_i mod p^j`.
    pub fn from_residues(p: u64, j: u32, ys: Vec<i128>, divisible: bool) -> Result<Self> {
        let m = Self::check(p, j)?;
        let n = ys.len();
        let (first_row, diagonal) = if divisible {
            (ys.iter().map(|&r| (r * p as i128).rem_euclid(m)).collect(), vec![-(p as i128); n])
        } else {
            (ys.iter().map(|&r| (-r).rem_euclid(m)).collect(), vec![1; n])
        };
        Ok(Self::assemble(p, j, divisible, ys, m, first_row, diagonal))
    }

    fn assemble(p: u64, j: u32, divisible: bool, ys: Vec<i128>, m: i128, first_row: Vec<i128>, diagonal: Vec<i128>) -> Self {
        let n = ys.len();
        let covolume = diagonal.iter().fold(m, |acc, d| acc * d.abs());
        GammaLattice { p, j, n, divisible, y_residues: ys, modulus: m, first_row, diagonal, covolume }
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Basis columns.
    pub fn basis(&self) -> Vec<IVec> {
        let d = self.dim();
        let mut cols = Vec::with_capacity(d);
        let mut b0 = vec![0; d];
        b0[0] = self.modulus;
        cols.push(b0);
        for i in 0..self.n {
            let mut b = vec![0; d];
            b[0] = self.first_row[i];
            b[i + 1] = self.diagonal[i];
            cols.push(b);
        }
        cols
    }

    /// Exact `|det(basis)|`.
    pub fn basis_determinant(&self) -> BigInt {
        let cols = self.basis();
        let d = self.dim();
        let rows: Vec<Vec<BigRational>> = (0..d)
            .map(|r| (0..d).map(|c| BigRational::from_integer(BigInt::from(cols[c][r]))).collect())
            .collect();
        rational_determinant(&rows).to_integer().abs()
    }

    /// Integer coefficients `s` with `basis·s = q`, or `None` when `q ∉ Γ`.
    pub fn membership(&self, q: &[i128]) -> Option<IVec> {
        if q.len() != self.dim() {
            return None;
        }
        let mut s = vec![0i128; self.dim()];
        let mut acc = q[0];
        for i in 0..self.n {
            let d = self.diagonal[i];
            if q[i + 1] % d != 0 {
                return None;
            }
            s[i + 1] = q[i + 1] / d;
            acc -= self.first_row[i] * s[i + 1];
        }
        if acc % self.modulus != 0 {
            return None;
        }
        s[0] = acc / self.modulus;
        Some(s)
    }

    /// All lattice vectors in the box `lo ≤ q ≤ hi`, sorted.
    pub fn enumerate_box(&self, lo: &[i128], hi: &[i128], budget: u64) -> Result<Vec<IVec>> {
        let d = self.dim();
        if lo.len() != d || hi.len() != d {
            return Err(Error::InvalidArgument("box has wrong dimension".into()));
        }
        let ranges: Vec<(i128, i128)> = (0..self.n)
            .map(|i| {
                let dd = self.diagonal[i];
                let (a, b) = if dd > 0 { (lo[i + 1], hi[i + 1]) } else { (-hi[i + 1], -lo[i + 1]) };
                let ad = dd.abs();
                (cdiv(a, ad), fdiv(b, ad))
            })
            .collect();
        let count: f64 = ranges.iter().map(|(a, b)| (b - a + 1).max(0) as f64).product();
        if count > budget as f64 {
            return Err(Error::BudgetExceeded(format!("{count} residue classes in box")));
        }
        let mut out = Vec::new();
        self.for_each_s(&ranges, |s, r| {
            let m = self.modulus;
            let k_lo = cdiv(lo[0] - r, m);
            let k_hi = fdiv(hi[0] - r, m);
            for k in k_lo..=k_hi {
                let mut v = Vec::with_capacity(d);
                v.push(r + k * m);
                v.extend(s.iter().zip(&self.diagonal).map(|(si, di)| si * di));
                out.push(v);
            }
        });
        out.sort();
        Ok(out)
    }

    /// Calls `f(s, r)` for every `s` in the ranges, with `r = Σ c_i s_i mod M` in `[0, M)`.
    fn for_each_s(&self, ranges: &[(i128, i128)], mut f: impl FnMut(&[i128], i128)) {
        if ranges.iter().any(|(a, b)| a > b) {
            return;
        }
        let m = self.modulus;
        let mut s: Vec<i128> = ranges.iter().map(|r| r.0).collect();
        let mut r = s
            .iter()
            .zip(&self.first_row)
            .fold(0i128, |acc, (si, ci)| (acc + si * ci).rem_euclid(m));
        loop {
            f(&s, r);
            let mut i = 0;
            loop {
                if i == s.len() {
                    return;
                }
                if s[i] < ranges[i].1 {
                    s[i] += 1;
                    r = (r + self.first_row[i]).rem_euclid(m);
                    break;
                }
                let span = ranges[i].1 - ranges[i].0;
                r = (r - span * self.first_row[i]).rem_euclid(m);
                s[i] = ranges[i].0;
                i += 1;
            }
        }
    }

    fn sym_ranges(&self, radius: i128) -> Vec<(i128, i128)> {
        self.diagonal.iter().map(|d| {
            let k = radius / d.abs();
            (-k, k)
        }).collect()
    }

    /// Nonzero lattice vectors with `‖v‖_∞ ≤ radius` by residue-class enumeration.
    fn shell_plain(&self, radius: i128, budget: u64) -> Result<(Vec<IVec>, u64)> {
        let ranges = self.sym_ranges(radius);
        let count: f64 = ranges.iter().map(|(a, b)| (b - a + 1) as f64).product();
        if count > budget as f64 {
            return Err(Error::BudgetExceeded(format!("{count} residue classes at radius {radius}")));
        }
        let m = self.modulus;
        let d = self.dim();
        let lead = ranges.first().copied();
        let rest = ranges.get(1..).map(|r| r.to_vec()).unwrap_or_default();
        let shard = |s1: Option<i128>| -> Vec<IVec> {
            let mut out = Vec::new();
            let (sub, offset_c) = match s1 {
                Some(v) => (
                    GammaLattice { first_row: self.first_row[1..].to_vec(), diagonal: self.diagonal[1..].to_vec(), ..self.clone() },
                    (v * self.first_row[0]).rem_euclid(m),
                ),
                None => (self.clone(), 0),
            };
            sub.for_each_s(&rest, |s, r0| {
                let r = (r0 + offset_c).rem_euclid(m);
                let k_lo = cdiv(-radius - r, m);
                let k_hi = fdiv(radius - r, m);
                for k in k_lo..=k_hi {
                    let q0 = r + k * m;
                    if q0 == 0 && s1.map_or(true, |v| v == 0) && s.iter().all(|&x| x == 0) {
                        continue;
                    }
                    let mut v = Vec::with_capacity(d);
                    v.push(q0);
                    if let Some(v1) = s1 {
                        v.push(v1 * self.diagonal[0]);
                    }
                    v.extend(s.iter().zip(&sub.diagonal).map(|(si, di)| si * di));
                    out.push(v);
                }
            });
            out
        };
        let vecs: Vec<IVec> = match lead {
            Some((a, b)) => (a..=b).into_par_iter().map(|s1| shard(Some(s1))).flatten().collect(),
            None => shard(None),
        };
        Ok((vecs, count as u64))
    }

    /// Nonzero lattice vectors with `‖v‖_∞ ≤ radius` via an LLL-reduced basis.
    fn shell_reduced(&self, reduced: &[IVec], radius: i128, budget: u64) -> Result<(Vec<IVec>, u64)> {
        let d = self.dim() as f64;
        let rho2 = d * (radius as f64) * (radius as f64);
        let mut out = Vec::new();
        let mut visited = 0u64;
        let mut over = false;
        fincke_pohst(reduced, rho2 * (1.0 + 1e-9) + 1e-6, &mut |v: &IVec| {
            visited += 1;
            if visited > budget {
                over = true;
                return false;
            }
            if v.iter().all(|&x| x.abs() <= radius) && v.iter().any(|&x| x != 0) {
                out.push(v.clone());
            }
            true
        });
        if over {
            return Err(Error::BudgetExceeded(format!("ball enumeration at radius {radius}")));
        }
        Ok((out, visited))
    }

    fn plain_cost(&self, radius: i128) -> f64 {
        self.sym_ranges(radius).iter().map(|(a, b)| (b - a + 1) as f64).product()
    }

    /// Sup-norm successive minima with respect to `K = [−Q, Q]^{n+1}`.
    pub fn successive_minima(&self, q: &BigRational, strategy: MinimaStrategy, budget: u64) -> Result<MinimaResult> {
        if !q.is_positive() {
            return Err(Error::InvalidArgument("Q must be positive".into()));
        }
        let d = self.dim();
        let start = (self.covolume as f64).powf(1.0 / d as f64).ceil() as i128;
        let mut radius = start.max(1);
        let mut strat = strategy;
        if strat == MinimaStrategy::Auto {
            strat = if self.plain_cost(radius * 2) <= 2e6 { MinimaStrategy::Plain } else { MinimaStrategy::Reduced };
        }
        let reduced = if strat == MinimaStrategy::Reduced {
            let mut b = self.basis();
            lll(&mut b, 0.99);
            Some(b)
        } else {
            None
        };
        let mut visited = 0u64;
        loop {
            let res = match &reduced {
                Some(b) => self.shell_reduced(b, radius, budget.saturating_sub(visited)),
                None => self.shell_plain(radius, budget.saturating_sub(visited)),
            };
            let (mut vecs, v) = match res {
                Ok(x) => x,
                Err(Error::BudgetExceeded(_)) => {
                    return Ok(MinimaResult {
                        q: q.clone(),
                        mu: vec![],
                        lambdas: vec![],
                        witnesses: vec![],
                        complete: false,
                        visited,
                        strategy: strat,
                    })
                }
                Err(e) => return Err(e),
            };
            visited += v;
            vecs.sort_by(|a, b| sup(a).cmp(&sup(b)).then_with(|| b.cmp(a)));
            let mut span = Echelon::new(d);
            let mut witnesses = Vec::new();
            for v in vecs {
                if span.insert(&v) {
                    witnesses.push(v);
                    if witnesses.len() == d {
                        break;
                    }
                }
            }
            if witnesses.len() == d {
                let mu: Vec<i128> = witnesses.iter().map(|w| sup(w)).collect();
                let lambdas = mu
                    .iter()
                    .map(|&m| BigRational::from_integer(BigInt::from(m)) / q)
                    .collect();
                return Ok(MinimaResult { q: q.clone(), mu, lambdas, witnesses, complete: true, visited, strategy: strat });
            }
            radius *= 2;
        }
    }

    /// All nonzero lattice vectors with `‖v‖_∞ ≤ radius`, unordered.
    pub fn vectors_within(&self, radius: i128, budget: u64) -> Result<Vec<IVec>> {
        if radius < 1 {
            return Ok(vec![]);
        }
        let cost = self.plain_cost(radius);
        let expected = ((2 * radius + 1) as f64).powi(self.dim() as i32) / self.covolume as f64;
        if cost <= 1e4 || (cost <= 4e6 && cost <= 8.0 * expected) {
            Ok(self.shell_plain(radius, budget)?.0)
        } else {
            let mut b = self.basis();
            lll(&mut b, 0.99);
            Ok(self.shell_reduced(&b, radius, budget)?.0)
        }
    }

    /// Shortest nonzero vector in sup norm if one exists with norm `≤ radius`.
    pub fn short_vector_within(&self, radius: i128, budget: u64) -> Result<Option<IVec>> {
        let vecs = self.vectors_within(radius, budget)?;
        Ok(vecs.into_iter().min_by(|a, b| sup(a).cmp(&sup(b)).then_with(|| b.cmp(a))))
    }
}

fn fdiv(a: i128, d: i128) -> i128 {
    Integer::div_floor(&a, &d)
}

fn cdiv(a: i128, d: i128) -> i128 {
    -fdiv(-a, d)
}

pub fn sup(v: &[i128]) -> i128 {
    v.iter().map(|x| x.abs()).max().unwrap_or(0)
}

/// Incremental exact rank test over the integers.
struct Echelon {
    rows: Vec<(usize, Vec<BigInt>)>,
    d: usize,
}

impl Echelon {
    fn new(d: usize) -> Self {
        Echelon { rows: Vec::new(), d }
    }

    /// Adds `v` if it is independent of the rows so far.
    fn insert(&mut self, v: &[i128]) -> bool {
        let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for (piv, row) in &self.rows {
            if w[*piv].is_zero() {
                continue;
            }
            let a = row[*piv].clone();
            let b = w[*piv].clone();
            for k in 0..self.d {
                w[k] = &w[k] * &a - &row[k] * &b;
            }
            let g = w.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in w.iter_mut() {
                    *x /= &g;
                }
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(piv) => {
                self.rows.push((piv, w));
                true
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[IVec]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>) {
    let k = b.len();
    let bf: Vec<Vec<f64>> = b.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
    let mut bs: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut mu = vec![vec![0.0; k]; k];
    let mut nrm = vec![0.0; k];
    for i in 0..k {
        let mut v = bf[i].clone();
        for j in 0..i {
            mu[i][j] = if nrm[j] > 0.0 { dot(&bf[i], &bs[j]) / nrm[j] } else { 0.0 };
            for t in 0..v.len() {
                v[t] -= mu[i][j] * bs[j][t];
            }
        }
        nrm[i] = dot(&v, &v);
        bs.push(v);
    }
    (bs, mu, nrm)
}

/// In-place LLL reduction of the basis vectors `b`.
pub fn lll(b: &mut [IVec], delta: f64) {
    let k = b.len();
    if k < 2 {
        return;
    }
    let mut i = 1;
    let mut guard = 0u64;
    while i < k {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        for j in (0..i).rev() {
            let (_, mu, _) = gram_schmidt(b);
            let r = mu[i][j].round() as i128;
            if r != 0 {
                let bj = b[j].clone();
                for (x, y) in b[i].iter_mut().zip(&bj) {
                    *x -= r * y;
                }
            }
        }
        let (_, mu, nrm) = gram_schmidt(b);
        if nrm[i] >= (delta - mu[i][i - 1] * mu[i][i - 1]) * nrm[i - 1] {
            i += 1;
        } else {
            b.swap(i, i - 1);
            i = i.max(2) - 1;
        }
    }
}

/// Visits every lattice vector `Σ c_i b_i` with squared Euclidean norm at most `r2`
/// (the zero vector included); stops early when `visit` returns false.
pub fn fincke_pohst(b: &[IVec], r2: f64, visit: &mut dyn FnMut(&IVec) -> bool) {
    let k = b.len();
    let (_, mu, nrm) = gram_schmidt(b);
    let mut c = vec![0i128; k];
    fn rec(
        level: usize,
        b: &[IVec],
        mu: &[Vec<f64>],
        nrm: &[f64],
        c: &mut Vec<i128>,
        partial: f64,
        r2: f64,
        visit: &mut dyn FnMut(&IVec) -> bool,
    ) -> bool {
        let k = b.len();
        let center: f64 = -(level + 1..k).map(|j| mu[j][level] * c[j] as f64).sum::<f64>();
        let room = r2 - partial;
        if room < 0.0 || nrm[level] <= 0.0 {
            return true;
        }
        let half = (room / nrm[level]).sqrt();
        let lo = (center - half).ceil() as i128;
        let hi = (center + half).floor() as i128;
        for x in lo..=hi {
            c[level] = x;
            let t = x as f64 - center;
            let np = partial + t * t * nrm[level];
            if level == 0 {
                let dim = b[0].len();
                let mut v = vec![0i128; dim];
                for (ci, bi) in c.iter().zip(b) {
                    if *ci != 0 {
                        for (vt, bt) in v.iter_mut().zip(bi) {
                            *vt += ci * bt;
                        }
                    }
                }
                if !visit(&v) {
                    return false;
                }
            } else if !rec(level - 1, b, mu, nrm, c, np, r2, visit) {
                return false;
            }
        }
        c[level] = 0;
        true
    }
    if k > 0 {
        rec(k - 1, b, &mu, &nrm, &mut c, 0.0, r2, visit);
    }
}

/// Checks both Minkowski inequalities and, given `δ`, the last-minimum bound.
pub fn minkowski_audit(l: &GammaLattice, m: &MinimaResult, delta: Option<&BigRational>) -> Result<MinkowskiReport> {
    if !m.complete || m.mu.len() != l.dim() {
        return Err(Error::Precondition("minima must be complete".into()));
    }
    let d = l.dim();
    let two_q = &m.q * arith::int(2);
    let vol_k = num_traits::pow(two_q, d);
    let l1 = &m.lambdas[0];
    let first_min_lhs = num_traits::pow(l1.clone(), d) * &vol_k;
    let product_lhs = m.lambdas.iter().fold(BigRational::one(), |a, x| a * x) * &vol_k;
    let rhs = BigRational::from_integer(BigInt::from(2).pow(d as u32) * BigInt::from(l.covolume));
    let lambda1_exceeds_one = l1 > &BigRational::one();
    let last_min_bound = delta.and_then(|delta| {
        let pn2 = arith::pow_rat(l.p, l.n as i64 + 2);
        let cap = num_traits::pow(m.q.clone(), d) * &pn2 / delta;
        if lambda1_exceeds_one && BigRational::from_integer(BigInt::from(l.covolume)) <= cap {
            Some(m.lambdas[d - 1] <= pn2 / delta)
        } else {
            None
        }
    });
    Ok(MinkowskiReport {
        covolume: l.covolume,
        q: m.q.clone(),
        first_min_holds: first_min_lhs <= rhs,
        product_holds: product_lhs <= rhs,
        first_min_lhs,
        product_lhs,
        rhs,
        lambda1_exceeds_one,
        last_min_bound,
    })
}

/// Exponent `j` with `p^{-j}` the largest power of `p` strictly below `δ Q^{-(n+1)}`.
pub fn smallness_exponent(p: u64, q: &BigRational, delta: &BigRational, n: usize) -> i64 {
    let x = delta / num_traits::pow(q.clone(), n + 1);
    -arith::floor_log_strict(p, &x)
}
