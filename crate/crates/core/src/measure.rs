//! Haar measure of polynomial sublevel sets, (C,α)-good certification and
//! seeded Monte Carlo estimation.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, pow_rat};
use crate::error::{Error, Result};
use crate::padic::PAdicBall;
use crate::poly::Poly;
use crate::real::PowProd;

pub const DEFAULT_DEPTH_CAP: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureOptions {
    pub depth_cap: u32,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { depth_cap: DEFAULT_DEPTH_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureBounds {
    #[serde(with = "arith::rational_str")]
    pub lower: BigRational,
    #[serde(with = "arith::rational_str")]
    pub upper: BigRational,
    /// Deepest refinement level visited.
    pub depth: u32,
}

impl MeasureBounds {
    pub fn is_resolved(&self) -> bool {
        self.lower == self.upper
    }
}

/// Bounds on `sup_B |f|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupBounds {
    #[serde(with = "arith::rational_str")]
    pub lower: BigRational,
    #[serde(with = "arith::rational_str")]
    pub upper: BigRational,
}

impl SupBounds {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Dense polynomial with coefficients reduced modulo a prime power.
#[derive(Clone, Debug)]
struct ModPoly {
    c: Vec<i128>,
}

struct Ctx {
    p: i128,
    d: usize,
    lens: Vec<usize>,
    strides: Vec<usize>,
    pw: Vec<i128>,
    exps: Vec<Vec<usize>>,
}

/// Largest exponent `K` with `p^K ≤ 2^62`.
pub fn max_exponent(p: u64) -> u32 {
    let mut k = 0;
    let mut v: u128 = 1;
    while v * p as u128 <= 1 << 62 {
        v *= p as u128;
        k += 1;
    }
    k
}

impl Ctx {
    fn new(p: u64, degs: &[usize], kmax: u32) -> Self {
        let lens: Vec<usize> = degs.iter().map(|d| d + 1).collect();
        let mut strides = vec![1; lens.len()];
        for i in 1..lens.len() {
            strides[i] = strides[i - 1] * lens[i - 1];
        }
        let total: usize = lens.iter().product();
        let exps = (0..total)
            .map(|idx| (0..lens.len()).map(|i| (idx / strides[i]) % lens[i]).collect())
            .collect();
        let mut pw = vec![1i128];
        for _ in 0..kmax + 1 {
            let last = *pw.last().unwrap();
            pw.push(last * p as i128);
        }
        Ctx { p: p as i128, d: lens.len(), lens, strides, pw, exps }
    }

    fn val(&self, x: i128, k: u32) -> u32 {
        if x == 0 {
            return k;
        }
        let mut v = 0;
        let mut y = x;
        while v < k && y % self.p == 0 {
            y /= self.p;
            v += 1;
        }
        v
    }

    fn min_val(&self, h: &ModPoly, k: u32, skip_constant: bool) -> u32 {
        let mut w = k;
        for (i, &c) in h.c.iter().enumerate() {
            if skip_constant && i == 0 {
                continue;
            }
            if c != 0 {
                w = w.min(self.val(c, k));
                if w == 0 {
                    break;
                }
            }
        }
        w
    }

    fn divide(&self, h: &ModPoly, w: u32) -> ModPoly {
        let q = self.pw[w as usize];
        ModPoly { c: h.c.iter().map(|&c| c / q).collect() }
    }

    fn residue(&self, mut idx: usize) -> Vec<i128> {
        (0..self.d)
            .map(|_| {
                let r = (idx % self.p as usize) as i128;
                idx /= self.p as usize;
                r
            })
            .collect()
    }

    fn residue_count(&self) -> usize {
        (self.p as usize).pow(self.d as u32)
    }

    fn eval_mod_p(&self, h: &ModPoly, r: &[i128]) -> i128 {
        let p = self.p;
        let mut acc = 0i128;
        for (idx, &c) in h.c.iter().enumerate() {
            let cm = c % p;
            if cm == 0 {
                continue;
            }
            let mut t = cm;
            for (i, &e) in self.exps[idx].iter().enumerate() {
                for _ in 0..e {
                    t = t * r[i] % p;
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }

    /// `z ↦ h(r + p z)` modulo `p^k`.
    fn child(&self, h: &ModPoly, r: &[i128], k: u32) -> ModPoly {
        let m = self.pw[k as usize];
        let mut c = h.c.clone();
        let mut line = Vec::new();
        for axis in 0..self.d {
            let len = self.lens[axis];
            let stride = self.strides[axis];
            let ri = r[axis];
            for base in 0..c.len() {
                if (base / stride) % len != 0 {
                    continue;
                }
                line.clear();
                line.extend((0..len).map(|j| c[base + j * stride]));
                if ri != 0 {
                    for s in 0..len.saturating_sub(1) {
                        for j in (s..len - 1).rev() {
                            line[j] = (line[j] + ri * line[j + 1]) % m;
                        }
                    }
                }
                for (j, v) in line.iter().enumerate() {
                    let scaled = if j as u32 >= k { 0 } else { v * self.pw[j] % m };
                    c[base + j * stride] = scaled;
                }
            }
        }
        ModPoly { c }
    }
}

enum Status {
    Inside,
    Outside,
    Undecided(ModPoly, u32),
}

fn classify(ctx: &Ctx, h: ModPoly, k: u32) -> Status {
    if k == 0 {
        return Status::Inside;
    }
    let w_all = ctx.min_val(&h, k, false);
    if w_all >= k {
        return Status::Inside;
    }
    let (h, k) = if w_all > 0 { (ctx.divide(&h, w_all), k - w_all) } else { (h, k) };
    if ctx.min_val(&h, k, true) > 0 {
        Status::Outside
    } else {
        Status::Undecided(h, k)
    }
}

#[derive(Default)]
struct Acc {
    inside: Vec<u128>,
    unresolved: Vec<u128>,
    /// Counts of exact contributions `p^{-e}`, indexed by `e`.
    smooth: Vec<u128>,
    depth: u32,
}

impl Acc {
    fn bump(v: &mut Vec<u128>, t: u32) {
        Self::add(v, t, 1);
    }

    fn add(v: &mut Vec<u128>, t: u32, c: u128) {
        if v.len() <= t as usize {
            v.resize(t as usize + 1, 0);
        }
        v[t as usize] += c;
    }
}

impl Ctx {
    /// `∂h/∂x_axis` modulo `p^k`.
    fn derivative(&self, h: &ModPoly, axis: usize) -> ModPoly {
        let mut c = vec![0i128; h.c.len()];
        let stride = self.strides[axis];
        for (idx, &v) in h.c.iter().enumerate() {
            let e = self.exps[idx][axis];
            if e > 0 && v != 0 {
                c[idx - stride] = v * e as i128;
            }
        }
        ModPoly { c }
    }

    /// Zeros of `h` modulo `p` when some `∂_i h` is a unit on all of `Z_p^d`.
    ///
    /// Then each line along `x_i` meets `{v(h) ≥ k}` in measure `p^{-k}` per residue zero.
    fn smooth_zero_count(&self, h: &ModPoly) -> Option<u128> {
        let n = self.residue_count();
        let unit_axis = (0..self.d).any(|axis| {
            let g = self.derivative(h, axis);
            g.c.iter().any(|&c| c % self.p != 0) && (0..n).all(|idx| self.eval_mod_p(&g, &self.residue(idx)) != 0)
        });
        unit_axis.then(|| (0..n).filter(|&idx| self.eval_mod_p(h, &self.residue(idx)) == 0).count() as u128)
    }
}

fn measure_rec(ctx: &Ctx, comps: &[(ModPoly, u32)], depth: u32, cap: u32, acc: &mut Acc) {
    acc.depth = acc.depth.max(depth);
    if let [(h, k)] = comps {
        if let Some(z) = ctx.smooth_zero_count(h) {
            Acc::add(&mut acc.smooth, depth * ctx.d as u32 + ctx.d as u32 - 1 + k, z);
            return;
        }
    }
    if depth >= cap {
        Acc::bump(&mut acc.unresolved, depth);
        return;
    }
    'residues: for idx in 0..ctx.residue_count() {
        let r = ctx.residue(idx);
        for (h, _) in comps {
            if ctx.eval_mod_p(h, &r) != 0 {
                continue 'residues;
            }
        }
        let mut next = Vec::with_capacity(comps.len());
        for (h, k) in comps {
            match classify(ctx, ctx.child(h, &r, *k), *k) {
                Status::Outside => continue 'residues,
                Status::Inside => {}
                Status::Undecided(h2, k2) => next.push((h2, k2)),
            }
        }
        if next.is_empty() {
            acc.depth = acc.depth.max(depth + 1);
            Acc::bump(&mut acc.inside, depth + 1);
        } else {
            measure_rec(ctx, &next, depth + 1, cap, acc);
        }
    }
}

/// `y ↦ f(c + p^k y)` for a ball inside `Z_p^d`.
fn pull_back(f: &Poly, ball: &PAdicBall) -> Result<Poly> {
    let center: Vec<BigRational> = ball
        .integer_center()
        .ok_or_else(|| Error::InvalidArgument("ball must lie in Z_p^d with an integer center".into()))?
        .into_iter()
        .map(BigRational::from_integer)
        .collect();
    if f.nvars() != ball.dim() {
        return Err(Error::InvalidArgument("polynomial arity differs from ball dimension".into()));
    }
    let g = f.shift(&center);
    let scale = pow_rat(ball.p, ball.k);
    let mut terms = Vec::new();
    for (e, c) in g.terms() {
        let deg: u32 = e.iter().sum();
        terms.push((e.clone(), c * num_traits::pow(scale.clone(), deg as usize)));
    }
    Poly::from_terms(f.nvars(), terms)
}

/// Dense residues of `g / p^s` modulo `p^k` where `s` is the least coefficient valuation.
fn dense_residues(g: &Poly, ctx: &Ctx, p: u64, k: u32) -> Result<ModPoly> {
    let s = g.min_coeff_valuation(p).expect("nonzero polynomial");
    let total: usize = ctx.lens.iter().product();
    let mut c = vec![0i128; total];
    let unscale = pow_rat(p, -s);
    for (e, coef) in g.terms() {
        let idx: usize = e.iter().enumerate().map(|(i, &x)| x as usize * ctx.strides[i]).sum();
        c[idx] = arith::rat_mod_pow(&(coef * &unscale), p, k)?.to_i128().expect("residue fits");
    }
    Ok(ModPoly { c })
}

/// Measure of `{x ∈ B : max_i |f_i(x)| < p^{-M}}`.
pub fn sublevel_measure_vec(fs: &[Poly], ball: &PAdicBall, eps_exp: i64, opts: &MeasureOptions) -> Result<MeasureBounds> {
    if ball.k < 0 {
        return Err(Error::InvalidArgument("ball must lie in Z_p^d".into()));
    }
    let p = ball.p;
    let full = ball.measure();
    let kmax = max_exponent(p) as i64;
    let mut comps = Vec::new();
    let mut ctx_opt: Option<Ctx> = None;
    let pulled: Vec<Poly> = fs.iter().map(|f| pull_back(f, ball)).collect::<Result<_>>()?;
    let nonzero: Vec<&Poly> = pulled.iter().filter(|g| !g.is_zero()).collect();
    if nonzero.is_empty() {
        return Ok(MeasureBounds { lower: full.clone(), upper: full, depth: 0 });
    }
    let degs: Vec<usize> = (0..ball.dim())
        .map(|i| nonzero.iter().map(|g| g.degree_in(i) as usize).max().unwrap())
        .collect();
    for g in &nonzero {
        let s = g.min_coeff_valuation(p).unwrap();
        let k = eps_exp + 1 - s;
        if k <= 0 {
            continue;
        }
        if k > kmax {
            return Err(Error::BudgetExceeded(format!(
                "p^{k} exceeds the 62-bit residue budget"
            )));
        }
        let k = k as u32;
        let ctx = ctx_opt.get_or_insert_with(|| Ctx::new(p, &degs, kmax as u32));
        let h = dense_residues(g, ctx, p, k)?;
        match classify(ctx, h, k) {
            Status::Inside => {}
            Status::Outside => {
                return Ok(MeasureBounds { lower: BigRational::zero(), upper: BigRational::zero(), depth: 0 })
            }
            Status::Undecided(h, k) => comps.push((h, k)),
        }
    }
    if comps.is_empty() {
        return Ok(MeasureBounds { lower: full.clone(), upper: full, depth: 0 });
    }
    let ctx = ctx_opt.unwrap();
    let mut acc = Acc::default();
    measure_rec(&ctx, &comps, 0, opts.depth_cap, &mut acc);
    let d = ball.dim() as i64;
    let sum = |v: &[u128]| -> BigRational {
        v.iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(t, &c)| BigRational::from_integer(BigInt::from(c)) * pow_rat(p, -(t as i64) * d))
            .fold(BigRational::zero(), |a, b| a + b)
    };
    let smooth = acc
        .smooth
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(e, &c)| BigRational::from_integer(BigInt::from(c)) * pow_rat(p, -(e as i64)))
        .fold(BigRational::zero(), |a, b| a + b);
    let lower = (sum(&acc.inside) + smooth) * &full;
    let upper = &lower + sum(&acc.unresolved) * &full;
    Ok(MeasureBounds { lower, upper, depth: acc.depth })
}

/// Measure of `{x ∈ B : |f(x)| < p^{-M}}` (strict inequality).
pub fn sublevel_measure_exact(f: &Poly, ball: &PAdicBall, eps_exp: i64, opts: &MeasureOptions) -> Result<MeasureBounds> {
    sublevel_measure_vec(std::slice::from_ref(f), ball, eps_exp, opts)
}

struct MinSearch {
    best: Option<u32>,
    unresolved: Option<u32>,
}

fn minval_rec(ctx: &Ctx, h: ModPoly, k: u32, offset: u32, depth: u32, cap: u32, st: &mut MinSearch) {
    let w_all = ctx.min_val(&h, k, false);
    if w_all >= k {
        let lo = offset + k;
        st.unresolved = Some(st.unresolved.map_or(lo, |u| u.min(lo)));
        return;
    }
    let offset = offset + w_all;
    let (h, k) = if w_all > 0 { (ctx.divide(&h, w_all), k - w_all) } else { (h, k) };
    if st.best.is_some_and(|b| offset >= b) {
        return;
    }
    let n = ctx.residue_count();
    if (0..n).any(|idx| ctx.eval_mod_p(&h, &ctx.residue(idx)) != 0) {
        st.best = Some(offset);
        return;
    }
    if depth >= cap {
        let lo = offset + 1;
        st.unresolved = Some(st.unresolved.map_or(lo, |u| u.min(lo)));
        return;
    }
    for idx in 0..n {
        let child = ctx.child(&h, &ctx.residue(idx), k);
        minval_rec(ctx, child, k, offset, depth + 1, cap, st);
    }
}

/// `sup_B |f|` by the same residue recursion; exact unless the depth cap is hit.
pub fn sup_norm(f: &Poly, ball: &PAdicBall, opts: &MeasureOptions) -> Result<SupBounds> {
    let g = pull_back(f, ball)?;
    if g.is_zero() {
        return Ok(SupBounds { lower: BigRational::zero(), upper: BigRational::zero() });
    }
    let p = ball.p;
    let k = max_exponent(p);
    let degs: Vec<usize> = (0..g.nvars()).map(|i| g.degree_in(i) as usize).collect();
    let ctx = Ctx::new(p, &degs, k);
    let h = dense_residues(&g, &ctx, p, k)?;
    let s = g.min_coeff_valuation(p).unwrap();
    let mut st = MinSearch { best: None, unresolved: None };
    minval_rec(&ctx, h, k, 0, 0, opts.depth_cap, &mut st);
    let lo_v = match (st.best, st.unresolved) {
        (Some(b), Some(u)) => b.min(u),
        (Some(b), None) => b,
        (None, Some(u)) => u,
        (None, None) => unreachable!("search visits at least one node"),
    } as i64;
    let upper = pow_rat(p, -(s + lo_v));
    let lower = match st.best {
        Some(b) if st.unresolved.map_or(true, |u| u >= b) => upper.clone(),
        Some(b) => pow_rat(p, -(s + b as i64)),
        None => BigRational::zero(),
    };
    Ok(SupBounds { lower, upper })
}

/// Sup of the max-norm of several polynomials.
pub fn sup_norm_vec(fs: &[Poly], ball: &PAdicBall, opts: &MeasureOptions) -> Result<SupBounds> {
    let mut lower = BigRational::zero();
    let mut upper = BigRational::zero();
    for f in fs {
        let s = sup_norm(f, ball, opts)?;
        lower = lower.max(s.lower);
        upper = upper.max(s.upper);
    }
    Ok(SupBounds { lower, upper })
}

/// The constants of a `(C, α)`-good bound; `C` may be irrational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodConstants {
    pub c: PowProd,
    #[serde(with = "arith::rational_str")]
    pub alpha: BigRational,
}

impl GoodConstants {
    pub fn new(c: PowProd, alpha: BigRational) -> Result<Self> {
        if alpha <= BigRational::zero() || alpha > BigRational::one() {
            return Err(Error::InvalidArgument("alpha must lie in (0, 1]".into()));
        }
        Ok(GoodConstants { c, alpha })
    }

    /// `(d·k^{3−1/k}, 1/(dk))` for degree-`k` polynomials in `d` variables.
    pub fn polynomial(k: u32, d: u32) -> Self {
        assert!(k >= 1 && d >= 1);
        let c = PowProd::power(int(k as i64), int(3) - arith::rat(1, k as i64)).mul_rational(&int(d as i64));
        GoodConstants { c, alpha: arith::rat(1, (d * k) as i64) }
    }

    /// `(dC, α/d)` for the product of `d` one-variable slices.
    pub fn product(&self, d: u32) -> Self {
        GoodConstants {
            c: self.c.mul_rational(&int(d as i64)),
            alpha: &self.alpha / int(d as i64),
        }
    }

    /// `(max{C,1}, α)`.
    pub fn relaxed(&self) -> Self {
        if self.c.cmp_rational(&BigRational::one()) == Ordering::Less {
            GoodConstants { c: PowProd::one(), alpha: self.alpha.clone() }
        } else {
            self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Violation,
    Inconclusive,
    /// `f ≡ 0` on the ball, so the right side is unbounded.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodRow {
    pub eps_exp: i64,
    pub measure: MeasureBounds,
    pub sup: SupBounds,
    /// Right side evaluated at the upper sup bound, in floating point for display.
    pub rhs_at_sup_upper: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodReport {
    pub constants: GoodConstants,
    pub c_value: f64,
    pub ball: PAdicBall,
    pub rows: Vec<GoodRow>,
    pub violations: usize,
    pub inconclusive: usize,
}

impl GoodReport {
    pub fn passes(&self) -> bool {
        self.violations == 0 && self.inconclusive == 0
    }
}

/// Default ε-grid `p^{-1}, …, p^{-(cap−2)}`.
pub fn default_eps_grid(opts: &MeasureOptions) -> Vec<i64> {
    (1..=opts.depth_cap.saturating_sub(2).max(1) as i64).collect()
}

fn rhs(consts: &GoodConstants, p: u64, sup: &BigRational, eps_exp: i64, ball_measure: &BigRational) -> PowProd {
    let ratio = pow_rat(p, -eps_exp) / sup;
    consts.c.mul(&PowProd::power(ratio, consts.alpha.clone())).mul_rational(ball_measure)
}

/// Checks `|{x ∈ B : ‖f(x)‖ < ε}| ≤ C (ε / sup_B ‖f‖)^α |B|` on each grid value `ε = p^{-M}`.
pub fn good_certify_vec(
    fs: &[Poly],
    ball: &PAdicBall,
    consts: &GoodConstants,
    eps_grid: &[i64],
    opts: &MeasureOptions,
) -> Result<GoodReport> {
    let sup = sup_norm_vec(fs, ball, opts)?;
    let bm = ball.measure();
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &m in eps_grid {
        let measure = sublevel_measure_vec(fs, ball, m, opts)?;
        let (verdict, shown) = if sup.upper.is_zero() {
            (Verdict::Vacuous, f64::INFINITY)
        } else {
            let r_min = rhs(consts, ball.p, &sup.upper, m, &bm);
            let pass = measure.upper.is_zero() || r_min.cmp_rational(&measure.upper) != Ordering::Less;
            let violation = !sup.lower.is_zero()
                && rhs(consts, ball.p, &sup.lower, m, &bm).cmp_rational(&measure.lower) == Ordering::Less;
            let v = if pass {
                Verdict::Pass
            } else if violation {
                Verdict::Violation
            } else {
                Verdict::Inconclusive
            };
            (v, r_min.to_f64())
        };
        rows.push(GoodRow { eps_exp: m, measure, sup: sup.clone(), rhs_at_sup_upper: shown, verdict });
    }
    Ok(GoodReport {
        c_value: consts.c.to_f64(),
        constants: consts.clone(),
        ball: ball.clone(),
        violations: rows.iter().filter(|r| r.verdict == Verdict::Violation).count(),
        inconclusive: rows.iter().filter(|r| r.verdict == Verdict::Inconclusive).count(),
        rows,
    })
}

pub fn good_certify(
    f: &Poly,
    ball: &PAdicBall,
    consts: &GoodConstants,
    eps_grid: &[i64],
    opts: &MeasureOptions,
) -> Result<GoodReport> {
    good_certify_vec(std::slice::from_ref(f), ball, consts, eps_grid, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSummary {
    pub axis: usize,
    #[serde(with = "arith::rational_vec_str")]
    pub fiber: Vec<BigRational>,
    pub violations: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductGoodReport {
    pub slice_constants: GoodConstants,
    pub product_constants: GoodConstants,
    pub slices: Vec<SliceSummary>,
    pub slices_pass: bool,
    pub products: Vec<GoodReport>,
    pub verdict: Verdict,
}

/// Restricts `f` to the line through `fiber` along `axis`.
fn slice(f: &Poly, axis: usize, fiber: &[BigRational]) -> Poly {
    let subs: Vec<Poly> = (0..f.nvars())
        .map(|i| {
            if i == axis {
                Poly::var(1, 0)
            } else {
                Poly::constant(1, fiber[i].clone())
            }
        })
        .collect();
    f.compose(&subs)
}

/// Certifies the slices of `f` with `(max{C,1}, α)` on sampled fibers, then the product
/// inequality with `(dC', α/d)` on `B` and its children.
pub fn product_good_check(
    f: &Poly,
    ball: &PAdicBall,
    slice_consts: &GoodConstants,
    eps_grid: &[i64],
    fibers_per_axis: usize,
    opts: &MeasureOptions,
) -> Result<ProductGoodReport> {
    let d = ball.dim();
    if d == 0 {
        return Err(Error::InvalidArgument("ball has dimension zero".into()));
    }
    let relaxed = slice_consts.relaxed();
    let product = relaxed.product(d as u32);
    let step = pow_rat(ball.p, ball.k);
    let mut slices = Vec::new();
    if d > 1 {
        for axis in 0..d {
            for s in 0..fibers_per_axis {
                let fiber: Vec<BigRational> = (0..d)
                    .map(|i| &ball.center[i] + &step * int((s * (i + 1)) as i64))
                    .collect();
                let line = slice(f, axis, &fiber);
                let lball = PAdicBall::new(ball.p, vec![ball.center[axis].clone()], ball.k)?;
                let rep = good_certify(&line, &lball, &relaxed, eps_grid, opts)?;
                slices.push(SliceSummary {
                    axis,
                    fiber,
                    violations: rep.violations,
                    inconclusive: rep.inconclusive,
                });
            }
        }
    }
    let slices_pass = slices.iter().all(|s| s.violations == 0 && s.inconclusive == 0);
    let mut products = vec![good_certify(f, ball, &product, eps_grid, opts)?];
    for child in ball.children() {
        products.push(good_certify(f, &child, &product, eps_grid, opts)?);
    }
    let verdict = if products.iter().any(|r| r.violations > 0) {
        Verdict::Violation
    } else if !slices_pass || products.iter().any(|r| r.inconclusive > 0) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(ProductGoodReport {
        slice_constants: relaxed,
        product_constants: product,
        slices,
        slices_pass,
        products,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub samples: u64,
    pub hits: u64,
    pub indeterminate: u64,
    pub estimate: f64,
    pub sigma: f64,
    /// Wilson interval at three standard deviations.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl McEstimate {
    pub fn from_counts(samples: u64, hits: u64, indeterminate: u64) -> Self {
        let n = (samples - indeterminate) as f64;
        let (estimate, sigma, lo, hi) = if n == 0.0 {
            (f64::NAN, f64::NAN, 0.0, 1.0)
        } else {
            let ph = hits as f64 / n;
            let sigma = (ph * (1.0 - ph) / n).sqrt();
            let z = 3.0;
            let denom = 1.0 + z * z / n;
            let centre = (ph + z * z / (2.0 * n)) / denom;
            let half = z * ((ph * (1.0 - ph) + z * z / (4.0 * n)) / n).sqrt() / denom;
            (ph, sigma, (centre - half).max(0.0), (centre + half).min(1.0))
        };
        McEstimate { samples, hits, indeterminate, estimate, sigma, ci_low: lo, ci_high: hi }
    }

    /// Whether `truth` lies within `k` standard errors (with a one-sample floor).
    pub fn consistent_with(&self, truth: f64, k: f64) -> bool {
        let n = (self.samples - self.indeterminate) as f64;
        let tol = k * self.sigma.max((truth * (1.0 - truth) / n).sqrt()) + 1.0 / n;
        (self.estimate - truth).abs() <= tol
    }
}

/// A uniform integer in `[0, p^digits)` drawn from the stream of `(seed, index)`.
pub fn sample_digits(p: u64, digits: u32, seed: u64, index: u64, coord: usize) -> BigInt {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(coord as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    let mut acc = BigInt::zero();
    let mut place = BigInt::one();
    for _ in 0..digits {
        let dgt: u64 = rng.gen_range(0..p);
        acc += &place * dgt;
        place *= p;
    }
    acc
}

/// Haar-uniform point of `B` truncated to `digits` digits below its radius.
pub fn sample_point(ball: &PAdicBall, digits: u32, seed: u64, index: u64) -> Result<Vec<BigInt>> {
    let center = ball
        .integer_center()
        .ok_or_else(|| Error::InvalidArgument("ball must lie in Z_p^d".into()))?;
    let step = arith::pow_int(ball.p, ball.k as u32);
    Ok(center
        .iter()
        .enumerate()
        .map(|(i, c)| c + &step * sample_digits(ball.p, digits, seed, index, i))
        .collect())
}

/// Frequency of `pred` over seeded Haar samples of `B`; `None` from the predicate counts as
/// indeterminate.
pub fn measure_mc<F>(pred: F, ball: &PAdicBall, samples: u64, seed: u64, digits: u32) -> Result<McEstimate>
where
    F: Fn(&[BigInt]) -> Option<bool> + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    ball.integer_center()
        .ok_or_else(|| Error::InvalidArgument("ball must lie in Z_p^d".into()))?;
    let (hits, indet) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let x = sample_point(ball, digits, seed, i).expect("ball validated");
            match pred(&x) {
                Some(true) => (1u64, 0u64),
                Some(false) => (0, 0),
                None => (0, 1),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(McEstimate::from_counts(samples, hits, indet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    fn opts() -> MeasureOptions {
        MeasureOptions::default()
    }

    #[test]
    fn measure_examples() {
        let z3 = PAdicBall::unit(3, 1).unwrap();
        let m = sublevel_measure_exact(&x(), &z3, 2, &opts()).unwrap();
        assert_eq!((m.lower.clone(), m.is_resolved()), (rat(1, 27), true));
        for k in 1..5 {
            let m = sublevel_measure_exact(&x().pow(2), &z3, 2 * k, &opts()).unwrap();
            assert_eq!(m.lower, pow_rat(3, -(k + 1)));
            assert!(m.is_resolved());
        }
        let c = Poly::constant(1, int(9));
        assert_eq!(sublevel_measure_exact(&c, &z3, 2, &opts()).unwrap().upper, int(0));
        assert_eq!(sublevel_measure_exact(&c, &z3, 1, &opts()).unwrap().lower, int(1));
        assert_eq!(sublevel_measure_exact(&Poly::zero(1), &z3, 5, &opts()).unwrap().lower, int(1));
    }

    #[test]
    fn smooth_coordinate_shortcut() {
        let z5 = PAdicBall::unit(5, 2).unwrap();
        let xy = Poly::var(2, 0).mul(&Poly::var(2, 1));
        // v(x) + v(y) ≥ 3 has measure Σ_{a+b≥3} (4/5)² 5^{-a-b}.
        let m = sublevel_measure_exact(&xy, &z5, 2, &opts()).unwrap();
        let mut want = BigRational::zero();
        for a in 0..40i64 {
            for b in 0..40i64 {
                if a + b >= 3 {
                    want += rat(16, 25) * pow_rat(5, -(a + b));
                }
            }
        }
        assert!(m.is_resolved());
        assert!((arith::to_f64(&m.lower) - arith::to_f64(&want)).abs() < 1e-12);
        let line = Poly::var(2, 0).add(&Poly::var(2, 1).pow(3));
        assert_eq!(sublevel_measure_exact(&line, &z5, 6, &opts()).unwrap().lower, pow_rat(5, -7));
    }

    #[test]
    fn depth_cap_brackets() {
        let z3 = PAdicBall::unit(3, 1).unwrap();
        let m = sublevel_measure_exact(&x().pow(2), &z3, 8, &MeasureOptions { depth_cap: 4 }).unwrap();
        assert_eq!(m.lower, int(0));
        assert_eq!(m.upper, rat(1, 81));
        let deep = sublevel_measure_exact(&x().pow(2), &z3, 8, &opts()).unwrap();
        assert_eq!(deep.lower, rat(1, 243));
        assert!(deep.is_resolved());
    }

    #[test]
    fn sub_balls_and_denominators() {
        let b = PAdicBall::from_integers(5, &[1], 1).unwrap();
        let f = x().sub(&Poly::constant(1, int(1))).scale(&rat(1, 5));
        let m = sublevel_measure_exact(&f, &b, 0, &opts()).unwrap();
        assert_eq!(m.lower, rat(1, 25));
        let s = sup_norm(&f, &b, &opts()).unwrap();
        assert_eq!(s.lower, int(1));
        assert!(s.is_exact());
    }

    #[test]
    fn sup_examples() {
        let z5 = PAdicBall::unit(5, 1).unwrap();
        let f = x().pow(5).sub(&x());
        let s = sup_norm(&f, &z5, &opts()).unwrap();
        assert_eq!(s.upper, rat(1, 5));
        assert!(s.is_exact());
        let g = x().pow(3);
        let b = PAdicBall::from_integers(5, &[0], 2).unwrap();
        assert_eq!(sup_norm(&g, &b, &opts()).unwrap().upper, pow_rat(5, -6));
    }

    #[test]
    fn polynomial_constants_on_powers() {
        for p in [3u64, 5] {
            let z = PAdicBall::unit(p, 1).unwrap();
            for k in 1..=4u32 {
                let rep = good_certify(&x().pow(k), &z, &GoodConstants::polynomial(k, 1), &(1..=10).collect::<Vec<_>>(), &opts())
                    .unwrap();
                assert!(rep.passes(), "p={p} k={k}: {:?}", rep.rows);
            }
        }
    }

    #[test]
    fn good_examples() {
        let z5 = PAdicBall::unit(5, 1).unwrap();
        let c = Poly::constant(1, int(7));
        let one = GoodConstants::new(PowProd::one(), int(1)).unwrap();
        assert!(good_certify(&c, &z5, &one, &(0..8).collect::<Vec<_>>(), &opts()).unwrap().passes());
        let q = x().mul(&x().sub(&Poly::constant(1, int(1))));
        let consts = GoodConstants::new(PowProd::power(int(2), rat(5, 2)).mul_rational(&int(2)), rat(1, 2)).unwrap();
        assert!(good_certify(&q, &z5, &consts, &(1..=8).collect::<Vec<_>>(), &opts()).unwrap().passes());
        let tiny = GoodConstants::new(PowProd::rational(rat(1, 100)), int(1)).unwrap();
        let rep = good_certify(&x(), &z5, &tiny, &[1], &opts()).unwrap();
        assert_eq!(rep.violations, 1);
        let zero = good_certify(&Poly::zero(1), &z5, &one, &[1], &opts()).unwrap();
        assert_eq!(zero.rows[0].verdict, Verdict::Vacuous);
    }

    #[test]
    fn product_examples() {
        let z3 = PAdicBall::unit(3, 2).unwrap();
        let xy = Poly::var(2, 0).mul(&Poly::var(2, 1));
        let one = GoodConstants::new(PowProd::one(), int(1)).unwrap();
        let rep = product_good_check(&xy, &z3, &one, &(1..=8).collect::<Vec<_>>(), 3, &opts()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert_eq!(rep.product_constants.alpha, rat(1, 2));
        let proj = Poly::var(2, 0);
        let half = GoodConstants::new(PowProd::rational(rat(1, 2)), int(1)).unwrap();
        let rep = product_good_check(&proj, &z3, &half, &(1..=8).collect::<Vec<_>>(), 3, &opts()).unwrap();
        assert_eq!(rep.slice_constants.c, PowProd::one());
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn monte_carlo_basics() {
        let z3 = PAdicBall::unit(3, 1).unwrap();
        let all = measure_mc(|_| Some(true), &z3, 500, 1, 8).unwrap();
        assert_eq!(all.estimate, 1.0);
        let e = measure_mc(|x| Some(arith::valuation_int(&x[0], 3).map_or(true, |v| v >= 1)), &z3, 10_000, 7, 16).unwrap();
        assert!(e.consistent_with(1.0 / 3.0, 3.0), "{e:?}");
        let again = measure_mc(|x| Some(arith::valuation_int(&x[0], 3).map_or(true, |v| v >= 1)), &z3, 10_000, 7, 16).unwrap();
        assert_eq!(e, again);
        let half = measure_mc(|x| if x[0].to_u64().unwrap() % 2 == 0 { None } else { Some(true) }, &z3, 1000, 3, 8).unwrap();
        assert!(half.indeterminate > 0 && half.estimate == 1.0);
    }
}
