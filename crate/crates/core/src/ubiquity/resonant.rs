//! Resonant functions near points outside `Φ^f(Q, δ)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::hensel::{hensel_root, shift_along, HenselRoot};
use super::strong::strong_approx;
use crate::approx::sets::{phi_membership, PhiMethod};
use crate::arith::{self, int, pow_rat};
use crate::error::{Error, Result};
use crate::lattice::{smallness_exponent, GammaLattice, IVec, MinimaStrategy, DEFAULT_BUDGET};
use crate::maps::{rational_determinant, solve_rational};
use crate::padic::{PAdic, PAdicBall};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UbiquityConfig {
    pub p: u64,
    pub n: usize,
    pub m: usize,
    #[serde(with = "arith::rational_str")]
    pub q: BigRational,
    #[serde(with = "arith::rational_str")]
    pub delta: BigRational,
    #[serde(with = "arith::rational_str")]
    pub w: BigRational,
    /// How many times `Q` may be doubled when the zero leaves the ball or the β window fails.
    pub max_doublings: u32,
    pub ball: Option<PAdicBall>,
    /// Hensel working precision; derived from `Q` and `δ` when absent.
    pub precision: Option<u32>,
}

impl UbiquityConfig {
    pub fn new(p: u64, n: usize, q: BigRational, delta: BigRational) -> Self {
        UbiquityConfig { p, n, m: 1, q, delta, w: arith::rat(1, 2), max_doublings: 4, ball: None, precision: None }
    }

    pub fn validate(&self) -> Result<()> {
        arith::check_prime(self.p)?;
        if self.p < 3 {
            return Err(Error::Precondition("p must be at least 3".into()));
        }
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidArgument("n and m must be positive".into()));
        }
        if self.q <= BigRational::one() {
            return Err(Error::Precondition("Q must exceed 1".into()));
        }
        let unit = |v: &BigRational| v.is_positive() && *v < BigRational::one();
        if !unit(&self.delta) || !unit(&self.w) {
            return Err(Error::Precondition("δ and w must lie in (0, 1)".into()));
        }
        if let Some(b) = &self.ball {
            if b.p != self.p || b.dim() != self.m {
                return Err(Error::InvalidArgument("ball does not match p and m".into()));
            }
        }
        Ok(())
    }

    /// Gradient ratio `1 − 2/p` kept by the resonant sets.
    pub fn lambda(&self) -> BigRational {
        BigRational::one() - arith::rat(2, self.p as i64)
    }

    /// `κ₀ = δ p^{-(n+2)} / (3p(n+1))`.
    pub fn kappa0(&self) -> BigRational {
        &self.delta * pow_rat(self.p, -(self.n as i64 + 2)) / int(3 * self.p as i64 * (self.n as i64 + 1))
    }

    /// `κ₁ = pδ/(p − 1)`.
    pub fn kappa1(&self) -> BigRational {
        &self.delta * arith::rat(self.p as i64, self.p as i64 - 1)
    }

    /// `ρ(Q) = κ₁ Q^{-(n+1)}`.
    pub fn rho(&self, q: &BigRational) -> BigRational {
        self.kappa1() / num_traits::pow(q.clone(), self.n + 1)
    }

    /// Common dimension `m − 1`.
    pub fn gamma(&self) -> usize {
        self.m - 1
    }

    /// The ratio `ρ(2^{t+1})/ρ(2^t) = 2^{-(n+1)}`, which is below one.
    pub fn rho_ratio(&self) -> BigRational {
        pow_rat(2, -(self.n as i64 + 1))
    }

    /// Default Hensel precision `2(n+2) + ⌈log_p(Q^{n+1}/δ)⌉`.
    pub fn working_precision(&self, q: &BigRational) -> u32 {
        let x = num_traits::pow(q.clone(), self.n + 1) / &self.delta;
        let c = -arith::floor_log(self.p, &x.recip());
        (2 * (self.n as i64 + 2) + c.max(0) + 2) as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    /// Every `a_i` is an integer.
    pub integral: bool,
    /// `|(F+Θ)(x)|_p ≤ δQ^{-(n+1)}`.
    #[serde(with = "arith::rational_str")]
    pub value_norm: BigRational,
    pub value_ok: bool,
    /// `1 − 1/p ≤ |∂₁(F+Θ)(x)|_p ≤ 1`.
    #[serde(with = "arith::rational_str")]
    pub partial_norm: BigRational,
    pub partial_ok: bool,
    /// `max |a_i| ≤ 3p(n+1)Q p^{n+2}/δ` and `|a| > pQ`.
    pub max_abs: i128,
    pub height_ok: bool,
    pub exceeds_pq: bool,
    /// `κ₀pQ < β_F ≤ Q`.
    #[serde(with = "arith::rational_str")]
    pub beta: BigRational,
    pub beta_ok: bool,
    /// `|x − x_{ξ₀}|_p ≤ ρ(Q)`.
    #[serde(with = "arith::rational_str")]
    pub distance: BigRational,
    #[serde(with = "arith::rational_str")]
    pub rho: BigRational,
    pub distance_ok: bool,
    /// `x_{ξ₀}` lies in the configured ball.
    pub zero_in_ball: bool,
}

impl Certificates {
    pub fn failures(&self) -> Vec<&'static str> {
        [
            (self.integral, "integrality"),
            (self.value_ok, "value"),
            (self.partial_ok, "partial derivative"),
            (self.height_ok && self.exceeds_pq, "height"),
            (self.beta_ok, "beta window"),
            (self.distance_ok, "distance"),
            (self.zero_in_ball, "zero outside ball"),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonantCandidate {
    #[serde(with = "arith::rational_str")]
    pub q: BigRational,
    /// Exponent with `|L|_p < δQ^{-(n+1)}` iff `p^j | L`.
    pub j: u32,
    /// Sup norms of the minima witnesses `a_j`.
    pub minima: Vec<i128>,
    pub basis: Vec<IVec>,
    /// Coordinate whose signs steer the archimedean targets.
    pub pivot: usize,
    #[serde(with = "arith::rational_vec_str")]
    pub eta: Vec<BigRational>,
    #[serde(with = "arith::rational_vec_str")]
    pub r: Vec<BigRational>,
    pub a: Vec<i128>,
    pub certificates: Certificates,
    pub zero: Vec<PAdic>,
    pub hensel: HenselRoot,
    pub passed: bool,
    pub failed: Vec<String>,
}

fn row_f(f: &[Poly], x: &[BigRational]) -> Vec<BigRational> {
    f.iter().map(|fi| fi.eval(x)).collect()
}

fn check_inputs(x: &[BigRational], f: &[Poly], theta: &Poly, cfg: &UbiquityConfig) -> Result<()> {
    cfg.validate()?;
    if f.len() != cfg.n || x.len() != cfg.m {
        return Err(Error::InvalidArgument("f must have n entries and x must have m coordinates".into()));
    }
    if f.iter().any(|fi| fi.nvars() != cfg.m) || theta.nvars() != cfg.m {
        return Err(Error::InvalidArgument("maps must be functions of m variables".into()));
    }
    if f[0] != Poly::var(cfg.m, 0) {
        return Err(Error::Precondition("f₁ must be the first coordinate".into()));
    }
    let p = cfg.p;
    let integral = |q: &BigRational| arith::valuation_rat(q, p).map_or(true, |v| v >= 0);
    if !x.iter().all(integral) || !row_f(f, x).iter().all(integral) {
        return Err(Error::Precondition("x and f(x) must lie in Z_p".into()));
    }
    if !integral(&theta.eval(x)) || !integral(&theta.partial(0).eval(x)) {
        return Err(Error::Precondition("Θ(x) and ∂₁Θ(x) must lie in Z_p".into()));
    }
    if let Some(b) = &cfg.ball {
        if !b.contains(x) {
            return Err(Error::Precondition("x is outside the ball".into()));
        }
    }
    Ok(())
}

/// Builds a resonant function for `x ∉ Φ^f(Q, δ)`, doubling `Q` when the zero
/// leaves the ball or the β window fails.
pub fn resonant_construct(x: &[BigRational], f: &[Poly], theta: &Poly, cfg: &UbiquityConfig) -> Result<ResonantCandidate> {
    check_inputs(x, f, theta, cfg)?;
    let mut q = cfg.q.clone();
    let mut last = None;
    for _ in 0..=cfg.max_doublings {
        let c = construct_at(x, f, theta, cfg, &q)?;
        if c.passed {
            return Ok(c);
        }
        let retry = !c.certificates.zero_in_ball || !c.certificates.beta_ok;
        let only_retryable = c.failed.iter().all(|s| s == "zero outside ball" || s == "beta window");
        if !(retry && only_retryable) {
            return Ok(c);
        }
        last = Some(c);
        q *= int(2);
    }
    Ok(last.expect("at least one attempt"))
}

fn construct_at(x: &[BigRational], f: &[Poly], theta: &Poly, cfg: &UbiquityConfig, q: &BigRational) -> Result<ResonantCandidate> {
    let (p, n) = (cfg.p, cfg.n);
    let d = n + 1;
    let verdict = phi_membership(x, f, p, q, &cfg.delta, PhiMethod::Auto)?;
    if verdict.member {
        return Err(Error::Precondition(format!("x lies in Φ(Q, δ) for Q = {q}")));
    }
    let small = &cfg.delta / num_traits::pow(q.clone(), d);
    let j = smallness_exponent(p, q, &cfg.delta, n);
    if j < 1 {
        return Err(Error::Precondition("δQ^{-(n+1)} must be below one".into()));
    }
    let j = j as u32;
    let y = row_f(f, x);
    let gamma = GammaLattice::from_rationals(&y, p, j, true)?;
    let minima = gamma.successive_minima(q, MinimaStrategy::Auto, DEFAULT_BUDGET)?;
    if !minima.complete {
        return Err(Error::BudgetExceeded("successive minima enumeration".into()));
    }
    let basis = minima.witnesses.clone();
    let entry_bound = q * pow_rat(p, d as i64 + 1) / &cfg.delta;
    let pi = p as i128;
    for aj in &basis {
        let fj = aj[1..].iter().zip(&y).fold(big(aj[0]), |acc, (a, yi)| acc + yi * big(*a));
        let ok_value = arith::p_norm(&fj, p) < small;
        let ok_height = aj.iter().all(|&v| BigRational::from_integer(BigInt::from(v)) <= entry_bound);
        let ok_div = aj.iter().all(|&v| v % pi == 0);
        let ok_big = aj.iter().any(|&v| big(v.abs()) > *q);
        if !(ok_value && ok_height && ok_div && ok_big) {
            return Err(Error::Internal(format!("minima witness {aj:?} breaks the lattice conditions")));
        }
    }
    let pd: Vec<Poly> = f.iter().map(|fi| fi.partial(0)).collect();
    let dvals: Vec<BigRational> = pd.iter().map(|g| g.eval(x)).collect();
    let mut mat = vec![vec![BigRational::zero(); d]; d];
    for (col, aj) in basis.iter().enumerate() {
        mat[0][col] = (0..n).fold(big(aj[0]), |acc, i| acc + &y[i] * big(aj[i + 1]));
        mat[1][col] = (0..n).fold(BigRational::zero(), |acc, i| acc + &dvals[i] * big(aj[i + 1]));
        for i in 2..=n {
            mat[i][col] = big(aj[i]);
        }
    }
    let a_t: Vec<Vec<BigRational>> = (0..d).map(|i| basis.iter().map(|aj| big(aj[i])).collect()).collect();
    let det_a = rational_determinant(&a_t);
    if det_a.is_zero() || rational_determinant(&mat) != det_a {
        return Err(Error::Internal("η-system determinant differs from det(a_{j,i})".into()));
    }
    let mut rhs = vec![BigRational::zero(); d];
    rhs[0] = -theta.eval(x);
    rhs[1] = BigRational::one() - theta.partial(0).eval(x);
    let eta = solve_rational(&mat, &rhs).ok_or_else(|| Error::Internal("singular η-system".into()))?;

    let pivot = (0..d)
        .max_by_key(|&i| (basis.iter().map(|aj| aj[i].abs()).max().unwrap(), std::cmp::Reverse(i)))
        .unwrap();
    let two_p = int(2 * p as i64);
    let mut r = Vec::with_capacity(d);
    for (aj, e) in basis.iter().zip(&eta) {
        let target = if aj[pivot] >= 0 { two_p.clone() } else { -two_p.clone() };
        let ep = if e.is_zero() {
            PAdic::zero(p)
        } else {
            let v = arith::valuation_rat(e, p).unwrap();
            PAdic::from_rational(e, p, (8 + (-v).max(0)) as u32)?
        };
        r.push(strong_approx(&target, &ep, &int(p as i64), &BigRational::one())?);
    }
    let a_rat: Vec<BigRational> = (0..d)
        .map(|i| basis.iter().zip(&r).fold(BigRational::zero(), |acc, (aj, rj)| acc + rj * big(aj[i])))
        .collect();
    let integral = a_rat.iter().all(|v| v.is_integer());
    let a: Vec<i128> = a_rat.iter().map(|v| v.round().to_integer().to_i128().unwrap_or(i128::MAX)).collect();

    let mut ft = theta.add(&Poly::constant(cfg.m, a_rat[0].clone()));
    for (fi, ai) in f.iter().zip(&a_rat[1..]) {
        ft = ft.add(&fi.scale(ai));
    }
    let value_norm = arith::p_norm(&ft.eval(x), p);
    let value_ok = value_norm <= small;
    let partial_norm = arith::p_norm(&ft.partial(0).eval(x), p);
    let partial_ok = partial_norm >= BigRational::one() - arith::rat(1, p as i64) && partial_norm <= BigRational::one();
    let max_abs = a.iter().map(|v| v.abs()).max().unwrap();
    let max_q = BigRational::from_integer(BigInt::from(max_abs));
    let height_cap = int(3 * p as i64 * d as i64) * &entry_bound;
    let height_ok = max_q <= height_cap;
    let exceeds_pq = max_q > q * int(p as i64);
    let kappa0 = cfg.kappa0();
    let beta = &kappa0 * &max_q;
    let beta_ok = &kappa0 * int(p as i64) * q < beta && beta <= *q;

    let g = shift_along(&ft, x, 0);
    let mut precision = cfg.precision.unwrap_or_else(|| cfg.working_precision(q));
    let root = loop {
        match hensel_root(&g, p, precision) {
            Err(Error::InsufficientPrecision { .. }) if precision < 4096 => precision *= 2,
            other => break other?,
        }
    };
    let rho = cfg.rho(q);
    let distance = root.norm_bound();
    let distance_ok = distance <= rho;
    let mut zero: Vec<PAdic> = x.iter().map(|xi| exact_padic(xi, p, precision)).collect::<Result<_>>()?;
    zero[0] = zero[0].add(&root.to_padic()?);
    let zero_in_ball = match &cfg.ball {
        None => true,
        Some(b) => {
            let mut z = x.to_vec();
            z[0] = &z[0] + BigRational::from_integer(root.residue.clone());
            b.contains(&z) && distance <= b.radius()
        }
    };
    let certificates = Certificates {
        integral,
        value_norm,
        value_ok,
        partial_norm,
        partial_ok,
        max_abs,
        height_ok,
        exceeds_pq,
        beta,
        beta_ok,
        distance,
        rho,
        distance_ok,
        zero_in_ball,
    };
    let failed: Vec<String> = certificates.failures().into_iter().map(String::from).collect();
    Ok(ResonantCandidate {
        q: q.clone(),
        j,
        minima: minima.mu.clone(),
        basis,
        pivot,
        eta,
        r,
        a,
        passed: failed.is_empty(),
        failed,
        certificates,
        zero,
        hensel: root,
    })
}

fn big(v: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn exact_padic(q: &BigRational, p: u64, precision: u32) -> Result<PAdic> {
    if q.is_zero() {
        Ok(PAdic::zero(p))
    } else {
        PAdic::from_rational(q, p, precision)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodVerdict {
    /// `dist(x, zeros) < r` is certified.
    pub certified: bool,
    /// Upper bound on the distance to the nearest known zero.
    #[serde(with = "arith::rational_opt_str")]
    pub distance_bound: Option<BigRational>,
}

/// Upper bound on `|x − z|_p` (sup over coordinates) for a zero known to finite precision.
pub fn distance_bound(x: &[BigRational], z: &[PAdic]) -> Result<BigRational> {
    if x.len() != z.len() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let mut best = BigRational::zero();
    for (xi, zi) in x.iter().zip(z) {
        let p = zi.prime();
        let zq = zi.to_rational().unwrap_or_else(BigRational::zero);
        let v = arith::valuation_rat(&(xi - zq), p);
        let d = match (v, zi.absolute_precision()) {
            (None, None) => BigRational::zero(),
            (Some(v), None) => pow_rat(p, -v),
            (Some(v), Some(a)) if v < a => pow_rat(p, -v),
            (_, Some(a)) => pow_rat(p, -a),
        };
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// One-sided test of `x ∈ Δ(R, r)` against the known zeros of `R`.
pub fn delta_neighborhood(x: &[BigRational], zeros: &[Vec<PAdic>], r: &BigRational) -> Result<NeighborhoodVerdict> {
    let mut best: Option<BigRational> = None;
    for z in zeros {
        let d = distance_bound(x, z)?;
        if best.as_ref().map_or(true, |b| d < *b) {
            best = Some(d);
        }
    }
    let certified = best.as_ref().map_or(false, |d| d.cmp(r) == Ordering::Less);
    Ok(NeighborhoodVerdict { certified, distance_bound: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn veronese(n: usize) -> Vec<Poly> {
        (1..=n as u32).map(|k| Poly::monomial(vec![k], int(1))).collect()
    }

    #[test]
    fn config_constants() {
        let cfg = UbiquityConfig::new(3, 2, int(16), rat(1, 3));
        assert_eq!(cfg.kappa0(), rat(1, 3) / int(81 * 27));
        assert_eq!(cfg.kappa1(), rat(1, 2));
        assert_eq!(cfg.rho(&int(2)), rat(1, 16));
        assert_eq!(cfg.lambda(), rat(1, 3));
        assert!(cfg.rho_ratio() < BigRational::one());
        let mut bad = cfg.clone();
        bad.p = 2;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn construct_small_instance() {
        let f = veronese(2);
        let theta = Poly::monomial(vec![3], rat(3, 5));
        let cfg = UbiquityConfig::new(3, 2, int(16), rat(1, 3));
        let mut done = 0;
        for x in (0..40).map(|k| 1_000_003i64 * k * k + 7919 * k + 11) {
            let xq = vec![int(x)];
            match resonant_construct(&xq, &f, &theta, &cfg) {
                Ok(c) => {
                    assert!(c.passed, "{x}: {:?}", c.failed);
                    done += 1;
                }
                Err(Error::Precondition(_)) => {}
                Err(e) => panic!("{x}: {e}"),
            }
        }
        assert!(done >= 2);
    }

    #[test]
    fn member_is_rejected() {
        let f = veronese(2);
        let cfg = UbiquityConfig::new(3, 2, int(16), rat(1, 3));
        let e = resonant_construct(&[int(0)], &f, &Poly::zero(1), &cfg).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn neighborhoods() {
        let z = vec![PAdic::from_int(5, 3, 10).unwrap()];
        let v = delta_neighborhood(&[int(5)], &[z.clone()], &rat(1, 1000)).unwrap();
        assert!(v.certified);
        let v = delta_neighborhood(&[int(5 + 27)], &[z.clone()], &rat(1, 9)).unwrap();
        assert!(v.certified);
        let v = delta_neighborhood(&[int(5 + 27)], &[z], &rat(1, 81)).unwrap();
        assert!(!v.certified);
        assert_eq!(v.distance_bound, Some(rat(1, 27)));
    }
}
