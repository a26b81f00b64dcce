//! Convergence audits for the dyadic series and the Khintchine-type sums.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::psi::ApproxFunction;
use crate::arith::{self, int};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicSum {
    #[serde(with = "arith::rational_str")]
    pub gamma: BigRational,
    pub positive: bool,
    pub horizon: u64,
    /// `Σ_{|t| ≤ H} 2^{-γ|t|}` over `t ∈ Z_{≥0}^n`.
    pub partial: f64,
    /// Closed form `(1 − 2^{-γ})^{-n}`.
    pub total: f64,
    pub tail_lower: f64,
    pub tail_upper: f64,
    pub bracketed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub real_place: DyadicSum,
    pub finite_place: DyadicSum,
    pub summable: bool,
}

/// `γ` for the real place: `(ε − 2δ)α₁/(l(n+1))`.
pub fn gamma_real(eps: &BigRational, delta: &BigRational, l: usize, n: usize, alpha1: &BigRational) -> BigRational {
    (eps - delta * int(2)) * alpha1 / int((l * (n + 1)) as i64)
}

/// `γ` for a finite place: `(ε − 2δ + 1)α₁/(l(n+1))`.
pub fn gamma_finite(eps: &BigRational, delta: &BigRational, l: usize, n: usize, alpha1: &BigRational) -> BigRational {
    (eps - delta * int(2) + BigRational::one()) * alpha1 / int((l * (n + 1)) as i64)
}

fn ln_binom(s: u64, n: usize) -> f64 {
    // ln C(s+n-1, n-1)
    (1..n as u64).map(|i| ((s + i) as f64).ln() - (i as f64).ln()).sum()
}

/// Horizon past which consecutive shell ratios stay below one.
pub fn default_horizon(gamma: f64, n: usize) -> u64 {
    let x = (-gamma * std::f64::consts::LN_2).exp();
    let h = ((n as f64 + 1.0) * x - 2.0) / (1.0 - x);
    (h.max(0.0) * 4.0).ceil() as u64 + 64
}

/// Sums `2^{-γ|t|}` over `|t| ≤ H` and brackets the remainder.
pub fn dyadic_sum(gamma: &BigRational, n: usize, horizon: Option<u64>) -> DyadicSum {
    let g = arith::to_f64(gamma);
    let positive = gamma.is_positive();
    if !positive || n == 0 {
        return DyadicSum {
            gamma: gamma.clone(),
            positive,
            horizon: 0,
            partial: f64::INFINITY,
            total: f64::INFINITY,
            tail_lower: f64::INFINITY,
            tail_upper: f64::INFINITY,
            bracketed: false,
        };
    }
    let lx = -g * std::f64::consts::LN_2;
    let h = horizon.unwrap_or_else(|| default_horizon(g, n));
    let term = |s: u64| (ln_binom(s, n) + lx * s as f64).exp();
    let mut partial = 0.0;
    let mut c = 0.0;
    for s in 0..=h {
        let y = term(s) - c;
        let t = partial + y;
        c = (t - partial) - y;
        partial = t;
    }
    let total = (-(n as f64) * (-lx.exp_m1()).ln()).exp();
    let next = term(h + 1);
    let q = ((h + 1 + n as u64) as f64 / (h + 2) as f64) * lx.exp();
    let tail_lower = next;
    let tail_upper = if q < 1.0 { next / (1.0 - q) } else { f64::INFINITY };
    let rem = total - partial;
    let slack = 1e-9 * total;
    let bracketed = rem >= tail_lower - slack && rem <= tail_upper + slack;
    DyadicSum { gamma: gamma.clone(), positive, horizon: h, partial, total, tail_lower, tail_upper, bracketed }
}

/// Both `γ` cases with their dyadic sums.
pub fn series_audit(
    eps: &BigRational,
    delta: &BigRational,
    l: usize,
    n: usize,
    alpha1: &BigRational,
    horizon: Option<u64>,
) -> Result<SeriesReport> {
    if !alpha1.is_positive() {
        return Err(Error::Precondition("α₁ must be positive".into()));
    }
    let real_place = dyadic_sum(&gamma_real(eps, delta, l, n, alpha1), n, horizon);
    let finite_place = dyadic_sum(&gamma_finite(eps, delta, l, n, alpha1), n, horizon);
    let summable = real_place.positive && finite_place.positive && real_place.bracketed && finite_place.bracketed;
    Ok(SeriesReport { real_place, finite_place, summable })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    Convergent,
    Divergent,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelCantelliReport {
    /// `e` in `Σ k^e ψ(k)`: `n` without the real place, `n − 1` with it.
    pub weight_exponent: u32,
    /// `(K, Σ_{k ≤ K})` at dyadic checkpoints.
    pub partial_sums: Vec<(u64, f64)>,
    pub tail_lower: f64,
    pub tail_upper: f64,
    pub class: Convergence,
}

/// Lower and upper integral-test bounds for `Σ_{k>K} k^{-s} (ln(k+1))^{-b}`.
fn tail_bounds(s: &BigRational, b: u32, k: u64) -> (f64, f64) {
    let sf = arith::to_f64(s);
    let kf = k as f64;
    let one = BigRational::one();
    if s < &one || (s == &one && b <= 1) {
        return (f64::INFINITY, f64::INFINITY);
    }
    let b = b as f64;
    if s == &one {
        let upper = kf.ln().powf(1.0 - b) / (b - 1.0);
        let lower = ((kf + 1.0).ln() + std::f64::consts::LN_2).powf(1.0 - b) / (b - 1.0);
        return (lower, upper);
    }
    let lower = (kf + 1.0).powf(1.0 - sf) / (sf - 1.0) * (2.0 * (kf + 1.0)).ln().powf(-b).min(1.0);
    let upper = kf.powf(1.0 - sf) / (sf - 1.0) * if b > 0.0 { (kf + 1.0).ln().powf(-b) } else { 1.0 };
    (lower, upper)
}

/// Partial sums of `Σ k^e ψ(k)` with an integral-test bracket for the tail.
pub fn borel_cantelli_sum(psi: &ApproxFunction, n: usize, infinity_in_s: bool, horizon: u64) -> Result<BorelCantelliReport> {
    if !psi.is_single_variable() {
        return Err(Error::InvalidArgument("needs a single-variable ψ".into()));
    }
    if horizon < 2 {
        return Err(Error::InvalidArgument("horizon must be at least 2".into()));
    }
    let e = if infinity_in_s { n as u32 - 1 } else { n as u32 };
    let mut partial_sums = Vec::new();
    let mut sum = 0.0;
    let mut next = 1u64;
    for k in 1..=horizon {
        sum += (k as f64).powi(e as i32) * psi.eval_height(k as i128)?.to_f64();
        if k == next || k == horizon {
            partial_sums.push((k, sum));
            next *= 2;
        }
    }
    let (s, b, scale) = match psi {
        ApproxFunction::Zero => (None, 0, 0.0),
        ApproxFunction::Constant { .. } => (Some(-int(e as i64)), 0, 1.0),
        ApproxFunction::Power { c, e: pe } => (Some(pe - int(e as i64)), 0, arith::to_f64(c)),
        ApproxFunction::PowerLog { e: pe, b } => (Some(int(*pe as i64) - int(e as i64)), *b, 1.0),
        _ => unreachable!(),
    };
    let (tail_lower, tail_upper, class) = match s {
        None => (0.0, 0.0, Convergence::Convergent),
        Some(s) => {
            let (lo, hi) = tail_bounds(&s, b, horizon);
            let class = if hi.is_finite() {
                Convergence::Convergent
            } else if lo.is_infinite() {
                Convergence::Divergent
            } else {
                Convergence::Undecided
            };
            (lo * scale, hi * scale, class)
        }
    };
    Ok(BorelCantelliReport { weight_exponent: e, partial_sums, tail_lower, tail_upper, class })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerOrder {
    /// `(t, −ln ψ(t)/ln t, running infimum)` on the grid `t = 2^k`.
    pub grid: Vec<(f64, f64, f64)>,
    pub estimate: f64,
}

/// Running infimum of `−ln ψ(t)/ln t` on `t = 2, 4, …, 2^K`.
pub fn lower_order_fn(psi: impl Fn(f64) -> f64, horizon_exp: u32) -> LowerOrder {
    let mut grid = Vec::new();
    let mut inf = f64::INFINITY;
    for k in 1..=horizon_exp {
        let t = 2f64.powi(k as i32);
        let r = -psi(t).ln() / t.ln();
        if k as f64 >= horizon_exp as f64 / 2.0 {
            inf = inf.min(r);
        }
        grid.push((t, r, inf.min(r)));
    }
    let estimate = if inf.is_finite() { inf } else { grid.last().map(|g| g.1).unwrap_or(f64::NAN) };
    LowerOrder { grid, estimate }
}

pub fn lower_order(psi: &ApproxFunction, horizon_exp: u32) -> Result<LowerOrder> {
    if !psi.is_single_variable() || psi == &ApproxFunction::Zero {
        return Err(Error::InvalidArgument("needs a positive single-variable ψ".into()));
    }
    let psi = psi.clone();
    let f = move |t: f64| match &psi {
        ApproxFunction::Constant { c } => arith::to_f64(c),
        ApproxFunction::Power { c, e } => arith::to_f64(c) * t.powf(-arith::to_f64(e)),
        ApproxFunction::PowerLog { e, b } => t.powi(-(*e as i32)) * (t + 1.0).ln().powi(-(*b as i32)),
        _ => f64::NAN,
    };
    Ok(lower_order_fn(f, horizon_exp))
}

/// True when `γ` is zero, the degenerate boundary `δ = ε/2`.
pub fn gamma_is_degenerate(g: &BigRational) -> bool {
    g.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn gamma_examples() {
        let g = gamma_real(&rat(1, 10), &rat(1, 25), 2, 2, &int(1));
        assert_eq!(g, rat(1, 300));
        assert!(gamma_is_degenerate(&gamma_real(&rat(1, 10), &rat(1, 20), 2, 2, &int(1))));
        let g2 = gamma_finite(&rat(1, 10), &rat(1, 25), 2, 2, &int(3));
        assert_eq!(g2 - gamma_real(&rat(1, 10), &rat(1, 25), 2, 2, &int(3)), rat(3, 6));
    }

    #[test]
    fn dyadic_sums_bracket() {
        for (g, n) in [(rat(1, 300), 2usize), (rat(1, 2), 1), (rat(7, 5), 3)] {
            let s = dyadic_sum(&g, n, None);
            assert!(s.bracketed, "{s:?}");
        }
        let d = dyadic_sum(&int(0), 2, None);
        assert!(!d.positive && !d.bracketed);
    }

    #[test]
    fn khintchine_family() {
        let n = 2;
        let conv = borel_cantelli_sum(&ApproxFunction::power(n as i64 + 2), n, false, 1 << 12).unwrap();
        assert_eq!(conv.class, Convergence::Convergent);
        let div = borel_cantelli_sum(&ApproxFunction::power(n as i64 + 1), n, false, 1 << 12).unwrap();
        assert_eq!(div.class, Convergence::Divergent);
        let log = borel_cantelli_sum(&ApproxFunction::PowerLog { e: n as u32 + 1, b: 2 }, n, false, 1 << 12).unwrap();
        assert_eq!(log.class, Convergence::Convergent);
        assert!(log.tail_lower <= log.tail_upper);
        let real = borel_cantelli_sum(&ApproxFunction::power(n as i64), n, true, 1 << 10).unwrap();
        assert_eq!(real.class, Convergence::Divergent);
    }

    #[test]
    fn lower_orders() {
        let l = lower_order(&ApproxFunction::power(3), 20).unwrap();
        assert!(l.grid.iter().all(|g| (g.1 - 3.0).abs() < 1e-12));
        let l = lower_order_fn(|t| t.powi(-3) * (1.0 + 1.0 / t), 20);
        assert!((l.estimate - 3.0).abs() < 1e-3);
        let c = lower_order(&ApproxFunction::Constant { c: int(1) }, 10).unwrap();
        assert_eq!(c.estimate, 0.0);
    }
}
