//! Monte Carlo witness frequencies per dyadic height window on the Veronese curve.
//!
//! A sample is a random `x ∈ Z_p` truncated at `p^K`. For window `t` the sample
//! counts as a hit when some `(a_0, a)` with `a ≠ 0` and height `h ∈ [2^t, 2^{t+1})`
//! satisfies `|a_0 + a·f(x)|_p ≤ ψ(h)`. Candidates are the vectors of the
//! congruence lattice for the smallest valuation needed in the window.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::psi::{height, ApproxFunction};
use super::series::Convergence;
use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{GammaLattice, IVec};
use crate::measure::max_exponent;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyConfig {
    pub p: u64,
    pub n: usize,
    pub psi: ApproxFunction,
    pub t_min: u32,
    pub t_max: u32,
    /// Windows `fit.0 ..= fit.1` enter the slope fit.
    pub fit: (u32, u32),
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowStat {
    pub t: u32,
    /// Smallest `v` with `p^{-v} ≤ ψ(2^t)`.
    pub valuation: u32,
    pub hits: usize,
    pub samples: usize,
    pub frequency: f64,
    /// Witnesses summed over all samples.
    pub witnesses: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub windows: Vec<WindowStat>,
    pub slope: f64,
    pub sigma: f64,
    /// Convergent when `slope + 3σ < −1`.
    pub observed: Convergence,
    /// Samples with a witness in each of the last two windows.
    pub still_growing: usize,
}

fn mulmod(a: i128, b: i128, m: i128) -> i128 {
    (a * b).rem_euclid(m)
}

/// Residues `x^i mod p^K`, `i = 1..=n`.
pub fn veronese_residues(x: i128, n: usize, m: i128) -> Vec<i128> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 1i128;
    for _ in 0..n {
        acc = mulmod(acc, x, m);
        out.push(acc);
    }
    out
}

fn valuation_mod(r: i128, p: i128, k: u32) -> u32 {
    if r == 0 {
        return k;
    }
    let mut v = 0;
    let mut r = r;
    while r % p == 0 {
        r /= p;
        v += 1;
    }
    v
}

/// Witnesses `(a_0, a)` for one window, sorted.
pub fn window_witnesses(
    p: u64,
    ys: &[i128],
    k: u32,
    t: u32,
    need: &dyn Fn(i128) -> Result<u32>,
) -> Result<Vec<IVec>> {
    let lo = 1i128 << t;
    let hi = (1i128 << (t + 1)) - 1;
    let m = arith::checked_pow(p, k).ok_or_else(|| Error::BudgetExceeded("modulus overflow".into()))? as i128;
    let v_lo = need(lo)?;
    if v_lo > k {
        return Err(Error::InsufficientPrecision { needed: v_lo as i64, available: k as i64 });
    }
    let candidates = if v_lo == 0 {
        let n = ys.len();
        let mut all = Vec::new();
        let side = 2 * hi + 1;
        let total = side.pow(n as u32 + 1);
        for idx in 0..total {
            let mut r = idx;
            let mut v = Vec::with_capacity(n + 1);
            for _ in 0..=n {
                v.push(r % side - hi);
                r /= side;
            }
            all.push(v);
        }
        all
    } else {
        let res: Vec<i128> = ys.iter().map(|y| y % arith::checked_pow(p, v_lo).unwrap() as i128).collect();
        GammaLattice::from_residues(p, v_lo, res, false)?.vectors_within(hi, crate::lattice::DEFAULT_BUDGET)?
    };
    let pi = p as i128;
    let mut out = Vec::new();
    for c in candidates {
        let h = height(&c);
        if h < lo || h > hi || c[1..].iter().all(|&a| a == 0) {
            continue;
        }
        let r = c[1..].iter().zip(ys).fold(c[0].rem_euclid(m), |acc, (a, y)| (acc + mulmod(*a, *y, m)).rem_euclid(m));
        if valuation_mod(r, pi, k) >= need(h)? {
            out.push(c);
        }
    }
    out.sort();
    Ok(out)
}

/// Weighted least squares of `ln f` against `ln t` with delta-method weights.
pub fn fit_slope(points: &[(f64, usize, usize)]) -> Option<(f64, f64)> {
    let rows: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(t, hits, n)| {
            let f = (hits as f64 + 0.5) / (n as f64 + 1.0);
            let var = (1.0 - f) / (n as f64 * f);
            (t.ln(), f.ln(), 1.0 / var)
        })
        .collect();
    if rows.len() < 2 {
        return None;
    }
    let sw: f64 = rows.iter().map(|r| r.2).sum();
    let mx = rows.iter().map(|r| r.2 * r.0).sum::<f64>() / sw;
    let my = rows.iter().map(|r| r.2 * r.1).sum::<f64>() / sw;
    let sxx: f64 = rows.iter().map(|r| r.2 * (r.0 - mx).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|r| r.2 * (r.0 - mx) * (r.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some((sxy / sxx, (1.0 / sxx).sqrt()))
}

pub fn run_dichotomy(cfg: &DichotomyConfig) -> Result<DichotomyReport> {
    arith::check_prime(cfg.p)?;
    cfg.psi.validate()?;
    if !cfg.psi.is_single_variable() || cfg.psi == ApproxFunction::Zero {
        return Err(Error::InvalidArgument("needs a positive single-variable ψ".into()));
    }
    if cfg.n == 0 || cfg.samples == 0 || cfg.t_min > cfg.t_max || cfg.t_max > 24 {
        return Err(Error::InvalidArgument("bad window range, dimension or sample count".into()));
    }
    let k = max_exponent(cfg.p);
    let m = arith::checked_pow(cfg.p, k).unwrap() as i128;
    let mut needs = vec![0u32; 1 << (cfg.t_max + 1)];
    let mut v = 0u32;
    for (h, slot) in needs.iter_mut().enumerate().skip(1) {
        let psi_h = cfg.psi.eval_height(h as i128)?;
        while v <= k && psi_h.cmp_with(&arith::pow_rat(cfg.p, -(v as i64)))? == Ordering::Greater {
            v += 1;
        }
        *slot = v;
    }
    if needs[needs.len() - 1] > k {
        return Err(Error::InsufficientPrecision { needed: needs[needs.len() - 1] as i64, available: k as i64 });
    }
    let need = |h: i128| -> Result<u32> { Ok(needs[h as usize]) };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let xs: Vec<i128> = (0..cfg.samples).map(|_| rng.gen_range(0..m)).collect();
    let windows: Vec<u32> = (cfg.t_min..=cfg.t_max).collect();
    let per_sample: Vec<Vec<usize>> = xs
        .par_iter()
        .map(|&x| {
            let ys = veronese_residues(x, cfg.n, m);
            windows
                .iter()
                .map(|&t| window_witnesses(cfg.p, &ys, k, t, &need).map(|w| w.len()))
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    let stats: Vec<WindowStat> = windows
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let hits = per_sample.iter().filter(|s| s[i] > 0).count();
            WindowStat {
                t,
                valuation: needs[1 << t],
                hits,
                samples: cfg.samples,
                frequency: hits as f64 / cfg.samples as f64,
                witnesses: per_sample.iter().map(|s| s[i]).sum(),
            }
        })
        .collect();
    let pts: Vec<(f64, usize, usize)> = stats
        .iter()
        .filter(|w| w.t >= cfg.fit.0 && w.t <= cfg.fit.1)
        .map(|w| (w.t as f64, w.hits, w.samples))
        .collect();
    let (slope, sigma) = fit_slope(&pts).ok_or_else(|| Error::InvalidArgument("fit range needs two windows".into()))?;
    let observed = if slope + 3.0 * sigma < -1.0 { Convergence::Convergent } else { Convergence::Divergent };
    let w = windows.len();
    let still_growing = if w >= 2 { per_sample.iter().filter(|s| s[w - 1] > 0 && s[w - 2] > 0).count() } else { 0 };
    Ok(DichotomyReport { windows: stats, slope, sigma, observed, still_growing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::sets::{needed_valuation, solution_search, NonzeroConvention, SSystem};
    use crate::arith::int;
    use crate::padic::Place;
    use crate::poly::Poly;

    #[test]
    fn windows_match_exhaustive_search() {
        let p = 3;
        let k = max_exponent(p);
        let m = arith::checked_pow(p, k).unwrap() as i128;
        let psi = ApproxFunction::power(4);
        let f = vec![Poly::var(1, 0), Poly::var(1, 0).mul(&Poly::var(1, 0))];
        let sys = SSystem::new(vec![Place::Finite(p)], f, None).unwrap();
        let need = |h: i128| -> Result<u32> { Ok(needed_valuation(&psi, h, p)?.unwrap() as u32) };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let x: i128 = rng.gen_range(0..m);
            let ys = veronese_residues(x, 2, m);
            let xq = vec![vec![int(x as i64)]];
            let list = solution_search(&sys, &xq, &psi, 31, NonzeroConvention::Coefficients, u64::MAX).unwrap();
            for t in 1..=4u32 {
                let mut want: Vec<IVec> = list
                    .solutions
                    .iter()
                    .map(|w| std::iter::once(w.a0).chain(w.a.iter().copied()).collect::<IVec>())
                    .filter(|v| {
                        let h = height(v);
                        h >= 1 << t && h < 1 << (t + 1)
                    })
                    .collect();
                want.sort();
                assert_eq!(window_witnesses(p, &ys, k, t, &need).unwrap(), want, "x={x} t={t}");
            }
        }
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, usize, usize)> =
            (4..12).map(|t| (t as f64, (100_000.0 / (t * t) as f64).round() as usize, 100_000)).collect();
        let (s, sigma) = fit_slope(&pts).unwrap();
        assert!((s + 2.0).abs() < 0.01 && sigma < 0.05, "{s} {sigma}");
    }
}
