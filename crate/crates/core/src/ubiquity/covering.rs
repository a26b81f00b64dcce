//! Monte Carlo estimate of how much of a ball the neighbourhoods `Δ(R_F, ρ(2^t))` cover.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::resonant::{resonant_construct, UbiquityConfig};
use crate::arith::{self, pow_int};
use crate::error::{Error, Result};
use crate::padic::PAdicBall;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub t: u32,
    pub samples: usize,
    /// Samples with a certified resonant function at `Q = 2^t`.
    pub covered: usize,
    /// Samples inside `Φ^f(2^t, δ)`.
    pub in_phi: usize,
    /// Samples outside `Φ^f` whose construction failed a certificate or errored.
    pub failures: usize,
    pub frequency: f64,
    pub sigma: f64,
    /// `1 − |Φ^f ∩ B|/|B|` estimated from the same samples.
    pub floor: f64,
    /// Failure messages, one per failed sample.
    pub notes: Vec<String>,
}

/// Uniform sample of `ball` truncated at `digits` p-adic digits below its radius.
pub fn sample_ball(ball: &PAdicBall, digits: u32, rng: &mut impl Rng) -> Result<Vec<BigRational>> {
    if ball.k < 0 {
        return Err(Error::InvalidArgument("ball must lie in Z_p^m".into()));
    }
    let scale = pow_int(ball.p, ball.k as u32);
    let span = arith::checked_pow(ball.p, digits).ok_or_else(|| Error::InvalidArgument("too many digits".into()))?;
    Ok(ball
        .center
        .iter()
        .map(|c| c + BigRational::from_integer(&scale * BigInt::from(rng.gen_range(0..span))))
        .collect())
}

/// Fraction of sampled `x ∈ ball` covered by a certified `Δ(R_F, ρ(2^t))` with `β_F ≤ 2^t`.
pub fn covering_check(
    ball: &PAdicBall,
    t: u32,
    cfg: &UbiquityConfig,
    f: &[Poly],
    theta: &Poly,
    samples: usize,
    seed: u64,
) -> Result<CoveringReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut cfg = cfg.clone();
    cfg.q = arith::pow_rat(2, t as i64);
    cfg.max_doublings = 0;
    cfg.ball = Some(ball.clone());
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let digits = (max_digits(cfg.p) as i64 - ball.k).max(1) as u32;
    let points: Vec<Vec<BigRational>> = (0..samples).map(|_| sample_ball(ball, digits, &mut rng)).collect::<Result<_>>()?;
    let outcomes: Vec<Outcome> = points
        .par_iter()
        .map(|x| match resonant_construct(x, f, theta, &cfg) {
            Ok(c) if c.passed => Outcome::Covered,
            Ok(c) => Outcome::Failed(format!("{x:?}: {:?}", c.failed)),
            Err(Error::Precondition(msg)) if msg.contains('Φ') => Outcome::InPhi,
            Err(e) => Outcome::Failed(format!("{x:?}: {e}")),
        })
        .collect();
    let covered = outcomes.iter().filter(|o| matches!(o, Outcome::Covered)).count();
    let in_phi = outcomes.iter().filter(|o| matches!(o, Outcome::InPhi)).count();
    let notes: Vec<String> = outcomes
        .into_iter()
        .filter_map(|o| match o {
            Outcome::Failed(s) => Some(s),
            _ => None,
        })
        .collect();
    let nf = samples as f64;
    let frequency = covered as f64 / nf;
    Ok(CoveringReport {
        t,
        samples,
        covered,
        in_phi,
        failures: notes.len(),
        frequency,
        sigma: (frequency * (1.0 - frequency) / nf).sqrt(),
        floor: 1.0 - in_phi as f64 / nf,
        notes,
    })
}

enum Outcome {
    Covered,
    InPhi,
    Failed(String),
}

fn max_digits(p: u64) -> u32 {
    crate::measure::max_exponent(p).min(30)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn small_covering_run() {
        let f: Vec<Poly> = (1..=2u32).map(|k| Poly::monomial(vec![k], int(1))).collect();
        let cfg = UbiquityConfig::new(3, 2, int(2), rat(1, 3));
        let ball = PAdicBall::from_integers(3, &[1], 1).unwrap();
        let r = covering_check(&ball, 4, &cfg, &f, &Poly::zero(1), 12, 3).unwrap();
        assert_eq!(r.failures, 0, "{:?}", r.notes);
        assert_eq!(r.covered + r.in_phi, r.samples);
        assert!((r.frequency - r.floor).abs() < 1e-12);
    }
}
