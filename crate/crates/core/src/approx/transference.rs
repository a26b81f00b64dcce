//! The sets `I_t^ν(α, λ)`, `H_t^ν(α, λ)` and the intersection step between them.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::psi::s_norm_int;
use super::sets::{vector_norm, SPoint, SSystem};
use crate::arith::{self, int};
use crate::error::{Error, Result};
use crate::padic::Place;
use crate::real::PowProd;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferenceParams {
    #[serde(with = "arith::rational_str")]
    pub eps: BigRational,
    #[serde(with = "arith::rational_str")]
    pub delta: BigRational,
    pub l: usize,
    pub n: usize,
    pub t: Vec<u32>,
    #[serde(with = "arith::rational_str")]
    pub alpha1: BigRational,
}

impl TransferenceParams {
    /// Upper end `1/(4(n+1)l²)` of the legal `ε` range.
    pub fn eps_cap(n: usize, l: usize) -> BigRational {
        BigRational::new(1.into(), (4 * (n + 1) * l * l).into())
    }

    pub fn validate(&self) -> Result<()> {
        let zero = BigRational::zero();
        if self.l == 0 || self.n == 0 {
            return Err(Error::InvalidArgument("l and n must be positive".into()));
        }
        if !(self.eps > zero && self.eps < Self::eps_cap(self.n, self.l)) {
            return Err(Error::Precondition("ε must lie in (0, 1/(4(n+1)l²))".into()));
        }
        if !(self.delta > zero && self.delta <= &self.eps / int(2)) {
            return Err(Error::Precondition("δ must lie in (0, ε/2]".into()));
        }
        if self.t.len() != self.n {
            return Err(Error::InvalidArgument("t must have n entries".into()));
        }
        if !self.alpha1.is_positive() {
            return Err(Error::Precondition("α₁ must be positive".into()));
        }
        Ok(())
    }

    pub fn t_abs(&self) -> u64 {
        self.t.iter().map(|&x| x as u64).sum()
    }

    fn t_abs_q(&self) -> BigRational {
        int(self.t_abs() as i64)
    }

    /// `φ_δ(t) = 2^{δ|t|}`.
    pub fn phi_delta(&self) -> PowProd {
        PowProd::pow2(&self.delta * self.t_abs_q())
    }

    /// `Ψ_0(2^t) = 2^{-|t|}`.
    pub fn psi0_dyadic(&self) -> PowProd {
        PowProd::pow2(-self.t_abs_q())
    }

    /// `r_ν(t)`.
    pub fn r(&self, place: Place) -> PowProd {
        let s = self.t_abs_q() + BigRational::one();
        match place {
            Place::Infinite => PowProd::pow2(s * (BigRational::one() - &self.eps)),
            Place::Finite(_) => PowProd::pow2(-(s * &self.eps)),
        }
    }

    /// Whether `|t| > l/(1 − ε/2)`.
    pub fn beyond_threshold(&self) -> bool {
        let bound = int(self.l as i64) / (BigRational::one() - &self.eps / int(2));
        self.t_abs_q() > bound
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    I,
    H,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipTrace {
    pub kind: SetKind,
    pub place: Place,
    /// Value condition, gradient condition, size condition.
    pub conditions: [bool; 3],
    pub member: bool,
}

/// Membership of `x` in `I_t^ν(α, λ)` or `H_t^ν(α, λ)`.
///
/// | set | value | gradient | size |
/// |---|---|---|---|
/// | I | `|a_0+a·f+Θ|_S^l < λΨ_0(2^t)` | `‖∇(a·f_ν+Θ_ν)‖_ν < λr_ν(t)` | `2^{t_i} ≤ max{1,|a_i|_S} ≤ 2^{t_i+1}` |
/// | H | `|a_0+a·f|_S^l < 2^lλΨ_0(2^t)` | `‖∇(a·f_ν)‖_ν < 2λr_ν(t)` | `|a_i|_S ≤ 2^{t_i+2}` |
#[allow(clippy::too_many_arguments)]
pub fn it_ht_membership(
    sys: &SSystem,
    x: &SPoint,
    params: &TransferenceParams,
    a0: i128,
    a: &[i128],
    lambda: &PowProd,
    place: Place,
    kind: SetKind,
) -> Result<MembershipTrace> {
    params.validate()?;
    if params.l != sys.l() || params.n != sys.n() {
        return Err(Error::InvalidArgument("parameters do not match the system".into()));
    }
    if a.iter().all(|&v| v == 0) {
        return Err(Error::Precondition("a must be nonzero".into()));
    }
    let nu = sys.place_index(place).ok_or_else(|| Error::InvalidArgument(format!("{place} is not in S")))?;
    let with_theta = kind == SetKind::I;
    let l = sys.l();
    let vals = sys.values(x, a0, a, with_theta)?;
    let lhs = num_traits::pow(sys.s_norm(&vals), l);
    let grad = vector_norm(&sys.gradient(x, a, nu, with_theta)?, place);
    let (value_bound, grad_bound) = match kind {
        SetKind::I => (lambda.mul(&params.psi0_dyadic()), lambda.mul(&params.r(place))),
        SetKind::H => (
            lambda.mul(&params.psi0_dyadic()).mul(&PowProd::pow2(int(l as i64))),
            lambda.mul(&params.r(place)).mul(&PowProd::pow2(int(1))),
        ),
    };
    let c_value = value_bound.cmp_rational(&lhs) == Ordering::Greater;
    let c_grad = grad.cmp_pow(&grad_bound) == Ordering::Less;
    let c_size = a.iter().zip(&params.t).all(|(&ai, &ti)| {
        let s = s_norm_int(ai, &sys.places);
        match kind {
            SetKind::I => {
                let m = s.max(BigRational::one());
                arith::pow_rat(2, ti as i64) <= m && m <= arith::pow_rat(2, ti as i64 + 1)
            }
            SetKind::H => s <= arith::pow_rat(2, ti as i64 + 2),
        }
    });
    let conditions = [c_value, c_grad, c_size];
    Ok(MembershipTrace { kind, place, conditions, member: conditions.iter().all(|&c| c) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub alpha: (i128, Vec<i128>),
    pub alpha_prime: (i128, Vec<i128>),
    pub alpha_second: (i128, Vec<i128>),
    pub h_trace: MembershipTrace,
    /// `a″ ≠ 0`.
    pub a_nonzero: bool,
    /// Whether `a″ = 0` would contradict `1 ≤ |a_0″|^l < 2^l φ_δ(t) Ψ_0(2^t)`.
    pub zero_excluded_by_bound: bool,
    pub passed: bool,
    pub failed: Vec<String>,
}

/// Given `x ∈ I_t^ν(α, φ_δ(t)) ∩ I_t^ν(α′, φ_δ(t))`, checks `x ∈ H_t^ν(α − α′, φ_δ(t))`.
pub fn intersection_witness(
    sys: &SSystem,
    x: &SPoint,
    params: &TransferenceParams,
    place: Place,
    alpha: (i128, &[i128]),
    alpha_prime: (i128, &[i128]),
) -> Result<IntersectionReport> {
    if alpha.0 == alpha_prime.0 && alpha.1 == alpha_prime.1 {
        return Err(Error::Precondition("α and α′ must differ".into()));
    }
    if !params.beyond_threshold() {
        return Err(Error::Precondition("|t| must exceed l/(1−ε/2)".into()));
    }
    if !sys.has_infinity() {
        return Err(Error::Precondition("S must contain the real place".into()));
    }
    let lambda = params.phi_delta();
    for (a0, a) in [alpha, alpha_prime] {
        let tr = it_ht_membership(sys, x, params, a0, a, &lambda, place, SetKind::I)?;
        if !tr.member {
            return Err(Error::Precondition(format!("x is not in I_t for ({a0}, {a:?}): {:?}", tr.conditions)));
        }
    }
    let a0s = alpha.0 - alpha_prime.0;
    let as_: Vec<i128> = alpha.1.iter().zip(alpha_prime.1).map(|(u, v)| u - v).collect();
    let a_nonzero = as_.iter().any(|&v| v != 0);
    let bound = PowProd::pow2(int(sys.l() as i64)).mul(&lambda).mul(&params.psi0_dyadic());
    let zero_excluded_by_bound = bound.cmp_rational(&BigRational::one()) != Ordering::Greater;
    let mut failed = Vec::new();
    let h_trace = if a_nonzero {
        let tr = it_ht_membership(sys, x, params, a0s, &as_, &lambda, place, SetKind::H)?;
        for (ok, name) in tr.conditions.iter().zip(["value", "gradient", "size"]) {
            if !ok {
                failed.push(name.to_string());
            }
        }
        tr
    } else {
        failed.push("a'' = 0".into());
        MembershipTrace { kind: SetKind::H, place, conditions: [false; 3], member: false }
    };
    if !zero_excluded_by_bound {
        failed.push("2^l φ_δ(t) Ψ_0(2^t) ≥ 1".into());
    }
    Ok(IntersectionReport {
        alpha: (alpha.0, alpha.1.to_vec()),
        alpha_prime: (alpha_prime.0, alpha_prime.1.to_vec()),
        alpha_second: (a0s, as_),
        h_trace,
        a_nonzero,
        zero_excluded_by_bound,
        passed: failed.is_empty(),
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::poly::Poly;

    fn params(t: Vec<u32>, l: usize) -> TransferenceParams {
        let n = t.len();
        let eps = TransferenceParams::eps_cap(n, l) / int(2);
        TransferenceParams { delta: &eps / int(4), eps, l, n, t, alpha1: int(1) }
    }

    #[test]
    fn dyadic_window_rejects() {
        let sys = SSystem::new(vec![Place::Infinite], vec![Poly::var(1, 0)], None).unwrap();
        let pr = params(vec![3], 1);
        let x = vec![vec![rat(1, 3)]];
        let lam = pr.phi_delta();
        let tr = it_ht_membership(&sys, &x, &pr, -6, &[17], &lam, Place::Infinite, SetKind::I).unwrap();
        assert!(!tr.conditions[2] && !tr.member);
        assert!(it_ht_membership(&sys, &x, &pr, 0, &[0], &lam, Place::Infinite, SetKind::I).is_err());
    }

    #[test]
    fn i_member_is_h_member_without_theta() {
        let sys = SSystem::new(vec![Place::Infinite], vec![Poly::var(1, 0)], None).unwrap();
        let pr = params(vec![4], 1);
        let x = vec![vec![rat(-3, 16)]];
        let lam = pr.phi_delta();
        let i = it_ht_membership(&sys, &x, &pr, 3, &[16], &lam, Place::Infinite, SetKind::I).unwrap();
        let h = it_ht_membership(&sys, &x, &pr, 3, &[16], &lam, Place::Infinite, SetKind::H).unwrap();
        assert!(i.member);
        assert!(h.member);
    }

    #[test]
    fn boundary_and_threshold() {
        let pr = params(vec![1], 2);
        assert!(!pr.beyond_threshold());
        let mut bad = params(vec![5], 1);
        bad.delta = &bad.eps / int(2) + rat(1, 1_000_000);
        assert!(bad.validate().is_err());
    }
}
