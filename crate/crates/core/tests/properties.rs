//! Property tests for the invariants of each module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use sadic_core::approx::{
    borel_cantelli_sum, derivative_split, phi_membership, ApproxFunction, PhiMethod, PsiValue, SSystem,
};
use sadic_core::arith::{int, rat};
use sadic_core::lattice::{GammaLattice, MinimaStrategy, DEFAULT_BUDGET};
use sadic_core::maps::{difference_quotient_rat, dn_at_point, normalize_coordinates};
use sadic_core::measure::{good_certify, sublevel_measure_exact, GoodConstants, MeasureOptions};
use sadic_core::poly::{factorial, MultiIndex, Poly};
use sadic_core::ubiquity::{hensel_root, strong_approx};
use sadic_core::{PAdic, PAdicBall, Place};

fn pw(p: u64, e: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b, (-e) as usize).recip()
    }
}

fn val(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let (mut n, mut v) = (n.clone(), 0i64);
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        v
    };
    Some(count(q.numer()) - count(q.denom()))
}

fn norm(q: &BigRational, p: u64) -> BigRational {
    val(q, p).map_or_else(BigRational::zero, |v| pw(p, -v))
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-5000i64..5000, 1i64..200).prop_map(|(a, b)| rat(a, b))
}

fn univariate(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-20i64..20, 1..=max_deg + 1).prop_map(|c| Poly::univariate_int(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn padic_norms_are_ultrametric_and_multiplicative(p in prime(), a in rational(), b in rational()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let pa = PAdic::from_rational(&a, p, 24).unwrap();
        let pb = PAdic::from_rational(&b, p, 24).unwrap();
        let (na, nb) = (pa.norm().unwrap(), pb.norm().unwrap());
        prop_assert_eq!(&na, &norm(&a, p));
        prop_assert_eq!(pa.mul(&pb).norm().unwrap(), &na * &nb);
        let sum = pa.add(&pb);
        if sum.is_determinate() {
            let ns = sum.norm().unwrap();
            prop_assert!(ns <= na.clone().max(nb.clone()));
            if na != nb {
                prop_assert_eq!(ns, na.max(nb));
            }
        }
    }

    #[test]
    fn rational_round_trip(p in prime(), q in rational(), n in 1u32..30) {
        prop_assume!(!q.is_zero());
        let x = PAdic::from_rational(&q, p, n).unwrap();
        prop_assert!(x.agrees_with(&q));
        let r = x.to_rational().unwrap();
        let abs = x.absolute_precision().unwrap();
        prop_assert!(val(&(&r - &q), p).map_or(true, |v| v >= abs));
    }

    #[test]
    fn balls_nest_or_separate(p in prime(), c1 in prop::collection::vec(0i64..400, 2), c2 in prop::collection::vec(0i64..400, 2), k1 in 0i64..4, k2 in 0i64..4) {
        let b1 = PAdicBall::from_integers(p, &c1, k1).unwrap();
        let b2 = PAdicBall::from_integers(p, &c2, k2).unwrap();
        prop_assert_eq!(b1.measure(), pw(p, -2 * k1));
        prop_assert!(b1.is_disjoint(&b2) || b1.contains_ball(&b2) || b2.contains_ball(&b1));
        prop_assert!(!(b1.is_disjoint(&b2) && (b1.contains_ball(&b2) || b2.contains_ball(&b1))));
    }

    #[test]
    fn difference_quotients_are_symmetric(f in univariate(6), pts in prop::collection::btree_set(-30i64..30, 4)) {
        let pts: Vec<BigRational> = pts.into_iter().map(int).collect();
        let beta = MultiIndex(vec![3]);
        let base = difference_quotient_rat(&f, &beta, &[pts.clone()]).unwrap();
        let mut rev = pts.clone();
        rev.reverse();
        prop_assert_eq!(&base, &difference_quotient_rat(&f, &beta, &[rev]).unwrap());
        let swapped = vec![pts[2].clone(), pts[0].clone(), pts[3].clone(), pts[1].clone()];
        prop_assert_eq!(&base, &difference_quotient_rat(&f, &beta, &[swapped]).unwrap());
    }

    #[test]
    fn diagonal_law(f in univariate(6), j in 0u32..=4, a in rational()) {
        let mut d = f.clone();
        for _ in 0..j {
            d = d.partial(0);
        }
        let lhs = dn_at_point(&f, j, &a).unwrap() * BigRational::from_integer(factorial(j));
        prop_assert_eq!(lhs, d.eval(&[a]));
    }

    #[test]
    fn normalized_coordinates_have_unit_determinant(p in prop::sample::select(vec![3u64, 5]), c in prop::collection::vec(-5i64..5, 4), x0 in prop::collection::vec(0i64..20, 2)) {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let f = x.pow(2).scale(&int(c[0])).add(&x.mul(&y).scale(&int(c[1]))).add(&y.pow(2).scale(&int(c[2]))).add(&x.scale(&int(c[3])));
        let x0: Vec<BigRational> = x0.into_iter().map(int).collect();
        if let Ok(nc) = normalize_coordinates(&f, &x0, 2, p, 3) {
            let m = &nc.matrix;
            let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
            prop_assert!(!(det % BigInt::from(p)).is_zero());
        }
    }

    #[test]
    fn sublevel_measure_is_monotone_and_additive(p in prop::sample::select(vec![3u64, 5]), f in univariate(4), m in 0i64..5) {
        prop_assume!(!f.is_zero());
        let opts = MeasureOptions::default();
        let ball = PAdicBall::unit(p, 1).unwrap();
        let coarse = sublevel_measure_exact(&f, &ball, m, &opts).unwrap();
        let fine = sublevel_measure_exact(&f, &ball, m + 1, &opts).unwrap();
        prop_assert!(fine.upper <= coarse.lower);
        let parts = ball
            .children()
            .iter()
            .map(|c| sublevel_measure_exact(&f, c, m, &opts).unwrap().lower)
            .fold(BigRational::zero(), |a, b| a + b);
        prop_assert_eq!(parts, coarse.lower);
    }

    #[test]
    fn good_verdicts_survive_scaling(p in prop::sample::select(vec![3u64, 5]), k in 1u32..=3, e in 0i64..3, u in 1i64..5) {
        prop_assume!(u % p as i64 != 0);
        let f = Poly::monomial(vec![k], int(1)).add(&Poly::monomial(vec![0], int(p as i64)));
        let ball = PAdicBall::unit(p, 1).unwrap();
        let consts = GoodConstants::polynomial(k, 1);
        let grid: Vec<i64> = (1..=6).collect();
        let base = good_certify(&f, &ball, &consts, &grid, &MeasureOptions::default()).unwrap();
        let lam = pw(p, e) * int(u);
        let scaled_grid: Vec<i64> = grid.iter().map(|m| m + e).collect();
        let scaled = good_certify(&f.scale(&lam), &ball, &consts, &scaled_grid, &MeasureOptions::default()).unwrap();
        prop_assert_eq!(base.passes(), scaled.passes());
        for (a, b) in base.rows.iter().zip(&scaled.rows) {
            prop_assert_eq!(&a.measure, &b.measure);
        }
    }

    #[test]
    fn lattice_determinant_and_enumeration(p in prop::sample::select(vec![2u64, 3, 5]), j in 1u32..4, ys in prop::collection::vec(0i64..100_000, 1..=2)) {
        let n = ys.len();
        let y: Vec<BigRational> = ys.iter().map(|&v| int(v)).collect();
        let lat = GammaLattice::from_rationals(&y, p, j, true).unwrap();
        prop_assert_eq!(lat.basis_determinant(), BigInt::from(p).pow(j + n as u32));
        let r = (p as i128).pow(j).min(12);
        let d = n + 1;
        let listed = lat.enumerate_box(&vec![-r; d], &vec![r; d], DEFAULT_BUDGET).unwrap();
        let m = (p as i128).pow(j);
        let member = |q: &[i128]| {
            q[1..].iter().all(|v| v % p as i128 == 0)
                && q[1..].iter().zip(&ys).fold(q[0], |acc, (a, y)| acc + a * *y as i128).rem_euclid(m) == 0
        };
        let mut count = 0;
        let mut q = vec![-r; d];
        loop {
            if member(&q) {
                count += 1;
                prop_assert!(listed.contains(&q));
                prop_assert!(lat.membership(&q).is_some());
            } else {
                prop_assert!(lat.membership(&q).is_none());
            }
            let mut i = 0;
            while i < d && q[i] == r {
                q[i] = -r;
                i += 1;
            }
            if i == d {
                break;
            }
            q[i] += 1;
        }
        prop_assert_eq!(count, listed.len());
    }

    #[test]
    fn minima_grow_with_j(p in prop::sample::select(vec![2u64, 3]), j in 1u32..5, ys in prop::collection::vec(0i64..100_000, 2)) {
        let y: Vec<BigRational> = ys.iter().map(|&v| int(v)).collect();
        let q = int(1);
        let a = GammaLattice::from_rationals(&y, p, j, true).unwrap().successive_minima(&q, MinimaStrategy::Auto, DEFAULT_BUDGET).unwrap();
        let b = GammaLattice::from_rationals(&y, p, j + 1, true).unwrap().successive_minima(&q, MinimaStrategy::Auto, DEFAULT_BUDGET).unwrap();
        for (x, y) in a.mu.iter().zip(&b.mu) {
            prop_assert!(x <= y);
        }
    }

    #[test]
    fn phi_methods_agree_with_first_minimum(p in prop::sample::select(vec![3u64, 5]), x in 0i64..1_000_000, t in 1u32..5) {
        let f = vec![Poly::var(1, 0), Poly::var(1, 0).pow(2)];
        let q = int(1 << t);
        let delta = rat(1, 3);
        let v = phi_membership(&[int(x)], &f, p, &q, &delta, PhiMethod::Both).unwrap();
        let y = vec![int(x), int(x * x)];
        let lat = GammaLattice::from_rationals(&y, p, v.j, true).unwrap();
        let m = lat.successive_minima(&q, MinimaStrategy::Auto, DEFAULT_BUDGET).unwrap();
        if !v.member {
            prop_assert!(m.lambdas[0] > BigRational::one());
        }
    }

    #[test]
    fn derivative_split_is_a_partition(p in prop::sample::select(vec![3u64, 5]), x in rational(), a in prop::collection::vec(-50i128..50, 2), eps in 1i64..20) {
        prop_assume!(a.iter().any(|&v| v != 0));
        prop_assume!(val(&x, p).map_or(true, |v| v >= 0));
        let f = vec![Poly::var(1, 0), Poly::var(1, 0).pow(2)];
        let sys = SSystem::new(vec![Place::Infinite, Place::Finite(p)], f, None).unwrap();
        let pt = vec![vec![x.clone()], vec![x.clone()]];
        let s = derivative_split(&sys, &pt, &a, &rat(eps, 100)).unwrap();
        prop_assert_eq!(s.large, s.small_at.is_empty());
        prop_assert_eq!(s.places.len(), 2);
        let small: Vec<Place> = s.places.iter().filter(|pl| !pl.large).map(|pl| pl.place).collect();
        prop_assert_eq!(&small, &s.small_at);
        // Recompute the real-place gradient directly.
        let g = (BigRational::from_integer(BigInt::from(a[0])) + BigRational::from_integer(BigInt::from(2 * a[1])) * &x).abs();
        let norm_a = a.iter().map(|v| v.abs()).max().unwrap() as f64;
        let thr = norm_a.powf(1.0 - eps as f64 / 100.0);
        let gf = sadic_core::arith::to_f64(&g);
        if (gf - thr).abs() > 1e-9 * thr.max(1.0) {
            prop_assert_eq!(s.places[0].large, gf > thr);
        }
    }

    #[test]
    fn psi0_dominates_decaying_products(a in prop::collection::vec(-300i128..300, 1..4), c in 1i64..100, e in 1i64..4) {
        prop_assume!(a.iter().any(|&v| v != 0));
        let places = [Place::Infinite];
        let psi = ApproxFunction::Product { c: rat(c, 100), e: int(e) };
        let v = psi.eval(&a, &places).unwrap();
        let psi0 = match ApproxFunction::Psi0.eval(&a, &places).unwrap() {
            PsiValue::Exact(q) => q,
            other => panic!("{other:?}"),
        };
        prop_assert_eq!(v.cmp_with(&psi0).unwrap(), std::cmp::Ordering::Greater);
        let mut b = a.clone();
        b[0] = b[0].abs() + 1;
        prop_assert!(psi.monotone_on(&a, &b, &places).unwrap());
    }

    #[test]
    fn borel_cantelli_stable_under_doubling(n in 1usize..4, which in 0usize..3, inf in any::<bool>(), h in 8u32..12) {
        let e = if inf { n as i64 } else { n as i64 + 1 };
        let psi = match which {
            0 => ApproxFunction::power(e + 1),
            1 => ApproxFunction::power(e),
            _ => ApproxFunction::PowerLog { e: e as u32, b: 2 },
        };
        let a = borel_cantelli_sum(&psi, n, inf, 1 << h).unwrap();
        let b = borel_cantelli_sum(&psi, n, inf, 1 << (h + 1)).unwrap();
        prop_assert_eq!(a.class, b.class);
        prop_assert!(b.partial_sums.last().unwrap().1 >= a.partial_sums.last().unwrap().1);
    }

    #[test]
    fn strong_approximation_meets_all_bounds(p in prime(), e in -3i64..6, num in -100_000i64..100_000, s in 0u32..4, xi in rational(), slack in 0i64..100) {
        let mut den = 1 + (num.unsigned_abs() % 37) as i64;
        while den % p as i64 == 0 {
            den += 1;
        }
        let xp = BigRational::new(BigInt::from(num), BigInt::from(den) * BigInt::from(p).pow(s));
        let padic = if xp.is_zero() { PAdic::zero(p) } else { PAdic::from_rational(&xp, p, 32).unwrap() };
        let eps_p = pw(p, -e);
        let eps_inf = pw(p, e + 1) / int(2) + rat(slack, 10);
        let r = strong_approx(&xi, &padic, &eps_inf, &eps_p).unwrap();
        prop_assert!((&r - &xi).abs() <= eps_inf);
        prop_assert!(norm(&(&r - &xp), p) <= eps_p);
        let mut d = r.denom().clone();
        while (&d % BigInt::from(p)).is_zero() {
            d /= BigInt::from(p);
        }
        prop_assert!(d.is_one());
    }

    #[test]
    fn hensel_valuations_double(p in prime(), d in 0i64..3, extra in 1i64..4, c0 in 1i64..500, c1 in 1i64..500, tail in prop::collection::vec(-50i64..50, 0..4), n in 8u32..48) {
        prop_assume!(c0 % p as i64 != 0 && c1 % p as i64 != 0);
        let mut coeffs = vec![pw(p, 2 * d + extra) * int(c0), pw(p, d) * int(c1)];
        coeffs.extend(tail.iter().map(|&c| int(c)));
        let g = Poly::univariate(&coeffs);
        let root = hensel_root(&g, p, n).unwrap();
        for w in root.log.windows(2) {
            prop_assert!(w[1] > w[0]);
            prop_assert!(w[1] >= (2 * w[0] - 2 * d).min(n as i64 + 2 * d + 1));
        }
        let res = g.eval(&[BigRational::from_integer(root.residue.clone())]);
        prop_assert!(val(&res, p).map_or(true, |v| v >= n as i64));
    }
}
