//! Polynomial maps `U → Q_p^n`, difference quotients and coordinate changes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, int, pow_rat};
use crate::error::{Error, Result};
use crate::padic::{PAdic, PAdicBall};
use crate::poly::{factorial, MultiIndex, Poly, Scalar};

/// A polynomial map on a ball `U ⊂ Z_p^m` (or `Q_p^m`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticMap {
    pub name: String,
    pub p: u64,
    pub domain: PAdicBall,
    pub coords: Vec<Poly>,
}

/// Sup norms of `f` and `∇f` over a sample grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationReport {
    #[serde(with = "arith::rational_str")]
    pub max_value_norm: BigRational,
    #[serde(with = "arith::rational_str")]
    pub max_gradient_norm: BigRational,
    pub points: usize,
    pub normalized: bool,
}

impl AnalyticMap {
    pub fn new(name: impl Into<String>, p: u64, domain: PAdicBall, coords: Vec<Poly>) -> Result<Self> {
        arith::check_prime(p)?;
        if domain.p != p {
            return Err(Error::PrimeMismatch(p, domain.p));
        }
        if coords.is_empty() {
            return Err(Error::InvalidArgument("map needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| c.nvars() != domain.dim()) {
            return Err(Error::InvalidArgument("coordinate arity differs from domain dimension".into()));
        }
        Ok(AnalyticMap { name: name.into(), p, domain, coords })
    }

    /// `x ↦ (x, x², …, xⁿ)` on `Z_p`.
    pub fn veronese(p: u64, n: usize) -> Result<Self> {
        let coords = (1..=n as u32).map(|k| Poly::var(1, 0).pow(k)).collect();
        Self::new(format!("veronese{n}"), p, PAdicBall::unit(p, 1)?, coords)
    }

    /// A scalar map, e.g. an inhomogeneous shift.
    pub fn scalar(name: impl Into<String>, p: u64, domain: PAdicBall, f: Poly) -> Result<Self> {
        Self::new(name, p, domain, vec![f])
    }

    pub fn m(&self) -> usize {
        self.domain.dim()
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    fn check_domain(&self, x: &[BigRational]) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::Precondition(format!("point outside the domain of {}", self.name)));
        }
        Ok(())
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        self.check_domain(x)?;
        Ok(self.coords.iter().map(|c| c.eval(x)).collect())
    }

    /// Evaluation at a rational point of `U`, returned at precision `prec`.
    pub fn eval_map(&self, x: &[BigRational], prec: u32) -> Result<Vec<PAdic>> {
        self.eval_exact(x)?
            .iter()
            .map(|v| PAdic::from_rational(v, self.p, prec))
            .collect()
    }

    /// Evaluation at a p-adic point; precision follows the inputs.
    pub fn eval_padic(&self, x: &[PAdic], prec: u32) -> Result<Vec<PAdic>> {
        if x.len() != self.m() {
            return Err(Error::InvalidArgument("point has wrong dimension".into()));
        }
        self.coords.iter().map(|c| c.eval_padic(x, self.p, prec)).collect()
    }

    /// `a0 + a·f + Θ` as a polynomial on the domain.
    pub fn linear_form(&self, a0: &BigInt, a: &[BigInt], theta: Option<&Poly>) -> Result<Poly> {
        if a.len() != self.n() {
            return Err(Error::InvalidArgument("coefficient vector has wrong length".into()));
        }
        let m = self.m();
        let mut f = Poly::constant(m, BigRational::from_integer(a0.clone()));
        for (ai, c) in a.iter().zip(&self.coords) {
            f = f.add(&c.scale(&BigRational::from_integer(ai.clone())));
        }
        if let Some(t) = theta {
            if t.nvars() != m {
                return Err(Error::InvalidArgument("shift arity differs from domain".into()));
            }
            f = f.add(t);
        }
        Ok(f)
    }

    /// Checks `‖f(x)‖ ≤ 1` and `‖∇f(x)‖ ≤ 1` on the given grid.
    pub fn normalization_report(&self, grid: &[Vec<BigRational>]) -> Result<NormalizationReport> {
        let mut fmax = BigRational::zero();
        let mut gmax = BigRational::zero();
        let grads: Vec<Vec<Poly>> = self.coords.iter().map(|c| c.gradient()).collect();
        for x in grid {
            self.check_domain(x)?;
            for (c, g) in self.coords.iter().zip(&grads) {
                fmax = fmax.max(arith::p_norm(&c.eval(x), self.p));
                for gi in g {
                    gmax = gmax.max(arith::p_norm(&gi.eval(x), self.p));
                }
            }
        }
        let one = BigRational::one();
        Ok(NormalizationReport {
            normalized: fmax <= one && gmax <= one,
            max_value_norm: fmax,
            max_gradient_norm: gmax,
            points: grid.len(),
        })
    }

    /// Multiplies every coordinate by the least power `p^s` (`s ≥ 0`) making the map
    /// normalized on the grid; returns the rescaled map and `s`.
    pub fn rescale_to_unit(&self, grid: &[Vec<BigRational>]) -> Result<(AnalyticMap, u32)> {
        let rep = self.normalization_report(grid)?;
        let worst = rep.max_value_norm.max(rep.max_gradient_norm);
        let s = if worst <= BigRational::one() {
            0
        } else {
            arith::floor_log(self.p, &worst).max(0) as u32 + u32::from(pow_rat(self.p, arith::floor_log(self.p, &worst)) < worst)
        };
        let scale = pow_rat(self.p, s as i64);
        let coords = self.coords.iter().map(|c| c.scale(&scale)).collect();
        Ok((AnalyticMap { coords, ..self.clone() }, s))
    }
}

/// Divided difference `Φ_n g(x_1,…,x_{n+1})` by the defining recursion.
pub fn divided_difference<T: Scalar>(g: &dyn Fn(&T) -> Result<T>, pts: &[T]) -> Result<T> {
    match pts.len() {
        0 => Err(Error::InvalidArgument("need at least one point".into())),
        1 => g(&pts[0]),
        _ => {
            let mut first = Vec::with_capacity(pts.len() - 1);
            first.push(pts[0].clone());
            first.extend_from_slice(&pts[2..]);
            let second = &pts[1..];
            let a = divided_difference(g, &first)?;
            let b = divided_difference(g, second)?;
            let denom = pts[0].s_sub(&pts[1]);
            a.s_sub(&b).s_div(&denom).map_err(|e| match e {
                Error::DivisionByZero => Error::InvalidArgument("coincident points in a slot group".into()),
                other => other,
            })
        }
    }
}

/// `Φ_β F` at point groups: group `j` holds `β_j + 1` values of variable `j`.
pub fn difference_quotient<T: Scalar>(
    f: &Poly,
    beta: &MultiIndex,
    groups: &[Vec<T>],
    lift: &dyn Fn(&BigRational) -> T,
) -> Result<T> {
    let d = f.nvars();
    if beta.0.len() != d || groups.len() != d {
        return Err(Error::InvalidArgument("multi-index or groups have wrong dimension".into()));
    }
    for (j, g) in groups.iter().enumerate() {
        if g.len() != beta.0[j] as usize + 1 {
            return Err(Error::InvalidArgument(format!(
                "group {j} needs {} points",
                beta.0[j] + 1
            )));
        }
    }
    fn rec<T: Scalar>(
        f: &Poly,
        groups: &[Vec<T>],
        fixed: &mut Vec<T>,
        lift: &dyn Fn(&BigRational) -> T,
    ) -> Result<T> {
        let j = fixed.len();
        if j == groups.len() {
            return Ok(f.eval_with(fixed, lift));
        }
        let g = |t: &T| {
            let mut fx = fixed.clone();
            fx.push(t.clone());
            rec(f, groups, &mut fx, lift)
        };
        divided_difference(&g, &groups[j])
    }
    rec(f, groups, &mut Vec::new(), lift)
}

pub fn difference_quotient_rat(f: &Poly, beta: &MultiIndex, groups: &[Vec<BigRational>]) -> Result<BigRational> {
    difference_quotient(f, beta, groups, &|c: &BigRational| c.clone())
}

/// `D_j f(a)`: the diagonal extension of `Φ_j`, equal to `f^{(j)}(a)/j!`.
pub fn dn_at_point(f: &Poly, j: u32, a: &BigRational) -> Result<BigRational> {
    if f.nvars() != 1 {
        return Err(Error::InvalidArgument("dn_at_point needs a one-variable map".into()));
    }
    let coeffs = f.shift(&[a.clone()]).univariate_coeffs();
    Ok(coeffs.get(j as usize).cloned().unwrap_or_else(BigRational::zero))
}

pub fn dn_at_point_padic(f: &Poly, j: u32, a: &BigRational, p: u64, prec: u32) -> Result<PAdic> {
    PAdic::from_rational(&dn_at_point(f, j, a)?, p, prec)
}

/// `Φ̄_β F(x,…,x)`, the diagonal value with `∂_β F = β!·Φ̄_β F`.
pub fn diagonal_quotient(f: &Poly, beta: &MultiIndex, x: &[BigRational]) -> Result<BigRational> {
    if x.len() != f.nvars() || beta.0.len() != f.nvars() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let g = f.shift(x);
    Ok(g.coeff(&beta.0))
}

/// First partials at `x`.
pub fn gradient(f: &Poly, x: &[BigRational]) -> Vec<BigRational> {
    f.gradient().iter().map(|g| g.eval(x)).collect()
}

/// `‖∇f(x)‖_p`, the sup of the p-adic norms of the partials.
pub fn gradient_norm_p(f: &Poly, x: &[BigRational], p: u64) -> BigRational {
    arith::sup_p_norm(&gradient(f, x), p)
}

/// Exact rank of a rational matrix (rows).
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let pv = m[r][c].clone();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let fct = &m[i][c] / &pv;
                for k in c..ncols {
                    let t = &m[r][k] * &fct;
                    m[i][k] -= t;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Smallest order `l ≤ lmax` such that partials of orders `1..=l` span `Q_p^n`.
pub fn nondegeneracy_order(map: &AnalyticMap, x: &[BigRational], lmax: u32) -> Result<Option<u32>> {
    if lmax == 0 {
        return Err(Error::InvalidArgument("lmax must be at least 1".into()));
    }
    map.check_domain(x)?;
    let shifted: Vec<Poly> = map.coords.iter().map(|c| c.shift(x)).collect();
    let mut rows = Vec::new();
    for l in 1..=lmax {
        for beta in MultiIndex::of_order(map.m(), l) {
            let fact = BigRational::from_integer(beta.factorial());
            rows.push(shifted.iter().map(|c| c.coeff(&beta.0) * &fact).collect::<Vec<_>>());
        }
        if rank(&rows) == map.n() {
            return Ok(Some(l));
        }
    }
    Ok(None)
}

/// A coordinate change over the valuation ring and the pure partials it produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedCoordinates {
    /// Row-major integer matrix; column `i` is the image of `e_i`.
    pub matrix: Vec<Vec<BigInt>>,
    #[serde(with = "arith::rational_vec_str")]
    pub pure_partials: Vec<BigRational>,
}

/// Pure `k`-th partial of `F∘A` along the direction `col`, at the preimage of `x0`.
fn directional_kth(f: &Poly, x0: &[BigRational], col: &[BigRational], k: u32) -> BigRational {
    let coeffs = f.line_taylor(x0, col);
    coeffs.get(k as usize).cloned().unwrap_or_else(BigRational::zero) * BigRational::from_integer(factorial(k))
}

/// Finds `A ∈ GL_d(Z_p)` with `A ≡ I mod p` such that every pure `k`-th partial of `F∘A`
/// is nonzero at `A^{-1}x0`. Columns are `e_i + p·c` with `c` scanned lexicographically over
/// `{0,…,p^{depth-1}-1}^d`.
pub fn normalize_coordinates(f: &Poly, x0: &[BigRational], k: u32, p: u64, depth: u32) -> Result<NormalizedCoordinates> {
    arith::check_prime(p)?;
    let d = f.nvars();
    if x0.len() != d {
        return Err(Error::InvalidArgument("base point has wrong dimension".into()));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let g = f.shift(x0);
    if MultiIndex::of_order(d, k).iter().all(|b| g.coeff(&b.0).is_zero()) {
        return Err(Error::Precondition(format!("all partials of order {k} vanish at the base point")));
    }
    let range = arith::checked_pow(p, depth - 1)
        .filter(|r| (*r as u128).pow(d as u32) <= 1 << 24)
        .ok_or_else(|| Error::BudgetExceeded("coordinate search space too large".into()))?;
    let pr = int(p as i64);
    let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(d);
    let mut partials = Vec::with_capacity(d);
    for i in 0..d {
        let total = (range as u128).pow(d as u32);
        let mut found = None;
        for idx in 0..total {
            let mut rest = idx;
            let mut c = vec![0u64; d];
            for slot in c.iter_mut().rev() {
                *slot = (rest % range as u128) as u64;
                rest /= range as u128;
            }
            let col: Vec<BigRational> = (0..d)
                .map(|r| {
                    let base = if r == i { BigRational::one() } else { BigRational::zero() };
                    base + &pr * int(c[r] as i64)
                })
                .collect();
            let v = directional_kth(f, x0, &col, k);
            if !v.is_zero() {
                found = Some((col, v));
                break;
            }
        }
        let (col, v) = found.ok_or_else(|| {
            Error::SearchExhausted(format!("no column found for coordinate {i} at depth {depth}; raise the depth"))
        })?;
        cols.push(col);
        partials.push(v);
    }
    let matrix: Vec<Vec<BigInt>> = (0..d)
        .map(|r| (0..d).map(|c| cols[c][r].to_integer()).collect())
        .collect();
    Ok(NormalizedCoordinates { matrix, pure_partials: partials })
}

/// Exact determinant of an integer matrix.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let rows: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect();
    rational_determinant(&rows).to_integer()
}

pub fn rational_determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        let pv = a[c][c].clone();
        det *= &pv;
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let fct = &a[i][c] / &pv;
                for k in c..n {
                    let t = &a[c][k] * &fct;
                    a[i][k] -= t;
                }
            }
        }
    }
    det
}

/// Solves `M x = b` exactly; `None` when singular.
pub fn solve_rational(m: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(piv, c);
        let pv = a[c][c].clone();
        for k in c..=n {
            a[c][k] = &a[c][k] / &pv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let fct = a[i][c].clone();
                for k in c..=n {
                    let t = &a[c][k] * &fct;
                    a[i][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn x() -> Poly {
        Poly::var(1, 0)
    }

    #[test]
    fn eval_examples() {
        let v = AnalyticMap::veronese(3, 2).unwrap();
        let y = v.eval_map(&[int(3)], 10).unwrap();
        assert_eq!(y[0].norm().unwrap(), rat(1, 3));
        assert_eq!(y[1].norm().unwrap(), rat(1, 9));
        assert!(y[1].agrees_with(&int(9)));

        let f = AnalyticMap::scalar(
            "x2p1",
            5,
            PAdicBall::unit(5, 1).unwrap(),
            x().pow(2).add(&Poly::constant(1, int(1))),
        )
        .unwrap();
        assert_eq!(f.eval_map(&[int(2)], 8).unwrap()[0].norm().unwrap(), rat(1, 5));
        assert_eq!(f.eval_exact(&[int(0)]).unwrap()[0], int(1));
        assert!(f.eval_exact(&[rat(1, 5)]).is_err());
    }

    #[test]
    fn difference_quotient_examples() {
        let sq = x().pow(2);
        let b1 = MultiIndex(vec![1]);
        let v = difference_quotient_rat(&sq, &b1, &[vec![int(4), int(7)]]).unwrap();
        assert_eq!(v, int(11));
        let b2 = MultiIndex(vec![2]);
        let v = difference_quotient_rat(&sq, &b2, &[vec![int(4), int(7), rat(1, 2)]]).unwrap();
        assert_eq!(v, int(1));
        let cube = x().pow(3);
        let v = difference_quotient_rat(&cube, &b1, &[vec![int(1), int(6)]]).unwrap();
        assert_eq!(v, int(3 + 3 * 5 + 25));
        assert!(difference_quotient_rat(&sq, &b1, &[vec![int(2), int(2)]]).is_err());
    }

    #[test]
    fn padic_difference_quotient() {
        let cube = x().pow(3);
        let pts: Vec<PAdic> = [1, 6].iter().map(|&v| PAdic::from_int(v, 5, 12).unwrap()).collect();
        let lift = |c: &BigRational| PAdic::from_rational(c, 5, 12).unwrap();
        let v = difference_quotient(&cube, &MultiIndex(vec![1]), &[pts], &lift).unwrap();
        assert!(v.agrees_with(&int(43)));
    }

    #[test]
    fn dn_examples() {
        assert_eq!(dn_at_point(&x().pow(2), 2, &int(9)).unwrap(), int(1));
        assert_eq!(dn_at_point(&x(), 1, &int(9)).unwrap(), int(1));
        assert_eq!(dn_at_point(&x().pow(3), 2, &int(1)).unwrap(), int(3));
    }

    #[test]
    fn gradient_examples() {
        let v = AnalyticMap::veronese(3, 2).unwrap();
        let f = v.linear_form(&BigInt::zero(), &[BigInt::zero(), BigInt::one()], None).unwrap();
        assert_eq!(gradient_norm_p(&f, &[int(1)], 3), arith::p_norm(&int(2), 3));
        let c = Poly::constant(1, int(4));
        assert_eq!(gradient(&c, &[int(2)]), vec![int(0)]);
        let g = v.linear_form(&BigInt::zero(), &[BigInt::one(), BigInt::one()], None).unwrap();
        assert_eq!(gradient_norm_p(&g, &[int(3)], 3), int(1));
    }

    #[test]
    fn nondegeneracy_examples() {
        let v = AnalyticMap::veronese(3, 2).unwrap();
        assert_eq!(nondegeneracy_order(&v, &[int(5)], 2).unwrap(), Some(2));
        let u = PAdicBall::unit(3, 1).unwrap();
        let aff = AnalyticMap::new("aff", 3, u.clone(), vec![x(), x().scale(&int(2))]).unwrap();
        assert_eq!(nondegeneracy_order(&aff, &[int(1)], 3).unwrap(), None);
        let c = AnalyticMap::new("cusp", 3, u, vec![x().pow(2), x().pow(3)]).unwrap();
        assert_eq!(nondegeneracy_order(&c, &[int(0)], 4).unwrap(), Some(3));
    }

    #[test]
    fn normalize_examples() {
        let f = Poly::var(2, 0).mul(&Poly::var(2, 1));
        let nc = normalize_coordinates(&f, &[int(0), int(0)], 2, 5, 3).unwrap();
        let i = |v: i64| BigInt::from(v);
        assert_eq!(nc.matrix, vec![vec![i(1), i(5)], vec![i(5), i(1)]]);
        assert_eq!(nc.pure_partials, vec![int(10), int(10)]);
        let det = determinant(&nc.matrix);
        assert_eq!(arith::valuation_int(&det, 5), Some(0));

        let g = Poly::var(2, 0).pow(2).sub(&Poly::var(2, 1).pow(2));
        let nc = normalize_coordinates(&g, &[int(0), int(0)], 2, 5, 3).unwrap();
        assert_eq!(nc.matrix, vec![vec![i(1), i(0)], vec![i(0), i(1)]]);
        assert_eq!(nc.pure_partials, vec![int(2), int(-2)]);

        assert!(normalize_coordinates(&Poly::var(2, 0), &[int(0), int(0)], 2, 5, 3).is_err());
    }

    #[test]
    fn rescaling() {
        let u = PAdicBall::unit(3, 1).unwrap();
        let f = AnalyticMap::scalar("t", 3, u, x().pow(2).scale(&rat(1, 9))).unwrap();
        let grid: Vec<Vec<BigRational>> = (0..9).map(|k| vec![int(k)]).collect();
        assert!(!f.normalization_report(&grid).unwrap().normalized);
        let (g, s) = f.rescale_to_unit(&grid).unwrap();
        assert_eq!(s, 2);
        assert!(g.normalization_report(&grid).unwrap().normalized);
    }

    #[test]
    fn linear_algebra() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        assert_eq!(rational_determinant(&m), int(5));
        assert_eq!(solve_rational(&m, &[int(3), int(4)]).unwrap(), vec![int(1), int(1)]);
        assert_eq!(rank(&[vec![int(1), int(2)], vec![int(2), int(4)]]), 1);
    }
}
