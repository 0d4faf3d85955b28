//! Complex polynomials, the reversed-polynomial involution and simultaneous
//! root finding.
//!
//! Coefficients are always stored low-to-high degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::C64;

const ZERO: C64 = Complex64::new(0.0, 0.0);
const ONE: C64 = Complex64::new(1.0, 0.0);

/// Default residual tolerance for [`roots`].
pub const ROOT_TOL: f64 = 1e-12;
/// Iteration cap of the Aberth–Ehrlich loop.
pub const ROOT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("polynomial division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("root finding requires degree >= 1")]
    DegreeTooLow,
    #[error("root finder did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence {
        best: Vec<C64>,
        residual: f64,
        iterations: usize,
    },
}

/// Monic polynomial `z^n + c_{n-1} z^{n-1} + ... + c_0`; the leading 1 is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPoly {
    coeffs: Vec<C64>,
}

/// General polynomial with explicit leading coefficient. The zero polynomial
/// has an empty coefficient list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl MonicPoly {
    /// `coeffs` are `c_0..c_{n-1}`.
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        Self { coeffs: vec![ZERO; n] }
    }

    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * r;
            }
            c = next;
        }
        c.pop();
        Self { coeffs: c }
    }

    /// Interpret a general polynomial as monic after dividing by its leading
    /// coefficient. Returns `None` for the zero polynomial.
    pub fn from_poly(p: &Poly) -> Option<Self> {
        let lead = *p.coeffs.last()?;
        let mut c: Vec<C64> = p.coeffs.iter().map(|&x| x / lead).collect();
        c.pop();
        Some(Self { coeffs: c })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_0..c_{n-1}` without the implicit leading 1.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Full coefficient vector `c_0..c_n` with `c_n = 1`.
    pub fn full_coeffs(&self) -> Vec<C64> {
        let mut c = self.coeffs.clone();
        c.push(ONE);
        c
    }

    pub fn to_poly(&self) -> Poly {
        Poly {
            coeffs: self.full_coeffs(),
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ONE, |acc, &c| acc * z + c)
    }

    pub fn constant_term(&self) -> C64 {
        self.coeffs.first().copied().unwrap_or(ONE)
    }

    /// Largest coefficient-wise distance, counting the implicit leading 1.
    pub fn max_coeff_diff(&self, other: &MonicPoly) -> f64 {
        if self.degree() != other.degree() {
            return f64::INFINITY;
        }
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

impl Poly {
    /// Builds a polynomial from `c_0..c_n`, trimming exact trailing zeros.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `z`.
    pub fn z() -> Self {
        Self {
            coeffs: vec![ZERO, ONE],
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == ZERO) {
            self.coeffs.pop();
        }
    }

    /// Drops leading coefficients whose modulus is below `tol` times the
    /// largest coefficient.
    pub fn trimmed(&self, tol: f64) -> Self {
        let scale = self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| x.norm() <= tol * scale) {
            c.pop();
        }
        Self { coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn leading(&self) -> Option<C64> {
        self.coeffs.last().copied()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Running bound on the rounding error of Horner evaluation at `z`.
    pub fn eval_error_bound(&self, z: C64) -> f64 {
        let r = z.norm();
        let s = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        8.0 * f64::EPSILON * (self.coeffs.len() as f64) * s
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![ZERO; k];
        c.extend_from_slice(&self.coeffs);
        Poly { coeffs: c }
    }

    /// `z^n conj(p(1/conj z))` for a prescribed formal degree `n >= deg p`.
    pub fn reversed(&self, n: usize) -> Poly {
        let mut c = vec![ZERO; n + 1];
        for (j, &cj) in self.coeffs.iter().enumerate() {
            assert!(j <= n, "formal degree below actual degree");
            c[n - j] = cj.conj();
        }
        Poly::new(c)
    }

    /// Euclidean division; the remainder has degree strictly below the divisor's.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        let lead = divisor.leading().ok_or(PolyError::DivisionByZeroPoly)?;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ZERO; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (i, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= q * d;
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Composition `self(inner(z))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| &(&acc * inner) + &Poly::constant(c))
    }

    pub fn max_coeff_diff(&self, other: &Poly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-ONE)
    }
}

impl Mul for &MonicPoly {
    type Output = MonicPoly;
    fn mul(self, rhs: &MonicPoly) -> MonicPoly {
        MonicPoly::from_poly(&(&self.to_poly() * &rhs.to_poly())).expect("product of monic polys")
    }
}

/// The reversed polynomial `Φ*(z) = Σ conj(c_j) z^{n-j}` of a monic `Φ` of degree `n`.
///
/// Its actual degree drops below `n` when `Φ(0) = 0`.
pub fn reverse(p: &MonicPoly) -> Poly {
    p.to_poly().reversed(p.degree())
}

fn scaled_residual(p: &Poly, z: C64, deg: usize) -> f64 {
    p.eval(z).norm() / (1.0 + z.norm()).powi(deg as i32)
}

/// All roots of `p`, with multiplicity.
///
/// Aberth–Ehrlich iteration from a circle of radius `1 + max|c_j|` (monic
/// normalization). Clusters that numerically represent a multiple root are
/// then snapped to a single point refined on the matching derivative.
pub fn roots(p: &Poly, tol: f64) -> Result<Vec<C64>, PolyError> {
    let deg = match p.degree() {
        None | Some(0) => return Err(PolyError::DegreeTooLow),
        Some(d) => d,
    };
    let lead = p.leading().expect("nonzero");
    let monic = p.scale(ONE / lead);
    if deg == 1 {
        return Ok(vec![-monic.coeff(0)]);
    }
    let dp = monic.derivative();
    let radius = 1.0 + monic.coeffs[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..deg)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / deg as f64 + 0.4;
            C64::from_polar(radius, theta)
        })
        .collect();

    let residual = |z: &[C64]| z.iter().map(|&r| scaled_residual(&monic, r, deg)).fold(0.0, f64::max);

    let mut polish_left: Option<usize> = None;
    let mut iterations = 0;
    while iterations < ROOT_MAX_ITER {
        iterations += 1;
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let pv = monic.eval(z[i]);
            if pv == ZERO {
                continue;
            }
            let dv = dp.eval(z[i]);
            let sum: C64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == ZERO {
                        C64::new(1e300, 0.0)
                    } else {
                        ONE / d
                    }
                })
                .sum();
            let step = if dv == ZERO {
                // stationary point: nudge off it
                C64::new(1e-8 * (1.0 + z[i].norm()), 1e-8)
            } else {
                let ratio = pv / dv;
                ratio / (ONE - ratio * sum)
            };
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step <= 4.0 * f64::EPSILON {
            break;
        }
        match polish_left {
            Some(0) => break,
            Some(ref mut k) => *k -= 1,
            None => {
                if residual(&z) < tol {
                    polish_left = Some(5);
                }
            }
        }
    }

    snap_clusters(&monic, &mut z);

    let res = residual(&z);
    if res < tol {
        Ok(z)
    } else {
        Err(PolyError::NonConvergence {
            best: z,
            residual: res,
            iterations,
        })
    }
}

/// Replaces clusters of approximate roots by a refined multiple root when the
/// polynomial and its derivatives support that reading.
fn snap_clusters(p: &Poly, z: &mut [C64]) {
    let n = z.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1.0 + z[i].norm().max(z[j].norm());
            if (z[i] - z[j]).norm() < 1e-2 * scale && label[i] != label[j] {
                let (keep, drop) = (label[i].min(label[j]), label[i].max(label[j]));
                label.iter_mut().filter(|l| **l == drop).for_each(|l| *l = keep);
            }
        }
    }
    let clusters: Vec<Vec<usize>> = (0..n).map(|l| (0..n).filter(|&i| label[i] == l).collect()).collect();
    for members in clusters.into_iter().filter(|c| c.len() > 1) {
        let m = members.len();
        let centroid: C64 = members.iter().map(|&i| z[i]).sum::<C64>() / m as f64;
        let mut d = p.clone();
        for _ in 0..(m - 1) {
            d = d.derivative();
        }
        let dd = d.derivative();
        let mut r = centroid;
        for _ in 0..60 {
            let dv = dd.eval(r);
            if dv == ZERO {
                break;
            }
            let step = d.eval(r) / dv;
            r -= step;
            if step.norm() <= f64::EPSILON * (1.0 + r.norm()) {
                break;
            }
        }
        let worst = members.iter().map(|&i| p.eval(z[i]).norm()).fold(0.0, f64::max);
        let candidate = p.eval(r).norm();
        let noise = p.eval_error_bound(r);
        let mut ok = candidate <= (10.0 * worst).max(noise);
        // every lower derivative must vanish as well
        let mut q = p.clone();
        for _ in 1..m {
            q = q.derivative();
            ok &= q.eval(r).norm() <= (1e-6 * q.max_abs_coeff()).max(q.eval_error_bound(r));
        }
        if ok {
            for &i in &members {
                z[i] = r;
            }
        }
    }
}

/// Greedy minimal-distance matching between two root sets of equal size.
///
/// Returns the permutation `perm` with `a[i]` matched to `b[perm[i]]`, and
/// the largest matched distance.
pub fn match_roots(a: &[C64], b: &[C64]) -> (Vec<usize>, f64) {
    assert_eq!(a.len(), b.len(), "root sets differ in size");
    let n = a.len();
    let mut perm = vec![usize::MAX; n];
    let mut used_a = vec![false; n];
    let mut used_b = vec![false; n];
    let mut worst = 0.0f64;
    for _ in 0..n {
        let mut best = (f64::INFINITY, 0, 0);
        for i in (0..n).filter(|&i| !used_a[i]) {
            for j in (0..n).filter(|&j| !used_b[j]) {
                let d = (a[i] - b[j]).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        let (d, i, j) = best;
        used_a[i] = true;
        used_b[j] = true;
        perm[i] = j;
        worst = worst.max(d);
    }
    (perm, worst)
}

/// Lexicographic (real, then imaginary) ordering used wherever candidate
/// enumeration must be reproducible.
pub fn sort_lex(z: &mut [C64]) {
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn reverse_of_degree_one() {
        let a = c(0.3, -0.2);
        let p = MonicPoly::new(vec![-a]);
        let r = reverse(&p);
        assert_eq!(r.coeffs(), &[ONE, -a.conj()]);
    }

    #[test]
    fn reverse_of_monomial_is_one() {
        let r = reverse(&MonicPoly::monomial(4));
        assert_eq!(r, Poly::constant(ONE));
    }

    #[test]
    fn reverse_matches_reflection_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = MonicPoly::new(
            (0..5)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        );
        let r = reverse(&p);
        for _ in 0..20 {
            let z = C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.3));
            let direct = z.powi(5) * p.eval(ONE / z.conj()).conj();
            assert!((r.eval(z) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn reverse_is_an_involution_when_constant_term_nonzero() {
        let p = MonicPoly::new(vec![c(0.2, 0.1), c(-0.5, 0.3), c(0.1, 0.0)]);
        let rr = reverse(&p).reversed(3);
        assert!(rr.max_coeff_diff(&p.to_poly()) < 1e-14);
    }

    #[test]
    fn roots_of_factored_quadratic() {
        let (f1, f2) = (c(-0.28, 0.12), c(0.6, 0.24));
        let p = MonicPoly::from_roots(&[f1, f2]).to_poly();
        let r = roots(&p, ROOT_TOL).unwrap();
        let (_, worst) = match_roots(&r, &[f1, f2]);
        assert!(worst < 1e-14);
    }

    #[test]
    fn roots_of_unity() {
        let p = Poly::new(vec![-ONE, ZERO, ZERO, ZERO, ZERO, ZERO, ONE]);
        let r = roots(&p, ROOT_TOL).unwrap();
        let expect: Vec<C64> = (0..6)
            .map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 6.0))
            .collect();
        assert!(match_roots(&r, &expect).1 < 1e-13);
    }

    #[test]
    fn roots_recover_prescribed_degree_seven() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rs: Vec<C64> = (0..7)
                .map(|_| C64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..6.3)))
                .collect();
            let p = MonicPoly::from_roots(&rs).to_poly();
            let got = roots(&p, ROOT_TOL).unwrap();
            assert!(match_roots(&got, &rs).1 < 1e-10);
        }
    }

    #[test]
    fn multiple_roots_are_snapped() {
        let p = MonicPoly::monomial(5).to_poly();
        let r = roots(&p, ROOT_TOL).unwrap();
        assert!(r.iter().all(|z| z.norm() < 1e-12), "{r:?}");

        let a = c(0.3, -0.4);
        let b = c(-0.5, 0.1);
        let p = MonicPoly::from_roots(&[a, a, b, b, c(0.1, 0.7)]).to_poly();
        let r = roots(&p, ROOT_TOL).unwrap();
        assert!(match_roots(&r, &[a, a, b, b, c(0.1, 0.7)]).1 < 1e-9, "{r:?}");
    }

    #[test]
    fn close_distinct_roots_stay_distinct() {
        let rs = [c(0.3, 0.0), c(0.3 + 1e-4, 0.0), c(-0.4, 0.2)];
        let p = MonicPoly::from_roots(&rs).to_poly();
        let r = roots(&p, ROOT_TOL).unwrap();
        assert!(match_roots(&r, &rs).1 < 1e-9);
    }

    #[test]
    fn roots_reject_constants() {
        assert_eq!(roots(&Poly::constant(ONE), ROOT_TOL), Err(PolyError::DegreeTooLow));
    }

    #[test]
    fn evaluation_at_a_factor_vanishes() {
        let (a, b) = (c(0.1, 0.9), c(-2.0, 0.5));
        let p = MonicPoly::from_roots(&[a, b]);
        assert!(p.eval(a).norm() < 1e-15);
    }

    #[test]
    fn exact_division() {
        let num = Poly::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let den = Poly::from_real(&[-1.0, 1.0]);
        let (q, r) = num.div_rem(&den).unwrap();
        assert_eq!(q, Poly::from_real(&[1.0, 1.0, 1.0]));
        assert!(r.is_zero());
        assert_eq!(num.div_rem(&Poly::zero()), Err(PolyError::DivisionByZeroPoly));
    }

    #[test]
    fn multiply_then_divide_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rc = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for _ in 0..50 {
            let a = Poly::new((0..5).map(|_| rc()).collect());
            let b = Poly::new((0..3).map(|_| rc()).collect());
            let (q, r) = (&a * &b).div_rem(&b).unwrap();
            assert!(q.max_coeff_diff(&a) < 1e-12);
            assert!(r.max_abs_coeff() < 1e-12);
        }
    }

    #[test]
    fn remainder_degree_is_below_divisor() {
        let num = Poly::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let den = Poly::from_real(&[1.0, 0.0, 2.0]);
        let (q, r) = num.div_rem(&den).unwrap();
        assert!(r.degree().unwrap_or(0) < 2);
        let back = &(&q * &den) + &r;
        assert!(back.max_coeff_diff(&num) < 1e-14);
    }
}
