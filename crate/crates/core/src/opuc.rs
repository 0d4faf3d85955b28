//! Szegő recursion in both directions, Verblunsky coefficients and
//! paraorthogonal polynomials.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use twofloat::TwoFloat;

use crate::poly::{self, reverse, MonicPoly, Poly, PolyError};
use crate::C64;

/// Largest accepted modulus for a Verblunsky coefficient.
pub const DISK_LIMIT: f64 = 1.0 - 1e-10;
/// Allowed deviation of `|λ|` from 1.
pub const LAMBDA_TOL: f64 = 1e-12;
/// Allowed deviation of POPUC zero moduli from 1.
pub const POPUC_ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpucError {
    #[error("Verblunsky coefficient {index} has modulus {modulus} outside the open disk")]
    InvalidAlpha { index: usize, modulus: f64 },
    #[error("polynomial is not Schur stable: level {level} gives |alpha| = {modulus}")]
    NotSchurStable { level: usize, modulus: f64 },
    #[error("lambda must be unimodular, got modulus {modulus}")]
    InvalidLambda { modulus: f64 },
    #[error("paraorthogonal zeros leave the circle by {deviation:e}")]
    ZerosOffCircle { deviation: f64 },
    #[error("degree must be at least 1")]
    EmptyPolynomial,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn check_alpha(index: usize, a: C64) -> Result<(), OpucError> {
    let modulus = a.norm();
    if !(modulus <= DISK_LIMIT) {
        return Err(OpucError::InvalidAlpha { index, modulus });
    }
    Ok(())
}

/// Finite Verblunsky sequence `α_0..α_{n-1}`, each strictly inside the disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct VerblunskySeq {
    alphas: Vec<C64>,
}

impl VerblunskySeq {
    pub fn new(alphas: Vec<C64>) -> Result<Self, OpucError> {
        for (i, &a) in alphas.iter().enumerate() {
            check_alpha(i, a)?;
        }
        Ok(Self { alphas })
    }

    /// `n` zero coefficients.
    pub fn free(n: usize) -> Self {
        Self {
            alphas: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn alphas(&self) -> &[C64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// The first `k` coefficients.
    pub fn prefix(&self, k: usize) -> Self {
        Self {
            alphas: self.alphas[..k].to_vec(),
        }
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.alphas
            .iter()
            .zip(&other.alphas)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<C64>> for VerblunskySeq {
    type Error = OpucError;
    fn try_from(v: Vec<C64>) -> Result<Self, OpucError> {
        Self::new(v)
    }
}

impl From<VerblunskySeq> for Vec<C64> {
    fn from(v: VerblunskySeq) -> Self {
        v.alphas
    }
}

/// One forward Szegő step: `(zΦ − ᾱΦ*, Φ* − αzΦ)`.
pub fn szego_step(phi: &MonicPoly, phi_star: &Poly, alpha: C64) -> Result<(MonicPoly, Poly), OpucError> {
    check_alpha(phi.degree(), alpha)?;
    let zphi = phi.to_poly().shift(1);
    let next = &zphi - &phi_star.scale(alpha.conj());
    let next_star = phi_star - &zphi.scale(alpha);
    let mut c = next.coeffs().to_vec();
    c.resize(phi.degree() + 2, C64::new(0.0, 0.0));
    c.pop();
    let next = MonicPoly::new(c);
    debug_assert!(reverse(&next).max_coeff_diff(&next_star) <= 1e-12 * (1.0 + next_star.max_abs_coeff()));
    Ok((next, next_star))
}

/// Inverse Szegő step: recovers `α_k = −conj(Φ_{k+1}(0))` and `Φ_k`.
pub fn szego_inverse_step(phi_next: &MonicPoly) -> Result<(C64, MonicPoly), OpucError> {
    let n = phi_next.degree();
    if n == 0 {
        return Err(OpucError::EmptyPolynomial);
    }
    let alpha = -phi_next.constant_term().conj();
    let modulus = alpha.norm();
    if !(modulus <= DISK_LIMIT) {
        return Err(OpucError::NotSchurStable { level: n - 1, modulus });
    }
    let star = reverse(phi_next);
    let scale = 1.0 / (1.0 - alpha.norm_sqr());
    let full = phi_next.full_coeffs();
    // (Φ_{k+1} + ᾱΦ*_{k+1}) / (1 − |α|²) = zΦ_k; drop the vanishing constant and the leading 1
    let c: Vec<C64> = (1..n)
        .map(|j| (full[j] + alpha.conj() * star.coeff(j)) * scale)
        .collect();
    Ok((alpha, MonicPoly::new(c)))
}

/// `Φ_n` from the full Szegő chain.
pub fn opuc_from_verblunsky(v: &VerblunskySeq) -> MonicPoly {
    opuc_chain(v).pop().expect("chain is never empty").0
}

/// `(Φ_k, Φ_k*)` for `k = 0..=n`.
pub fn opuc_chain(v: &VerblunskySeq) -> Vec<(MonicPoly, Poly)> {
    let mut out = vec![(MonicPoly::one(), Poly::constant(Complex64::new(1.0, 0.0)))];
    for &a in v.alphas() {
        let (p, s) = out.last().expect("nonempty");
        let next = szego_step(p, s, a).expect("sequence already validated");
        out.push(next);
    }
    out
}

type Dd = Complex<TwoFloat>;

fn dd(z: C64) -> Dd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn to_c64(z: Dd) -> C64 {
    C64::new(f64::from(z.re), f64::from(z.im))
}

/// Inverse chain on full coefficients `c_0..c_n` (with `c_n = 1`), carried out
/// in double-double arithmetic since each level divides by `1 − |α|²`.
fn inverse_chain(mut full: Vec<Dd>) -> Result<VerblunskySeq, OpucError> {
    let one = TwoFloat::from(1.0);
    let mut alphas = Vec::with_capacity(full.len().saturating_sub(1));
    while full.len() > 1 {
        let n = full.len() - 1;
        let alpha = -full[0].conj();
        let a = to_c64(alpha);
        let modulus = a.norm();
        if !(modulus <= DISK_LIMIT) {
            return Err(OpucError::NotSchurStable { level: n - 1, modulus });
        }
        let scale = one - alpha.norm_sqr();
        let ac = alpha.conj();
        let mut next: Vec<Dd> = (1..n)
            .map(|j| (full[j] + ac * full[n - j].conj()).unscale(scale))
            .collect();
        next.push(Complex::new(one, TwoFloat::from(0.0)));
        alphas.push(a);
        full = next;
    }
    alphas.reverse();
    Ok(VerblunskySeq { alphas })
}

/// Full inverse chain. The failing level is reported on instability.
pub fn verblunsky_from_poly(phi: &MonicPoly) -> Result<VerblunskySeq, OpucError> {
    inverse_chain(phi.full_coeffs().iter().map(|&z| dd(z)).collect())
}

/// Verblunsky coefficients of `Π (z − r)`. The product is formed in
/// double-double arithmetic as well.
pub fn verblunsky_from_roots(roots: &[C64]) -> Result<VerblunskySeq, OpucError> {
    let zero = Complex::new(TwoFloat::from(0.0), TwoFloat::from(0.0));
    let mut full = vec![Complex::new(TwoFloat::from(1.0), TwoFloat::from(0.0))];
    for &r in roots {
        let r = dd(r);
        let mut next = vec![zero; full.len() + 1];
        for (j, &c) in full.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= r * c;
        }
        full = next;
    }
    inverse_chain(full)
}

/// Paraorthogonal polynomial `zΦ_{n−1} − λ̄Φ*_{n−1}` and its zeros on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct Popuc {
    pub prefix: VerblunskySeq,
    pub lambda: C64,
    pub poly: MonicPoly,
    /// Zeros sorted by argument in `(−π, π]`.
    pub zeros: Vec<C64>,
}

pub fn check_lambda(lambda: C64) -> Result<(), OpucError> {
    let modulus = lambda.norm();
    if !((modulus - 1.0).abs() < LAMBDA_TOL) {
        return Err(OpucError::InvalidLambda { modulus });
    }
    Ok(())
}

pub fn popuc(prefix: &VerblunskySeq, lambda: C64) -> Result<Popuc, OpucError> {
    check_lambda(lambda)?;
    let (phi, star) = opuc_chain(prefix).pop().expect("nonempty");
    let p = &phi.to_poly().shift(1) - &star.scale(lambda.conj());
    let poly = MonicPoly::from_poly(&p).expect("degree n monic");
    let mut zeros = poly::roots(&poly.to_poly(), poly::ROOT_TOL)?;
    let deviation = zeros.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    if deviation > POPUC_ROOT_TOL {
        return Err(OpucError::ZerosOffCircle { deviation });
    }
    zeros.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    Ok(Popuc {
        prefix: prefix.clone(),
        lambda,
        poly,
        zeros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_seq(rng: &mut ChaCha8Rng, n: usize, r: f64) -> VerblunskySeq {
        VerblunskySeq::new(
            (0..n)
                .map(|_| C64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn constructor_rejects_boundary() {
        assert!(VerblunskySeq::new(vec![c(1.0, 0.0)]).is_err());
        assert!(VerblunskySeq::new(vec![c(0.0, 1.0 - 1e-12)]).is_err());
        assert!(VerblunskySeq::new(vec![c(0.0, 0.999)]).is_ok());
    }

    #[test]
    fn free_step() {
        let (p, s) = szego_step(&MonicPoly::one(), &Poly::constant(c(1.0, 0.0)), c(0.0, 0.0)).unwrap();
        assert_eq!(p, MonicPoly::monomial(1));
        assert_eq!(s, Poly::constant(c(1.0, 0.0)));
    }

    #[test]
    fn single_step_with_alpha() {
        let a = c(0.3, 0.4);
        let (p, s) = szego_step(&MonicPoly::one(), &Poly::constant(c(1.0, 0.0)), a).unwrap();
        assert_eq!(p, MonicPoly::new(vec![-a.conj()]));
        assert_eq!(s.coeffs(), &[c(1.0, 0.0), -a]);
        assert!(matches!(
            szego_step(&MonicPoly::one(), &Poly::constant(c(1.0, 0.0)), c(1.0, 0.0)),
            Err(OpucError::InvalidAlpha { .. })
        ));
    }

    #[test]
    fn three_random_steps_keep_zeros_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let v = rand_seq(&mut rng, 3, 0.99);
            let p = opuc_from_verblunsky(&v);
            let r = poly::roots(&p.to_poly(), 1e-12).unwrap();
            assert!(r.iter().all(|z| z.norm() < 1.0));
        }
    }

    #[test]
    fn inverse_of_degree_one() {
        let a = c(-0.2, 0.7);
        let (alpha, phi) = szego_inverse_step(&MonicPoly::new(vec![-a.conj()])).unwrap();
        assert!((alpha - a).norm() < 1e-15);
        assert_eq!(phi, MonicPoly::one());
    }

    #[test]
    fn inverse_of_factored_quadratic() {
        let (f1, f2) = (c(-0.28, 0.12), c(0.6, 0.24));
        let v = verblunsky_from_roots(&[f1, f2]).unwrap();
        assert!((v.alphas()[1] + (f1 * f2).conj()).norm() < 1e-15);
        let p = opuc_from_verblunsky(&v);
        assert!(p.max_coeff_diff(&MonicPoly::from_roots(&[f1, f2])) < 1e-14);
    }

    #[test]
    fn six_step_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = rand_seq(&mut rng, 6, 0.95);
        let back = verblunsky_from_poly(&opuc_from_verblunsky(&v)).unwrap();
        assert!(back.max_diff(&v) < 1e-10);
    }

    #[test]
    fn free_polynomial_is_monomial() {
        assert_eq!(opuc_from_verblunsky(&VerblunskySeq::free(5)), MonicPoly::monomial(5));
        let back = verblunsky_from_poly(&MonicPoly::monomial(5)).unwrap();
        assert_eq!(back, VerblunskySeq::free(5));
    }

    #[test]
    fn constant_term_is_last_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..8 {
            let v = rand_seq(&mut rng, n, 0.9);
            let p = opuc_from_verblunsky(&v);
            assert!((p.constant_term() + v.alphas()[n - 1].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn degree_six_from_roots_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let roots: Vec<C64> = (0..6)
            .map(|_| C64::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU)))
            .collect();
        let p = MonicPoly::from_roots(&roots);
        let v = verblunsky_from_poly(&p).unwrap();
        assert!(opuc_from_verblunsky(&v).max_coeff_diff(&p) < 1e-9);
    }

    #[test]
    fn unstable_polynomial_reports_level() {
        let p = MonicPoly::from_roots(&[c(0.9, 0.0), c(1.5, 0.0)]);
        assert!(matches!(
            verblunsky_from_poly(&p),
            Err(OpucError::NotSchurStable { level: 1, .. })
        ));
    }

    #[test]
    fn free_popuc_is_regular_hexagon() {
        let lambda = C64::from_polar(1.0, 0.7);
        let p = popuc(&VerblunskySeq::free(5), lambda).unwrap();
        for z in &p.zeros {
            assert!((z.powi(6) - lambda.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn popuc_product_of_zeros_is_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = rand_seq(&mut rng, 4, 0.9);
        let p = popuc(&v, C64::from_polar(1.0, 2.0)).unwrap();
        let prod: C64 = p.zeros.iter().product();
        assert!((prod.norm() - 1.0).abs() < 1e-10);
        assert!(popuc(&v, c(0.5, 0.0)).is_err());
    }

    #[test]
    fn quadrilateral_prefix_popuc_on_circle() {
        let f = [c(-0.28, 0.12), c(0.6, 0.24), c(0.4, 0.3)];
        let v = verblunsky_from_roots(&f).unwrap();
        for k in 0..8 {
            let p = popuc(&v, C64::from_polar(1.0, TAU * k as f64 / 8.0 + 0.1)).unwrap();
            assert!(p.zeros.iter().all(|z| (z.norm() - 1.0).abs() < 1e-8));
        }
    }

    fn arb_seq(max_len: usize) -> impl Strategy<Value = VerblunskySeq> {
        prop::collection::vec((0.0f64..0.95, 0.0f64..TAU), 1..=max_len)
            .prop_map(|v| VerblunskySeq::new(v.into_iter().map(|(r, t)| C64::from_polar(r, t)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn prop_round_trip(v in arb_seq(8)) {
            let back = verblunsky_from_poly(&opuc_from_verblunsky(&v)).unwrap();
            prop_assert!(back.max_diff(&v) < 1e-10);
        }

        #[test]
        fn prop_zeros_strictly_inside(v in arb_seq(8)) {
            let p = opuc_from_verblunsky(&v);
            let r = poly::roots(&p.to_poly(), 1e-12).unwrap();
            prop_assert!(r.iter().all(|z| z.norm() < 1.0));
        }

        #[test]
        fn prop_reverse_has_no_zeros_in_closed_disk(v in arb_seq(7)) {
            let s = reverse(&opuc_from_verblunsky(&v));
            if s.degree().unwrap_or(0) >= 1 {
                let r = poly::roots(&s, 1e-12).unwrap();
                prop_assert!(r.iter().all(|z| z.norm() > 1.0));
            }
        }

        #[test]
        fn prop_popuc_moduli(v in arb_seq(7), k in 0usize..16) {
            let lambda = C64::from_polar(1.0, TAU * k as f64 / 16.0);
            let p = popuc(&v, lambda).unwrap();
            let dev = p.zeros.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
            prop_assert!(dev < 1e-9);
        }

        #[test]
        fn prop_popuc_zeros_interlace(v in arb_seq(6), t in 0.05f64..6.2) {
            let a = popuc(&v, C64::new(1.0, 0.0)).unwrap();
            let b = popuc(&v, C64::from_polar(1.0, t)).unwrap();
            let mut all: Vec<(f64, u8)> = a.zeros.iter().map(|z| (z.arg(), 0u8))
                .chain(b.zeros.iter().map(|z| (z.arg(), 1u8))).collect();
            all.sort_by(|x, y| x.0.total_cmp(&y.0));
            for w in all.windows(2) {
                prop_assert_ne!(w[0].1, w[1].1);
            }
        }
    }
}
