//! Finite Blaschke products, composition and decomposition of regular
//! products, and the factorization tests on low-degree orthogonal polynomials.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::opuc::{verblunsky_from_poly, OpucError};
use crate::poly::{self, reverse, sort_lex, MonicPoly, Poly, PolyError};
use crate::C64;

/// A zero closer than this to the origin makes the product regular.
pub const REGULAR_TOL: f64 = 1e-12;
/// Relative structural residual accepted by decomposition and detection.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Candidates above [`STRUCTURE_TOL`] but below this are flagged as marginal.
pub const MARGINAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlaschkeError {
    #[error("zero {0} is not inside the open unit disk")]
    ZeroOutsideDisk(C64),
    #[error("evaluation at a pole: z = {0}")]
    PoleEvaluation(C64),
    #[error("Blaschke product is not regular (no zero at the origin)")]
    NotRegular,
    #[error("degree {n} is not {j} x {k}")]
    BadDegreeSplit { n: usize, j: usize, k: usize },
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Opuc(#[from] OpucError),
}

/// `Π (z − z_j)/(1 − conj(z_j) z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<C64>,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<C64>) -> Result<Self, BlaschkeError> {
        if let Some(&z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(BlaschkeError::ZeroOutsideDisk(z));
        }
        Ok(Self { zeros })
    }

    /// `Φ/Φ*` for a polynomial with zeros in the disk.
    pub fn from_opuc(phi: &MonicPoly) -> Result<Self, BlaschkeError> {
        if phi.degree() == 0 {
            return Ok(Self { zeros: Vec::new() });
        }
        Self::new(poly::roots(&phi.to_poly(), poly::ROOT_TOL)?)
    }

    /// The regular product `zΦ/Φ*`.
    pub fn regular_from_opuc(phi: &MonicPoly) -> Result<Self, BlaschkeError> {
        let mut b = Self::from_opuc(phi)?;
        b.zeros.insert(0, C64::new(0.0, 0.0));
        Ok(b)
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        Self {
            zeros: vec![C64::new(0.0, 0.0); n],
        }
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_regular(&self) -> bool {
        self.zeros.iter().any(|z| z.norm() < REGULAR_TOL)
    }

    /// Zeros with one origin zero removed, i.e. the zeros of `B(z)/z`.
    pub fn reduced_zeros(&self) -> Result<Vec<C64>, BlaschkeError> {
        let i = self
            .zeros
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() < REGULAR_TOL)
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .ok_or(BlaschkeError::NotRegular)?;
        let mut z = self.zeros.clone();
        z.remove(i);
        Ok(z)
    }

    pub fn eval(&self, z: C64) -> Result<C64, BlaschkeError> {
        let mut acc = C64::new(1.0, 0.0);
        for &a in &self.zeros {
            let den = C64::new(1.0, 0.0) - a.conj() * z;
            if den.norm() < 1e-14 {
                return Err(BlaschkeError::PoleEvaluation(z));
            }
            acc *= (z - a) / den;
        }
        Ok(acc)
    }
}

/// Zeros of `outer ∘ inner`.
///
/// With `inner = zΦ/Φ*` and outer zeros `{0, a_1, ..}`, the composition
/// vanishes at the zeros of `inner` and at the roots of each `zΦ − a_m Φ*`.
pub fn compose(outer: &BlaschkeProduct, inner: &BlaschkeProduct) -> Result<BlaschkeProduct, BlaschkeError> {
    let outer_rest = outer.reduced_zeros()?;
    let inner_rest = inner.reduced_zeros()?;
    let phi = MonicPoly::from_roots(&inner_rest);
    let u = phi.to_poly().shift(1);
    let v = reverse(&phi);
    let mut zeros = inner.zeros.clone();
    for &a in &outer_rest {
        let s = &u - &v.scale(a);
        zeros.extend(poly::roots(&s, poly::ROOT_TOL)?);
    }
    BlaschkeProduct::new(zeros)
}

/// Complex least squares `min ‖Σ x_i cols_i − rhs‖` on coefficient vectors.
/// Returns the solution and the max-norm residual.
pub(crate) fn poly_lstsq(cols: &[Poly], rhs: &Poly) -> (Vec<C64>, f64) {
    let rows = cols
        .iter()
        .map(|c| c.coeffs().len())
        .chain(std::iter::once(rhs.coeffs().len()))
        .max()
        .unwrap_or(0)
        .max(1);
    let a = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j].coeff(i));
    let b = DVector::from_fn(rows, |i, _| rhs.coeff(i));
    let x = match a.clone().svd(true, true).solve(&b, 1e-14) {
        Ok(x) => x,
        Err(_) => return (vec![C64::new(0.0, 0.0); cols.len()], f64::INFINITY),
    };
    let r = &a * &x - &b;
    let res = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (x.iter().copied().collect(), res)
}

/// `Σ_i (−1)^i e_i u^{j−1−i} v^i` for `e_0 = 1`.
fn symmetric_expansion(e: &[C64], u: &Poly, v: &Poly) -> Vec<Poly> {
    let m = e.len();
    (0..m)
        .map(|i| {
            let mut t = Poly::constant(C64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
            for _ in 0..(m - 1 - i) {
                t = &t * u;
            }
            for _ in 0..i {
                t = &t * v;
            }
            t
        })
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Splits a regular product of degree `j·k` as `outer ∘ inner` with
/// `deg outer = j`, `deg inner = k`, both regular. Absent when no split of
/// the zero set passes the structural residual test.
pub fn decompose(
    b: &BlaschkeProduct,
    j: usize,
    k: usize,
) -> Result<Option<(BlaschkeProduct, BlaschkeProduct)>, BlaschkeError> {
    let n = b.degree();
    if j == 0 || k == 0 || n != j * k {
        return Err(BlaschkeError::BadDegreeSplit { n, j, k });
    }
    let mut rest = b.reduced_zeros()?;
    sort_lex(&mut rest);
    if j == 1 {
        return Ok(Some((BlaschkeProduct::monomial(1), b.clone())));
    }
    for subset in combinations(rest.len(), k - 1) {
        let chosen: Vec<C64> = subset.iter().map(|&i| rest[i]).collect();
        let others: Vec<C64> = (0..rest.len())
            .filter(|i| !subset.contains(i))
            .map(|i| rest[i])
            .collect();
        let phi = MonicPoly::from_roots(&chosen);
        let u = phi.to_poly().shift(1);
        let v = reverse(&phi);
        let q = MonicPoly::from_roots(&others).to_poly();
        let mut terms = symmetric_expansion(&vec![C64::new(0.0, 0.0); j], &u, &v);
        let lead = terms.remove(0);
        let (e, res) = poly_lstsq(&terms, &(&q - &lead));
        if !(res / (1.0 + q.max_abs_coeff()) < STRUCTURE_TOL) {
            continue;
        }
        // a_m are the roots of Σ (−1)^i e_i w^{j−1−i}
        let mut coeffs = vec![C64::new(0.0, 0.0); j];
        coeffs[j - 1] = C64::new(1.0, 0.0);
        for (i, &ei) in e.iter().enumerate() {
            let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[j - 2 - i] = ei * sign;
        }
        let a = if j == 2 {
            vec![-coeffs[0]]
        } else {
            poly::roots(&Poly::new(coeffs), poly::ROOT_TOL)?
        };
        if a.iter().any(|x| !(x.norm() < 1.0)) {
            continue;
        }
        let mut outer = vec![C64::new(0.0, 0.0)];
        outer.extend(a);
        let mut inner = vec![C64::new(0.0, 0.0)];
        inner.extend(chosen);
        return Ok(Some((BlaschkeProduct::new(outer)?, BlaschkeProduct::new(inner)?)));
    }
    Ok(None)
}

/// One candidate examined by a structure detection.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<T> {
    pub data: T,
    pub residual: f64,
    /// Passed the residual test and the disk conditions.
    pub accepted: bool,
}

/// All candidates of a detection, in deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport<T> {
    pub candidates: Vec<Candidate<T>>,
}

impl<T: Clone> DetectionReport<T> {
    /// First accepted candidate.
    pub fn first(&self) -> Option<T> {
        self.candidates.iter().find(|c| c.accepted).map(|c| c.data.clone())
    }

    pub fn matches(&self) -> Vec<T> {
        self.candidates
            .iter()
            .filter(|c| c.accepted)
            .map(|c| c.data.clone())
            .collect()
    }

    /// Candidates whose residual lies between the acceptance threshold and
    /// [`MARGINAL_TOL`].
    pub fn marginal(&self) -> Vec<&Candidate<T>> {
        self.candidates
            .iter()
            .filter(|c| c.residual >= STRUCTURE_TOL && c.residual < MARGINAL_TOL)
            .collect()
    }

    pub fn best_residual(&self) -> f64 {
        self.candidates.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min)
    }
}

fn sorted_roots(phi: &MonicPoly, degree: usize) -> Result<Vec<C64>, BlaschkeError> {
    if phi.degree() != degree {
        return Err(BlaschkeError::WrongDegree {
            expected: degree,
            got: phi.degree(),
        });
    }
    let mut r = poly::roots(&phi.to_poly(), poly::ROOT_TOL)?;
    sort_lex(&mut r);
    Ok(r)
}

fn others(roots: &[C64], skip: &[usize]) -> Vec<C64> {
    (0..roots.len())
        .filter(|i| !skip.contains(i))
        .map(|i| roots[i])
        .collect()
}

/// Tests `phi3 = Φ_1(z; a)·Φ_2(z; a, b)` over the three roots as candidate
/// `conj(a)`. Candidates are `(a, b)`.
pub fn detect_quad_structure_report(phi3: &MonicPoly) -> Result<DetectionReport<(C64, C64)>, BlaschkeError> {
    let roots = sorted_roots(phi3, 3)?;
    let mut candidates = Vec::new();
    for (i, &r) in roots.iter().enumerate() {
        let a = r.conj();
        let q = MonicPoly::from_roots(&others(&roots, &[i])).to_poly();
        let d = &q - &MonicPoly::from_roots(&[C64::new(0.0, 0.0), r]).to_poly();
        let (d0, d1) = (d.coeff(0), d.coeff(1));
        let residual = (d1 + a * d0).norm() / (1.0 + q.max_abs_coeff());
        let b = -d0.conj();
        candidates.push(Candidate {
            data: (a, b),
            residual,
            accepted: residual < STRUCTURE_TOL && b.norm() < 1.0,
        });
    }
    Ok(DetectionReport { candidates })
}

/// First `(a, b)` with `phi3 = Φ_1(z; a)·Φ_2(z; a, b)`; the pentagram point is `conj(a)`.
pub fn detect_quad_structure(phi3: &MonicPoly) -> Result<Option<(C64, C64)>, BlaschkeError> {
    Ok(detect_quad_structure_report(phi3)?.first())
}

/// Tests `phi5 = Φ_2(z; α_0, α_1)·Φ_3(z; α_0, α_1, α_2)` over all root pairs.
pub fn detect_hexagon_pentagram_report(phi5: &MonicPoly) -> Result<DetectionReport<(C64, C64, C64)>, BlaschkeError> {
    let roots = sorted_roots(phi5, 5)?;
    let mut candidates = Vec::new();
    for pair in combinations(5, 2) {
        let phi2 = MonicPoly::from_roots(&[roots[pair[0]], roots[pair[1]]]);
        let alphas = match verblunsky_from_poly(&phi2) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let q = MonicPoly::from_roots(&others(&roots, &pair)).to_poly();
        let d = &q - &phi2.to_poly().shift(1);
        let star = reverse(&phi2);
        let (x, res) = poly_lstsq(std::slice::from_ref(&star), &d);
        let residual = res / (1.0 + q.max_abs_coeff());
        let alpha2 = -x[0].conj();
        candidates.push(Candidate {
            data: (alphas.alphas()[0], alphas.alphas()[1], alpha2),
            residual,
            accepted: residual < STRUCTURE_TOL && alpha2.norm() < 1.0,
        });
    }
    Ok(DetectionReport { candidates })
}

pub fn detect_hexagon_pentagram(phi5: &MonicPoly) -> Result<Option<(C64, C64, C64)>, BlaschkeError> {
    Ok(detect_hexagon_pentagram_report(phi5)?.first())
}

/// Tests `phi5 = Φ_1(z; α_0)·Φ_2(z; α_0, α_1)·Φ_2(z; α_0, γ_1)` over the
/// roots as candidate Brianchon point `f5`. Candidates are `(f5, β1, β2)`
/// with `β1 = conj(α_1)`, `β2 = conj(γ_1)`.
pub fn detect_hexagon_brianchon_report(phi5: &MonicPoly) -> Result<DetectionReport<(C64, C64, C64)>, BlaschkeError> {
    let roots = sorted_roots(phi5, 5)?;
    let mut candidates = Vec::new();
    for (i, &f5) in roots.iter().enumerate() {
        let phi1 = MonicPoly::from_roots(&[f5]);
        let u = phi1.to_poly().shift(1);
        let v = reverse(&phi1);
        let q = MonicPoly::from_roots(&others(&roots, &[i])).to_poly();
        let uu = &u * &u;
        let cols = [-&(&u * &v), &v * &v];
        let (x, res) = poly_lstsq(&cols, &(&q - &uu));
        let residual = res / (1.0 + q.max_abs_coeff());
        let (s, p) = (x[0], x[1]);
        let disc = (s * s - p * 4.0).sqrt();
        let mut betas = [(s + disc) / 2.0, (s - disc) / 2.0];
        sort_lex(&mut betas);
        candidates.push(Candidate {
            data: (f5, betas[0], betas[1]),
            residual,
            accepted: residual < STRUCTURE_TOL && betas.iter().all(|b| b.norm() < 1.0),
        });
    }
    Ok(DetectionReport { candidates })
}

pub fn detect_hexagon_brianchon(phi5: &MonicPoly) -> Result<Option<(C64, C64, C64)>, BlaschkeError> {
    Ok(detect_hexagon_brianchon_report(phi5)?.first())
}
