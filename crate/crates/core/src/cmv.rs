//! Cut-off CMV matrices, their unitary dilations, characteristic polynomials
//! and a cyclic Jacobi eigensolver for small Hermitian matrices.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use thiserror::Error;

use crate::opuc::{check_lambda, OpucError, VerblunskySeq};
use crate::poly::{self, MonicPoly, PolyError};
use crate::C64;

pub const MAX_DIM: usize = 16;
const JACOBI_THRESHOLD: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 40;
const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CmvError {
    #[error("matrix dimension {0} exceeds the supported maximum of 16")]
    TooLarge(usize),
    #[error("matrix is not Hermitian: max |H - H*| = {0:e}")]
    NotHermitian(f64),
    #[error("empty Verblunsky sequence")]
    Empty,
    #[error(transparent)]
    Opuc(#[from] OpucError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Dense square complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Result<Self, CmvError> {
        if n > MAX_DIM {
            return Err(CmvError::TooLarge(n));
        }
        Ok(Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self, CmvError> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self, CmvError> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        Ok(m)
    }

    pub fn diagonal(d: &[C64]) -> Result<Self, CmvError> {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        Self {
            n,
            data: (0..n * n).map(|k| self.data[(k % n) * n + k / n].conj()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Principal `k×k` corner.
    pub fn corner(&self, k: usize) -> Self {
        Self::from_fn(k, |i, j| self[(i, j)]).expect("corner never grows")
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `‖U*U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let id = Self::identity(self.n).expect("same size");
        (&self.adjoint() * self).sub(&id).max_abs()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let g = &self.adjoint() * self;
        hermitian_eigen(&g)
            .map(|(vals, _)| vals.first().copied().unwrap_or(0.0).max(0.0).sqrt())
            .unwrap_or(f64::NAN)
    }

    /// Rows as nested vectors, mainly for serialization.
    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        ComplexMatrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum()).expect("same size")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Θ-block entries for coefficient `a`: `[[ā, ρ], [ρ, −a]]`.
fn theta(a: C64) -> [[C64; 2]; 2] {
    let rho = C64::new(((1.0 - a.norm()) * (1.0 + a.norm())).max(0.0).sqrt(), 0.0);
    [[a.conj(), rho], [rho, -a]]
}

/// Places Θ_j at rows/columns `j, j+1` for every `j` of the given parity,
/// clipping blocks at the border. Odd parity puts a 1 in the top-left corner.
fn block_diag(alphas: &[C64], n: usize, parity: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n).expect("size checked by caller");
    if parity == 1 && n > 0 {
        m[(0, 0)] = C64::new(1.0, 0.0);
    }
    let mut j = parity;
    while j < n {
        let t = theta(alphas[j]);
        for (p, row) in t.iter().enumerate() {
            for (q, &v) in row.iter().enumerate() {
                if j + p < n && j + q < n {
                    m[(j + p, j + q)] = v;
                }
            }
        }
        j += 2;
    }
    m
}

/// `ℒℳ` of size `alphas.len()`. Unitary when the last coefficient is unimodular.
fn lm_product(alphas: &[C64]) -> Result<ComplexMatrix, CmvError> {
    let n = alphas.len();
    if n > MAX_DIM {
        return Err(CmvError::TooLarge(n));
    }
    let l = block_diag(alphas, n, 0);
    let m = block_diag(alphas, n, 1);
    Ok(&l * &m)
}

/// The `ℒ` and `ℳ` factors of a dilation, exposed for unitarity checks.
pub fn lm_factors(prefix: &VerblunskySeq, lambda: C64) -> Result<(ComplexMatrix, ComplexMatrix), CmvError> {
    check_lambda(lambda)?;
    let mut a = prefix.alphas().to_vec();
    a.push(lambda);
    if a.len() > MAX_DIM {
        return Err(CmvError::TooLarge(a.len()));
    }
    Ok((block_diag(&a, a.len(), 0), block_diag(&a, a.len(), 1)))
}

/// Cut-off CMV matrix together with its Verblunsky data.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffCmv {
    pub matrix: ComplexMatrix,
    pub alphas: VerblunskySeq,
}

/// Numerical checks of the contraction class the cut-off matrices live in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmvInvariants {
    pub norm: f64,
    pub defect_rank_left: usize,
    pub defect_rank_right: usize,
    pub spectral_radius: f64,
}

impl CmvInvariants {
    pub fn holds(&self) -> bool {
        self.norm <= 1.0 + 1e-10
            && self.defect_rank_left == 1
            && self.defect_rank_right == 1
            && self.spectral_radius < 1.0
    }
}

impl CutoffCmv {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn invariants(&self) -> Result<CmvInvariants, CmvError> {
        let a = &self.matrix;
        let id = ComplexMatrix::identity(a.dim())?;
        let rank = |m: ComplexMatrix| -> Result<usize, CmvError> {
            Ok(hermitian_eigen(&m)?.0.iter().filter(|v| v.abs() > 1e-8).count())
        };
        let left = rank(id.sub(&(a * &a.adjoint())))?;
        let right = rank(id.sub(&(&a.adjoint() * a)))?;
        let spectral_radius = eigenvalues(a)?.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(CmvInvariants {
            norm: a.operator_norm(),
            defect_rank_left: left,
            defect_rank_right: right,
            spectral_radius,
        })
    }
}

/// The `n×n` principal corner of `ℒℳ`, `n = v.len()`.
pub fn cutoff_cmv(v: &VerblunskySeq) -> Result<CutoffCmv, CmvError> {
    if v.is_empty() {
        return Err(CmvError::Empty);
    }
    let n = v.len();
    if n > MAX_DIM {
        return Err(CmvError::TooLarge(n));
    }
    // the corner does not depend on the coefficient appended here
    let mut a = v.alphas().to_vec();
    a.push(C64::new(1.0, 0.0));
    let full = if a.len() <= MAX_DIM {
        lm_product(&a)?
    } else {
        let l = block_diag(&a, n, 0);
        let m = block_diag(&a, n, 1);
        &l * &m
    };
    Ok(CutoffCmv {
        matrix: full.corner(n),
        alphas: v.clone(),
    })
}

/// Unitary `(k+1)×(k+1)` matrix, `k = prefix.len()`, whose characteristic
/// polynomial is the paraorthogonal polynomial of `(prefix, λ)`.
pub fn unitary_dilation(prefix: &VerblunskySeq, lambda: C64) -> Result<ComplexMatrix, CmvError> {
    check_lambda(lambda)?;
    let mut a = prefix.alphas().to_vec();
    a.push(lambda);
    lm_product(&a)
}

/// Characteristic polynomial `det(zI − A)` by Faddeev–LeVerrier.
pub fn char_poly(a: &ComplexMatrix) -> MonicPoly {
    let n = a.dim();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let id = ComplexMatrix::identity(n).expect("same size");
    let mut m = ComplexMatrix::zeros(n).expect("same size");
    for k in 1..=n {
        m = (a * &m).add(&id.scale(c[n - k + 1]));
        c[n - k] = -(a * &m).trace() / k as f64;
    }
    c.pop();
    MonicPoly::new(c)
}

/// Eigenvalues as roots of the characteristic polynomial.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>, CmvError> {
    if a.dim() == 0 {
        return Ok(Vec::new());
    }
    Ok(poly::roots(&char_poly(a).to_poly(), poly::ROOT_TOL)?)
}

fn hermitian_defect(h: &ComplexMatrix) -> f64 {
    h.sub(&h.adjoint()).max_abs()
}

/// All eigenpairs of a Hermitian matrix, values in decreasing order.
///
/// Eigenvectors are the columns of the returned matrix.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), CmvError> {
    let defect = hermitian_defect(h);
    if !(defect < HERMITIAN_TOL * (1.0 + h.max_abs())) {
        return Err(CmvError::NotHermitian(defect));
    }
    let n = h.dim();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n)?;
    let total: f64 = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_THRESHOLD * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = a[(p, q)];
                let r = hpq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = hpq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let ph = phase.conj();
                // columns: A ← A G
                for i in 0..n {
                    let (xp, xq) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = xp * cs - xq * ph * sn;
                    a[(i, q)] = xp * sn + xq * ph * cs;
                    let (yp, yq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = yp * cs - yq * ph * sn;
                    v[(i, q)] = yp * sn + yq * ph * cs;
                }
                // rows: A ← G^H A
                for j in 0..n {
                    let (xp, xq) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = xp * cs - xq * phase * sn;
                    a[(q, j)] = xp * sn + xq * phase * cs;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])])?;
    Ok((values, vectors))
}

/// Largest eigenvalue and a unit eigenvector.
pub fn hermitian_top_eigenpair(h: &ComplexMatrix) -> Result<(f64, Vec<C64>), CmvError> {
    let (vals, vecs) = hermitian_eigen(h)?;
    let top = vals.first().copied().unwrap_or(0.0);
    let v = (0..h.dim()).map(|i| vecs[(i, 0)]).collect();
    Ok((top, v))
}

/// `k` boundary points of the numerical range, at support angles `2πj/k`.
///
/// The point for angle θ is `v*Av` with `v` the top eigenvector of
/// `(e^{−iθ}A + e^{iθ}A*)/2`.
pub fn numerical_range_boundary(a: &ComplexMatrix, k: usize) -> Result<Vec<C64>, CmvError> {
    let adj = a.adjoint();
    (0..k)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / k as f64;
            let e = C64::from_polar(0.5, -theta);
            let h = a.scale(e).add(&adj.scale(e.conj()));
            let (_, v) = hermitian_top_eigenpair(&h)?;
            let av = a.mul_vec(&v);
            Ok(v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opuc::{opuc_from_verblunsky, popuc};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_seq(rng: &mut ChaCha8Rng, n: usize) -> VerblunskySeq {
        VerblunskySeq::new(
            (0..n)
                .map(|_| C64::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn free_case_is_shift_pattern() {
        let g = cutoff_cmv(&VerblunskySeq::free(5)).unwrap().matrix;
        let nonzero: Vec<(usize, usize)> = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .filter(|&(i, j)| g[(i, j)].norm() > 0.0)
            .collect();
        assert_eq!(nonzero, vec![(0, 2), (1, 0), (2, 4), (3, 1)]);
        assert!(nonzero.iter().all(|&ij| g[ij] == c(1.0, 0.0)));
        assert_eq!(char_poly(&g), MonicPoly::monomial(5));
    }

    #[test]
    fn one_by_one_corner() {
        let a = c(0.3, -0.6);
        let g = cutoff_cmv(&VerblunskySeq::new(vec![a]).unwrap()).unwrap().matrix;
        assert_eq!(g.dim(), 1);
        assert!((g[(0, 0)] - a.conj()).norm() < 1e-16);
    }

    #[test]
    fn char_poly_matches_szego_for_random_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let v = rand_seq(&mut rng, 5);
            let g = cutoff_cmv(&v).unwrap();
            assert!(char_poly(&g.matrix).max_coeff_diff(&opuc_from_verblunsky(&v)) < 1e-10);
        }
    }

    #[test]
    fn empty_dilation_is_one() {
        let u = unitary_dilation(&VerblunskySeq::free(0), c(1.0, 0.0)).unwrap();
        assert_eq!(u.dim(), 1);
        assert_eq!(u[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn free_dilation_has_sixth_roots() {
        let lambda = C64::from_polar(1.0, 1.1);
        let u = unitary_dilation(&VerblunskySeq::free(5), lambda).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        for z in eigenvalues(&u).unwrap() {
            assert!((z.powi(6) - lambda.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn dilation_matches_popuc_and_contains_corner() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..7 {
            let v = rand_seq(&mut rng, n);
            let lambda = C64::from_polar(1.0, rng.gen_range(0.0..TAU));
            let u = unitary_dilation(&v, lambda).unwrap();
            assert!(u.unitarity_defect() < 1e-10);
            let p = popuc(&v, lambda).unwrap();
            assert!(char_poly(&u).max_coeff_diff(&p.poly) < 1e-9);
            let (_, worst) = poly::match_roots(&eigenvalues(&u).unwrap(), &p.zeros);
            assert!(worst < 1e-8);
            let g = cutoff_cmv(&v).unwrap().matrix;
            assert!(u.corner(n).sub(&g).max_abs() < 1e-15);
        }
    }

    #[test]
    fn lm_factors_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = rand_seq(&mut rng, 6);
        let (l, m) = lm_factors(&v, C64::from_polar(1.0, 0.4)).unwrap();
        assert!(l.unitarity_defect() < 1e-12);
        assert!(m.unitarity_defect() < 1e-12);
    }

    #[test]
    fn char_poly_simple_cases() {
        let p = char_poly(&ComplexMatrix::identity(3).unwrap());
        assert!(p.max_coeff_diff(&MonicPoly::from_roots(&[c(1.0, 0.0); 3])) < 1e-15);
        let (a, b) = (c(0.2, 0.1), c(-1.0, 3.0));
        let p = char_poly(&ComplexMatrix::diagonal(&[a, b]).unwrap());
        assert!(p.max_coeff_diff(&MonicPoly::from_roots(&[a, b])) < 1e-15);
    }

    #[test]
    fn top_eigenpair_of_diagonal() {
        let h = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let (val, v) = hermitian_top_eigenpair(&h).unwrap();
        assert!((val - 3.0).abs() < 1e-15);
        assert!((v[0].norm() - 1.0).abs() < 1e-15 && v[1].norm() < 1e-15 && v[2].norm() < 1e-15);
    }

    #[test]
    fn top_eigenpair_of_swap() {
        let h = ComplexMatrix::from_fn(2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) }).unwrap();
        let (val, v) = hermitian_top_eigenpair(&h).unwrap();
        assert!((val - 1.0).abs() < 1e-14);
        let phase = v[0] / v[0].norm();
        let s = 0.5f64.sqrt();
        assert!((v[0] / phase - s).norm() < 1e-14 && (v[1] / phase - s).norm() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let h = ComplexMatrix::from_fn(2, |i, j| c((i + 2 * j) as f64, 0.0)).unwrap();
        assert!(matches!(hermitian_eigen(&h), Err(CmvError::NotHermitian(_))));
    }

    fn rand_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(n, |_, _| c(0.0, 0.0)).unwrap();
        let mut a = a;
        for i in 0..n {
            a[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        a
    }

    #[test]
    fn random_hermitian_top_matches_char_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let h = rand_hermitian(&mut rng, 5);
            let (val, v) = hermitian_top_eigenpair(&h).unwrap();
            let roots = eigenvalues(&h).unwrap();
            let top = roots.iter().map(|z| z.re).fold(f64::MIN, f64::max);
            assert!((val - top).abs() < 1e-9);
            let hv = h.mul_vec(&v);
            let res: f64 = hv
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - y * val).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-10);
        }
    }

    #[test]
    fn free_numerical_range_is_circle() {
        for n in 3..=7 {
            let g = cutoff_cmv(&VerblunskySeq::free(n - 1)).unwrap().matrix;
            let pts = numerical_range_boundary(&g, 64).unwrap();
            let r = (PI / n as f64).cos();
            assert!(pts.iter().all(|p| (p.norm() - r).abs() < 1e-8));
        }
    }

    #[test]
    fn too_large_is_rejected() {
        assert!(matches!(ComplexMatrix::zeros(17), Err(CmvError::TooLarge(17))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn prop_cutoff_invariants(seed in 0u64..10_000, n in 2usize..=7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = rand_seq(&mut rng, n);
            let inv = cutoff_cmv(&v).unwrap().invariants().unwrap();
            prop_assert!(inv.holds(), "{:?}", inv);
        }

        #[test]
        fn prop_char_poly_identity(seed in 0u64..10_000, n in 1usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = rand_seq(&mut rng, n);
            let g = cutoff_cmv(&v).unwrap();
            prop_assert!(char_poly(&g.matrix).max_coeff_diff(&opuc_from_verblunsky(&v)) < 1e-10);
        }
    }
}
