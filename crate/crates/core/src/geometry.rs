//! Ellipses, lines and conics in the plane, tangent chains inscribed in the
//! unit circle, and the closure bisection used as the geometric oracle.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::C64;

/// Containment margin used when bracketing the minor semiaxis.
pub const CONTAINMENT_MARGIN: f64 = 1e-6;
/// Concurrency tolerance for the three main diagonals of a hexagon.
pub const DIAGONAL_TOL: f64 = 1e-8;
/// Tangency residual accepted for the sixth line of an inscribed conic.
pub const SIXTH_LINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("minor semiaxis must be positive and finite, got {0}")]
    InvalidEllipse(f64),
    #[error("point {0} lies inside the ellipse; no tangent exists")]
    PointInsideEllipse(C64),
    #[error("no closure bracket for n = {n}: advance ranges from {lo} to {hi} (target {target})")]
    NoClosure { n: usize, lo: f64, hi: f64, target: f64 },
    #[error("closure advance has {count} sign changes on the sampled b grid")]
    MultipleBrackets { count: usize, brackets: Vec<(f64, f64)> },
    #[error("closure advance is not monotone in b near b = {b}")]
    NonMonotone { b: f64 },
    #[error("focus {0} is not inside the open unit disk")]
    NotInDisk(C64),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("diagonals {0} and {1} are parallel")]
    ParallelDiagonals(usize, usize),
    #[error("chain vertex {index} is off the circle by {deviation:e}")]
    VertexOffCircle { index: usize, deviation: f64 },
}

/// Ellipse given by its foci and minor semiaxis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub f1: C64,
    pub f2: C64,
    pub b_minor: f64,
}

impl Ellipse {
    pub fn new(f1: C64, f2: C64, b_minor: f64) -> Result<Self, GeometryError> {
        if !(b_minor > 0.0 && b_minor.is_finite()) {
            return Err(GeometryError::InvalidEllipse(b_minor));
        }
        Ok(Self { f1, f2, b_minor })
    }

    pub fn circle(center: C64, radius: f64) -> Result<Self, GeometryError> {
        Self::new(center, center, radius)
    }

    pub fn center(&self) -> C64 {
        (self.f1 + self.f2) / 2.0
    }

    pub fn a_major(&self) -> f64 {
        (self.b_minor * self.b_minor + (self.f1 - self.f2).norm_sqr() / 4.0).sqrt()
    }

    /// Unit vector along the major axis.
    pub fn axis(&self) -> C64 {
        let d = self.f2 - self.f1;
        if d.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            d / d.norm()
        }
    }

    pub fn point(&self, theta: f64) -> C64 {
        self.center() + self.axis() * C64::new(self.a_major() * theta.cos(), self.b_minor * theta.sin())
    }

    pub fn boundary(&self, k: usize) -> Vec<C64> {
        (0..k).map(|j| self.point(TAU * j as f64 / k as f64)).collect()
    }

    /// Largest modulus over the boundary.
    pub fn max_modulus(&self) -> f64 {
        const K: usize = 512;
        let f = |t: f64| self.point(t).norm();
        let (mut best_t, mut best) = (0.0, f(0.0));
        for j in 1..K {
            let t = TAU * j as f64 / K as f64;
            let v = f(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        // golden-section refinement around the sampled maximum
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut lo, mut hi) = (best_t - TAU / K as f64, best_t + TAU / K as f64);
        for _ in 0..60 {
            let (x1, x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if f(x1) > f(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        best.max(f((lo + hi) / 2.0))
    }

    pub fn is_in_disk(&self) -> bool {
        self.max_modulus() < 1.0
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.f1).norm() + (z - self.f2).norm() < 2.0 * self.a_major()
    }

    /// `z` in the frame centred at the ellipse with the major axis along x.
    fn local(&self, z: C64) -> C64 {
        (z - self.center()) * self.axis().conj()
    }

    /// `| |distance from centre to line| − support |`, zero for tangent lines.
    pub fn tangency_residual(&self, line: &Line) -> f64 {
        let n = C64::new(line.u, line.v);
        let d = -line.w - dot(n, self.center());
        let m = n * self.axis().conj();
        let a = self.a_major();
        let h = (a * a * m.re * m.re + self.b_minor * self.b_minor * m.im * m.im).sqrt();
        (d.abs() - h).abs()
    }

    pub fn to_conic(&self) -> Conic {
        let (a, b) = (self.a_major(), self.b_minor);
        let (c, s) = (self.axis().re, self.axis().im);
        let ctr = self.center();
        // (x−c)^T R diag(1/a², 1/b²) R^T (x−c) = 1
        let q = Matrix2::new(c, -s, s, c)
            * Matrix2::new(1.0 / (a * a), 0.0, 0.0, 1.0 / (b * b))
            * Matrix2::new(c, s, -s, c);
        let x0 = nalgebra::Vector2::new(ctr.re, ctr.im);
        let lin = -(q * x0);
        let cst = (x0.transpose() * q * x0)[(0, 0)] - 1.0;
        Conic {
            m: Matrix3::new(
                q[(0, 0)],
                q[(0, 1)],
                lin[0],
                q[(1, 0)],
                q[(1, 1)],
                lin[1],
                lin[0],
                lin[1],
                cst,
            ),
        }
    }

    /// Largest distance between corresponding parameters, comparing foci as
    /// unordered pairs.
    pub fn distance(&self, other: &Ellipse) -> f64 {
        let direct = (self.f1 - other.f1).norm().max((self.f2 - other.f2).norm());
        let swapped = (self.f1 - other.f2).norm().max((self.f2 - other.f1).norm());
        direct.min(swapped).max((self.b_minor - other.b_minor).abs())
    }
}

fn dot(a: C64, b: C64) -> f64 {
    a.re * b.re + a.im * b.im
}

fn cross(a: C64, b: C64) -> f64 {
    (a.conj() * b).im
}

/// Line `u x + v y + w = 0` with `u² + v² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Line {
    pub fn new(u: f64, v: f64, w: f64) -> Result<Self, GeometryError> {
        let n = u.hypot(v);
        if !(n > 0.0) || !w.is_finite() {
            return Err(GeometryError::DegenerateConfiguration("line with zero normal".into()));
        }
        Ok(Self {
            u: u / n,
            v: v / n,
            w: w / n,
        })
    }

    pub fn through(p: C64, q: C64) -> Result<Self, GeometryError> {
        let d = q - p;
        Self::new(-d.im, d.re, d.im * p.re - d.re * p.im)
    }

    pub fn eval(&self, z: C64) -> f64 {
        self.u * z.re + self.v * z.im + self.w
    }

    pub fn intersect(&self, other: &Line) -> Option<C64> {
        let det = self.u * other.v - self.v * other.u;
        if det.abs() < 1e-14 {
            return None;
        }
        let x = (self.v * other.w - other.v * self.w) / det;
        let y = (other.u * self.w - self.u * other.w) / det;
        Some(C64::new(x, y))
    }
}

/// Real symmetric 3×3 matrix acting on `(x, y, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub m: Matrix3<f64>,
}

impl Conic {
    pub fn eval(&self, z: C64) -> f64 {
        let p = nalgebra::Vector3::new(z.re, z.im, 1.0);
        (p.transpose() * self.m * p)[(0, 0)]
    }

    pub fn is_ellipse(&self) -> bool {
        self.to_ellipse().is_some()
    }

    /// Foci and minor semiaxis when the conic is a real ellipse.
    pub fn to_ellipse(&self) -> Option<Ellipse> {
        let m = self.m;
        let q = Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let scale = m.abs().max();
        if !(q.determinant() > 1e-14 * scale * scale) || m.determinant().abs() <= 1e-300 {
            return None;
        }
        let lin = nalgebra::Vector2::new(m[(0, 2)], m[(1, 2)]);
        let ctr = -(q.try_inverse()? * lin);
        let k = m[(2, 2)] + lin.dot(&ctr);
        if k == 0.0 {
            return None;
        }
        let eig = SymmetricEigen::new(q / (-k));
        let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
        if !(l0 > 0.0 && l1 > 0.0) {
            return None;
        }
        let (imaj, imin) = if l0 <= l1 { (0, 1) } else { (1, 0) };
        let a = 1.0 / eig.eigenvalues[imaj].sqrt();
        let b = 1.0 / eig.eigenvalues[imin].sqrt();
        let dir = C64::new(eig.eigenvectors[(0, imaj)], eig.eigenvectors[(1, imaj)]);
        let c = C64::new(ctr[0], ctr[1]);
        let e = if a - b <= 64.0 * f64::EPSILON * a {
            0.0
        } else {
            ((a - b) * (a + b)).sqrt()
        };
        Ellipse::new(c - dir * e, c + dir * e, b).ok()
    }
}

/// Vertices on the unit circle in cyclic order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonChain {
    pub vertices: Vec<C64>,
    pub closure_defect: f64,
}

impl PolygonChain {
    pub fn new(vertices: Vec<C64>, closure_defect: f64) -> Result<Self, GeometryError> {
        for (index, v) in vertices.iter().enumerate() {
            let deviation = (v.norm() - 1.0).abs();
            if deviation > 1e-9 {
                return Err(GeometryError::VertexOffCircle { index, deviation });
            }
        }
        Ok(Self {
            vertices,
            closure_defect,
        })
    }

    /// A closed polygon from unordered points on the circle.
    pub fn from_points(mut points: Vec<C64>) -> Result<Self, GeometryError> {
        points.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        Self::new(points, 0.0)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Whether consecutive vertices advance strictly counterclockwise with
    /// total turning `2π`.
    pub fn is_cyclically_ordered(&self) -> bool {
        let n = self.vertices.len();
        let total: f64 = (0..n)
            .map(|i| advance(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum();
        (0..n).all(|i| advance(self.vertices[i], self.vertices[(i + 1) % n]) > 0.0) && (total - TAU).abs() < 1e-6
    }

    /// Side lines `v_i v_{i+1}`.
    pub fn sides(&self) -> Result<Vec<Line>, GeometryError> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| Line::through(self.vertices[i], self.vertices[(i + 1) % n]))
            .collect()
    }
}

/// Counterclockwise angle from `p` to `q` in `[0, 2π)`.
fn advance(p: C64, q: C64) -> f64 {
    let t = (q * p.conj()).arg();
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

/// Second circle intersection of the tangent from `p` to `e`. Orientation
/// `+1` keeps the ellipse to the left of the chord, `−1` to the right.
pub fn tangent_step(e: &Ellipse, p: C64, orientation: i32) -> Result<C64, GeometryError> {
    let q = e.local(p);
    let (a, b) = (e.a_major(), e.b_minor);
    let (px, py) = (q.re, q.im);
    let (qa, qb, qc) = (px * px - a * a, px * py, py * py - b * b);
    // null directions of the indefinite form [[qa, qb], [qb, qc]]
    let mean = (qa + qc) / 2.0;
    let rad = ((qa - qc) / 2.0).hypot(qb);
    let det = a * a * b * b - a * a * py * py - b * b * px * px;
    let (l1, l2) = if mean >= 0.0 {
        (mean + rad, det / (mean + rad))
    } else {
        (det / (mean - rad), mean - rad)
    };
    if !(l2 < 0.0 && l1 > 0.0) {
        return Err(GeometryError::PointInsideEllipse(p));
    }
    let th = 0.5 * (2.0 * qb).atan2(qa - qc);
    let e1 = C64::new(th.cos(), th.sin());
    let e2 = C64::new(-th.sin(), th.cos());
    let ctr = e.center();
    let mut best = None;
    for sgn in [1.0, -1.0] {
        let mut n = e1 * (-l2).sqrt() + e2 * (sgn * l1.sqrt());
        n /= n.norm();
        if dot(n, q) < 0.0 {
            n = -n;
        }
        let d = C64::new(0.0, 1.0) * n * e.axis();
        let t = -2.0 * dot(p, d) / d.norm_sqr();
        let next = p + d * t;
        let side = cross(next - p, ctr - p);
        if side * orientation as f64 > 0.0 {
            best = Some(next / next.norm());
        }
    }
    best.ok_or(GeometryError::PointInsideEllipse(p))
}

/// `n` counterclockwise tangent steps from `start`.
pub fn tangent_chain(e: &Ellipse, n: usize, start: C64) -> Result<PolygonChain, GeometryError> {
    let mut v = Vec::with_capacity(n);
    let mut p = start;
    for _ in 0..n {
        v.push(p);
        p = tangent_step(e, p, 1)?;
    }
    let defect = (p - start).norm();
    PolygonChain::new(v, defect)
}

/// Total counterclockwise angle swept by `n` tangent steps from `start`.
pub fn chain_advance(e: &Ellipse, n: usize, start: C64) -> Result<f64, GeometryError> {
    let mut p = start;
    let mut total = 0.0;
    for _ in 0..n {
        let q = tangent_step(e, p, 1)?;
        total += advance(p, q);
        p = q;
    }
    Ok(total)
}

fn check_focus(f: C64) -> Result<(), GeometryError> {
    if !(f.norm() < 1.0) {
        return Err(GeometryError::NotInDisk(f));
    }
    Ok(())
}

/// Largest minor semiaxis keeping the ellipse with foci `f1, f2` at modulus
/// at most `1 − CONTAINMENT_MARGIN`.
pub fn b_max(f1: C64, f2: C64) -> Result<f64, GeometryError> {
    check_focus(f1)?;
    check_focus(f2)?;
    let target = 1.0 - CONTAINMENT_MARGIN;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let m = Ellipse::new(f1, f2, mid.max(f64::MIN_POSITIVE))?.max_modulus();
        if m < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo <= 0.0 {
        return Err(GeometryError::DegenerateConfiguration(
            "foci too close to the circle".into(),
        ));
    }
    Ok(lo)
}

/// Minor semiaxis for which tangent chains close after `n` steps while
/// winding `winding` times around the origin.
pub fn closure_bisection_winding(
    f1: C64,
    f2: C64,
    n: usize,
    winding: usize,
    tol: f64,
) -> Result<Ellipse, GeometryError> {
    if n < 3 || winding == 0 || 2 * winding >= n {
        return Err(GeometryError::DegenerateConfiguration(format!(
            "rotation number {winding}/{n} is not admissible"
        )));
    }
    let hi_b = b_max(f1, f2)?;
    let lo_b = 1e-9f64.min(hi_b / 2.0);
    let target = TAU * winding as f64;
    let start = C64::new(1.0, 0.0);
    let g = |b: f64| -> Result<f64, GeometryError> { Ok(chain_advance(&Ellipse::new(f1, f2, b)?, n, start)? - target) };

    const GRID: usize = 16;
    let grid: Vec<f64> = (0..=GRID)
        .map(|k| lo_b + (hi_b - lo_b) * k as f64 / GRID as f64)
        .collect();
    let vals = grid.iter().map(|&b| g(b)).collect::<Result<Vec<_>, _>>()?;
    for k in 0..GRID {
        if vals[k + 1] > vals[k] + 1e-9 {
            return Err(GeometryError::NonMonotone { b: grid[k + 1] });
        }
    }
    let brackets: Vec<(f64, f64)> = (0..GRID)
        .filter(|&k| vals[k] > 0.0 && vals[k + 1] <= 0.0)
        .map(|k| (grid[k], grid[k + 1]))
        .collect();
    match brackets.len() {
        0 => {
            return Err(GeometryError::NoClosure {
                n,
                lo: vals[GRID] + target,
                hi: vals[0] + target,
                target,
            })
        }
        1 => {}
        count => return Err(GeometryError::MultipleBrackets { count, brackets }),
    }
    let (mut lo, mut hi) = brackets[0];
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ellipse::new(f1, f2, 0.5 * (lo + hi))
}

/// The Poncelet `n`-ellipse with foci `f1, f2`, located by bisection on the
/// minor semiaxis.
pub fn closure_bisection(f1: C64, f2: C64, n: usize) -> Result<Ellipse, GeometryError> {
    closure_bisection_winding(f1, f2, n, 1, 1e-12)
}

/// `b = sqrt((1 − |f1|²)(1 − |f2|²))/2`.
pub fn poncelet_3_ellipse(f1: C64, f2: C64) -> Result<Ellipse, GeometryError> {
    check_focus(f1)?;
    check_focus(f2)?;
    Ellipse::new(f1, f2, ((1.0 - f1.norm_sqr()) * (1.0 - f2.norm_sqr())).sqrt() / 2.0)
}

/// Largest `| |p − f1| + |p − f2| − 2a |` over the points.
pub fn foci_sum_check(e: &Ellipse, pts: &[C64]) -> f64 {
    let two_a = 2.0 * e.a_major();
    pts.iter()
        .map(|&p| ((p - e.f1).norm() + (p - e.f2).norm() - two_a).abs())
        .fold(0.0, f64::max)
}

/// Smallest right singular vector of a real matrix with more columns than
/// rows or a full column set; padded so that the null space is visible.
fn null_vector(rows: &[[f64; 6]]) -> (nalgebra::DVector<f64>, Vec<f64>) {
    let n = rows.len().max(6);
    let a = DMatrix::from_fn(n, 6, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 });
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    (vt.row(order[0]).transpose(), sv)
}

/// Outcome of fitting a conic tangent to six lines.
#[derive(Debug, Clone, PartialEq)]
pub struct InscribedConic {
    pub ellipse: Option<Ellipse>,
    /// Tangency residual of the sixth line against the normalized dual conic.
    pub sixth_line_residual: f64,
}

/// Ellipse tangent to six lines, through the dual conic fixed by the first
/// five. Absent when the sixth line is not tangent or the conic is not an
/// ellipse.
pub fn inscribed_conic_report(lines: &[Line; 6]) -> Result<InscribedConic, GeometryError> {
    let row = |l: &Line| {
        [
            l.u * l.u,
            2.0 * l.u * l.v,
            l.v * l.v,
            2.0 * l.u * l.w,
            2.0 * l.v * l.w,
            l.w * l.w,
        ]
    };
    let rows: Vec<[f64; 6]> = lines[..5].iter().map(row).collect();
    let (x, sv) = null_vector(&rows);
    if sv[1] < 1e-12 * sv[5] {
        return Err(GeometryError::DegenerateConfiguration(
            "lines do not fix a unique conic".into(),
        ));
    }
    let dual = Matrix3::new(x[0], x[1], x[3], x[1], x[2], x[4], x[3], x[4], x[5]);
    let dual = dual / dual.norm();
    let l6 = nalgebra::Vector3::new(lines[5].u, lines[5].v, lines[5].w);
    let l6 = l6 / l6.norm();
    let residual = (l6.transpose() * dual * l6)[(0, 0)].abs();
    // the point conic is the inverse of the dual conic, up to scale
    let ellipse = if residual < SIXTH_LINE_TOL {
        dual.try_inverse().and_then(|m| Conic { m }.to_ellipse())
    } else {
        None
    };
    Ok(InscribedConic {
        ellipse,
        sixth_line_residual: residual,
    })
}

pub fn inscribed_conic(lines: &[Line; 6]) -> Result<Option<Ellipse>, GeometryError> {
    Ok(inscribed_conic_report(lines)?.ellipse)
}

/// Intersections of the three main diagonals of a hexagon.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMeet {
    pub point: Option<C64>,
    pub spread: f64,
    pub pairwise: [C64; 3],
}

pub fn diagonal_meet_report(hexagon: &PolygonChain) -> Result<DiagonalMeet, GeometryError> {
    if hexagon.len() != 6 {
        return Err(GeometryError::DegenerateConfiguration(format!(
            "expected 6 vertices, got {}",
            hexagon.len()
        )));
    }
    let v = &hexagon.vertices;
    let d: Vec<Line> = (0..3)
        .map(|i| Line::through(v[i], v[i + 3]))
        .collect::<Result<_, _>>()?;
    let meet = |i: usize, j: usize| d[i].intersect(&d[j]).ok_or(GeometryError::ParallelDiagonals(i, j));
    let pairwise = [meet(0, 1)?, meet(0, 2)?, meet(1, 2)?];
    let spread = (pairwise[0] - pairwise[1])
        .norm()
        .max((pairwise[0] - pairwise[2]).norm())
        .max((pairwise[1] - pairwise[2]).norm());
    let point = (spread < DIAGONAL_TOL).then(|| (pairwise[0] + pairwise[1] + pairwise[2]) / 3.0);
    Ok(DiagonalMeet {
        point,
        spread,
        pairwise,
    })
}

/// Common point of the three main diagonals, if they are concurrent.
pub fn diagonal_meet(hexagon: &PolygonChain) -> Result<Option<C64>, GeometryError> {
    Ok(diagonal_meet_report(hexagon)?.point)
}

/// Algebraic least-squares conic through points with a unit-norm
/// constraint; returns the ellipse and its foci-sum residual.
pub fn fit_ellipse(pts: &[C64]) -> Option<(Ellipse, f64)> {
    if pts.len() < 5 {
        return None;
    }
    let mean: C64 = pts.iter().sum::<C64>() / pts.len() as f64;
    let scale = (pts.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / pts.len() as f64).sqrt();
    if !(scale > 0.0) {
        return None;
    }
    let rows: Vec<[f64; 6]> = pts
        .iter()
        .map(|p| {
            let q = (p - mean) / scale;
            let (x, y) = (q.re, q.im);
            [x * x, x * y, y * y, x, y, 1.0]
        })
        .collect();
    let (c, _) = null_vector(&rows);
    let local = Matrix3::new(
        c[0],
        c[1] / 2.0,
        c[3] / 2.0,
        c[1] / 2.0,
        c[2],
        c[4] / 2.0,
        c[3] / 2.0,
        c[4] / 2.0,
        c[5],
    );
    let e = Conic { m: local }.to_ellipse()?;
    let e = Ellipse::new(e.f1 * scale + mean, e.f2 * scale + mean, e.b_minor * scale).ok()?;
    let residual = foci_sum_check(&e, pts);
    Some((e, residual))
}

/// The polygon of `n` equally spaced points starting at angle `t0`.
pub fn regular_polygon(n: usize, t0: f64) -> PolygonChain {
    PolygonChain {
        vertices: (0..n)
            .map(|k| C64::from_polar(1.0, t0 + TAU * k as f64 / n as f64))
            .collect(),
        closure_defect: 0.0,
    }
}

/// `cos(π/n)`, the Poncelet radius of a centred circle.
pub fn free_radius(n: usize) -> f64 {
    (PI / n as f64).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rand_disk(rng: &mut ChaCha8Rng, r: f64) -> C64 {
        C64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
    }

    #[test]
    fn semiaxes() {
        let e = Ellipse::new(c(-0.3, 0.0), c(0.3, 0.0), 0.4).unwrap();
        assert!((e.a_major() - 0.5).abs() < 1e-15);
        assert!(e.is_in_disk());
        assert!((e.max_modulus() - 0.5).abs() < 1e-12);
        assert!(Ellipse::new(c(0.0, 0.0), c(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn hexagon_step() {
        let e = Ellipse::circle(c(0.0, 0.0), 3f64.sqrt() / 2.0).unwrap();
        let p = tangent_step(&e, c(1.0, 0.0), 1).unwrap();
        assert!((p - C64::from_polar(1.0, PI / 3.0)).norm() < 1e-12);
        let p = tangent_step(&e, c(1.0, 0.0), -1).unwrap();
        assert!((p - C64::from_polar(1.0, -PI / 3.0)).norm() < 1e-12);
    }

    #[test]
    fn triangle_step() {
        let e = Ellipse::circle(c(0.0, 0.0), 0.5).unwrap();
        let p = tangent_step(&e, c(1.0, 0.0), 1).unwrap();
        assert!((p - C64::from_polar(1.0, TAU / 3.0)).norm() < 1e-12);
    }

    #[test]
    fn inside_point_has_no_tangent() {
        let e = Ellipse::circle(c(0.0, 0.0), 0.5).unwrap();
        assert!(matches!(
            tangent_step(&e, c(0.1, 0.0), 1),
            Err(GeometryError::PointInsideEllipse(_))
        ));
    }

    #[test]
    fn random_tangent_touches() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let e = Ellipse::new(
                rand_disk(&mut rng, 0.4),
                rand_disk(&mut rng, 0.4),
                rng.gen_range(0.05..0.3),
            )
            .unwrap();
            if !e.is_in_disk() {
                continue;
            }
            let p = C64::from_polar(1.0, rng.gen_range(0.0..TAU));
            let q = tangent_step(&e, p, 1).unwrap();
            assert!((q.norm() - 1.0).abs() < 1e-10);
            let l = Line::through(p, q).unwrap();
            assert!(e.tangency_residual(&l) < 1e-9);
        }
    }

    #[test]
    fn concentric_closure() {
        let e = Ellipse::circle(c(0.0, 0.0), free_radius(6)).unwrap();
        let ch = tangent_chain(&e, 6, C64::from_polar(1.0, 0.3)).unwrap();
        assert!(ch.closure_defect < 1e-10);
        assert!(ch.is_cyclically_ordered());
        let ch = tangent_chain(&e, 5, C64::from_polar(1.0, 0.3)).unwrap();
        assert!(ch.closure_defect > 0.5);
    }

    #[test]
    fn bisection_free_cases() {
        for n in [3, 6] {
            let e = closure_bisection(c(0.0, 0.0), c(0.0, 0.0), n);
            let e = e.unwrap_or_else(|err| panic!("{err:?}"));
            assert!((e.b_minor - free_radius(n)).abs() < 1e-10, "{n}: {}", e.b_minor);
        }
    }

    #[test]
    fn bisection_closes_for_quadrilateral_foci() {
        let e = closure_bisection(c(-0.28, 0.12), c(0.6, 0.24), 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..12 {
            let ch = tangent_chain(&e, 4, C64::from_polar(1.0, rng.gen_range(0.0..TAU))).unwrap();
            assert!(ch.closure_defect < 1e-8);
        }
    }

    #[test]
    fn three_ellipse_formula() {
        let e = poncelet_3_ellipse(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((e.b_minor - 0.5).abs() < 1e-16);
        let r = 0.35;
        let e = poncelet_3_ellipse(c(r, 0.0), c(-r, 0.0)).unwrap();
        assert!((e.b_minor - (1.0 - r * r) / 2.0).abs() < 1e-16);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let (f1, f2) = (rand_disk(&mut rng, 0.8), rand_disk(&mut rng, 0.8));
            let e = poncelet_3_ellipse(f1, f2).unwrap();
            let o = closure_bisection(f1, f2, 3).unwrap();
            assert!((e.b_minor - o.b_minor).abs() < 1e-8);
            assert!(tangent_chain(&e, 3, c(1.0, 0.0)).unwrap().closure_defect < 1e-9);
        }
    }

    #[test]
    fn regular_hexagon_inscribed_circle() {
        let hex = regular_polygon(6, 0.0);
        let lines: [Line; 6] = hex.sides().unwrap().try_into().unwrap();
        let e = inscribed_conic(&lines).unwrap().unwrap();
        assert!(e.f1.norm() < 1e-12 && e.f2.norm() < 1e-12, "{e:?}");
        assert!((e.b_minor - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn inscribed_conic_recovers_random_ellipse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let e = Ellipse::new(
                rand_disk(&mut rng, 0.5),
                rand_disk(&mut rng, 0.5),
                rng.gen_range(0.1..0.4),
            )
            .unwrap();
            let lines: Vec<Line> = (0..6)
                .map(|k| {
                    let t = TAU * k as f64 / 6.0 + rng.gen_range(0.0..0.5);
                    let p = e.point(t);
                    let (a, b) = (e.a_major(), e.b_minor);
                    let tangent = e.axis() * C64::new(-a * t.sin(), b * t.cos());
                    Line::through(p, p + tangent).unwrap()
                })
                .collect();
            let rep = inscribed_conic_report(&lines.try_into().unwrap()).unwrap();
            let got = rep.ellipse.unwrap_or_else(|| panic!("{rep:?} {e:?}"));
            assert!(got.distance(&e) < 1e-8, "{got:?} vs {e:?}");
        }
    }

    #[test]
    fn generic_lines_have_no_inscribed_conic() {
        let pts = [0.1, 0.9, 2.0, 2.6, 3.9, 5.0].map(|t| C64::from_polar(1.0, t));
        let hex = PolygonChain::new(pts.to_vec(), 0.0).unwrap();
        assert!(diagonal_meet(&hex).unwrap().is_none());
        let lines: [Line; 6] = hex.sides().unwrap().try_into().unwrap();
        let rep = inscribed_conic_report(&lines).unwrap();
        assert!(rep.ellipse.is_none() && rep.sixth_line_residual > 1e-9);
    }

    #[test]
    fn regular_hexagon_diagonals_meet_at_origin() {
        let p = diagonal_meet(&regular_polygon(6, 0.2)).unwrap().unwrap();
        assert!(p.norm() < 1e-14);
    }

    #[test]
    fn foci_sum_of_own_boundary() {
        let e = Ellipse::new(c(0.1, 0.2), c(-0.3, 0.1), 0.25).unwrap();
        assert!(foci_sum_check(&e, &e.boundary(64)) < 1e-10);
        let circ = Ellipse::circle(c(0.0, 0.0), 0.5).unwrap();
        let pts: Vec<C64> = (0..32).map(|k| C64::from_polar(0.5, k as f64)).collect();
        assert!(foci_sum_check(&circ, &pts) < 1e-12);
    }

    #[test]
    fn fit_recovers_ellipse() {
        let e = Ellipse::new(c(0.1, 0.2), c(-0.3, 0.1), 0.25).unwrap();
        let (got, res) = fit_ellipse(&e.boundary(40)).unwrap();
        assert!(got.distance(&e) < 1e-9 && res < 1e-9);
    }

    #[test]
    fn line_intersection() {
        let l1 = Line::through(c(0.0, 0.0), c(1.0, 1.0)).unwrap();
        let l2 = Line::through(c(0.0, 1.0), c(1.0, 0.0)).unwrap();
        assert!((l1.intersect(&l2).unwrap() - c(0.5, 0.5)).norm() < 1e-15);
        assert!(l1.intersect(&l1).is_none());
    }

    #[test]
    fn conic_of_ellipse_round_trips() {
        let e = Ellipse::new(c(0.1, -0.2), c(0.4, 0.3), 0.2).unwrap();
        let k = e.to_conic();
        assert!(e.boundary(16).iter().all(|&p| k.eval(p).abs() < 1e-12));
        assert!(k.to_ellipse().unwrap().distance(&e) < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn prop_closure_start_independent(seed in 0u64..100_000, n in 3usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (f1, f2) = (rand_disk(&mut rng, 0.7), rand_disk(&mut rng, 0.7));
            let e = closure_bisection(f1, f2, n).unwrap();
            let defects: Vec<f64> = (0..12)
                .map(|_| tangent_chain(&e, n, C64::from_polar(1.0, rng.gen_range(0.0..TAU))).unwrap().closure_defect)
                .collect();
            let spread = defects.iter().cloned().fold(0.0, f64::max) - defects.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(spread < 1e-8);
        }

        #[test]
        fn prop_advance_monotone_in_b(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (f1, f2) = (rand_disk(&mut rng, 0.7), rand_disk(&mut rng, 0.7));
            let hi = b_max(f1, f2).unwrap();
            let mut prev = f64::INFINITY;
            for k in 1..=24 {
                let b = hi * k as f64 / 24.0;
                let adv = chain_advance(&Ellipse::new(f1, f2, b).unwrap(), 5, c(1.0, 0.0)).unwrap();
                prop_assert!(adv <= prev + 1e-9);
                prev = adv;
            }
        }

        #[test]
        fn prop_inscribed_conic_of_tangent_lines(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = Ellipse::new(rand_disk(&mut rng, 0.5), rand_disk(&mut rng, 0.5), rng.gen_range(0.1..0.4)).unwrap();
            prop_assume!(e.is_in_disk());
            let hex = tangent_chain(&e, 6, C64::from_polar(1.0, rng.gen_range(0.0..TAU))).unwrap();
            let lines: Vec<Line> = (0..6).map(|k| {
                let p = hex.vertices[k];
                Line::through(p, tangent_step(&e, p, 1).unwrap()).unwrap()
            }).collect();
            let got = inscribed_conic(&lines.try_into().unwrap()).unwrap().unwrap();
            prop_assert!(got.distance(&e) < 1e-8);
        }
    }
}
