//! Families of circumscribing polygons from paraorthogonal zeros, sampled
//! envelopes of their chords, and the concurrency search for two
//! interlacing triangles.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::geometry::{fit_ellipse, Ellipse, GeometryError, Line, PolygonChain};
use crate::opuc::{opuc_from_verblunsky, popuc, verblunsky_from_poly, OpucError, VerblunskySeq};
use crate::poly::{reverse, MonicPoly, Poly};
use crate::C64;

/// Samples within this distance of their mean make an envelope a point.
pub const POINT_TOL: f64 = 1e-7;
const TAU_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvelopeError {
    #[error("family needs at least 8 samples, got {0}")]
    TooFewSamples(usize),
    #[error("skip {skip} is outside 1..={max}")]
    BadSkip { skip: usize, max: usize },
    #[error("no concurrency bracket found for the interlacing triangle")]
    NonConvergence,
    #[error("expected a degree-{expected} polynomial, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error(transparent)]
    Opuc(#[from] OpucError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Polygons with vertices at the paraorthogonal zeros for `m` values of λ.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonFamily {
    pub prefix: VerblunskySeq,
    pub lambdas: Vec<C64>,
    pub polygons: Vec<PolygonChain>,
}

impl PolygonFamily {
    /// Vertex count of each polygon.
    pub fn sides(&self) -> usize {
        self.prefix.len() + 1
    }
}

/// `m` equispaced λ on the circle. Vertices are sorted counterclockwise and
/// rotated so that vertex `j` continues vertex `j` of the previous polygon.
pub fn polygon_family(prefix: &VerblunskySeq, m: usize) -> Result<PolygonFamily, EnvelopeError> {
    if m < 8 {
        return Err(EnvelopeError::TooFewSamples(m));
    }
    let mut lambdas = Vec::with_capacity(m);
    let mut polygons: Vec<PolygonChain> = Vec::with_capacity(m);
    for k in 0..m {
        let lambda = C64::from_polar(1.0, TAU * k as f64 / m as f64);
        let mut zeros = popuc(prefix, lambda)?.zeros;
        if let Some(prev) = polygons.last() {
            let anchor = prev.vertices[0];
            let shift = (0..zeros.len())
                .min_by(|&i, &j| (zeros[i] - anchor).norm().total_cmp(&(zeros[j] - anchor).norm()))
                .unwrap_or(0);
            zeros.rotate_left(shift);
        }
        lambdas.push(lambda);
        polygons.push(PolygonChain::new(zeros, 0.0)?);
    }
    Ok(PolygonFamily {
        prefix: prefix.clone(),
        lambdas,
        polygons,
    })
}

/// Sampled envelope of the chords joining vertex `j` to vertex `j + skip`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCurve {
    pub component_index: usize,
    pub samples: Vec<C64>,
    pub is_point: bool,
    /// Largest distance of a sample from the sample mean.
    pub spread: f64,
    pub is_ellipse_fit: Option<(Ellipse, f64)>,
}

impl EnvelopeCurve {
    pub fn mean(&self) -> C64 {
        self.samples.iter().sum::<C64>() / self.samples.len().max(1) as f64
    }

    /// Foci-sum residual of the ellipse fit; infinite when no ellipse fits.
    pub fn fit_residual(&self) -> f64 {
        self.is_ellipse_fit.map_or(f64::INFINITY, |(_, r)| r)
    }
}

/// How envelope points are located on each chord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnvelopeMethod {
    /// Exact contact point from the vertex velocities `dz/dψ = −iμ/B'(z)`
    /// with `B = zΦ/Φ*`.
    #[default]
    Tangent,
    /// Intersection of corresponding chords of adjacent family members.
    AdjacentChord,
}

fn cross(a: C64, b: C64) -> f64 {
    (a.conj() * b).im
}

fn chord_pairs(n: usize, skip: usize) -> Vec<(usize, usize)> {
    let count = if 2 * skip == n { n / 2 } else { n };
    (0..count).map(|j| (j, (j + skip) % n)).collect()
}

pub fn envelope_samples(family: &PolygonFamily, skip: usize) -> Result<EnvelopeCurve, EnvelopeError> {
    envelope_samples_with(family, skip, EnvelopeMethod::default())
}

pub fn envelope_samples_with(
    family: &PolygonFamily,
    skip: usize,
    method: EnvelopeMethod,
) -> Result<EnvelopeCurve, EnvelopeError> {
    let n = family.sides();
    let max = n / 2;
    if skip == 0 || skip > max.max(1) {
        return Err(EnvelopeError::BadSkip { skip, max });
    }
    let pairs = chord_pairs(n, skip);
    let mut samples = Vec::with_capacity(family.polygons.len() * pairs.len());
    match method {
        EnvelopeMethod::Tangent => {
            let phi = opuc_from_verblunsky(&family.prefix);
            let num = phi.to_poly().shift(1);
            let den = reverse(&phi);
            let (dnum, dden) = (num.derivative(), den.derivative());
            let bprime = |z: C64| {
                let d = den.eval(z);
                (dnum.eval(z) * d - num.eval(z) * dden.eval(z)) / (d * d)
            };
            for (poly, lambda) in family.polygons.iter().zip(&family.lambdas) {
                let mu = lambda.conj();
                let vel: Vec<C64> = poly
                    .vertices
                    .iter()
                    .map(|&z| -C64::new(0.0, 1.0) * mu / bprime(z))
                    .collect();
                for &(i, j) in &pairs {
                    let (a, b) = (poly.vertices[i], poly.vertices[j]);
                    let d = b - a;
                    let (ca, cb) = (cross(d, vel[i]), cross(d, vel[j]));
                    samples.push(a + d * (ca / (ca - cb)));
                }
            }
        }
        EnvelopeMethod::AdjacentChord => {
            let m = family.polygons.len();
            for k in 0..m {
                let (p, q) = (&family.polygons[k], &family.polygons[(k + 1) % m]);
                // the last step wraps to the first polygon, whose labels may be rotated
                let anchor = p.vertices[0];
                let shift = (0..n)
                    .min_by(|&i, &j| {
                        (q.vertices[i] - anchor)
                            .norm()
                            .total_cmp(&(q.vertices[j] - anchor).norm())
                    })
                    .unwrap_or(0);
                for &(i, j) in &pairs {
                    let l1 = Line::through(p.vertices[i], p.vertices[j])?;
                    let l2 = Line::through(q.vertices[(i + shift) % n], q.vertices[(j + shift) % n])?;
                    if let Some(z) = l1.intersect(&l2) {
                        samples.push(z);
                    }
                }
            }
        }
    }
    let mean = samples.iter().sum::<C64>() / samples.len().max(1) as f64;
    let spread = samples.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
    let is_point = spread < POINT_TOL;
    let is_ellipse_fit = if is_point { None } else { fit_ellipse(&samples) };
    Ok(EnvelopeCurve {
        component_index: skip,
        samples,
        is_point,
        spread,
        is_ellipse_fit,
    })
}

/// Second triangle of an interlacing pair whose connecting segments are
/// concurrent.
#[derive(Debug, Clone, PartialEq)]
pub struct TauResult {
    pub tau: C64,
    pub meet: C64,
    /// Largest distance between pairwise intersections of the three segments.
    pub spread: f64,
    /// Vertices of the λ triangle.
    pub lambda_vertices: [C64; 3],
    /// Vertices of the τ triangle, `i`-th joined to the `i`-th λ vertex.
    pub tau_vertices: [C64; 3],
    /// Every sign-change bracket found on the scan grid, as arc parameters.
    pub brackets: Vec<(f64, f64)>,
}

impl TauResult {
    /// The six vertices in counterclockwise order, alternating λ and τ.
    pub fn hexagon(&self) -> Result<PolygonChain, GeometryError> {
        let mut pts = self.lambda_vertices.to_vec();
        pts.extend_from_slice(&self.tau_vertices);
        PolygonChain::from_points(pts)
    }
}

fn rel_angle(z: C64, base: C64) -> f64 {
    let t = (z * base.conj()).arg();
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

struct TauFrame {
    prefix: VerblunskySeq,
    num: Poly,
    den: Poly,
    z: [C64; 3],
    a2: f64,
    a3: f64,
}

struct TauEval {
    f: f64,
    tau: C64,
    tz: [C64; 3],
    pairwise: [C64; 3],
}

impl TauFrame {
    fn point(&self, s: f64) -> C64 {
        self.z[0] * C64::from_polar(1.0, self.a2 + s * (self.a3 - self.a2))
    }

    fn eval(&self, s: f64) -> Result<Option<TauEval>, EnvelopeError> {
        let u = self.point(s);
        let tau_bar = self.num.eval(u) / self.den.eval(u);
        let tau = (tau_bar / tau_bar.norm()).conj();
        let zeros = popuc(&self.prefix, tau)?.zeros;
        let base = self.z[0];
        let mut t3 = None;
        let mut t2 = None;
        for &w in &zeros {
            let a = rel_angle(w, base);
            if (w - u).norm() < 1e-9 {
                continue;
            }
            if a < self.a2 {
                t3 = Some(w);
            } else if a > self.a3 {
                t2 = Some(w);
            }
        }
        let (Some(t2), Some(t3)) = (t2, t3) else {
            return Ok(None);
        };
        let tz = [u, t2, t3];
        let l: Vec<Line> = (0..3)
            .map(|i| Line::through(self.z[i], tz[i]))
            .collect::<Result<_, _>>()?;
        let (Some(p12), Some(p13), Some(p23)) = (l[0].intersect(&l[1]), l[0].intersect(&l[2]), l[1].intersect(&l[2]))
        else {
            return Ok(None);
        };
        let dir = tz[0] - self.z[0];
        let param = |p: C64| ((p - self.z[0]) * dir.conj()).re / dir.norm_sqr();
        Ok(Some(TauEval {
            f: param(p12) - param(p13),
            tau,
            tz,
            pairwise: [p12, p13, p23],
        }))
    }
}

/// For the triangle of `(phi2, λ)`, finds τ such that the segments joining
/// corresponding vertices of the λ and τ triangles meet in one point.
///
/// Vertex `z1` of the λ triangle is joined to the τ vertex on the opposite
/// arc; the others follow cyclically. The arc is scanned on a grid and each
/// sign change of the difference of intersection parameters along the first
/// segment is bisected.
pub fn interlace_tau(phi2: &MonicPoly, lambda: C64) -> Result<TauResult, EnvelopeError> {
    if phi2.degree() != 2 {
        return Err(EnvelopeError::WrongDegree {
            expected: 2,
            got: phi2.degree(),
        });
    }
    let prefix = verblunsky_from_poly(phi2)?;
    let tri = popuc(&prefix, lambda)?;
    let z = [tri.zeros[0], tri.zeros[1], tri.zeros[2]];
    let (a2, a3) = (rel_angle(z[1], z[0]), rel_angle(z[2], z[0]));
    let frame = TauFrame {
        prefix,
        num: phi2.to_poly().shift(1),
        den: reverse(phi2),
        z,
        a2,
        a3,
    };

    let grid: Vec<f64> = (0..TAU_GRID).map(|k| (k as f64 + 0.5) / TAU_GRID as f64).collect();
    let vals: Vec<Option<f64>> = grid
        .iter()
        .map(|&s| Ok(frame.eval(s)?.map(|e| e.f)))
        .collect::<Result<_, EnvelopeError>>()?;
    let mut brackets = Vec::new();
    for k in 0..TAU_GRID - 1 {
        if let (Some(x), Some(y)) = (vals[k], vals[k + 1]) {
            if x == 0.0 || x.signum() != y.signum() {
                brackets.push((grid[k], grid[k + 1]));
            }
        }
    }
    let &(mut lo, mut hi) = brackets.first().ok_or(EnvelopeError::NonConvergence)?;
    let f_lo = vals[grid.iter().position(|&g| g == lo).expect("grid point")].expect("bracket end");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = frame.eval(mid)?.ok_or(EnvelopeError::NonConvergence)?.f;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = frame.eval(0.5 * (lo + hi))?.ok_or(EnvelopeError::NonConvergence)?;
    let p = e.pairwise;
    let spread = (p[0] - p[1]).norm().max((p[0] - p[2]).norm()).max((p[1] - p[2]).norm());
    Ok(TauResult {
        tau: e.tau,
        meet: (p[0] + p[1] + p[2]) / 3.0,
        spread,
        lambda_vertices: z,
        tau_vertices: e.tz,
        brackets,
    })
}
