//! The five-point Mirman system and its solution pairs.

use serde::{Deserialize, Serialize};

use super::{certified, check_disk, foci_fit, max_abs, mirman_residual, Pentagram, PonceletConfig, SolverError};
use crate::cmv::{cutoff_cmv, numerical_range_boundary};
use crate::geometry::closure_bisection_winding;
use crate::opuc::verblunsky_from_roots;
use crate::poly::{roots, Poly, ROOT_TOL};
use crate::{Tolerances, C64};

/// Role of the nontrivial pair `(z, w)` in the configuration with
/// eigenvalues `{f1, f2, z, w}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    /// The numerical range has foci `{z, w}`; its pentagram ellipse has foci `{f1, f2}`.
    PonceletFoci,
    /// The numerical range has foci `{f1, f2}`; `{z, w}` are the pentagram foci.
    PentagramFoci,
    /// Both coordinates outside the closed disk.
    Exterior,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentagonPair {
    pub z: C64,
    pub w: C64,
    pub t: f64,
    /// Imaginary part discarded from the cubic root.
    pub t_imag: f64,
    pub class: PairClass,
    /// Foci-sum spreads of the numerical range against `{f1, f2}` and
    /// `{z, w}`, for pairs inside the bidisk.
    pub foci_residuals: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PentagonSolutionSet {
    pub f1: C64,
    pub f2: C64,
    pub trivial_pairs: [(C64, C64); 2],
    /// Nontrivial pairs in increasing order of `t`.
    pub pairs: Vec<PentagonPair>,
    /// Coefficients `c_0..c_3` of the cubic divided by its leading coefficient.
    pub cubic: Vec<C64>,
    pub cubic_imag: f64,
    pub t0: f64,
    /// Normalized cubic at `t0`.
    pub y_at_t0: C64,
}

impl PentagonSolutionSet {
    fn find(&self, class: PairClass) -> Option<&PentagonPair> {
        self.pairs.iter().find(|p| p.class == class)
    }

    pub fn pentagram_pair(&self) -> Option<&PentagonPair> {
        self.find(PairClass::PentagramFoci)
    }

    pub fn poncelet_pair(&self) -> Option<&PentagonPair> {
        self.find(PairClass::PonceletFoci)
    }

    pub fn exterior_pair(&self) -> Option<&PentagonPair> {
        self.find(PairClass::Exterior)
    }

    /// Configuration whose numerical range has foci `f1, f2`.
    pub fn poncelet_config(&self, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
        let p = self
            .pentagram_pair()
            .ok_or_else(|| SolverError::DegenerateConfiguration("no pair with foci {f1, f2}".into()))?;
        let pent = closure_bisection_winding(p.z, p.w, 5, 2, tol.bisection)?;
        certified(
            vec![self.f1, p.z, p.w, self.f2],
            Some(Pentagram::Ellipse(pent)),
            None,
            tol,
        )
    }

    /// Configuration whose pentagram ellipse has foci `f1, f2`.
    pub fn pentagram_config(&self, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
        let p = self
            .poncelet_pair()
            .ok_or_else(|| SolverError::DegenerateConfiguration("no pair with pentagram foci {f1, f2}".into()))?;
        let pent = closure_bisection_winding(self.f1, self.f2, 5, 2, tol.bisection)?;
        let a = vec![p.z, self.f1, self.f2, p.w];
        let b = vec![p.z, self.f2, self.f1, p.w];
        let ra = max_abs(&mirman_residual(&a, p.z, p.w)?);
        let rb = max_abs(&mirman_residual(&b, p.z, p.w)?);
        certified(if ra <= rb { a } else { b }, Some(Pentagram::Ellipse(pent)), None, tol)
    }
}

fn lin(c0: C64, c1: C64) -> Poly {
    Poly::new(vec![c0, c1])
}

/// `z(t)` and `w(t)`, the lines carrying the nontrivial solution pairs.
fn zw_lines(f1: C64, f2: C64) -> (Poly, Poly) {
    let one = C64::new(1.0, 0.0);
    let z = lin(
        (f2 - f1) / (one - f1 * f2.conj()),
        4.0 * f1 / ((1.0 - f1.norm_sqr()) * (one - f1 * f2.conj())),
    );
    let w = lin(
        (f1 - f2) / (one - f2 * f1.conj()),
        4.0 * f2 / ((1.0 - f2.norm_sqr()) * (one - f2 * f1.conj())),
    );
    (z, w)
}

/// `Φ₂(z(t)) − w(t) f1 Φ₂*(z(t))` for `Φ₂ = (x − f1)(x − f2)`.
fn y_poly(f1: C64, f2: C64) -> Poly {
    let (z, w) = zw_lines(f1, f2);
    let one = C64::new(1.0, 0.0);
    let phi2 = &lin(-f1, one) * &lin(-f2, one);
    let phi2_star = &lin(one, -f1.conj()) * &lin(one, -f2.conj());
    &phi2.compose(&z) - &(&w.scale(f1) * &phi2_star.compose(&z))
}

/// `q(x, y; t)`, vanishing on the eigenvalue pairs of the two distinguished
/// configurations at `t = b²`.
pub fn mirman_q(x: C64, y: C64, t: f64, f1: C64, f2: C64) -> Result<C64, SolverError> {
    let one = C64::new(1.0, 0.0);
    let (d1, d2) = (one - f1.conj() * x, one - f2.conj() * x);
    if d1.norm() < 1e-300 || d2.norm() < 1e-300 {
        return Err(SolverError::PoleEvaluation(x));
    }
    Ok((y + (x - f1) / d1) * (y + (x - f2) / d2) - 4.0 * t * x * y / (d1 * d2))
}

/// All solutions of `Φ₂(z)/Φ₂*(z) = w f1`, `Φ₂(w)/Φ₂*(w) = z f2`, with the
/// nontrivial pairs classified by certifying the numerical range of the
/// matching 4×4 cut-off CMV matrix.
pub fn solve_pentagon(f1: C64, f2: C64, tol: &Tolerances) -> Result<PentagonSolutionSet, SolverError> {
    check_disk("f1", f1)?;
    check_disk("f2", f2)?;
    if f1 * f2 == C64::new(0.0, 0.0) {
        return Err(SolverError::DegenerateConfiguration("f1 f2 = 0".into()));
    }
    let y = y_poly(f1, f2);
    let lead = y
        .leading()
        .filter(|_| y.degree() == Some(3))
        .ok_or_else(|| SolverError::DegenerateConfiguration("cubic lost its leading term".into()))?;
    let cubic = y.scale(1.0 / lead);
    let cubic_imag = cubic.coeffs().iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let ts = roots(&cubic, ROOT_TOL)?;
    let scale = 1.0 + ts.iter().map(|t| t.norm()).fold(0.0, f64::max);
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let gap = (ts[i] - ts[j]).norm();
            if gap < 1e-7 * scale {
                return Err(SolverError::NumericallyDegenerate {
                    what: "cubic has a near-double root".into(),
                    value: gap,
                });
            }
        }
    }
    let (zl, wl) = zw_lines(f1, f2);
    let t0 = (1.0 - f1.norm_sqr()) * (1.0 - f2.norm_sqr()) / 4.0;
    let mut pairs = Vec::with_capacity(3);
    for t in ts {
        let tr = C64::new(t.re, 0.0);
        let (z, w) = (zl.eval(tr), wl.eval(tr));
        let (class, foci_residuals) = classify(f1, f2, z, w, tol)?;
        pairs.push(PentagonPair {
            z,
            w,
            t: t.re,
            t_imag: t.im,
            class,
            foci_residuals,
        });
    }
    pairs.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(PentagonSolutionSet {
        f1,
        f2,
        trivial_pairs: [(C64::new(0.0, 0.0), f2), (f1, C64::new(0.0, 0.0))],
        pairs,
        cubic: cubic.coeffs().to_vec(),
        cubic_imag,
        t0,
        y_at_t0: cubic.eval(C64::new(t0, 0.0)),
    })
}

fn classify(
    f1: C64,
    f2: C64,
    z: C64,
    w: C64,
    tol: &Tolerances,
) -> Result<(PairClass, Option<(f64, f64)>), SolverError> {
    if z.norm() > 1.0 && w.norm() > 1.0 {
        return Ok((PairClass::Exterior, None));
    }
    if !(z.norm() < 1.0 && w.norm() < 1.0) {
        return Ok((PairClass::Unclassified, None));
    }
    let v = verblunsky_from_roots(&[f1, z, w, f2])?;
    let boundary = numerical_range_boundary(&cutoff_cmv(&v)?.matrix, tol.boundary_samples)?;
    let rf = foci_fit(&boundary, f1, f2)?.1;
    let rzw = foci_fit(&boundary, z, w)?.1;
    let class = if rf < tol.boundary && rf <= rzw {
        PairClass::PentagramFoci
    } else if rzw < tol.boundary {
        PairClass::PonceletFoci
    } else {
        PairClass::Unclassified
    };
    Ok((class, Some((rf, rzw))))
}

/// Deviations from the collinearity statements for the nontrivial pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollinearityReport {
    /// Largest `|(z_i − f2)/(w_i − f1) − f1Φ₂*(f2)/(f2Φ₂*(f1))|`.
    pub ratio: f64,
    /// Largest `|Im((z_i − f2)/(z_j − f2))|`.
    pub z_line: f64,
    /// Largest `|Im((w_i − f1)/(w_j − f1))|`.
    pub w_line: f64,
    pub common_ratio: C64,
}

impl CollinearityReport {
    pub fn max(&self) -> f64 {
        self.ratio.max(self.z_line).max(self.w_line)
    }
}

pub fn pentagon_collinearity_report(s: &PentagonSolutionSet) -> CollinearityReport {
    let (f1, f2) = (s.f1, s.f2);
    let one = C64::new(1.0, 0.0);
    let star = |x: C64| (one - f1.conj() * x) * (one - f2.conj() * x);
    let common_ratio = f1 * star(f2) / (f2 * star(f1));
    let mut r = CollinearityReport {
        ratio: 0.0,
        z_line: 0.0,
        w_line: 0.0,
        common_ratio,
    };
    for (i, p) in s.pairs.iter().enumerate() {
        r.ratio = r.ratio.max(((p.z - f2) / (p.w - f1) - common_ratio).norm());
        for q in &s.pairs[i + 1..] {
            r.z_line = r.z_line.max(((p.z - f2) / (q.z - f2)).im.abs());
            r.w_line = r.w_line.max(((p.w - f1) / (q.w - f1)).im.abs());
        }
    }
    r
}
