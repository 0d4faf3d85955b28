//! Eigenvalue configurations of cut-off CMV matrices with elliptical
//! numerical range, and their certification.
//!
//! Every configuration lists its eigenvalues in Mirman order
//! `w_1 = f1, …, w_{n−1} = f2` and carries the Verblunsky sequence it was
//! built from, so it can be re-derived from that sequence alone.

mod hexagon;
mod pentagon;
mod quad;

pub use hexagon::{
    f34_pair, hexagon_from_brianchon, hexagon_from_pentagram, hexagon_residual, relation_3rel_residual, solve_hexagon,
    HexCandidate,
};
pub use pentagon::{
    mirman_q, pentagon_collinearity_report, solve_pentagon, CollinearityReport, PairClass, PentagonPair,
    PentagonSolutionSet,
};
pub use quad::{quad_f3, quad_family, quad_mixmatch, solve_quad, solve_tri};

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmv::{cutoff_cmv, numerical_range_boundary, CmvError};
use crate::envelope::{envelope_samples, polygon_family, EnvelopeError};
use crate::geometry::{diagonal_meet_report, fit_ellipse, foci_sum_check, tangent_chain, Ellipse, GeometryError};
use crate::opuc::{opuc_from_verblunsky, popuc, verblunsky_from_roots, OpucError, VerblunskySeq};
use crate::poly::{roots, MonicPoly, PolyError, ROOT_TOL};
use crate::{Tolerances, C64};

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("{name} = {value} is not in the open unit disk")]
    OutOfDisk { name: String, value: C64 },
    #[error("triangle parameters must satisfy 0 < x < y < t, got x = {x}, y = {y}, t = {t}")]
    InvalidTriangleParam { x: f64, y: f64, t: f64 },
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("numerically degenerate: {what} ({value:e})")]
    NumericallyDegenerate { what: String, value: f64 },
    #[error("pole of B₂ at {0}")]
    PoleEvaluation(C64),
    #[error("no validated root among {} candidates", candidates.len())]
    NoValidatedRoot { candidates: Vec<HexCandidate> },
    #[error("{} validated roots", roots.len())]
    MultipleValidatedRoots { roots: Vec<HexCandidate> },
    #[error("numerical range is not an ellipse (fit residual {0:e})")]
    NotElliptic(f64),
    #[error("certification failed: {}", failures.join("; "))]
    CertificationFailed {
        failures: Vec<String>,
        certificates: Certificates,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Opuc(#[from] OpucError),
    #[error(transparent)]
    Cmv(#[from] CmvError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
}

/// The pentagram curve: a single point for quadrilaterals, an ellipse for
/// pentagons and hexagons with elliptical structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pentagram {
    Point(C64),
    Ellipse(Ellipse),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    /// Largest chain closure defect over the starting points.
    pub closure_defect: f64,
    /// Foci-sum spread of numerical-range boundary samples.
    pub foci_sum_residual: f64,
    pub mirman_residual: f64,
    /// Coefficient distance between the eigenvalue polynomial and the one
    /// rebuilt from the Verblunsky sequence.
    pub roundtrip_residual: f64,
    pub pentagram_residual: Option<f64>,
    pub brianchon_residual: Option<f64>,
}

impl Certificates {
    pub fn failures(&self, tol: &Tolerances) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |name: &str, v: f64, limit: f64| {
            if !(v < limit) {
                out.push(format!("{name} {v:e} exceeds {limit:e}"));
            }
        };
        check("closure defect", self.closure_defect, tol.certification);
        check("foci-sum residual", self.foci_sum_residual, tol.boundary);
        check("Mirman residual", self.mirman_residual, tol.structural);
        check("round-trip residual", self.roundtrip_residual, tol.structural);
        if let Some(r) = self.pentagram_residual {
            check("pentagram residual", r, tol.boundary);
        }
        if let Some(r) = self.brianchon_residual {
            check("Brianchon residual", r, tol.boundary);
        }
        out
    }
}

/// A Poncelet `n`-ellipse realized as the numerical-range boundary of an
/// `(n−1)×(n−1)` cut-off CMV matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PonceletConfig {
    pub n: usize,
    /// Eigenvalues in Mirman order, starting and ending with the foci.
    pub eigenvalues: Vec<C64>,
    pub poncelet: Ellipse,
    pub pentagram: Option<Pentagram>,
    pub brianchon: Option<C64>,
    pub verblunsky: VerblunskySeq,
    pub certificates: Certificates,
}

impl PonceletConfig {
    /// Builds the configuration and computes every certificate, without
    /// judging them.
    pub fn assemble(
        eigenvalues: Vec<C64>,
        pentagram: Option<Pentagram>,
        brianchon: Option<C64>,
        tol: &Tolerances,
    ) -> Result<Self, SolverError> {
        let k = eigenvalues.len();
        if k < 2 {
            return Err(SolverError::DegenerateConfiguration(format!("{k} eigenvalues")));
        }
        for (i, &z) in eigenvalues.iter().enumerate() {
            check_disk(&format!("eigenvalue {i}"), z)?;
        }
        let verblunsky = verblunsky_from_roots(&eigenvalues)?;
        let boundary = numerical_range_boundary(&cutoff_cmv(&verblunsky)?.matrix, tol.boundary_samples)?;
        let (poncelet, foci_sum_residual) = foci_fit(&boundary, eigenvalues[0], eigenvalues[k - 1])?;
        let n = k + 1;
        let closure_defect = closure_defect(&poncelet, n, tol.closure_starts).unwrap_or(f64::INFINITY);
        let mirman_residual = max_abs(&mirman_residual(&eigenvalues, eigenvalues[0], eigenvalues[k - 1])?);
        let roundtrip_residual = opuc_from_verblunsky(&verblunsky).max_coeff_diff(&MonicPoly::from_roots(&eigenvalues));
        let pentagram_residual = pentagram
            .map(|p| pentagram_residual(&verblunsky, &p, tol))
            .transpose()?;
        let brianchon_residual = brianchon.map(|b| brianchon_residual(&verblunsky, b, 16)).transpose()?;
        Ok(Self {
            n,
            eigenvalues,
            poncelet,
            pentagram,
            brianchon,
            verblunsky,
            certificates: Certificates {
                closure_defect,
                foci_sum_residual,
                mirman_residual,
                roundtrip_residual,
                pentagram_residual,
                brianchon_residual,
            },
        })
    }

    /// Fails with every certificate that exceeds its threshold.
    pub fn check(&self, tol: &Tolerances) -> Result<(), SolverError> {
        let failures = self.certificates.failures(tol);
        if failures.is_empty() {
            Ok(())
        } else {
            Err(SolverError::CertificationFailed {
                failures,
                certificates: self.certificates,
            })
        }
    }

    pub fn foci(&self) -> (C64, C64) {
        (self.eigenvalues[0], self.eigenvalues[self.eigenvalues.len() - 1])
    }
}

pub(crate) fn certified(
    eigenvalues: Vec<C64>,
    pentagram: Option<Pentagram>,
    brianchon: Option<C64>,
    tol: &Tolerances,
) -> Result<PonceletConfig, SolverError> {
    let c = PonceletConfig::assemble(eigenvalues, pentagram, brianchon, tol)?;
    c.check(tol)?;
    Ok(c)
}

pub(crate) fn check_disk(name: &str, z: C64) -> Result<(), SolverError> {
    if !(z.norm() < 1.0) {
        return Err(SolverError::OutOfDisk {
            name: name.to_string(),
            value: z,
        });
    }
    Ok(())
}

pub(crate) fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `B₂(z; f1, f2) = (z − f1)(z − f2) / ((1 − f̄1 z)(1 − f̄2 z))`.
pub fn b2(z: C64, f1: C64, f2: C64) -> Result<C64, SolverError> {
    let den = (C64::new(1.0, 0.0) - f1.conj() * z) * (C64::new(1.0, 0.0) - f2.conj() * z);
    if den.norm() < 1e-300 {
        return Err(SolverError::PoleEvaluation(z));
    }
    Ok((z - f1) * (z - f2) / den)
}

/// `w_{j−1} w_{j+1} − B₂(w_j; f1, f2)` for the interior indices.
pub fn mirman_residual(ws: &[C64], f1: C64, f2: C64) -> Result<Vec<C64>, SolverError> {
    (1..ws.len().saturating_sub(1))
        .map(|j| Ok(ws[j - 1] * ws[j + 1] - b2(ws[j], f1, f2)?))
        .collect()
}

/// Ellipse with the given foci whose major axis is the mean foci sum of the
/// samples, with the spread of that sum.
pub fn foci_fit(pts: &[C64], f1: C64, f2: C64) -> Result<(Ellipse, f64), SolverError> {
    let a = pts.iter().map(|p| (p - f1).norm() + (p - f2).norm()).sum::<f64>() / (2.0 * pts.len() as f64);
    let c = (f1 - f2).norm() / 2.0;
    let e = Ellipse::new(f1, f2, ((a - c) * (a + c)).max(0.0).sqrt())?;
    Ok((e, foci_sum_check(&e, pts)))
}

/// Largest closure defect of `n`-step tangent chains from `starts` points.
pub fn closure_defect(e: &Ellipse, n: usize, starts: usize) -> Result<f64, SolverError> {
    let mut worst = 0.0f64;
    for k in 0..starts {
        let start = C64::from_polar(1.0, 0.37 + TAU * k as f64 / starts as f64);
        worst = worst.max(tangent_chain(e, n, start)?.closure_defect);
    }
    Ok(worst)
}

/// Distance of skip-2 envelope samples from the claimed pentagram curve.
pub fn pentagram_residual(v: &VerblunskySeq, p: &Pentagram, tol: &Tolerances) -> Result<f64, SolverError> {
    let family = polygon_family(v, tol.boundary_samples)?;
    let curve = envelope_samples(&family, 2)?;
    Ok(match p {
        Pentagram::Point(z) => curve.samples.iter().map(|s| (s - z).norm()).fold(0.0, f64::max),
        Pentagram::Ellipse(e) => foci_sum_check(e, &curve.samples),
    })
}

/// Largest diagonal spread or distance from `point` of the main diagonals of
/// the paraorthogonal hexagons at `k` values of λ.
pub fn brianchon_residual(v: &VerblunskySeq, point: C64, k: usize) -> Result<f64, SolverError> {
    if v.len() != 5 {
        return Err(SolverError::DegenerateConfiguration(format!(
            "Brianchon point needs hexagons, got {}-gons",
            v.len() + 1
        )));
    }
    let mut worst = 0.0f64;
    for j in 0..k {
        let lambda = C64::from_polar(1.0, 0.1 + TAU * j as f64 / k as f64);
        let hex = crate::geometry::PolygonChain::new(popuc(v, lambda)?.zeros, 0.0)?;
        let meet = diagonal_meet_report(&hex)?;
        for p in meet.pairwise {
            worst = worst.max((p - point).norm());
        }
        worst = worst.max(meet.spread);
    }
    Ok(worst)
}

/// Recovers a configuration from a Verblunsky sequence alone: the foci are
/// the eigenvalues nearest the foci of a conic fitted to the numerical-range
/// boundary, the Mirman order is the one with the smallest residual, and the
/// pentagram curve and Brianchon point come from envelope sampling.
pub fn analyze(v: &VerblunskySeq, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    let k = v.len();
    if k < 2 {
        return Err(SolverError::DegenerateConfiguration(format!(
            "{k} Verblunsky coefficients"
        )));
    }
    let eig = roots(&opuc_from_verblunsky(v).to_poly(), ROOT_TOL)?;
    let boundary = numerical_range_boundary(&cutoff_cmv(v)?.matrix, tol.boundary_samples)?;
    let (fit, fit_residual) = fit_ellipse(&boundary).ok_or(SolverError::NotElliptic(f64::INFINITY))?;
    if !(fit_residual < 1e-6) {
        return Err(SolverError::NotElliptic(fit_residual));
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let d = (eig[i] - fit.f1).norm().max((eig[j] - fit.f2).norm());
            if best.is_none_or(|(b, _, _)| d < b) {
                best = Some((d, i, j));
            }
        }
    }
    let (_, i, j) = best.expect("at least two eigenvalues");
    let (f1, f2) = (eig[i], eig[j]);
    let rest: Vec<C64> = (0..k).filter(|&m| m != i && m != j).map(|m| eig[m]).collect();
    let mut order: Option<(f64, Vec<C64>)> = None;
    for perm in permutations(rest.len()) {
        let mut ws = vec![f1];
        ws.extend(perm.iter().map(|&p| rest[p]));
        ws.push(f2);
        let r = max_abs(&mirman_residual(&ws, f1, f2)?);
        if order.as_ref().is_none_or(|(b, _)| r < *b) {
            order = Some((r, ws));
        }
    }
    let (_, ws) = order.expect("at least one order");
    let n = k + 1;
    let family = polygon_family(v, tol.boundary_samples)?;
    let pentagram = if n == 4 {
        let c = envelope_samples(&family, 2)?;
        c.is_point.then(|| Pentagram::Point(c.mean()))
    } else if n >= 5 {
        let c = envelope_samples(&family, 2)?;
        c.is_ellipse_fit
            .filter(|&(_, r)| r < 1e-6)
            .map(|(e, _)| Pentagram::Ellipse(e))
    } else {
        None
    };
    let brianchon = if n == 6 {
        let c = envelope_samples(&family, 3)?;
        c.is_point.then(|| c.mean())
    } else {
        None
    };
    PonceletConfig::assemble(ws, pentagram, brianchon, tol)
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}
