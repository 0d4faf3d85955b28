//! Hexagons: foci, pentagram foci and Brianchon point of a 5×5 cut-off CMV
//! matrix with elliptical numerical range.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{certified, check_disk, Pentagram, PonceletConfig, SolverError};
use crate::envelope::interlace_tau;
use crate::geometry::{closure_bisection, inscribed_conic_report, poncelet_3_ellipse, PolygonChain};
use crate::poly::{MonicPoly, Poly};
use crate::{Tolerances, C64};

/// Residual accepted for a root of the hexagon system.
const ROOT_RESIDUAL: f64 = 1e-11;
/// Roots closer than this are the same root.
const DEDUPE: f64 = 1e-7;
/// Agreement required between the certified ellipse and the closure oracle.
const ORACLE_TOL: f64 = 1e-6;
/// Agreement required between a geometric construction and its polished
/// algebraic counterpart.
const POLISH_TOL: f64 = 1e-6;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `(f3, f4)` determined by the foci and the Brianchon point.
pub fn f34_pair(f1: C64, f2: C64, f5: C64) -> (C64, C64) {
    (
        (f5 - f2) / (one() - f2 * f5.conj()),
        (f5 - f1) / (one() - f1 * f5.conj()),
    )
}

/// The two coefficient equations of the hexagon system with `f3, f4`
/// eliminated.
pub fn hexagon_residual(f1: C64, f2: C64, f5: C64) -> [C64; 2] {
    let (f3, f4) = f34_pair(f1, f2, f5);
    let p = f1 * f2 * f5;
    [
        f3 + f4 + p * f4.conj() * f3.conj() - (f1 + f2 + f5),
        f3 * f4 + p * (f3.conj() + f4.conj()) - (f1 * f2 + f2 * f5 + f1 * f5),
    ]
}

/// Coefficient distance in
/// `z(z − f3)(z − f4) − f1f2f5(1 − f̄3z)(1 − f̄4z) = (z − f1)(z − f2)(z − f5)`.
pub fn relation_3rel_residual(f: [C64; 5]) -> f64 {
    let [f1, f2, f3, f4, f5] = f;
    let lhs = &(&Poly::z() * &MonicPoly::from_roots(&[f3, f4]).to_poly())
        - &(&Poly::new(vec![one(), -f3.conj()]) * &Poly::new(vec![one(), -f4.conj()])).scale(f1 * f2 * f5);
    lhs.max_coeff_diff(&MonicPoly::from_roots(&[f1, f2, f5]).to_poly())
}

fn split(r: &[C64]) -> Vec<f64> {
    r.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn norm_inf(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn norm2(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn jacobian(f: &dyn Fn(&[f64]) -> Option<Vec<f64>>, x: &[f64], m: usize) -> Option<DMatrix<f64>> {
    const H: f64 = 1e-7;
    let mut j = DMatrix::zeros(m, x.len());
    for k in 0..x.len() {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[k] += H;
        xm[k] -= H;
        let (rp, rm) = (f(&xp)?, f(&xm)?);
        for i in 0..m {
            j[(i, k)] = (rp[i] - rm[i]) / (2.0 * H);
        }
    }
    Some(j)
}

/// Gauss–Newton with central-difference Jacobian and Levenberg damping when
/// the plain step does not reduce the residual. `f` returns `None` outside
/// its domain. Returns the final point and its max-norm residual.
pub(crate) fn gauss_newton(
    x0: &[f64],
    f: &dyn Fn(&[f64]) -> Option<Vec<f64>>,
    max_iter: usize,
) -> Option<(Vec<f64>, f64)> {
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let m = r.len();
    let mut mu = 0.0f64;
    for _ in 0..max_iter {
        if norm_inf(&r) < 1e-16 {
            break;
        }
        let j = jacobian(f, &x, m)?;
        let rv = DVector::from_vec(r.clone());
        let try_step = |dx: &DVector<f64>| -> Option<(Vec<f64>, Vec<f64>)> {
            let xn: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + b).collect();
            let rn = f(&xn)?;
            (norm2(&rn) < norm2(&r)).then_some((xn, rn))
        };
        let mut next = j
            .clone()
            .svd(true, true)
            .solve(&(-&rv), 1e-14)
            .ok()
            .and_then(|dx| try_step(&dx));
        if next.is_none() {
            let jtj = j.transpose() * &j;
            let jtr = j.transpose() * &rv;
            if mu == 0.0 {
                mu = 1e-3 * jtj.diagonal().max().max(1e-12);
            }
            for _ in 0..30 {
                let damped = &jtj + DMatrix::identity(x.len(), x.len()) * mu;
                if let Some(dx) = damped.lu().solve(&(-&jtr)) {
                    if let Some(s) = try_step(&dx) {
                        next = Some(s);
                        mu /= 10.0;
                        break;
                    }
                }
                mu *= 10.0;
            }
        }
        let Some((xn, rn)) = next else { break };
        let moved = xn.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = xn;
        r = rn;
        if moved < 1e-17 {
            break;
        }
    }
    let res = norm_inf(&r);
    Some((x, res))
}

/// A converged root of the hexagon system and the certificates it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexCandidate {
    pub f5: C64,
    pub residual: f64,
    pub failures: Vec<String>,
}

fn hexagon_eigenvalues(f1: C64, f2: C64, f5: C64) -> Vec<C64> {
    let (f3, f4) = f34_pair(f1, f2, f5);
    vec![f1, f3, f5, f4, f2]
}

fn hexagon_config(f1: C64, f2: C64, f5: C64, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    let (f3, f4) = f34_pair(f1, f2, f5);
    check_disk("f3", f3)?;
    check_disk("f4", f4)?;
    let pent = poncelet_3_ellipse(f3, f4)?;
    PonceletConfig::assemble(
        hexagon_eigenvalues(f1, f2, f5),
        Some(Pentagram::Ellipse(pent)),
        Some(f5),
        tol,
    )
}

fn hex_system(f1: C64, f2: C64) -> impl Fn(&[f64]) -> Option<Vec<f64>> {
    move |x: &[f64]| {
        let f5 = C64::new(x[0], x[1]);
        (f5.norm() < 1.0).then(|| split(&hexagon_residual(f1, f2, f5)))
    }
}

/// The Poncelet 6-ellipse with foci `f1, f2`: `f5` is found by multistart
/// Gauss–Newton on the hexagon system, and each converged root is kept only
/// if its configuration certifies and matches the closure oracle.
pub fn solve_hexagon(f1: C64, f2: C64, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    check_disk("f1", f1)?;
    check_disk("f2", f2)?;
    let sys = hex_system(f1, f2);
    let mut roots: Vec<(C64, f64)> = Vec::new();
    const GRID: usize = 9;
    for i in 0..GRID {
        for k in 0..GRID {
            let a = -0.9 + 1.8 * i as f64 / (GRID - 1) as f64;
            let b = -0.9 + 1.8 * k as f64 / (GRID - 1) as f64;
            if a * a + b * b >= 0.98 {
                continue;
            }
            if let Some((x, res)) = gauss_newton(&[a, b], &sys, 60) {
                let z = C64::new(x[0], x[1]);
                if res < ROOT_RESIDUAL && z.norm() < 1.0 {
                    roots.push((z, res));
                }
            }
        }
    }
    roots.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.re.total_cmp(&b.0.re))
            .then(a.0.im.total_cmp(&b.0.im))
    });
    let mut unique: Vec<(C64, f64)> = Vec::new();
    for r in roots {
        if unique.iter().all(|u| (u.0 - r.0).norm() > DEDUPE) {
            unique.push(r);
        }
    }
    let oracle = closure_bisection(f1, f2, 6);
    let mut validated = Vec::new();
    let mut candidates = Vec::new();
    for (f5, residual) in unique {
        let mut failures = Vec::new();
        let config = match hexagon_config(f1, f2, f5, tol) {
            Ok(c) => {
                failures.extend(c.certificates.failures(tol));
                match &oracle {
                    Ok(o) if (o.b_minor - c.poncelet.b_minor).abs() < ORACLE_TOL => {}
                    Ok(o) => failures.push(format!(
                        "closure oracle b = {} differs from {}",
                        o.b_minor, c.poncelet.b_minor
                    )),
                    Err(e) => failures.push(format!("closure oracle failed: {e}")),
                }
                Some(c)
            }
            Err(e) => {
                failures.push(e.to_string());
                None
            }
        };
        let cand = HexCandidate { f5, residual, failures };
        match config {
            Some(c) if cand.failures.is_empty() => validated.push((c, cand)),
            _ => candidates.push(cand),
        }
    }
    match validated.len() {
        1 => Ok(validated.pop().expect("one element").0),
        0 => Err(SolverError::NoValidatedRoot { candidates }),
        _ => Err(SolverError::MultipleValidatedRoots {
            roots: validated.into_iter().map(|(_, c)| c).collect(),
        }),
    }
}

/// Refines `f5` so that `f1, f2` recovered from `f3, f4, f5` solve the
/// hexagon system.
fn polish_f5(f3: C64, f4: C64, f5: C64) -> Option<(C64, C64, C64)> {
    let foci = move |f5: C64| {
        (
            (f5 - f3) / (one() - f3 * f5.conj()),
            (f5 - f4) / (one() - f4 * f5.conj()),
        )
    };
    let sys = move |x: &[f64]| {
        let f5 = C64::new(x[0], x[1]);
        let (f2, f1) = foci(f5);
        (f5.norm() < 1.0).then(|| split(&hexagon_residual(f1, f2, f5)))
    };
    let (x, res) = gauss_newton(&[f5.re, f5.im], &sys, 60)?;
    let f5 = C64::new(x[0], x[1]);
    let (f2, f1) = foci(f5);
    (res < ROOT_RESIDUAL).then_some((f1, f2, f5))
}

/// Hexagon configuration whose pentagram ellipse has foci `f3, f4`.
///
/// The triangle circumscribing the pentagram ellipse through the point 1 is
/// paired with the interlacing triangle whose connecting segments are
/// concurrent; the concurrency point is the Brianchon point and the conic
/// inscribed in the resulting hexagon gives the foci.
pub fn hexagon_from_pentagram(f3: C64, f4: C64, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    check_disk("f3", f3)?;
    check_disk("f4", f4)?;
    let phi2 = MonicPoly::from_roots(&[f3, f4]);
    let lambda = (phi2.eval(one()) / ((one() - f3.conj()) * (one() - f4.conj()))).conj();
    let lambda = lambda / lambda.norm();
    let tau = interlace_tau(&phi2, lambda)?;
    let hex = tau.hexagon()?;
    let conic = inscribed_conic(&hex)?;
    let (f1, f2, f5) = polish_f5(f3, f4, tau.meet).ok_or_else(|| SolverError::NumericallyDegenerate {
        what: "Brianchon point did not polish".into(),
        value: (hexagon_residual(conic.f1, conic.f2, tau.meet)[0]).norm(),
    })?;
    let gap = conic_gap(&conic, f1, f2);
    if !(gap < POLISH_TOL) {
        return Err(SolverError::NumericallyDegenerate {
            what: "inscribed conic foci disagree with the polished foci".into(),
            value: gap,
        });
    }
    let pent = poncelet_3_ellipse(f3, f4)?;
    certified(
        hexagon_eigenvalues(f1, f2, f5),
        Some(Pentagram::Ellipse(pent)),
        Some(f5),
        tol,
    )
}

fn inscribed_conic(hex: &PolygonChain) -> Result<crate::geometry::Ellipse, SolverError> {
    let sides: [crate::geometry::Line; 6] = hex
        .sides()?
        .try_into()
        .map_err(|_| SolverError::DegenerateConfiguration("hexagon needs six sides".into()))?;
    let report = inscribed_conic_report(&sides)?;
    report.ellipse.ok_or_else(|| {
        SolverError::DegenerateConfiguration(format!(
            "no ellipse inscribed in the hexagon (sixth-line residual {:e})",
            report.sixth_line_residual
        ))
    })
}

fn conic_gap(e: &crate::geometry::Ellipse, f1: C64, f2: C64) -> f64 {
    let direct = (e.f1 - f1).norm().max((e.f2 - f2).norm());
    let swapped = (e.f1 - f2).norm().max((e.f2 - f1).norm());
    direct.min(swapped)
}

/// Second intersection with the unit circle of the line from `a` through `p`.
fn chord_end(a: C64, p: C64) -> C64 {
    let d = p - a;
    let s = -2.0 * (a.conj() * d).re / d.norm_sqr();
    let e = a + d * s;
    e / e.norm()
}

fn angle(z: C64) -> f64 {
    let t = z.arg();
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

/// Hexagon configuration with Brianchon point `f5`, from the three chords
/// through `f5` starting at `1`, `e^{ix}` and `e^{iy}`.
pub fn hexagon_from_brianchon(f5: C64, x: f64, y: f64, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    check_disk("f5", f5)?;
    let start = one();
    let t = angle(chord_end(start, f5));
    if !(0.0 < x && x < y && y < t) {
        return Err(SolverError::InvalidTriangleParam { x, y, t });
    }
    let (ex, ey) = (C64::from_polar(1.0, x), C64::from_polar(1.0, y));
    let vertices = vec![
        start,
        ex,
        ey,
        C64::from_polar(1.0, t),
        chord_end(ex, f5),
        chord_end(ey, f5),
    ];
    for i in 0..6 {
        for j in i + 1..6 {
            if (vertices[i] - vertices[j]).norm() < 1e-9 {
                return Err(SolverError::DegenerateConfiguration(format!(
                    "hexagon vertices {i} and {j} coincide"
                )));
            }
        }
    }
    let hex = PolygonChain::new(vertices, 0.0)?;
    if !hex.is_cyclically_ordered() {
        return Err(SolverError::DegenerateConfiguration(
            "chord ends are not interleaved".into(),
        ));
    }
    let conic = inscribed_conic(&hex)?;
    let sys = move |v: &[f64]| {
        let (f1, f2) = (C64::new(v[0], v[1]), C64::new(v[2], v[3]));
        (f1.norm() < 1.0 && f2.norm() < 1.0).then(|| split(&hexagon_residual(f1, f2, f5)))
    };
    let (v, res) = gauss_newton(&[conic.f1.re, conic.f1.im, conic.f2.re, conic.f2.im], &sys, 60).ok_or_else(|| {
        SolverError::NumericallyDegenerate {
            what: "foci left the disk while polishing".into(),
            value: f64::INFINITY,
        }
    })?;
    let (f1, f2) = (C64::new(v[0], v[1]), C64::new(v[2], v[3]));
    let gap = conic_gap(&conic, f1, f2);
    if !(res < ROOT_RESIDUAL && gap < POLISH_TOL) {
        return Err(SolverError::NumericallyDegenerate {
            what: format!("polished foci: residual {res:e}, distance from inscribed conic"),
            value: gap,
        });
    }
    let (f3, f4) = f34_pair(f1, f2, f5);
    let pent = poncelet_3_ellipse(f3, f4)?;
    certified(
        hexagon_eigenvalues(f1, f2, f5),
        Some(Pentagram::Ellipse(pent)),
        Some(f5),
        tol,
    )
}
