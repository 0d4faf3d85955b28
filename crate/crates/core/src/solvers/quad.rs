//! Triangles and quadrilaterals.

use super::{certified, check_disk, Pentagram, PonceletConfig, SolverError};
use crate::{Tolerances, C64};

/// The Poncelet 3-ellipse with foci `f1, f2`.
pub fn solve_tri(f1: C64, f2: C64, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    check_disk("f1", f1)?;
    check_disk("f2", f2)?;
    certified(vec![f1, f2], None, None, tol)
}

/// Third eigenvalue of the quadrilateral configuration with foci `f1, f2`.
pub fn quad_f3(f1: C64, f2: C64) -> C64 {
    (f1 + f2 - f2 * f1.norm_sqr() - f1 * f2.norm_sqr()) / (1.0 - (f1 * f2).norm_sqr())
}

/// The Poncelet 4-ellipse with foci `f1, f2`; its pentagram curve is the
/// third eigenvalue.
pub fn solve_quad(f1: C64, f2: C64, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    check_disk("f1", f1)?;
    check_disk("f2", f2)?;
    let f3 = quad_f3(f1, f2);
    certified(vec![f1, f3, f2], Some(Pentagram::Point(f3)), None, tol)
}

/// Zeros of `z(z − p) − b̄(1 − p̄z)`, returned as `(first, second)` with the
/// first one nearest `hint`.
fn phi2_zeros(p: C64, b_bar: C64, hint: C64) -> (C64, C64) {
    // z² − s z − b̄ with s = p − b̄ p̄
    let s = p - b_bar * p.conj();
    let disc = (s * s + 4.0 * b_bar).sqrt();
    let big = if (s + disc).norm() >= (s - disc).norm() {
        (s + disc) / 2.0
    } else {
        (s - disc) / 2.0
    };
    let small = if big.norm() > 0.0 {
        -b_bar / big
    } else {
        C64::new(0.0, 0.0)
    };
    if (big - hint).norm() <= (small - hint).norm() {
        (big, small)
    } else {
        (small, big)
    }
}

/// Quadrilateral configuration with one focus at `f1` and pentagram point `p`.
pub fn quad_mixmatch(f1: C64, p: C64, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    check_disk("f1", f1)?;
    check_disk("p", p)?;
    let b_bar = f1 * (f1 - p) / (1.0 - p.conj() * f1);
    check_disk("b", b_bar)?;
    let (_, f2) = phi2_zeros(p, b_bar, f1);
    certified(vec![f1, p, f2], Some(Pentagram::Point(p)), None, tol)
}

/// Member `alpha` of the family of quadrilateral configurations sharing the
/// pentagram point `p`.
pub fn quad_family(p: C64, alpha: C64, tol: &Tolerances) -> Result<PonceletConfig, SolverError> {
    check_disk("p", p)?;
    check_disk("alpha", alpha)?;
    let (f1, f2) = phi2_zeros(p, alpha.conj(), C64::new(1.0, 0.0));
    certified(vec![f1, p, f2], Some(Pentagram::Point(p)), None, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::closure_bisection;
    use crate::poly::MonicPoly;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn f3_special_cases() {
        let f2 = c(0.3, -0.4);
        assert!((quad_f3(c(0.0, 0.0), f2) - f2).norm() < 1e-16);
        assert!(quad_f3(c(0.45, 0.1), c(-0.45, -0.1)).norm() < 1e-16);
    }

    #[test]
    fn f3_satisfies_three_by_three_relation() {
        let (f1, f2) = (c(-0.28, 0.12), c(0.6, 0.24));
        let f3 = quad_f3(f1, f2);
        let lhs = (f3 - f1) * (f3 - f2);
        let rhs = f1 * f2 * (1.0 - f3.norm_sqr());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn quad_matches_closure_oracle() {
        let tol = Tolerances::default();
        let (f1, f2) = (c(-0.28, 0.12), c(0.6, 0.24));
        let q = solve_quad(f1, f2, &tol).unwrap();
        let o = closure_bisection(f1, f2, 4).unwrap();
        assert!((q.poncelet.b_minor - o.b_minor).abs() < 1e-9);
        assert!(q.certificates.pentagram_residual.unwrap() < 1e-9);
    }

    #[test]
    fn mixmatch_with_zero_focus() {
        let tol = Tolerances::default();
        let p = c(0.4, 0.3);
        let q = quad_mixmatch(c(0.0, 0.0), p, &tol).unwrap();
        assert!((q.eigenvalues[2] - p).norm() < 1e-15);
    }

    #[test]
    fn mixmatch_with_zero_pentagram_point() {
        let f1 = c(0.5, 0.2);
        let b_bar = f1 * (f1 - 0.0) / 1.0;
        assert!((b_bar - f1 * f1).norm() < 1e-16);
        let q = quad_mixmatch(f1, c(0.0, 0.0), &Tolerances::default()).unwrap();
        assert!((q.eigenvalues[2] + f1).norm() < 1e-15);
    }

    #[test]
    fn phi2_zeros_are_zeros() {
        let (p, b) = (c(0.2, -0.3), c(-0.1, 0.35));
        let (z1, z2) = phi2_zeros(p, b, c(0.0, 0.0));
        let phi = MonicPoly::from_roots(&[z1, z2]);
        let expect = MonicPoly::new(vec![-b, -(p - b * p.conj())]);
        assert!(phi.max_coeff_diff(&expect) < 1e-15);
    }

    #[test]
    fn out_of_disk_input() {
        assert!(matches!(
            solve_quad(c(1.0, 0.0), c(0.0, 0.0), &Tolerances::default()),
            Err(SolverError::OutOfDisk { .. })
        ));
    }
}
