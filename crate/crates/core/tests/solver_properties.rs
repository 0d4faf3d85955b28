use std::f64::consts::TAU;

use poncelet_core::geometry::closure_bisection;
use poncelet_core::opuc::opuc_from_verblunsky;
use poncelet_core::poly::{roots, ROOT_TOL};
use poncelet_core::solvers::{
    hexagon_from_pentagram, pentagon_collinearity_report, quad_f3, quad_family, quad_mixmatch, relation_3rel_residual,
    solve_hexagon, solve_pentagon, solve_quad, PairClass, Pentagram,
};
use poncelet_core::{PonceletConfig, Tolerances, C64};
use proptest::prelude::*;

fn disk(lo: f64, hi: f64) -> impl Strategy<Value = C64> {
    (lo..hi, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

/// Structural invariants shared by every configuration.
fn assert_config(cfg: &PonceletConfig, tol: &Tolerances) {
    assert!(cfg.certificates.failures(tol).is_empty(), "{:?}", cfg.certificates);
    assert_eq!(cfg.eigenvalues.len() + 1, cfg.n);
    let mut free = roots(&opuc_from_verblunsky(&cfg.verblunsky).to_poly(), ROOT_TOL).unwrap();
    for z in &cfg.eigenvalues {
        let (j, d) = free
            .iter()
            .enumerate()
            .map(|(j, w)| (j, (w - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(d < 1e-9, "eigenvalue {z} off by {d:e}");
        free.swap_remove(j);
    }
    let (f1, f2) = cfg.foci();
    let same = (f1 - cfg.poncelet.f1).norm().max((f2 - cfg.poncelet.f2).norm());
    let swapped = (f1 - cfg.poncelet.f2).norm().max((f2 - cfg.poncelet.f1).norm());
    assert!(same.min(swapped) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quad_closed_form(f1 in disk(0.0, 0.85), f2 in disk(0.0, 0.85)) {
        let tol = Tolerances::default();
        let f3 = quad_f3(f1, f2);
        prop_assert!(((f3 - f1) * (f3 - f2) - f1 * f2 * (1.0 - f3.norm_sqr())).norm() < 1e-12);
        let q = solve_quad(f1, f2, &tol).unwrap();
        assert_config(&q, &tol);
        prop_assert_eq!(q.pentagram, Some(Pentagram::Point(f3)));
        let o = closure_bisection(f1, f2, 4).unwrap();
        prop_assert!((q.poncelet.b_minor - o.b_minor).abs() < 1e-6);
    }

    #[test]
    fn mixmatch_round_trip(f1 in disk(0.0, 0.8), p in disk(0.0, 0.8)) {
        let tol = Tolerances::default();
        let m = quad_mixmatch(f1, p, &tol).unwrap();
        assert_config(&m, &tol);
        prop_assert!((m.eigenvalues[0] - f1).norm() < 1e-15);
        let (a, b) = m.foci();
        let q = solve_quad(a, b, &tol).unwrap();
        let Some(Pentagram::Point(back)) = q.pentagram else { panic!("no point") };
        prop_assert!((back - p).norm() < 1e-9);
    }

    #[test]
    fn family_members_share_the_point(p in disk(0.0, 0.8), alpha in disk(0.0, 0.8)) {
        let tol = Tolerances::default();
        let q = quad_family(p, alpha, &tol).unwrap();
        assert_config(&q, &tol);
        prop_assert_eq!(q.pentagram, Some(Pentagram::Point(p)));
    }

    #[test]
    fn centred_family_is_symmetric(alpha in disk(0.0, 0.8)) {
        let q = quad_family(C64::new(0.0, 0.0), alpha, &Tolerances::default()).unwrap();
        let (f1, f2) = q.foci();
        prop_assert!((f1 + f2).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pentagon_structure(f1 in disk(0.1, 0.8), f2 in disk(0.1, 0.8)) {
        let tol = Tolerances::default();
        let s = solve_pentagon(f1, f2, &tol).unwrap();
        prop_assert!(s.cubic_imag < 1e-10);
        prop_assert_eq!(s.pairs.len(), 3);
        prop_assert!(s.pairs.iter().all(|p| p.t_imag.abs() < 1e-10));
        prop_assert!(s.pairs.iter().all(|p| (p.t - s.t0).abs() > 1e-9));
        let outside = s.pairs.iter().filter(|p| p.z.norm() > 1.0 && p.w.norm() > 1.0).count();
        let inside = s.pairs.iter().filter(|p| p.z.norm() < 1.0 && p.w.norm() < 1.0).count();
        prop_assert_eq!((inside, outside), (2, 1));
        prop_assert!(pentagon_collinearity_report(&s).max() < 1e-8);
        for class in [PairClass::PonceletFoci, PairClass::PentagramFoci] {
            let p = s.pairs.iter().find(|p| p.class == class).unwrap();
            prop_assert!(p.t > 0.0);
        }
        assert_config(&s.poncelet_config(&tol).unwrap(), &tol);
        assert_config(&s.pentagram_config(&tol).unwrap(), &tol);
    }

    #[test]
    fn pentagon_involution(f1 in disk(0.1, 0.8)) {
        let s = solve_pentagon(f1, -f1, &Tolerances::default()).unwrap();
        for p in &s.pairs {
            let best = s
                .pairs
                .iter()
                .map(|q| (q.z + p.w).norm().max((q.w + p.z).norm()))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-9 * p.z.norm().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hexagon_invariants(f1 in disk(0.0, 0.7), f2 in disk(0.0, 0.7)) {
        let tol = Tolerances::default();
        let h = solve_hexagon(f1, f2, &tol).unwrap();
        assert_config(&h, &tol);
        let e = &h.eigenvalues;
        prop_assert!(relation_3rel_residual([f1, f2, e[1], e[3], e[2]]) < 1e-10);
        prop_assert_eq!(h.brianchon, Some(e[2]));
        let o = closure_bisection(f1, f2, 6).unwrap();
        prop_assert!((h.poncelet.b_minor - o.b_minor).abs() < 1e-6);
    }

    #[test]
    fn opposite_foci_give_central_brianchon_point(r in 0.05f64..0.8, t in 0.0..TAU) {
        let f = C64::from_polar(r, t);
        let h = solve_hexagon(f, -f, &Tolerances::default()).unwrap();
        prop_assert!(h.eigenvalues[2].norm() < 1e-9);
    }

    #[test]
    fn pentagram_construction_round_trip(f3 in disk(0.0, 0.6), f4 in disk(0.0, 0.6)) {
        let tol = Tolerances::default();
        let h = hexagon_from_pentagram(f3, f4, &tol).unwrap();
        assert_config(&h, &tol);
        let (f1, f2) = h.foci();
        let back = solve_hexagon(f1, f2, &tol).unwrap();
        let (a, b) = (back.eigenvalues[1], back.eigenvalues[3]);
        let gap = ((a - f3).norm().max((b - f4).norm())).min((a - f4).norm().max((b - f3).norm()));
        prop_assert!(gap < 1e-7, "gap {gap:e}");
    }
}
