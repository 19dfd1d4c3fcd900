mod common;

use common::{coords, hpoint, utb_point, utb_tangent, vector};
use geodloom::geodesic_space::pullback_omega;
use geodloom::lorentz::{exp_point, geodesic_endpoint, Isometry, MinkowskiVector};
use geodloom::utb::{
    chi, connection_form, curvature_fd, d_omega_exact, dflow, geodesic_flow, ghat_metric, hlift, j_endo, sasaki_metric,
    split_tangent, vlift, UtbPoint,
};
use proptest::prelude::*;

fn isometry(n: usize, p: &[f64]) -> Isometry {
    let d = n + 2;
    Isometry::boost(d, 0, p[0]).compose(&Isometry::rotation(d, 0, n, 3.0 * p[1])).compose(&Isometry::boost(d, n, p[2]))
}

proptest! {
    #[test]
    fn isometries_preserve_the_hyperboloid(n in 1usize..=3, s in coords(), q in coords()) {
        let x = hpoint(n, &s);
        let y = isometry(n, &q).apply_point(&x).vec();
        prop_assert!((y.dot(&y) + 1.0).abs() < 1e-10);
    }

    #[test]
    fn exp_is_a_flow(n in 1usize..=3, s in coords(), d in coords(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let p = utb_point(n, &s, &d);
        let x = hpoint(n, &s);
        let one = exp_point(&x, &p.v(), a + b).unwrap();
        let mid = exp_point(&x, &p.v(), a).unwrap();
        let va = a.sinh() * x.vec() + a.cosh() * p.v();
        let two = exp_point(&mid, &va, b).unwrap();
        prop_assert!(one.vec().max_abs_diff(&two.vec()) < 1e-9 * (1.0 + one.vec().euclid()));
        let back = exp_point(&mid, &va, -a).unwrap();
        prop_assert!(back.vec().max_abs_diff(&x.vec()) < 1e-9 * (1.0 + x.vec().euclid()));
    }

    #[test]
    fn endpoints_are_flow_invariant(n in 1usize..=3, s in coords(), d in coords(), t in -3.0..3.0f64) {
        let p = utb_point(n, &s, &d);
        let q = geodesic_flow(&p, t);
        for sign in [1, -1] {
            let a = geodesic_endpoint(&geodloom::lorentz::HPoint::new(p.x()).unwrap(), &p.v(), sign).unwrap();
            let b = geodesic_endpoint(&geodloom::lorentz::HPoint::new(q.x()).unwrap(), &q.v(), sign).unwrap();
            prop_assert!(a.distance(&b) < 1e-9);
        }
    }

    #[test]
    fn endpoints_are_isometry_equivariant(n in 1usize..=3, s in coords(), d in coords(), q in coords()) {
        let p = utb_point(n, &s, &d);
        let a = isometry(n, &q);
        let x = geodloom::lorentz::HPoint::new(p.x()).unwrap();
        for sign in [1, -1] {
            let lhs = geodesic_endpoint(&a.apply_point(&x), &a.apply(&p.v()), sign).unwrap();
            let rhs = a.apply_boundary(&geodesic_endpoint(&x, &p.v(), sign).unwrap());
            prop_assert!(lhs.distance(&rhs) < 1e-9);
        }
    }

    #[test]
    fn flow_is_additive_and_stays_on_the_bundle(n in 1usize..=3, s in coords(), d in coords(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let p = utb_point(n, &s, &d);
        let one = geodesic_flow(&geodesic_flow(&p, a), b);
        let two = geodesic_flow(&p, a + b);
        prop_assert!(one.max_abs_diff(&two) < 1e-10 * (1.0 + two.x().euclid()));
        prop_assert!(UtbPoint::new(one.x(), one.v()).is_ok());
        let (x, v) = (one.x(), one.v());
        prop_assert!(x.dot(&v).abs() < 1e-10 * (1.0 + x.euclid() * v.euclid()));
    }

    #[test]
    fn connection_form_is_the_chi_coefficient(n in 1usize..=3, s in coords(), d in coords(), a in coords(), b in coords(), c in -1.0..1.0f64) {
        let p = utb_point(n, &s, &d);
        let x = utb_tangent(&p, &a, &b, c);
        let sp = split_tangent(&x).unwrap();
        prop_assert!((connection_form(&x) - sp.chi_coeff).abs() < 1e-12);
        let rebuilt = chi(&p).scale(sp.chi_coeff)
            .add(&hlift(&p, &sp.h0, false).unwrap())
            .add(&vlift(&p, &sp.v0, false).unwrap());
        prop_assert!(rebuilt.sub(&x).split_norm() < 1e-12 * (1.0 + x.split_norm()));
    }

    #[test]
    fn flow_is_a_para_sasaki_isometry(n in 1usize..=3, s in coords(), d in coords(), a in coords(), b in coords(), e in coords(), f in coords(), t in -1.5..1.5f64) {
        let p = utb_point(n, &s, &d);
        let (x, y) = (utb_tangent(&p, &a, &b, 0.3), utb_tangent(&p, &e, &f, -0.2));
        let before = sasaki_metric(&x, &y).unwrap();
        let after = sasaki_metric(&dflow(&x, t), &dflow(&y, t)).unwrap();
        prop_assert!((before - after).abs() < 1e-10 * (1.0 + (2.0 * t).cosh()));
        prop_assert!((connection_form(&dflow(&x, t)) - connection_form(&x)).abs() < 1e-10 * (1.0 + t.cosh()));
    }

    #[test]
    fn para_complex_structure(n in 1usize..=3, s in coords(), d in coords(), a in coords(), b in coords(), e in coords(), f in coords(), t in -1.5..1.5f64) {
        let p = utb_point(n, &s, &d);
        let (x, y) = (utb_tangent(&p, &a, &b, 0.0), utb_tangent(&p, &e, &f, 0.0));
        let jx = j_endo(&x).unwrap();
        prop_assert!(j_endo(&jx).unwrap().sub(&x).split_norm() < 1e-12);
        let g = ghat_metric(&x, &y).unwrap();
        let gj = ghat_metric(&jx, &j_endo(&y).unwrap()).unwrap();
        prop_assert!((g + gj).abs() < 1e-12 * (1.0 + g.abs()));
        prop_assert!((g - sasaki_metric(&x, &y).unwrap()).abs() < 1e-12 * (1.0 + g.abs()));
        let lhs = dflow(&jx, t);
        let rhs = j_endo(&dflow(&x, t)).unwrap();
        prop_assert!(lhs.sub(&rhs).split_norm() < 1e-10 * (1.0 + t.cosh()));
    }

    #[test]
    fn curvature_matches_closed_form(n in 1usize..=3, s in coords(), d in coords(), a in coords(), b in coords(), e in coords(), f in coords()) {
        let p = utb_point(n, &s, &d);
        let (x, y) = (utb_tangent(&p, &a, &b, 0.4), utb_tangent(&p, &e, &f, -0.3));
        let h = 1e-4;
        let fd = curvature_fd(&p, &x, &y, h).unwrap();
        prop_assert!((fd - d_omega_exact(&x, &y)).abs() < 50.0 * h);
        // χ drops out of both sides, and dω = −p*Ω in this orientation.
        prop_assert!((fd + pullback_omega(&x, &y).unwrap()).abs() < 50.0 * h);
    }
}

#[test]
fn flow_differential_on_lifts() {
    let p = UtbPoint::basepoint(1);
    let w = MinkowskiVector::from_slice(&[0.0, 1.0, 0.0]).unwrap();
    let t = 0.7;
    let (h, v) = (hlift(&p, &w, false).unwrap(), vlift(&p, &w, false).unwrap());
    let q = geodesic_flow(&p, t);
    let hq = hlift(&q, &w, false).unwrap().scale(t.cosh()).add(&vlift(&q, &w, false).unwrap().scale(t.sinh()));
    let vq = hlift(&q, &w, false).unwrap().scale(t.sinh()).add(&vlift(&q, &w, false).unwrap().scale(t.cosh()));
    assert!(dflow(&h, t).sub(&hq).split_norm() < 1e-12);
    assert!(dflow(&v, t).sub(&vq).split_norm() < 1e-12);
    assert!((sasaki_metric(&h, &h).unwrap() - 1.0).abs() < 1e-15);
    assert!((sasaki_metric(&v, &v).unwrap() + 1.0).abs() < 1e-15);
    assert_eq!(connection_form(&h), 0.0);
    assert_eq!(connection_form(&v), 0.0);
    assert_eq!(connection_form(&chi(&p)), 1.0);
}

#[test]
fn curvature_basis_cases_converge() {
    let p = UtbPoint::basepoint(1);
    let w = vector(1, &[0.0, 1.0, 0.0]);
    let (h, v) = (hlift(&p, &w, false).unwrap(), vlift(&p, &w, false).unwrap());
    let err = |h_step: f64| (curvature_fd(&p, &h, &v, h_step).unwrap() - d_omega_exact(&h, &v)).abs();
    assert!((d_omega_exact(&h, &v) + 1.0).abs() < 1e-15);
    let (e1, e2) = (err(1e-2), err(5e-3));
    assert!(e1 < 50.0 * 1e-2);
    assert!(e2 <= e1 || e2 < 1e-12, "no convergence: {e1:e} -> {e2:e}");
    let c = chi(&p);
    assert!(curvature_fd(&p, &c, &v, 1e-4).unwrap().abs() < 5e-3);
    assert!(curvature_fd(&p, &c, &h, 1e-4).unwrap().abs() < 5e-3);
}
