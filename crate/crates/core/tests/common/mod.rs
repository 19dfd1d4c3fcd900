#![allow(dead_code)]

use geodloom::lorentz::{HPoint, MinkowskiVector};
use geodloom::utb::{chi, hlift, vlift, UtbPoint, UtbTangent};
use proptest::prelude::*;

/// Raw coordinates for one random sample; callers take what the dimension needs.
pub fn coords() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 5)
}

/// Point of H^{n+1} over the given spatial coordinates.
pub fn hpoint(n: usize, s: &[f64]) -> HPoint {
    let mut x = MinkowskiVector::zeros(n + 2);
    for (i, c) in s.iter().take(n + 1).enumerate() {
        x.set(i, *c);
    }
    let r2: f64 = s.iter().take(n + 1).map(|c| c * c).sum();
    x.set(n + 1, (1.0 + r2).sqrt());
    HPoint::new(x).unwrap()
}

pub fn vector(n: usize, s: &[f64]) -> MinkowskiVector {
    let mut w = MinkowskiVector::zeros(n + 2);
    for (i, c) in s.iter().take(n + 2).enumerate() {
        w.set(i, *c);
    }
    w
}

/// Unit tangent pair; falls back to a basis direction when `dir` is nearly radial.
pub fn utb_point(n: usize, s: &[f64], dir: &[f64]) -> UtbPoint {
    let x = hpoint(n, s).vec();
    let mut v = vector(n, dir);
    v = v + v.dot(&x) * x;
    if v.norm2() < 1e-4 {
        v = MinkowskiVector::basis(n + 2, 0);
    }
    UtbPoint::project(x, v).unwrap()
}

pub fn utb_tangent(p: &UtbPoint, a: &[f64], b: &[f64], c: f64) -> UtbTangent {
    let n = p.dim() - 2;
    let h = hlift(p, &vector(n, a), true).unwrap();
    let v = vlift(p, &vector(n, b), true).unwrap();
    h.add(&v).add(&chi(p).scale(c))
}
