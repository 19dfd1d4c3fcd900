//! The unit tangent bundle T¹H^{n+1} ⊂ R^{n+1,1} × R^{n+1,1}.
//!
//! A tangent vector at (x, v) is a pair (ẋ, v̇) with ⟨x,ẋ⟩ = ⟨v,v̇⟩ = 0 and
//! ⟨x,v̇⟩ + ⟨v,ẋ⟩ = 0. It splits as a·χ + w^H + w'^V with w, w' ∈ x^⊥ ∩ v^⊥.

use crate::config::tol;
use crate::error::{GeomError, Result};
use crate::grid::GL4;
use crate::lorentz::{HPoint, MinkowskiVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtbPoint {
    x: MinkowskiVector,
    v: MinkowskiVector,
}

impl UtbPoint {
    pub fn new(x: MinkowskiVector, v: MinkowskiVector) -> Result<Self> {
        let x = HPoint::new(x)?.vec();
        if v.dim() != x.dim() {
            return Err(GeomError::DimensionMismatch { expected: x.dim(), found: v.dim() });
        }
        let t = tol().tangent;
        let r = x.dot(&v).abs().max((v.norm2() - 1.0).abs());
        if r > t * (1.0 + v.euclid().powi(2)) {
            return Err(GeomError::Invariant { what: "(x, v) not a unit tangent pair", residual: r, tol: t });
        }
        Ok(UtbPoint { x, v })
    }

    /// Re-projects an approximate pair onto the bundle: x onto the hyperboloid,
    /// then v onto the unit sphere of x^⊥.
    pub fn project(x: MinkowskiVector, v: MinkowskiVector) -> Result<Self> {
        let x = HPoint::project(x)?.vec();
        let u = v + v.dot(&x) * x;
        let q = u.norm2();
        if !(q > 0.0) {
            return Err(GeomError::Degenerate("direction has no spacelike part orthogonal to x".into()));
        }
        Ok(UtbPoint { x, v: u * (1.0 / q.sqrt()) })
    }

    pub(crate) fn project_unchecked(x: MinkowskiVector, v: MinkowskiVector) -> Self {
        let x = HPoint::project_unchecked(x).vec();
        let u = v + v.dot(&x) * x;
        let q = u.norm2().max(f64::MIN_POSITIVE);
        UtbPoint { x, v: u * (1.0 / q.sqrt()) }
    }

    /// ((0, ..., 0, 1), (1, 0, ..., 0)).
    pub fn basepoint(n: usize) -> Self {
        let d = n + 2;
        UtbPoint { x: MinkowskiVector::origin(d), v: MinkowskiVector::basis(d, 0) }
    }

    pub fn x(&self) -> MinkowskiVector {
        self.x
    }

    pub fn v(&self) -> MinkowskiVector {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.x.max_abs_diff(&o.x).max(self.v.max_abs_diff(&o.v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UtbTangent {
    base: UtbPoint,
    pub xd: MinkowskiVector,
    pub vd: MinkowskiVector,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentSplit {
    pub chi_coeff: f64,
    pub h0: MinkowskiVector,
    pub v0: MinkowskiVector,
}

impl UtbTangent {
    pub fn new(base: UtbPoint, xd: MinkowskiVector, vd: MinkowskiVector) -> Result<Self> {
        let d = base.dim();
        if xd.dim() != d || vd.dim() != d {
            return Err(GeomError::DimensionMismatch { expected: d, found: xd.dim().max(vd.dim()) });
        }
        let r = tangent_residual(&base, &xd, &vd);
        let t = tol().tangent;
        let scale = 1.0 + xd.euclid() + vd.euclid();
        if r > t * scale * (1.0 + base.x.euclid()) {
            return Err(GeomError::Invariant {
                what: "pair is not tangent to the unit tangent bundle",
                residual: r,
                tol: t,
            });
        }
        Ok(UtbTangent { base, xd, vd })
    }

    pub(crate) fn new_unchecked(base: UtbPoint, xd: MinkowskiVector, vd: MinkowskiVector) -> Self {
        UtbTangent { base, xd, vd }
    }

    /// ĝ-orthogonal projection of an arbitrary ambient pair onto T_{(x,v)}T¹H.
    pub fn project(base: UtbPoint, a: MinkowskiVector, b: MinkowskiVector) -> Self {
        let (x, v) = (base.x, base.v);
        let ax = a.dot(&x);
        let bv = b.dot(&v);
        let c = 0.5 * (a.dot(&v) + b.dot(&x));
        let a = a + ax * x - c * v;
        let b = b - bv * v + c * x;
        UtbTangent { base, xd: a, vd: b }
    }

    pub fn zero(base: UtbPoint) -> Self {
        let z = MinkowskiVector::zeros(base.dim());
        UtbTangent { base, xd: z, vd: z }
    }

    pub fn base(&self) -> &UtbPoint {
        &self.base
    }

    pub fn split(&self) -> TangentSplit {
        let a = self.xd.dot(&self.base.v);
        TangentSplit { chi_coeff: a, h0: self.xd - a * self.base.v, v0: self.vd - a * self.base.x }
    }

    /// The component orthogonal to χ (what dp sees).
    pub fn chi_free(&self) -> Self {
        let a = self.xd.dot(&self.base.v);
        UtbTangent { base: self.base, xd: self.xd - a * self.base.v, vd: self.vd - a * self.base.x }
    }

    pub fn scale(&self, s: f64) -> Self {
        UtbTangent { base: self.base, xd: self.xd * s, vd: self.vd * s }
    }

    /// Sum with a tangent at the same base (base taken from `self`).
    pub fn add(&self, o: &Self) -> Self {
        UtbTangent { base: self.base, xd: self.xd + o.xd, vd: self.vd + o.vd }
    }

    pub fn sub(&self, o: &Self) -> Self {
        UtbTangent { base: self.base, xd: self.xd - o.xd, vd: self.vd - o.vd }
    }

    /// Positive-definite norm sqrt(a² + |h0|² + |v0|²) built from the split
    /// (h0, v0 are spacelike). Used for distances between tangents, since ĝ
    /// itself is indefinite.
    pub fn split_norm(&self) -> f64 {
        let s = self.split();
        (s.chi_coeff * s.chi_coeff + s.h0.norm2().max(0.0) + s.v0.norm2().max(0.0)).sqrt()
    }
}

fn tangent_residual(p: &UtbPoint, xd: &MinkowskiVector, vd: &MinkowskiVector) -> f64 {
    let r1 = p.x.dot(xd).abs();
    let r2 = p.v.dot(vd).abs();
    let r3 = (p.x.dot(vd) + p.v.dot(xd)).abs();
    r1.max(r2).max(r3)
}

/// φ_t(x, v) = (cosh t x + sinh t v, sinh t x + cosh t v), re-projected.
pub fn geodesic_flow(p: &UtbPoint, t: f64) -> UtbPoint {
    let (s, c) = (t.sinh(), t.cosh());
    UtbPoint::project_unchecked(c * p.x + s * p.v, s * p.x + c * p.v)
}

/// Push-forward dφ_t, which acts by the same linear formula on (ẋ, v̇).
pub fn dflow(xt: &UtbTangent, t: f64) -> UtbTangent {
    let (s, c) = (t.sinh(), t.cosh());
    UtbTangent { base: geodesic_flow(&xt.base, t), xd: c * xt.xd + s * xt.vd, vd: s * xt.xd + c * xt.vd }
}

/// The generator χ = (v, x) of the geodesic flow.
pub fn chi(p: &UtbPoint) -> UtbTangent {
    UtbTangent { base: *p, xd: p.v, vd: p.x }
}

fn lift_vector(p: &UtbPoint, w: &MinkowskiVector, project: bool) -> Result<MinkowskiVector> {
    if w.dim() != p.dim() {
        return Err(GeomError::DimensionMismatch { expected: p.dim(), found: w.dim() });
    }
    let r = p.x.dot(w).abs().max(p.v.dot(w).abs());
    if project {
        return Ok(*w + p.x.dot(w) * p.x - p.v.dot(w) * p.v);
    }
    let t = tol().tangent;
    if r > t * (1.0 + w.euclid()) {
        return Err(GeomError::Invariant { what: "lift vector not in x^⊥ ∩ v^⊥", residual: r, tol: t });
    }
    Ok(*w)
}

/// Horizontal lift w^H = (w, 0).
pub fn hlift(p: &UtbPoint, w: &MinkowskiVector, project: bool) -> Result<UtbTangent> {
    let w = lift_vector(p, w, project)?;
    Ok(UtbTangent { base: *p, xd: w, vd: MinkowskiVector::zeros(p.dim()) })
}

/// Vertical lift w^V = (0, w).
pub fn vlift(p: &UtbPoint, w: &MinkowskiVector, project: bool) -> Result<UtbTangent> {
    let w = lift_vector(p, w, project)?;
    Ok(UtbTangent { base: *p, xd: MinkowskiVector::zeros(p.dim()), vd: w })
}

pub fn split_tangent(x: &UtbTangent) -> Result<TangentSplit> {
    let s = x.split();
    let c = chi(&x.base);
    let rx = (s.chi_coeff * c.xd + s.h0) - x.xd;
    let rv = (s.chi_coeff * c.vd + s.v0) - x.vd;
    let r = rx.euclid().max(rv.euclid());
    let t = tol().tangent;
    if r > t * (1.0 + x.xd.euclid() + x.vd.euclid()) {
        return Err(GeomError::Invariant { what: "split reconstruction", residual: r, tol: t });
    }
    Ok(s)
}

fn same_base(a: &UtbTangent, b: &UtbTangent) -> Result<()> {
    let d = a.base.max_abs_diff(&b.base);
    if a.base.dim() != b.base.dim() {
        return Err(GeomError::DimensionMismatch { expected: a.base.dim(), found: b.base.dim() });
    }
    if d > tol().tangent * (1.0 + a.base.x.euclid()) {
        return Err(GeomError::BaseMismatch);
    }
    Ok(())
}

/// Para-Sasaki metric: χ-block 1, +⟨,⟩ horizontally, −⟨,⟩ vertically.
pub fn sasaki_metric(a: &UtbTangent, b: &UtbTangent) -> Result<f64> {
    same_base(a, b)?;
    let (s, t) = (a.split(), b.split());
    Ok(s.chi_coeff * t.chi_coeff + s.h0.dot(&t.h0) - s.v0.dot(&t.v0))
}

/// ĝ(X, Y) = ⟨ẋ₁, ẋ₂⟩ − ⟨v̇₁, v̇₂⟩, the restriction of a flat ambient form.
pub fn ghat_metric(a: &UtbTangent, b: &UtbTangent) -> Result<f64> {
    same_base(a, b)?;
    Ok(ghat(a, b))
}

#[inline]
pub(crate) fn ghat(a: &UtbTangent, b: &UtbTangent) -> f64 {
    a.xd.dot(&b.xd) - a.vd.dot(&b.vd)
}

/// The para-complex endomorphism on χ^⊥: (ẋ, v̇) ↦ (v̇, ẋ).
pub fn j_endo(x: &UtbTangent) -> Result<UtbTangent> {
    let a = x.xd.dot(&x.base.v);
    let t = tol().tangent;
    if a.abs() > t * (1.0 + x.xd.euclid() + x.vd.euclid()) {
        return Err(GeomError::NotHorizontalToChi(a));
    }
    Ok(UtbTangent { base: x.base, xd: x.vd, vd: x.xd })
}

/// ω(X) = g_S(X, χ) = ⟨ẋ, v⟩.
pub fn connection_form(x: &UtbTangent) -> f64 {
    x.xd.dot(&x.base.v)
}

/// Unit tangent pair from an approximate pair together with the image of an
/// ambient direction (dx, dv) under the derivative of the projection.
/// Returns the projected point and ω of the projected velocity.
fn project_with_omega(x: MinkowskiVector, v: MinkowskiVector, dx: MinkowskiVector) -> (UtbPoint, f64) {
    let r = (-x.norm2()).sqrt();
    let p = UtbPoint::project_unchecked(x, v);
    // d(x/r) = dx/r + x⟨x,dx⟩/r³ and the second term is orthogonal to v̂.
    (p, dx.dot(&p.v) / r)
}

fn circulation(p: &UtbPoint, xa: &UtbTangent, ya: &UtbTangent, h: f64) -> f64 {
    let corner = |s: f64, t: f64| (p.x + s * xa.xd + t * ya.xd, p.v + s * xa.vd + t * ya.vd);
    let half = 0.5 * h;
    // Counterclockwise in the (X, Y) parameter plane.
    let edges = [
        ((-half, -half), (1.0, 0.0)),
        ((half, -half), (0.0, 1.0)),
        ((half, half), (-1.0, 0.0)),
        ((-half, half), (0.0, -1.0)),
    ];
    let mut total = 0.0;
    for ((s0, t0), (ds, dt)) in edges {
        let dx = ds * xa.xd + dt * ya.xd;
        for (z, w) in GL4 {
            let tau = half * (z + 1.0);
            let (xs, vs) = corner(s0 + ds * tau, t0 + dt * tau);
            let (_, om) = project_with_omega(xs, vs, dx);
            total += w * half * om;
        }
    }
    total
}

/// Stokes estimate of dω(X, Y): circulation of ω around the image of the
/// square [−h/2, h/2]² under (s, t) ↦ proj(p + sX + tY), divided by h².
/// A Richardson comparison with h/2 detects cancellation.
pub fn curvature_fd(p: &UtbPoint, xa: &UtbTangent, ya: &UtbTangent, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(GeomError::BadParams("step h must be positive".into()));
    }
    if xa.base.max_abs_diff(p) > tol().tangent || ya.base.max_abs_diff(p) > tol().tangent {
        return Err(GeomError::BaseMismatch);
    }
    let e1 = circulation(p, xa, ya, h) / (h * h);
    let e2 = circulation(p, xa, ya, 0.5 * h) / (0.25 * h * h);
    let diff = (e1 - e2).abs();
    let scale = 1.0 + xa.split_norm() * ya.split_norm();
    if diff > 50.0 * h * scale {
        return Err(GeomError::Cancellation { h, diff });
    }
    Ok(e1)
}

/// Exterior derivative of ω evaluated in closed form: ⟨v̇₁, ẋ₂⟩ − ⟨v̇₂, ẋ₁⟩.
pub fn d_omega_exact(a: &UtbTangent, b: &UtbTangent) -> f64 {
    a.vd.dot(&b.xd) - b.vd.dot(&a.xd)
}
