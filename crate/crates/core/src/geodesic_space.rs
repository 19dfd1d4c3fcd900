//! The space of oriented geodesics as ordered pairs of boundary points, and
//! its para-Kähler tensors computed on χ^⊥ representatives in T¹H^{n+1}.

use crate::config::tol;
use crate::error::{GeomError, Result};
use crate::lorentz::{BoundaryPoint, Isometry};
use crate::utb::{dflow, ghat, UtbPoint, UtbTangent};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedGeodesic {
    pub fwd: BoundaryPoint,
    pub bwd: BoundaryPoint,
}

impl OrientedGeodesic {
    pub fn new(fwd: BoundaryPoint, bwd: BoundaryPoint) -> Result<Self> {
        if fwd.distance(&bwd) <= tol().geodesic {
            return Err(GeomError::Degenerate("coincident endpoints".into()));
        }
        Ok(OrientedGeodesic { fwd, bwd })
    }

    /// Largest endpoint displacement in the normalized slice.
    pub fn distance(&self, o: &OrientedGeodesic) -> f64 {
        self.fwd.distance(&o.fwd).max(self.bwd.distance(&o.bwd))
    }

    pub fn apply(&self, a: &Isometry) -> OrientedGeodesic {
        OrientedGeodesic { fwd: a.apply_boundary(&self.fwd), bwd: a.apply_boundary(&self.bwd) }
    }
}

/// p(x, v): the oriented geodesic through x with velocity v.
pub fn p_project(p: &UtbPoint) -> OrientedGeodesic {
    OrientedGeodesic {
        fwd: BoundaryPoint::normalize_unchecked(p.x() + p.v()),
        bwd: BoundaryPoint::normalize_unchecked(p.x() - p.v()),
    }
}

/// The point of ℓ closest to the basepoint, with v pointing to `fwd`.
///
/// With a = fwd, b = bwd (last coordinate 1), points of ℓ are αa + βb with
/// αβ = −1/(2⟨a,b⟩); the last coordinate α + β is minimal at α = β.
pub fn canonical_rep(l: &OrientedGeodesic) -> Result<UtbPoint> {
    let (a, b) = (l.fwd.vec(), l.bwd.vec());
    let ab = a.dot(&b);
    if !(ab < -tol().geodesic) {
        return Err(GeomError::Degenerate("endpoints too close for a geodesic".into()));
    }
    let k = (-0.5 / ab).sqrt();
    Ok(UtbPoint::project_unchecked(k * (a + b), k * (a - b)))
}

/// Signed flow time t with φ_t(anchor) = target, checking both lie on one geodesic.
pub fn fiber_offset(anchor: &UtbPoint, target: &UtbPoint) -> Result<f64> {
    let d = p_project(anchor).distance(&p_project(target));
    if d > tol().geodesic {
        return Err(GeomError::GeodesicMismatch(d));
    }
    Ok(target.x().dot(&anchor.v()).asinh())
}

/// A tangent vector of 𝒢 represented by a χ^⊥ vector at an anchor point of its fiber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GTangent {
    rep: UtbTangent,
}

impl GTangent {
    /// Wraps a representative, which must be orthogonal to χ.
    pub fn new(rep: UtbTangent) -> Result<Self> {
        let a = rep.xd.dot(&rep.base().v());
        if a.abs() > tol().tangent * (1.0 + rep.xd.euclid() + rep.vd.euclid()) {
            return Err(GeomError::NotHorizontalToChi(a));
        }
        Ok(GTangent { rep })
    }

    /// dp(X): drops the χ component.
    pub fn from_utb(x: &UtbTangent) -> Self {
        GTangent { rep: x.chi_free() }
    }

    pub fn anchor(&self) -> &UtbPoint {
        self.rep.base()
    }

    pub fn rep(&self) -> &UtbTangent {
        &self.rep
    }

    pub fn geodesic(&self) -> OrientedGeodesic {
        p_project(self.anchor())
    }

    pub fn scale(&self, s: f64) -> Self {
        GTangent { rep: self.rep.scale(s) }
    }

    /// Sum, with `o` transported to this anchor.
    pub fn add(&self, o: &GTangent) -> Result<Self> {
        let o = transport_to(o, self.anchor())?;
        Ok(GTangent { rep: self.rep.add(&o.rep) })
    }

    pub fn sub(&self, o: &GTangent) -> Result<Self> {
        let o = transport_to(o, self.anchor())?;
        Ok(GTangent { rep: self.rep.sub(&o.rep) })
    }

    /// Positive-definite size of the representative (flow-invariant).
    pub fn norm(&self) -> f64 {
        self.rep.split_norm()
    }

    pub fn zero(anchor: UtbPoint) -> Self {
        GTangent { rep: UtbTangent::zero(anchor) }
    }
}

/// Pushes the representative by dφ_t to the fiber point `target`.
pub fn transport_to(x: &GTangent, target: &UtbPoint) -> Result<GTangent> {
    let t = fiber_offset(x.anchor(), target)?;
    if t == 0.0 {
        return Ok(*x);
    }
    let moved = dflow(&x.rep, t);
    Ok(GTangent { rep: UtbTangent::new_unchecked(*target, moved.xd, moved.vd) })
}

/// Entry point for applying a group element to a tangent vector of 𝒢.
pub fn apply_isometry(a: &Isometry, x: &GTangent) -> GTangent {
    let b = x.anchor();
    let base = UtbPoint::project_unchecked(a.apply(&b.x()), a.apply(&b.v()));
    GTangent { rep: UtbTangent::new_unchecked(base, a.apply(&x.rep.xd), a.apply(&x.rep.vd)) }
}

/// 𝔾(X, Y) = ĝ on representatives.
pub fn g_metric(x: &GTangent, y: &GTangent) -> Result<f64> {
    let y = transport_to(y, x.anchor())?;
    Ok(ghat(&x.rep, &y.rep))
}

/// 𝕁 on representatives: (ẋ, v̇) ↦ (v̇, ẋ).
pub fn j_para(x: &GTangent) -> GTangent {
    GTangent { rep: UtbTangent::new_unchecked(*x.anchor(), x.rep.vd, x.rep.xd) }
}

/// Ω(X, Y) = 𝔾(X, 𝕁Y).
pub fn omega(x: &GTangent, y: &GTangent) -> Result<f64> {
    g_metric(x, &j_para(y))
}

/// (p*Ω)(X, Y) for tangents of T¹H at a common point.
pub fn pullback_omega(x: &UtbTangent, y: &UtbTangent) -> Result<f64> {
    omega(&GTangent::from_utb(x), &GTangent::from_utb(y))
}

/// Completes an ambient derivative of a lifted field into 𝔻_X Y.
///
/// `dy` is the ambient derivative of the χ^⊥ field `y` along the anchor
/// curve, whose velocity has χ-coefficient `a`; the flow-direction part
/// a·(v̇, ẋ) is removed, then the result is ĝ-projected onto T(T¹H) and off χ.
pub fn complete_cov_deriv(
    y: &UtbTangent,
    dy: (crate::lorentz::MinkowskiVector, crate::lorentz::MinkowskiVector),
    a: f64,
) -> GTangent {
    let (mut dx, mut dv) = dy;
    dx -= a * y.vd;
    dv -= a * y.xd;
    let t = UtbTangent::project(*y.base(), dx, dv);
    GTangent::from_utb(&t)
}

/// 𝔻_X Y at parameter `u` for a field given by evaluators.
///
/// `anchor` is the section ζ̃ carrying the field and `field(u)` the lifted χ^⊥
/// vector Ỹ(u) at ζ̃(u). The direction is a parameter-space vector. Central
/// differences with steps h and h/2 are compared (Richardson); disagreement
/// above `rel_tol` (relative) reports a coarse grid.
pub fn ambient_cov_deriv(
    anchor: &dyn Fn(&[f64]) -> UtbPoint,
    field: &dyn Fn(&[f64]) -> UtbTangent,
    u: &[f64],
    dir: &[f64],
    h: f64,
    rel_tol: f64,
) -> Result<GTangent> {
    let shifted = |e: f64| -> Vec<f64> { u.iter().zip(dir).map(|(a, b)| a + e * b).collect() };
    let deriv = |h: f64| {
        let (p1, m1) = (field(&shifted(h)), field(&shifted(-h)));
        let (p2, m2) = (field(&shifted(2.0 * h)), field(&shifted(-2.0 * h)));
        let c = 1.0 / (12.0 * h);
        let dx = (8.0 * (p1.xd - m1.xd) - (p2.xd - m2.xd)) * c;
        let dv = (8.0 * (p1.vd - m1.vd) - (p2.vd - m2.vd)) * c;
        let (ap, am) = (anchor(&shifted(h)), anchor(&shifted(-h)));
        let (ap2, am2) = (anchor(&shifted(2.0 * h)), anchor(&shifted(-2.0 * h)));
        let vel = (8.0 * (ap.x() - am.x()) - (ap2.x() - am2.x())) * c;
        (dx, dv, vel)
    };
    let y = field(u);
    let base = *y.base();
    let (dx1, dv1, vel1) = deriv(h);
    let (dx2, dv2, vel2) = deriv(0.5 * h);
    let z1 = complete_cov_deriv(&y, (dx1, dv1), vel1.dot(&base.v()));
    let z2 = complete_cov_deriv(&y, (dx2, dv2), vel2.dot(&base.v()));
    let diff = z1.rep.sub(&z2.rep).split_norm();
    let scale = 1.0 + z2.norm();
    if diff > rel_tol * scale {
        return Err(GeomError::GridTooCoarse { diff, tol: rel_tol * scale });
    }
    Ok(z2)
}

/// ĝ-Gram matrix of a frame of tangents at one point.
pub fn gram(frame: &[GTangent]) -> Result<nalgebra::DMatrix<f64>> {
    let n = frame.len();
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g = g_metric(&frame[i], &frame[j])?;
            m[(i, j)] = g;
            m[(j, i)] = g;
        }
    }
    Ok(m)
}
