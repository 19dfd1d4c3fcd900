//! Minkowski space R^{n+1,1}, the hyperboloid model of H^{n+1} and its boundary.
//!
//! The bilinear form is `x_1 y_1 + ... + x_{n+1} y_{n+1} - x_{n+2} y_{n+2}`;
//! the last coordinate is the timelike one.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;

use crate::config::tol;
use crate::error::{GeomError, Result};

/// Largest supported ambient dimension (n = 3).
pub const MAX_AMBIENT: usize = 5;

/// Validates that `n` (the dimension of the hypersurface) is supported.
pub fn check_n(n: usize) -> Result<()> {
    if (1..=3).contains(&n) {
        Ok(())
    } else {
        Err(GeomError::UnsupportedDimension(n))
    }
}

#[derive(Clone, Copy, PartialEq)]
pub struct MinkowskiVector {
    c: [f64; MAX_AMBIENT],
    dim: usize,
}

impl std::fmt::Debug for MinkowskiVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl MinkowskiVector {
    /// Zero vector of ambient dimension `dim` (3..=5).
    pub fn zeros(dim: usize) -> Self {
        assert!((3..=MAX_AMBIENT).contains(&dim), "ambient dimension {dim} unsupported");
        MinkowskiVector { c: [0.0; MAX_AMBIENT], dim }
    }

    pub fn from_slice(s: &[f64]) -> Result<Self> {
        if !(3..=MAX_AMBIENT).contains(&s.len()) {
            return Err(GeomError::UnsupportedDimension(s.len().saturating_sub(2)));
        }
        if s.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let mut v = Self::zeros(s.len());
        v.c[..s.len()].copy_from_slice(s);
        Ok(v)
    }

    /// `i`-th standard basis vector (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.c[i] = 1.0;
        v
    }

    /// The hyperboloid basepoint (0, ..., 0, 1).
    pub fn origin(dim: usize) -> Self {
        Self::basis(dim, dim - 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn set(&mut self, i: usize, x: f64) {
        assert!(i < self.dim);
        self.c[i] = x;
    }

    pub fn last(&self) -> f64 {
        self.c[self.dim - 1]
    }

    /// Minkowski product without the dimension check (debug-asserted).
    #[inline]
    pub fn dot(&self, o: &Self) -> f64 {
        debug_assert_eq!(self.dim, o.dim);
        let k = self.dim - 1;
        let mut s = -self.c[k] * o.c[k];
        for i in 0..k {
            s += self.c[i] * o.c[i];
        }
        s
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean length of the coordinate vector (used for scale-aware tolerances).
    pub fn euclid(&self) -> f64 {
        self.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    /// Applies the signature matrix J = diag(1, ..., 1, -1).
    pub fn flip_time(&self) -> Self {
        let mut r = *self;
        r.c[self.dim - 1] = -r.c[self.dim - 1];
        r
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.as_slice().iter().zip(o.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Index<usize> for MinkowskiVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        assert!(i < self.dim);
        &self.c[i]
    }
}

impl Add for MinkowskiVector {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

impl AddAssign for MinkowskiVector {
    fn add_assign(&mut self, o: Self) {
        debug_assert_eq!(self.dim, o.dim);
        for i in 0..self.dim {
            self.c[i] += o.c[i];
        }
    }
}

impl Sub for MinkowskiVector {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self -= o;
        self
    }
}

impl SubAssign for MinkowskiVector {
    fn sub_assign(&mut self, o: Self) {
        debug_assert_eq!(self.dim, o.dim);
        for i in 0..self.dim {
            self.c[i] -= o.c[i];
        }
    }
}

impl Neg for MinkowskiVector {
    type Output = Self;
    fn neg(mut self) -> Self {
        for i in 0..self.dim {
            self.c[i] = -self.c[i];
        }
        self
    }
}

impl Mul<f64> for MinkowskiVector {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for i in 0..self.dim {
            self.c[i] *= s;
        }
        self
    }
}

impl Mul<MinkowskiVector> for f64 {
    type Output = MinkowskiVector;
    fn mul(self, v: MinkowskiVector) -> MinkowskiVector {
        v * self
    }
}

/// Checked Minkowski product.
pub fn mink_inner(u: &MinkowskiVector, v: &MinkowskiVector) -> Result<f64> {
    if u.dim != v.dim {
        return Err(GeomError::DimensionMismatch { expected: u.dim, found: v.dim });
    }
    Ok(u.dot(v))
}

/// A point of the upper hyperboloid sheet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint(MinkowskiVector);

impl HPoint {
    pub fn new(v: MinkowskiVector) -> Result<Self> {
        let t = tol().tangent;
        let r = (v.norm2() + 1.0).abs();
        if !v.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if r > t * (1.0 + v.euclid().powi(2)) {
            return Err(GeomError::Invariant { what: "point not on the hyperboloid", residual: r, tol: t });
        }
        if v.last() <= 0.0 {
            return Err(GeomError::Invariant { what: "point on the lower sheet", residual: v.last(), tol: 0.0 });
        }
        Ok(HPoint(v))
    }

    /// Re-projects a future timelike vector onto the hyperboloid.
    pub fn project(v: MinkowskiVector) -> Result<Self> {
        let q = -v.norm2();
        if !v.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if q <= 0.0 || v.last() <= 0.0 {
            return Err(GeomError::Degenerate("vector is not future timelike".into()));
        }
        Ok(HPoint(v * (1.0 / q.sqrt())))
    }

    /// Projection for vectors already known to be future timelike.
    pub(crate) fn project_unchecked(v: MinkowskiVector) -> Self {
        let q = (-v.norm2()).max(f64::MIN_POSITIVE);
        HPoint(v * (1.0 / q.sqrt()))
    }

    pub fn origin(n: usize) -> Self {
        HPoint(MinkowskiVector::origin(n + 2))
    }

    pub fn vec(&self) -> MinkowskiVector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// Hyperbolic distance.
    pub fn distance(&self, o: &HPoint) -> f64 {
        (-self.0.dot(&o.0)).max(1.0).acosh()
    }
}

/// A point of the ideal boundary: a future null direction with last coordinate 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint(MinkowskiVector);

impl BoundaryPoint {
    pub fn from_null(v: MinkowskiVector) -> Result<Self> {
        if !v.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if v.last() <= 0.0 {
            return Err(GeomError::Degenerate("null direction is not future pointing".into()));
        }
        let w = v * (1.0 / v.last());
        let r = w.norm2().abs();
        let t = tol().tangent;
        if r > t * 10.0 {
            return Err(GeomError::Invariant { what: "boundary direction not null", residual: r, tol: t });
        }
        Ok(BoundaryPoint(w))
    }

    pub(crate) fn normalize_unchecked(v: MinkowskiVector) -> Self {
        BoundaryPoint(v * (1.0 / v.last()))
    }

    pub fn vec(&self) -> MinkowskiVector {
        self.0
    }

    /// Euclidean distance in the normalized slice.
    pub fn distance(&self, o: &BoundaryPoint) -> f64 {
        (self.0 - o.0).euclid()
    }
}

/// An element of SO_0(n+1,1).
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    m: DMatrix<f64>,
}

impl Isometry {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let d = m.nrows();
        if m.ncols() != d {
            return Err(GeomError::DimensionMismatch { expected: d, found: m.ncols() });
        }
        if !(3..=MAX_AMBIENT).contains(&d) {
            return Err(GeomError::UnsupportedDimension(d.saturating_sub(2)));
        }
        let j = signature(d);
        let r = (m.transpose() * &j * &m - &j).abs().max();
        let t = tol().tangent.max(1e-10) * (1.0 + m.abs().max().powi(2));
        if r > t {
            return Err(GeomError::Invariant {
                what: "matrix does not preserve the Minkowski form",
                residual: r,
                tol: t,
            });
        }
        if m[(d - 1, d - 1)] <= 0.0 {
            return Err(GeomError::Degenerate("isometry reverses time orientation".into()));
        }
        if m.determinant() <= 0.0 {
            return Err(GeomError::Degenerate("isometry reverses space orientation".into()));
        }
        Ok(Isometry { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(GeomError::BadParams("isometry matrix must be square".into()));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Isometry { m: DMatrix::identity(dim, dim) }
    }

    /// Hyperbolic translation of length `t` along the geodesic through the
    /// origin in direction `e_axis` (boost in the (e_axis, time) plane).
    pub fn boost(dim: usize, axis: usize, t: f64) -> Self {
        let mut m = DMatrix::identity(dim, dim);
        let k = dim - 1;
        m[(axis, axis)] = t.cosh();
        m[(k, k)] = t.cosh();
        m[(axis, k)] = t.sinh();
        m[(k, axis)] = t.sinh();
        Isometry { m }
    }

    /// Rotation by `theta` in the spatial (e_i, e_j) plane.
    pub fn rotation(dim: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut m = DMatrix::identity(dim, dim);
        let (s, c) = theta.sin_cos();
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        Isometry { m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn apply(&self, v: &MinkowskiVector) -> MinkowskiVector {
        let d = self.dim();
        debug_assert_eq!(d, v.dim());
        let mut r = MinkowskiVector::zeros(d);
        for i in 0..d {
            let mut s = 0.0;
            for j in 0..d {
                s += self.m[(i, j)] * v[j];
            }
            r.c[i] = s;
        }
        r
    }

    pub fn apply_point(&self, x: &HPoint) -> HPoint {
        HPoint::project_unchecked(self.apply(&x.vec()))
    }

    pub fn apply_boundary(&self, b: &BoundaryPoint) -> BoundaryPoint {
        BoundaryPoint::normalize_unchecked(self.apply(&b.vec()))
    }

    pub fn compose(&self, o: &Isometry) -> Isometry {
        Isometry { m: &self.m * &o.m }
    }

    /// Inverse J m^T J.
    pub fn inverse(&self) -> Isometry {
        let j = signature(self.dim());
        Isometry { m: &j * self.m.transpose() * &j }
    }
}

/// Signature matrix diag(1, ..., 1, -1).
pub fn signature(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(dim, dim);
    j[(dim - 1, dim - 1)] = -1.0;
    j
}

fn check_unit_tangent(x: &HPoint, v: &MinkowskiVector) -> Result<()> {
    if x.dim() != v.dim() {
        return Err(GeomError::DimensionMismatch { expected: x.dim(), found: v.dim() });
    }
    let t = tol().tangent;
    let r = x.vec().dot(v).abs().max((v.norm2() - 1.0).abs());
    if r > t * (1.0 + v.euclid().powi(2)) {
        return Err(GeomError::Invariant { what: "v is not a unit tangent at x", residual: r, tol: t });
    }
    Ok(())
}

/// Point at time `t` along the unit-speed geodesic through `x` with velocity `v`.
pub fn exp_point(x: &HPoint, v: &MinkowskiVector, t: f64) -> Result<HPoint> {
    check_unit_tangent(x, v)?;
    Ok(HPoint::project_unchecked(t.cosh() * x.vec() + t.sinh() * *v))
}

/// Forward (`sign = +1`) or backward (`sign = -1`) endpoint of the geodesic.
pub fn geodesic_endpoint(x: &HPoint, v: &MinkowskiVector, sign: i32) -> Result<BoundaryPoint> {
    check_unit_tangent(x, v)?;
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    Ok(BoundaryPoint::normalize_unchecked(x.vec() + s * *v))
}

/// Lorentzian cross product in R^{2,1}: the vector `J(x × v)`, orthogonal to
/// both arguments, with det[x, v, x ⊠ v] = ⟨x ⊠ v, x ⊠ v⟩.
pub fn lorentz_cross(x: &MinkowskiVector, v: &MinkowskiVector) -> Result<MinkowskiVector> {
    if x.dim() != 3 || v.dim() != 3 {
        return Err(GeomError::DimensionMismatch { expected: 3, found: x.dim().max(v.dim()) });
    }
    let e = [x[1] * v[2] - x[2] * v[1], x[2] * v[0] - x[0] * v[2], x[0] * v[1] - x[1] * v[0]];
    MinkowskiVector::from_slice(&[e[0], e[1], -e[2]])
}

/// Determinant of the square matrix whose columns are the given vectors.
pub fn det_columns(cols: &[MinkowskiVector]) -> f64 {
    let d = cols.len();
    DMatrix::from_fn(d, d, |i, j| cols[j][i]).determinant()
}
