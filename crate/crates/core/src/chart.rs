//! Immersion charts (maps into H^{n+1}) and lift charts (maps into T¹H^{n+1}).
//!
//! Both come either as analytic evaluators, differentiable anywhere, or as
//! tabulated node values differentiated on the grid.

use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::exec::try_map_range;
use crate::grid::{fd_axis, grid_deriv, Domain, Pair};
use crate::lorentz::{det_columns, HPoint, MinkowskiVector};
use crate::utb::{UtbPoint, UtbTangent};

pub type PointFn = Arc<dyn Fn(&[f64]) -> MinkowskiVector + Send + Sync>;
pub type FrameFn = Arc<dyn Fn(&[f64]) -> Vec<MinkowskiVector> + Send + Sync>;
pub type LiftFn = Arc<dyn Fn(&[f64]) -> UtbPoint + Send + Sync>;
pub type LiftJacFn = Arc<dyn Fn(&[f64]) -> Vec<UtbTangent> + Send + Sync>;
pub type JetFn = Arc<dyn Fn(&[f64]) -> Result<Jet> + Send + Sync>;

#[derive(Clone)]
enum Backing<F, J, T> {
    Analytic { map: F, jac: Option<J> },
    Tabulated(Arc<Vec<T>>),
}

/// σ: M → H^{n+1} on a parameter box.
#[derive(Clone)]
pub struct ImmersionChart {
    domain: Domain,
    backing: Backing<PointFn, FrameFn, MinkowskiVector>,
    exact_jet: Option<JetFn>,
    orientation: f64,
}

/// σ, dσ(e_i), ν and dν(e_i) at one parameter point.
#[derive(Clone, Debug)]
pub struct Jet {
    pub sigma: MinkowskiVector,
    pub dsigma: Vec<MinkowskiVector>,
    pub nu: MinkowskiVector,
    pub dnu: Vec<MinkowskiVector>,
}

/// Unit normal of a frame with the orientation rule
/// det[dσ(e_1), ..., dσ(e_n), ν, σ] > 0 (flipped by `orientation` = −1).
pub fn unit_normal(sigma: &MinkowskiVector, frame: &[MinkowskiVector], orientation: f64) -> Result<MinkowskiVector> {
    let d = sigma.dim();
    let mut nvec = MinkowskiVector::zeros(d);
    let mut cols: Vec<MinkowskiVector> = frame.to_vec();
    cols.push(MinkowskiVector::zeros(d));
    cols.push(*sigma);
    let k = d - 2;
    for i in 0..d {
        cols[k] = MinkowskiVector::basis(d, i);
        let c = det_columns(&cols);
        nvec.set(i, if i == d - 1 { -c } else { c });
    }
    let q = nvec.norm2();
    let scale: f64 = frame.iter().map(|f| f.euclid()).product::<f64>() * sigma.euclid();
    if !(q > 1e-24 * scale * scale) {
        return Err(GeomError::Degenerate("frame does not span a hyperplane".into()));
    }
    Ok(nvec * (orientation / q.sqrt()))
}

impl std::fmt::Debug for ImmersionChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImmersionChart")
            .field("domain", &self.domain)
            .field("analytic", &self.is_analytic())
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl ImmersionChart {
    pub fn analytic(domain: Domain, map: PointFn, jac: Option<FrameFn>, orientation: i32) -> Result<Self> {
        let n = domain.dim();
        let c = map(&domain.center());
        if c.dim() != n + 2 {
            return Err(GeomError::DimensionMismatch { expected: n + 2, found: c.dim() });
        }
        if let Some(j) = &jac {
            let f = j(&domain.center());
            if f.len() != n || f.iter().any(|v| v.dim() != n + 2) {
                return Err(GeomError::BadParams("jacobian has the wrong shape".into()));
            }
        }
        Ok(ImmersionChart {
            domain,
            backing: Backing::Analytic { map, jac },
            exact_jet: None,
            orientation: sign(orientation),
        })
    }

    pub fn tabulated(domain: Domain, values: Vec<MinkowskiVector>, orientation: i32) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(GeomError::BadParams(format!("expected {} samples, got {}", domain.len(), values.len())));
        }
        let d = domain.dim() + 2;
        let values = values
            .into_iter()
            .map(|v| {
                if v.dim() != d {
                    return Err(GeomError::DimensionMismatch { expected: d, found: v.dim() });
                }
                HPoint::project(v).map(|p| p.vec())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ImmersionChart {
            domain,
            backing: Backing::Tabulated(Arc::new(values)),
            exact_jet: None,
            orientation: sign(orientation),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.domain.dim()
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Flipping the orientation drops any exact jet, which was built for the old normal.
    pub fn with_orientation(&self, o: i32) -> Self {
        let mut c = self.clone();
        if sign(o) != c.orientation {
            c.exact_jet = None;
        }
        c.orientation = sign(o);
        c
    }

    /// Replaces the finite-difference normal derivative with a closed-form jet.
    pub fn with_exact_jet(mut self, jet: JetFn) -> Result<Self> {
        self.need_analytic()?;
        self.exact_jet = Some(jet);
        Ok(self)
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.backing, Backing::Analytic { .. })
    }

    fn need_analytic(&self) -> Result<(&PointFn, Option<&FrameFn>)> {
        match &self.backing {
            Backing::Analytic { map, jac } => Ok((map, jac.as_ref())),
            Backing::Tabulated(_) => Err(GeomError::Precondition("tabulated chart only has node values".into())),
        }
    }

    /// σ(u), re-projected onto the hyperboloid.
    pub fn point(&self, u: &[f64]) -> Result<MinkowskiVector> {
        let (map, _) = self.need_analytic()?;
        Ok(HPoint::project_unchecked(map(u)).vec())
    }

    /// σ(u) and dσ(e_i)(u), analytic jacobian or fourth-order FD.
    pub fn frame(&self, u: &[f64]) -> Result<(MinkowskiVector, Vec<MinkowskiVector>)> {
        let (map, jac) = self.need_analytic()?;
        let s = HPoint::project_unchecked(map(u)).vec();
        let f = match jac {
            Some(j) => j(u),
            None => {
                let g = |w: &[f64]| HPoint::project_unchecked(map(w)).vec();
                (0..self.n()).map(|a| fd_axis(&g, u, a, self.domain.fd_step(a))).collect()
            }
        };
        Ok((s, f))
    }

    pub fn normal(&self, u: &[f64]) -> Result<MinkowskiVector> {
        if let Some(j) = &self.exact_jet {
            return Ok(j(u)?.nu);
        }
        let (s, f) = self.frame(u)?;
        unit_normal(&s, &f, self.orientation)
    }

    /// Full jet at an arbitrary parameter (analytic charts).
    pub fn jet(&self, u: &[f64]) -> Result<Jet> {
        if let Some(j) = &self.exact_jet {
            return j(u);
        }
        let (sigma, dsigma) = self.frame(u)?;
        let nu = unit_normal(&sigma, &dsigma, self.orientation)?;
        let g = |w: &[f64]| self.normal(w).unwrap_or(nu);
        let dnu = (0..self.n()).map(|a| fd_axis(&g, u, a, self.domain.fd_step(a))).collect();
        Ok(Jet { sigma, dsigma, nu, dnu })
    }

    pub fn node_values(&self) -> Result<Vec<MinkowskiVector>> {
        match &self.backing {
            Backing::Tabulated(v) => Ok(v.as_ref().clone()),
            Backing::Analytic { .. } => try_map_range(self.domain.len(), |i| self.point(&self.domain.coords(i))),
        }
    }

    /// Jets at every node.
    pub fn jets(&self) -> Result<Vec<Jet>> {
        let dom = &self.domain;
        match &self.backing {
            Backing::Analytic { .. } => try_map_range(dom.len(), |i| {
                let u = dom.coords(i);
                self.jet(&u).map_err(|e| locate(e, &u))
            }),
            Backing::Tabulated(vals) => {
                let n = self.n();
                let frames: Vec<Vec<MinkowskiVector>> =
                    crate::exec::map_range(dom.len(), |i| (0..n).map(|a| grid_deriv(dom, vals, i, a)).collect());
                let nus = try_map_range(dom.len(), |i| {
                    unit_normal(&vals[i], &frames[i], self.orientation).map_err(|e| locate(e, &dom.coords(i)))
                })?;
                Ok(crate::exec::map_range(dom.len(), |i| Jet {
                    sigma: vals[i],
                    dsigma: frames[i].clone(),
                    nu: nus[i],
                    dnu: (0..n).map(|a| grid_deriv(dom, &nus, i, a)).collect(),
                }))
            }
        }
    }

    /// Samples the chart into node values.
    pub fn tabulate(&self) -> Result<ImmersionChart> {
        let vals = self.node_values()?;
        ImmersionChart::tabulated(self.domain.clone(), vals, self.orientation as i32)
    }

    /// Nodewise ζ_σ = (σ, ν) as a lift chart (analytic charts stay analytic).
    pub fn lift(&self) -> LiftChart {
        match &self.backing {
            Backing::Analytic { .. } => {
                let c1 = self.clone();
                let c2 = self.clone();
                let map: LiftFn = Arc::new(move |u: &[f64]| {
                    let s = c1.point(u).expect("analytic chart");
                    let nu = c1.normal(u).unwrap_or_else(|_| MinkowskiVector::zeros(s.dim()));
                    UtbPoint::project_unchecked(s, nu)
                });
                let jac: LiftJacFn = Arc::new(move |u: &[f64]| {
                    let j = c2.jet(u).expect("analytic chart");
                    let base = UtbPoint::project_unchecked(j.sigma, j.nu);
                    (0..j.dsigma.len()).map(|a| UtbTangent::project(base, j.dsigma[a], j.dnu[a])).collect()
                });
                LiftChart::analytic(self.domain.clone(), map, Some(jac))
            }
            Backing::Tabulated(_) => {
                let jets = self.jets().unwrap_or_default();
                let pts = jets.iter().map(|j| UtbPoint::project_unchecked(j.sigma, j.nu)).collect();
                LiftChart::tabulated_unchecked(self.domain.clone(), pts)
            }
        }
    }
}

fn sign(o: i32) -> f64 {
    if o < 0 {
        -1.0
    } else {
        1.0
    }
}

pub(crate) fn locate(e: GeomError, u: &[f64]) -> GeomError {
    match e {
        GeomError::Degenerate(msg) => GeomError::Degenerate(format!("{msg} at node {u:?}")),
        other => other,
    }
}

/// ζ: M → T¹H^{n+1} on a parameter box.
#[derive(Clone)]
pub struct LiftChart {
    domain: Domain,
    backing: Backing<LiftFn, LiftJacFn, UtbPoint>,
}

impl LiftChart {
    pub fn analytic(domain: Domain, map: LiftFn, jac: Option<LiftJacFn>) -> Self {
        LiftChart { domain, backing: Backing::Analytic { map, jac } }
    }

    pub fn tabulated(domain: Domain, points: Vec<UtbPoint>) -> Result<Self> {
        if points.len() != domain.len() {
            return Err(GeomError::BadParams(format!("expected {} samples, got {}", domain.len(), points.len())));
        }
        Ok(Self::tabulated_unchecked(domain, points))
    }

    fn tabulated_unchecked(domain: Domain, points: Vec<UtbPoint>) -> Self {
        LiftChart { domain, backing: Backing::Tabulated(Arc::new(points)) }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.backing, Backing::Analytic { .. })
    }

    pub fn point(&self, u: &[f64]) -> Result<UtbPoint> {
        match &self.backing {
            Backing::Analytic { map, .. } => Ok(map(u)),
            Backing::Tabulated(_) => Err(GeomError::Precondition("tabulated lift only has node values".into())),
        }
    }

    /// ∂_i ζ(u) as tangents at ζ(u).
    pub fn tangents(&self, u: &[f64]) -> Result<Vec<UtbTangent>> {
        match &self.backing {
            Backing::Analytic { map, jac } => Ok(match jac {
                Some(j) => j(u),
                None => {
                    let p = map(u);
                    let g = |w: &[f64]| Pair::from(map(w));
                    (0..self.n())
                        .map(|a| {
                            let d = fd_axis(&g, u, a, self.domain.fd_step(a));
                            UtbTangent::project(p, d.0, d.1)
                        })
                        .collect()
                }
            }),
            Backing::Tabulated(_) => Err(GeomError::Precondition("tabulated lift only has node values".into())),
        }
    }

    pub fn node_points(&self) -> Vec<UtbPoint> {
        match &self.backing {
            Backing::Tabulated(p) => p.as_ref().clone(),
            Backing::Analytic { map, .. } => crate::exec::map_range(self.domain.len(), |i| map(&self.domain.coords(i))),
        }
    }

    /// Node points with their coordinate tangents.
    pub fn node_frames(&self) -> Vec<(UtbPoint, Vec<UtbTangent>)> {
        let dom = &self.domain;
        match &self.backing {
            Backing::Analytic { .. } => crate::exec::map_range(dom.len(), |i| {
                let u = dom.coords(i);
                (self.point(&u).expect("analytic"), self.tangents(&u).expect("analytic"))
            }),
            Backing::Tabulated(pts) => {
                let pairs: Vec<Pair> = pts.iter().map(|p| Pair::from(*p)).collect();
                crate::exec::map_range(dom.len(), |i| {
                    let t = (0..self.n())
                        .map(|a| {
                            let d = grid_deriv(dom, &pairs, i, a);
                            UtbTangent::project(pts[i], d.0, d.1)
                        })
                        .collect();
                    (pts[i], t)
                })
            }
        }
    }

    /// Applies a pointwise transformation, keeping the backing kind.
    pub fn map_points(&self, f: Arc<dyn Fn(&[f64], UtbPoint) -> UtbPoint + Send + Sync>) -> LiftChart {
        match &self.backing {
            Backing::Analytic { map, .. } => {
                let m = map.clone();
                LiftChart::analytic(self.domain.clone(), Arc::new(move |u: &[f64]| f(u, m(u))), None)
            }
            Backing::Tabulated(pts) => {
                let dom = self.domain.clone();
                let out = pts.iter().enumerate().map(|(i, p)| f(&dom.coords(i), *p)).collect();
                LiftChart::tabulated_unchecked(dom, out)
            }
        }
    }

    /// Projection π∘ζ as an immersion chart candidate.
    pub fn project_to_h(&self, orientation: i32) -> Result<ImmersionChart> {
        match &self.backing {
            Backing::Analytic { map, .. } => {
                let m = map.clone();
                ImmersionChart::analytic(self.domain.clone(), Arc::new(move |u: &[f64]| m(u).x()), None, orientation)
            }
            Backing::Tabulated(pts) => {
                ImmersionChart::tabulated(self.domain.clone(), pts.iter().map(|p| p.x()).collect(), orientation)
            }
        }
    }
}

/// Orientation determinant det[dσ(e_1), ..., dσ(e_n), ν, σ].
pub fn orientation_det(sigma: &MinkowskiVector, frame: &[MinkowskiVector], nu: &MinkowskiVector) -> f64 {
    let mut cols = frame.to_vec();
    cols.push(*nu);
    cols.push(*sigma);
    det_columns(&cols)
}
