//! Gauss maps into the space of oriented geodesics and the integrability
//! diagnostics built on them.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::{ImmersionChart, LiftChart, LiftFn, LiftJacFn};
use crate::config::{tol, Exec};
use crate::error::{GeomError, Result, ScanFailure};
use crate::exec::{map_range, map_range_with, try_map_range};
use crate::geodesic_space::{
    ambient_cov_deriv, canonical_rep, g_metric, gram, j_para, omega, p_project, GTangent, OrientedGeodesic,
};
use crate::grid::{fd_axis, gauss_legendre, grid_deriv, Domain};
use crate::hypersurface::{fundamental_data, shape_at};
use crate::lorentz::{det_columns, BoundaryPoint, MinkowskiVector};
use crate::utb::{chi, connection_form, dflow, geodesic_flow, UtbPoint, UtbTangent};

/// A Gauss-map candidate G = p∘ζ̃ carried by a lift ζ̃.
#[derive(Clone)]
pub struct GaussChart {
    lift: LiftChart,
    hinted: bool,
    source: Option<ImmersionChart>,
}

impl GaussChart {
    /// G from a lift hint; p∘ζ̃ = G holds by construction.
    pub fn from_lift(lift: LiftChart) -> Self {
        GaussChart { lift, hinted: true, source: None }
    }

    /// G given only as geodesics; the lift is canonical_rep∘G.
    pub fn from_geodesics(domain: Domain, gmap: Arc<dyn Fn(&[f64]) -> OrientedGeodesic + Send + Sync>) -> Result<Self> {
        canonical_rep(&gmap(&domain.center()))?;
        let map: LiftFn =
            Arc::new(move |u: &[f64]| canonical_rep(&gmap(u)).unwrap_or_else(|_| UtbPoint::basepoint(u.len())));
        Ok(GaussChart { lift: LiftChart::analytic(domain, map, None), hinted: false, source: None })
    }

    /// G given by its node geodesics; the lift is tabulated canonical_rep∘G.
    pub fn from_node_geodesics(domain: Domain, nodes: &[OrientedGeodesic]) -> Result<Self> {
        let points = nodes.iter().map(canonical_rep).collect::<Result<Vec<_>>>()?;
        Ok(GaussChart { lift: LiftChart::tabulated(domain, points)?, hinted: false, source: None })
    }

    pub fn domain(&self) -> &Domain {
        self.lift.domain()
    }

    pub fn n(&self) -> usize {
        self.lift.n()
    }

    pub fn lift(&self) -> &LiftChart {
        &self.lift
    }

    pub fn has_hint(&self) -> bool {
        self.hinted
    }

    pub fn source(&self) -> Option<&ImmersionChart> {
        self.source.as_ref()
    }

    pub fn gmap(&self, u: &[f64]) -> Result<OrientedGeodesic> {
        Ok(p_project(&self.lift.point(u)?))
    }

    /// Geodesics at the grid nodes.
    pub fn node_geodesics(&self) -> Vec<OrientedGeodesic> {
        self.lift.node_points().iter().map(p_project).collect()
    }

    /// dG(e_i) at every node, represented at ζ̃(node).
    pub fn node_frames(&self) -> Vec<(UtbPoint, Vec<GTangent>)> {
        self.lift.node_frames().into_iter().map(|(p, t)| (p, t.iter().map(GTangent::from_utb).collect())).collect()
    }

    fn frame_at(&self, u: &[f64]) -> Result<(UtbPoint, Vec<GTangent>)> {
        let p = self.lift.point(u)?;
        Ok((p, self.lift.tangents(u)?.iter().map(GTangent::from_utb).collect()))
    }
}

/// G_σ = p∘ζ_σ with hint ζ_σ = (σ, ν).
pub fn gauss_map(chart: &ImmersionChart) -> Result<GaussChart> {
    // Surfaces rank and normal failures with node coordinates.
    if !chart.is_analytic() {
        fundamental_data(chart)?;
    } else {
        chart.jet(&chart.domain().center())?;
    }
    Ok(GaussChart { lift: chart.lift(), hinted: true, source: Some(chart.clone()) })
}

/// max over nodes and i < j of |Ω(dG e_i, dG e_j)|.
pub fn lagrangian_residual(g: &GaussChart) -> f64 {
    let frames = g.node_frames();
    frames
        .iter()
        .map(|(_, f)| {
            let mut r: f64 = 0.0;
            for i in 0..f.len() {
                for j in i + 1..f.len() {
                    r = r.max(omega(&f[i], &f[j]).map(f64::abs).unwrap_or(f64::INFINITY));
                }
            }
            r
        })
        .fold(0.0, f64::max)
}

/// Pullback Gram 𝔾(dG e_i, dG e_j) at every node.
pub fn pullback_grams(g: &GaussChart) -> Result<Vec<DMatrix<f64>>> {
    g.node_frames().iter().map(|(_, f)| gram(f)).collect()
}

/// Smallest eigenvalue of the pullback Gram over the grid (positive ⇒ Riemannian).
pub fn riemannian_residual(g: &GaussChart) -> Result<f64> {
    Ok(pullback_grams(g)?
        .into_iter()
        .map(|m| m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min))
}

/// Numbers of positive and negative eigenvalues of the pullback Gram per node;
/// eigenvalues within `zero_tol` of zero count as neither.
pub fn pullback_signature(g: &GaussChart, zero_tol: f64) -> Result<Vec<(usize, usize)>> {
    Ok(pullback_grams(g)?
        .into_iter()
        .map(|m| {
            let e = m.symmetric_eigenvalues();
            (e.iter().filter(|x| **x > zero_tol).count(), e.iter().filter(|x| **x < -zero_tol).count())
        })
        .collect())
}

/// ‖Ī − (I − III)‖_∞ over the nodes of σ, with Ī the pullback of 𝔾 by G_σ.
pub fn first_form_identity_residual(chart: &ImmersionChart) -> Result<f64> {
    let sd = fundamental_data(chart)?;
    let g = gauss_map(chart)?;
    let grams = pullback_grams(&g)?;
    Ok(sd.nodes.iter().zip(&grams).map(|(s, ib)| (ib - (&s.first - s.third())).abs().max()).fold(0.0, f64::max))
}

/// ‖dζ_σ(W) − (dσ(W)^H − dσ(BW)^V)‖ over nodes and coordinate directions.
pub fn lift_differential_residual(chart: &ImmersionChart) -> Result<f64> {
    let sd = fundamental_data(chart)?;
    let frames = chart.lift().node_frames();
    let mut r: f64 = 0.0;
    for (s, (_, t)) in sd.nodes.iter().zip(&frames) {
        for (i, ti) in t.iter().enumerate() {
            let mut bw = MinkowskiVector::zeros(s.jet.sigma.dim());
            for k in 0..s.b.nrows() {
                bw += s.b[(k, i)] * s.jet.dsigma[k];
            }
            r = r.max((ti.xd - s.jet.dsigma[i]).euclid()).max((ti.vd + bw).euclid());
        }
    }
    Ok(r)
}

/// Residuals of dζ against both 𝕁-eigenspaces over the nodes: (max ‖𝕁X − X‖, max ‖𝕁X + X‖).
pub fn j_eigen_residuals(lift: &LiftChart) -> (f64, f64) {
    let mut plus: f64 = 0.0;
    let mut minus: f64 = 0.0;
    for (_, t) in lift.node_frames() {
        for x in &t {
            let x = GTangent::from_utb(x);
            let jx = j_para(&x);
            let scale = 1.0 + x.norm();
            plus = plus.max(jx.rep().sub(x.rep()).split_norm() / scale);
            minus = minus.max(jx.rep().add(x.rep()).split_norm() / scale);
        }
    }
    (plus, minus)
}

/// Result of integrating du = −ζ̃*ω.
#[derive(Clone)]
pub struct FlatSection {
    /// ζ = φ_u∘ζ̃.
    pub lift: LiftChart,
    /// u at the grid nodes.
    pub u_nodes: Vec<f64>,
    /// Largest circulation of ζ̃*ω over elementary cells.
    pub path_residual: f64,
}

/// ζ̃*ω(∂_i) at every node.
fn connection_pullback_nodes(lift: &LiftChart) -> Vec<Vec<f64>> {
    lift.node_frames().iter().map(|(_, t)| t.iter().map(connection_form).collect()).collect()
}

/// ζ̃*ω along `axis` at parameter u (analytic lifts).
fn eta_at(lift: &LiftChart, u: &[f64], axis: usize) -> f64 {
    lift.tangents(u).map(|t| connection_form(&t[axis])).unwrap_or(f64::NAN)
}

/// ∫ ζ̃*ω along the axis segment from u to u + len·e_axis.
fn eta_segment(lift: &LiftChart, u: &[f64], axis: usize, len: f64) -> f64 {
    let f = |s: f64| {
        let mut w = u.to_vec();
        w[axis] += s;
        eta_at(lift, &w, axis)
    };
    gauss_legendre(&f, 0.0, len)
}

/// Increment of ∫η across the grid edge from node i to its +1 neighbor on `axis`.
fn edge_integral(lift: &LiftChart, dom: &Domain, eta: &[Vec<f64>], i: usize, axis: usize) -> f64 {
    let h = dom.spacing(axis);
    if lift.is_analytic() {
        eta_segment(lift, &dom.coords(i), axis, h)
    } else {
        let j = dom.neighbor(i, axis, 1).expect("edge inside grid");
        0.5 * h * (eta[i][axis] + eta[j][axis])
    }
}

/// Flat section ζ = φ_u∘ζ̃ with u(basepoint) = u0 and du = −ζ̃*ω, integrated along
/// axis-ordered lattice paths (axis 0 first). On a domain without periodic axes
/// a cell circulation above tolerance is an error; otherwise it is reported.
pub fn integrate_flat_section(g: &GaussChart, basepoint: usize, u0: f64) -> Result<FlatSection> {
    let lift = g.lift.clone();
    let dom = lift.domain().clone();
    if basepoint >= dom.len() {
        return Err(GeomError::BadParams(format!("basepoint index {basepoint} outside the grid")));
    }
    let eta = connection_pullback_nodes(&lift);
    let n = dom.dim();
    let bm = dom.multi(basepoint);
    let u_nodes: Vec<f64> = map_range(dom.len(), |i| {
        let target = dom.multi(i);
        let mut cur = bm.clone();
        let mut u = u0;
        for a in 0..n {
            while cur[a] != target[a] {
                let idx = dom.flat(&cur);
                if cur[a] < target[a] {
                    u -= edge_integral(&lift, &dom, &eta, idx, a);
                    cur[a] += 1;
                } else {
                    cur[a] -= 1;
                    u += edge_integral(&lift, &dom, &eta, dom.flat(&cur), a);
                }
            }
        }
        u
    });
    let path_residual = cell_circulation(&lift, &dom, &eta);
    if !dom.any_periodic() && path_residual > tol().lagrangian {
        return Err(GeomError::PathDependent { residual: path_residual, tol: tol().lagrangian });
    }
    let out = if lift.is_analytic() {
        let d1 = dom.clone();
        let l1 = lift.clone();
        let un1 = u_nodes.clone();
        let ufun = Arc::new(move |w: &[f64]| -> f64 {
            // Nearest node, then axis-ordered segments to w.
            let m: Vec<usize> = (0..d1.dim())
                .map(|a| {
                    let k = ((w[a] - d1.lo[a]) / d1.spacing(a)).round();
                    (k.max(0.0) as usize).min(d1.samples[a] - 1)
                })
                .collect();
            let node = d1.flat(&m);
            let mut cur = d1.coords(node);
            let mut u = un1[node];
            for a in 0..d1.dim() {
                let len = w[a] - cur[a];
                if len != 0.0 {
                    u -= eta_segment(&l1, &cur, a, len);
                    cur[a] = w[a];
                }
            }
            u
        });
        let (l2, u2) = (lift.clone(), ufun.clone());
        let map: LiftFn = Arc::new(move |w: &[f64]| geodesic_flow(&l2.point(w).expect("analytic"), u2(w)));
        let (l3, u3) = (lift.clone(), ufun);
        let jac: LiftJacFn = Arc::new(move |w: &[f64]| {
            let u = u3(w);
            let t = l3.tangents(w).expect("analytic");
            t.iter()
                .map(|x| {
                    let moved = dflow(x, u);
                    let eta = connection_form(x);
                    let c = chi(moved.base()).scale(eta);
                    moved.sub(&c)
                })
                .collect()
        });
        LiftChart::analytic(dom.clone(), map, Some(jac))
    } else {
        let pts = lift.node_points();
        let moved = pts.iter().zip(&u_nodes).map(|(p, u)| geodesic_flow(p, *u)).collect();
        LiftChart::tabulated(dom.clone(), moved)?
    };
    Ok(FlatSection { lift: out, u_nodes, path_residual })
}

/// Largest |∮ ζ̃*ω| over elementary grid cells.
pub fn cell_circulation(lift: &LiftChart, dom: &Domain, eta: &[Vec<f64>]) -> f64 {
    let cells = dom.cells();
    map_range(cells.len(), |c| {
        let (i, a, b) = cells[c];
        let ia = dom.neighbor(i, a, 1).expect("cell corner");
        let ib = dom.neighbor(i, b, 1).expect("cell corner");
        let circ = edge_integral(lift, dom, eta, i, a) + edge_integral(lift, dom, eta, ia, b)
            - edge_integral(lift, dom, eta, ib, a)
            - edge_integral(lift, dom, eta, i, b);
        circ.abs()
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Cell circulation of ζ̃*ω for a Gauss chart (its Lagrangian defect).
pub fn flat_section_defect(g: &GaussChart) -> f64 {
    let eta = connection_pullback_nodes(&g.lift);
    cell_circulation(&g.lift, g.domain(), &eta)
}

/// Outcome of [`desingularize_and_project`].
#[derive(Clone)]
pub struct Desingularized {
    pub t: f64,
    pub chart: ImmersionChart,
    /// Refined boundary of the admissible interval containing t, when the
    /// neighboring scan sample toward zero failed.
    pub boundary: Option<f64>,
}

pub const SCAN_LO: f64 = -5.0;
pub const SCAN_HI: f64 = 5.0;
pub const SCAN_SAMPLES: usize = 1001;

/// Scan times ordered by |t|, ties to the positive value.
pub fn scan_times() -> Vec<f64> {
    let h = (SCAN_HI - SCAN_LO) / (SCAN_SAMPLES - 1) as f64;
    let mut ts: Vec<f64> = (0..SCAN_SAMPLES).map(|i| SCAN_LO + i as f64 * h).collect();
    ts.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap().then(b.partial_cmp(a).unwrap()));
    ts
}

/// Admissibility of π∘φ_t∘ζ on the grid: relative singular values and no sign
/// change of det[dσ_t, v_t, x_t] across grid edges.
fn scan_one(
    frames: &[(UtbPoint, Vec<UtbTangent>)],
    dom: &Domain,
    edges: &[(usize, usize)],
    t: f64,
) -> std::result::Result<f64, ScanFailure> {
    let (c, s) = (t.cosh(), t.sinh());
    let dets_sv: Vec<(f64, f64, f64)> = frames
        .iter()
        .map(|(p, tan)| {
            let d: Vec<MinkowskiVector> = tan.iter().map(|x| c * x.xd + s * x.vd).collect();
            let (lo, hi) = crate::hypersurface::frame_singular_values(&d);
            let mut cols = d;
            cols.push(s * p.x() + c * p.v());
            cols.push(c * p.x() + s * p.v());
            (det_columns(&cols), lo, hi)
        })
        .collect();
    let smax = dets_sv.iter().map(|x| x.2).fold(0.0, f64::max);
    let thr = tol().immersion_rel * smax;
    let (worst, wmin) = dets_sv
        .iter()
        .enumerate()
        .map(|(i, x)| (i, x.1))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("non-empty grid");
    let flip = edges.iter().find(|(i, j)| dets_sv[*i].0 * dets_sv[*j].0 <= 0.0);
    if !(wmin > thr) || smax == 0.0 {
        return Err(ScanFailure { t, node: dom.coords(worst), min_singular: wmin, orientation_flip: flip.is_some() });
    }
    if let Some((i, j)) = flip {
        let k = if dets_sv[*i].1 <= dets_sv[*j].1 { *i } else { *j };
        return Err(ScanFailure { t, node: dom.coords(k), min_singular: dets_sv[k].1, orientation_flip: true });
    }
    Ok(dets_sv[0].0.signum())
}

/// Smallest |t| (ties to positive) with π∘φ_t∘ζ an immersion at every node,
/// and the projected chart with ν = the v-component of φ_t∘ζ.
pub fn desingularize_and_project(zeta: &LiftChart) -> Result<Desingularized> {
    let dom = zeta.domain().clone();
    let frames = zeta.node_frames();
    let om = frames.iter().flat_map(|(_, t)| t.iter().map(|x| connection_form(x).abs())).fold(0.0, f64::max);
    if om > tol().lagrangian.max(1e3 * tol().tangent) {
        return Err(GeomError::Precondition(format!("lift is not orthogonal to the flow (|ω| up to {om:.3e})")));
    }
    let edges = dom.edges();
    let project = |t: f64, sign: f64| -> Result<ImmersionChart> {
        let moved = zeta.map_points(Arc::new(move |_u: &[f64], p: UtbPoint| geodesic_flow(&p, t)));
        moved.project_to_h(sign as i32)
    };
    // Riemannian pullback: t = 0 is guaranteed admissible.
    let riemannian = frames.iter().all(|(_, t)| {
        let f: Vec<GTangent> = t.iter().map(GTangent::from_utb).collect();
        gram(&f).map(|m| m.symmetric_eigenvalues().iter().all(|e| *e > 0.0)).unwrap_or(false)
    });
    if riemannian {
        if let Ok(sign) = scan_one(&frames, &dom, &edges, 0.0) {
            return Ok(Desingularized { t: 0.0, chart: project(0.0, sign)?, boundary: None });
        }
    }
    let ts = scan_times();
    let results: Vec<std::result::Result<f64, ScanFailure>> =
        map_range(ts.len(), |k| scan_one(&frames, &dom, &edges, ts[k]));
    let mut report = Vec::new();
    for (k, r) in results.iter().enumerate() {
        match r {
            Ok(sign) => {
                let t = ts[k];
                let boundary = refine_boundary(&frames, &dom, &edges, t, &results, &ts);
                return Ok(Desingularized { t, chart: project(t, *sign)?, boundary });
            }
            Err(f) => report.push(f.clone()),
        }
    }
    Err(GeomError::NoAdmissibleTime { lo: SCAN_LO, hi: SCAN_HI, report })
}

/// Bisection between t and the adjacent scan sample toward zero, when that
/// sample failed. The predicate is boolean, so bracketing halves the interval.
fn refine_boundary(
    frames: &[(UtbPoint, Vec<UtbTangent>)],
    dom: &Domain,
    edges: &[(usize, usize)],
    t: f64,
    results: &[std::result::Result<f64, ScanFailure>],
    ts: &[f64],
) -> Option<f64> {
    let h = (SCAN_HI - SCAN_LO) / (SCAN_SAMPLES - 1) as f64;
    let toward = t - h * t.signum();
    let k = ts.iter().position(|x| (x - toward).abs() < 0.5 * h)?;
    results[k].as_ref().err()?;
    let (mut bad, mut good) = (toward, t);
    for _ in 0..40 {
        let mid = 0.5 * (bad + good);
        if scan_one(frames, dom, edges, mid).is_ok() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some(good)
}

/// Nodes of a hyperbolic Gauss map, normalize(σ ± ν) on the boundary.
#[derive(Clone, Debug)]
pub struct BoundaryChart {
    pub domain: Domain,
    pub points: Vec<BoundaryPoint>,
}

pub fn hyperbolic_gauss(chart: &ImmersionChart, sign: i32) -> Result<BoundaryChart> {
    let s = if sign < 0 { -1.0 } else { 1.0 };
    let jets = chart.jets()?;
    let points = jets.iter().map(|j| BoundaryPoint::normalize_unchecked(j.sigma + s * j.nu)).collect();
    Ok(BoundaryChart { domain: chart.domain().clone(), points })
}

fn normalized_derivative(w: &MinkowskiVector, dw: &MinkowskiVector) -> MinkowskiVector {
    let l = w.last();
    *dw * (1.0 / l) - *w * (dw.last() / (l * l))
}

/// Compares the FD differential of normalize(σ ± ν) with the normalized image of
/// dσ∘(id ∓ B). Returns the largest discrepancy and the smallest singular value
/// of the closed-form differential (analytic charts).
pub fn hyperbolic_gauss_differential_check(chart: &ImmersionChart, sign: i32) -> Result<(f64, f64)> {
    let s = if sign < 0 { -1.0 } else { 1.0 };
    let dom = chart.domain().clone();
    let res = try_map_range(dom.len(), |i| -> Result<(f64, f64)> {
        let u = dom.coords(i);
        let sh = shape_at(chart, &u)?;
        let w = sh.jet.sigma + s * sh.jet.nu;
        let map = |x: &[f64]| {
            let j = chart.jet(x).map(|j| j.sigma + s * j.nu).unwrap_or(w);
            BoundaryPoint::normalize_unchecked(j).vec()
        };
        let n = dom.dim();
        let mut err: f64 = 0.0;
        let mut cols = Vec::new();
        for a in 0..n {
            let fd = fd_axis(&map, &u, a, dom.fd_step(a));
            let mut dw = sh.jet.dsigma[a];
            for k in 0..n {
                dw -= s * sh.b[(k, a)] * sh.jet.dsigma[k];
            }
            let closed = normalized_derivative(&w, &dw);
            err = err.max((fd - closed).euclid());
            cols.push(dw);
        }
        let smin = crate::hypersurface::frame_singular_values(&cols).0;
        Ok((err, smin))
    })?;
    Ok((res.iter().map(|r| r.0).fold(0.0, f64::max), res.iter().map(|r| r.1).fold(f64::INFINITY, f64::min)))
}

/// Smallest pairwise distance between the boundary nodes (injectivity proxy).
pub fn min_pairwise_distance(b: &BoundaryChart) -> f64 {
    let p = &b.points;
    let per: Vec<f64> =
        map_range(p.len(), |i| (i + 1..p.len()).map(|j| p[i].distance(&p[j])).fold(f64::INFINITY, f64::min));
    per.into_iter().fold(f64::INFINITY, f64::min)
}

/// Mean curvature of G(M) ⊂ 𝒢 at one parameter, computed two ways.
#[derive(Clone, Debug)]
pub struct MeanCurvature {
    pub u: Vec<f64>,
    /// (1/n) tr_Ī of the normal part of 𝔻 dG.
    pub trace: GTangent,
    /// −𝕁 dG(Ī⁻¹ df_σ).
    pub closed: GTangent,
    /// df_σ in chart coordinates.
    pub df: Vec<f64>,
    /// Ī in chart coordinates.
    pub metric: DMatrix<f64>,
    pub frame: Vec<GTangent>,
}

impl MeanCurvature {
    pub fn distance(&self) -> f64 {
        self.trace.rep().sub(self.closed.rep()).split_norm()
    }
}

/// Richardson tolerance for nested covariant derivatives.
const COV_REL_TOL: f64 = 1e-4;

fn combine(frame: &[GTangent], coeffs: &DVector<f64>, anchor: UtbPoint) -> GTangent {
    let mut acc = GTangent::zero(anchor).rep().clone();
    for (x, c) in frame.iter().zip(coeffs.iter()) {
        acc = acc.add(&x.rep().scale(*c));
    }
    GTangent::from_utb(&acc)
}

/// −𝕁 dG(Ī⁻¹ df).
pub fn closed_form_mean_curvature(frame: &[GTangent], metric: &DMatrix<f64>, df: &[f64]) -> Result<GTangent> {
    let anchor = *frame[0].anchor();
    let grad = metric
        .clone()
        .lu()
        .solve(&DVector::from_column_slice(df))
        .ok_or_else(|| GeomError::Degenerate("pullback metric singular".into()))?;
    Ok(j_para(&combine(frame, &grad, anchor)).scale(-1.0))
}

/// Both mean-curvature computations at u (analytic source charts).
pub fn mean_curvature_at(g: &GaussChart, u: &[f64]) -> Result<MeanCurvature> {
    let chart =
        g.source().ok_or_else(|| GeomError::Precondition("mean curvature needs the source immersion".into()))?;
    if !chart.is_analytic() {
        return Err(GeomError::Precondition("pointwise mean curvature needs an analytic chart".into()));
    }
    let dom = g.domain();
    let n = g.n();
    let (anchor, frame) = g.frame_at(u)?;
    let metric = gram(&frame)?;
    if metric.clone().cholesky().is_none() {
        return Err(GeomError::Precondition(format!("Gauss map not Riemannian at {u:?}")));
    }
    let inv = metric.clone().try_inverse().ok_or_else(|| GeomError::Degenerate("pullback metric singular".into()))?;
    let normals: Vec<GTangent> = frame.iter().map(j_para).collect();
    let m = -&metric;
    let minv = m.try_inverse().ok_or_else(|| GeomError::Degenerate("normal Gram singular".into()))?;
    let lift = g.lift();
    let anchor_fn = |w: &[f64]| lift.point(w).expect("analytic");
    let mut total = DVector::<f64>::zeros(n);
    for i in 0..n {
        let mut dir = vec![0.0; n];
        dir[i] = 1.0;
        for j in 0..n {
            if inv[(i, j)] == 0.0 {
                continue;
            }
            let field = |w: &[f64]| lift.tangents(w).expect("analytic")[j].chi_free();
            let z = ambient_cov_deriv(&anchor_fn, &field, u, &dir, dom.fd_step(i), COV_REL_TOL)?;
            let pair: Vec<f64> = normals.iter().map(|nk| g_metric(nk, &z)).collect::<Result<_>>()?;
            let coeff = &minv * DVector::from_vec(pair);
            total += inv[(i, j)] * coeff;
        }
    }
    let trace = combine(&normals, &(total / n as f64), anchor);
    let fs = |w: &[f64]| shape_at(chart, w).and_then(|s| s.f_sigma(w)).unwrap_or(f64::NAN);
    let df: Vec<f64> = (0..n).map(|a| fd_axis(&fs, u, a, dom.fd_step(a))).collect();
    let closed = closed_form_mean_curvature(&frame, &metric, &df)?;
    Ok(MeanCurvature { u: u.to_vec(), trace, closed, df, metric, frame })
}

/// Both mean-curvature computations at every node.
pub fn mean_curvature_g(g: &GaussChart) -> Result<Vec<MeanCurvature>> {
    let dom = g.domain().clone();
    try_map_range(dom.len(), |i| mean_curvature_at(g, &dom.coords(i)))
}

/// Per-node components of G*(Ω(H̄, ·)) with the diagnostics that go with it.
#[derive(Clone, Debug)]
pub struct MaslovField {
    pub one_form: Vec<Vec<f64>>,
    pub fsigma: Option<Vec<f64>>,
    /// ‖oneForm − df_σ‖_∞.
    pub identity_residual: Option<f64>,
    /// Largest |∂_a μ_b − ∂_b μ_a| by grid differences (0 for n = 1).
    pub closedness_residual: f64,
    /// Largest distance between the two mean-curvature computations.
    pub mean_curvature_gap: f64,
}

/// Maslov 1-form Ω(H̄, dG e_i) from the trace form of H̄.
pub fn maslov_form(g: &GaussChart) -> Result<MaslovField> {
    let mc = mean_curvature_g(g)?;
    let one_form: Vec<Vec<f64>> = mc
        .iter()
        .map(|m| m.frame.iter().map(|x| omega(&m.trace, x)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let chart = g.source().expect("checked by mean_curvature_g");
    let sd = fundamental_data(chart)?;
    let fsigma = crate::hypersurface::f_sigma(&sd)?;
    let identity_residual =
        mc.iter().zip(&one_form).flat_map(|(m, w)| m.df.iter().zip(w).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
    let closedness_residual = closedness(g.domain(), &one_form);
    let mean_curvature_gap = mc.iter().map(MeanCurvature::distance).fold(0.0, f64::max);
    Ok(MaslovField {
        one_form,
        fsigma: Some(fsigma),
        identity_residual: Some(identity_residual),
        closedness_residual,
        mean_curvature_gap,
    })
}

/// max |∂_a μ_b − ∂_b μ_a| over nodes by sixth-order grid differences.
pub fn closedness(dom: &Domain, form: &[Vec<f64>]) -> f64 {
    let n = dom.dim();
    let mut r: f64 = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let ca: Vec<f64> = form.iter().map(|w| w[a]).collect();
            let cb: Vec<f64> = form.iter().map(|w| w[b]).collect();
            for i in 0..dom.len() {
                r = r.max((grid_deriv(dom, &cb, i, a) - grid_deriv(dom, &ca, i, b)).abs());
            }
        }
    }
    r
}

/// Offsets t(u) with φ_t(a(u)) = b(u) at the nodes of two lifts of one Gauss map.
pub fn fiber_offsets(a: &LiftChart, b: &LiftChart) -> Result<Vec<f64>> {
    let pa = a.node_points();
    let pb = b.node_points();
    pa.iter().zip(&pb).map(|(x, y)| crate::geodesic_space::fiber_offset(x, y)).collect()
}

/// Largest nodal distance between ζ and ζ_ref after the best single flow shift.
pub fn aligned_distance(zeta: &LiftChart, reference: &LiftChart) -> Result<(f64, f64)> {
    let offs = fiber_offsets(zeta, reference)?;
    let shift = offs.iter().sum::<f64>() / offs.len() as f64;
    let pz = zeta.node_points();
    let pr = reference.node_points();
    let d = pz.iter().zip(&pr).map(|(a, b)| geodesic_flow(a, shift).max_abs_diff(b)).fold(0.0, f64::max);
    Ok((shift, d))
}

/// Sequential or parallel scan over an explicit list of flow times; exposed for benches.
pub fn scan_admissibility(zeta: &LiftChart, times: &[f64], exec: Exec) -> Vec<bool> {
    let dom = zeta.domain().clone();
    let frames = zeta.node_frames();
    let edges = dom.edges();
    map_range_with(exec, times.len(), |k| scan_one(&frames, &dom, &edges, times[k]).is_ok())
}
