//! Fundamental forms, shape operator, principal curvatures and f_σ.
//!
//! Conventions: dσ∘B = −Dν, II(V, W) = I(BV, W), III(V, W) = I(BV, BW).

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chart::{unit_normal, FrameFn, ImmersionChart, Jet, JetFn, PointFn};
use crate::config::tol;
use crate::error::{GeomError, Result};
use crate::exec::{map_range, try_map_range};
use crate::lorentz::MinkowskiVector;

/// Shape data at one parameter point.
#[derive(Clone, Debug)]
pub struct NodeShape {
    pub jet: Jet,
    /// First fundamental form (Gram of dσ).
    pub first: DMatrix<f64>,
    /// II(e_k, e_i) = −⟨dσ(e_k), dν(e_i)⟩ (not symmetrized).
    pub second: DMatrix<f64>,
    /// Shape operator in the chart basis.
    pub b: DMatrix<f64>,
    /// Principal curvatures, ascending.
    pub lambdas: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ShapeData {
    pub nodes: Vec<NodeShape>,
    pub coords: Vec<Vec<f64>>,
}

pub fn gram(v: &[MinkowskiVector]) -> DMatrix<f64> {
    let n = v.len();
    DMatrix::from_fn(n, n, |i, j| v[i].dot(&v[j]))
}

/// Smallest and largest singular value of a frame, via its (positive) Gram.
pub fn frame_singular_values(v: &[MinkowskiVector]) -> (f64, f64) {
    let e = gram(v).symmetric_eigenvalues();
    let lo = e.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0).sqrt();
    let hi = e.iter().cloned().fold(0.0, f64::max).sqrt();
    (lo, hi)
}

/// Eigenvalues of the I-self-adjoint operator with symmetric form `second`
/// (symmetrized), via Cholesky of `first`. Ascending.
pub fn generalized_eigenvalues(first: &DMatrix<f64>, second: &DMatrix<f64>) -> Result<Vec<f64>> {
    let l = first
        .clone()
        .cholesky()
        .ok_or_else(|| GeomError::Degenerate("first fundamental form not positive definite".into()))?;
    let linv = l.l().try_inverse().ok_or_else(|| GeomError::Degenerate("singular Cholesky factor".into()))?;
    let s = 0.5 * (second + second.transpose());
    let c = &linv * s * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let mut e: Vec<f64> = c.symmetric_eigenvalues().iter().cloned().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(e)
}

pub fn node_shape(jet: Jet, u: &[f64]) -> Result<NodeShape> {
    let n = jet.dsigma.len();
    let first = gram(&jet.dsigma);
    let (smin, smax) = frame_singular_values(&jet.dsigma);
    if !(smin > tol().immersion_rel * smax) {
        return Err(GeomError::RankDeficient { node: u.to_vec(), singular: smin });
    }
    let second = DMatrix::from_fn(n, n, |k, i| -jet.dsigma[k].dot(&jet.dnu[i]));
    let inv = first.clone().try_inverse().ok_or(GeomError::RankDeficient { node: u.to_vec(), singular: smin })?;
    let b = &inv * &second;
    let lambdas = generalized_eigenvalues(&first, &second)?;
    Ok(NodeShape { jet, first, second, b, lambdas })
}

/// Fundamental data at every grid node.
pub fn fundamental_data(chart: &ImmersionChart) -> Result<ShapeData> {
    let dom = chart.domain().clone();
    let jets = chart.jets()?;
    let nodes = try_map_range(jets.len(), |i| node_shape(jets[i].clone(), &dom.coords(i)))?;
    let coords = map_range(dom.len(), |i| dom.coords(i));
    Ok(ShapeData { nodes, coords })
}

/// Shape data at an arbitrary parameter of an analytic chart.
pub fn shape_at(chart: &ImmersionChart, u: &[f64]) -> Result<NodeShape> {
    node_shape(chart.jet(u)?, u)
}

impl NodeShape {
    pub fn third(&self) -> DMatrix<f64> {
        self.b.transpose() * &self.first * &self.b
    }

    /// ‖IB − BᵀI‖_∞.
    pub fn self_adjoint_residual(&self) -> f64 {
        let ib = &self.first * &self.b;
        (&ib - ib.transpose()).abs().max()
    }

    /// Residuals of ⟨ν,ν⟩ = 1, ⟨ν,σ⟩ = 0, ⟨ν,dσ(e_i)⟩ = 0.
    pub fn normal_residual(&self) -> f64 {
        let j = &self.jet;
        let mut r = (j.nu.norm2() - 1.0).abs().max(j.nu.dot(&j.sigma).abs());
        for d in &j.dsigma {
            r = r.max(j.nu.dot(d).abs());
        }
        r
    }

    pub fn f_sigma(&self, u: &[f64]) -> Result<f64> {
        let m = 1.0 - tol().curvature_margin;
        for &l in &self.lambdas {
            if l.abs() >= m {
                return Err(GeomError::LargeCurvature { node: u.to_vec(), lambda: l });
            }
        }
        let n = self.b.nrows();
        let id = DMatrix::<f64>::identity(n, n);
        let p = (&id + &self.b).determinant();
        let q = (&id - &self.b).determinant();
        Ok((p / q).ln() / (2.0 * n as f64))
    }
}

/// f_σ = (1/2n) log(det(id+B)/det(id−B)) at every node.
pub fn f_sigma(sd: &ShapeData) -> Result<Vec<f64>> {
    sd.nodes.iter().zip(&sd.coords).map(|(s, u)| s.f_sigma(u)).collect()
}

/// Eigenvalue form (1/n) Σ arctanh λ_i, for cross-checks.
pub fn f_sigma_eigen(lambdas: &[f64]) -> f64 {
    lambdas.iter().map(|l| l.atanh()).sum::<f64>() / lambdas.len() as f64
}

/// Closed-form evolved shape operator (id − tanh(t)B)^{-1}(B − tanh(t) id).
pub fn shape_evolved(b: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    let n = b.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let th = t.tanh();
    let r = &id - th * b;
    let lu = r.clone().lu();
    let det = lu.determinant();
    if !(det.abs() > 1e-12) {
        return Err(GeomError::SingularResolvent);
    }
    let inv = lu.try_inverse().ok_or(GeomError::SingularResolvent)?;
    Ok(inv * (b - th * &id))
}

/// Immersion check at every node; the worst failing node is reported.
pub fn check_immersion(chart: &ImmersionChart) -> Result<()> {
    let jets = chart.jets()?;
    let dom = chart.domain();
    let sv: Vec<(f64, f64)> = jets.iter().map(|j| frame_singular_values(&j.dsigma)).collect();
    let smax = sv.iter().map(|s| s.1).fold(0.0, f64::max);
    let (worst, &(smin, _)) =
        sv.iter().enumerate().min_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap()).expect("non-empty grid");
    if !(smin > tol().immersion_rel * smax) {
        return Err(GeomError::RankDeficient { node: dom.coords(worst), singular: smin });
    }
    Ok(())
}

/// σ_t = cosh(t)σ + sinh(t)ν. The result is checked, not assumed, to be an immersion.
pub fn normal_evolution(chart: &ImmersionChart, t: f64) -> Result<ImmersionChart> {
    if t == 0.0 {
        return Ok(chart.clone());
    }
    let (c, s) = (t.cosh(), t.sinh());
    let out = if chart.is_analytic() {
        let c1 = chart.clone();
        let c2 = chart.clone();
        let map: PointFn = Arc::new(move |u: &[f64]| {
            let (sg, f) = c1.frame(u).expect("analytic chart");
            let nu = unit_normal(&sg, &f, c1.orientation()).unwrap_or_else(|_| MinkowskiVector::zeros(sg.dim()));
            c * sg + s * nu
        });
        let jac: FrameFn = Arc::new(move |u: &[f64]| {
            let j = c2.jet(u).expect("analytic chart");
            j.dsigma.iter().zip(&j.dnu).map(|(a, b)| c * *a + s * *b).collect()
        });
        let c3 = chart.clone();
        let o = chart.orientation();
        // ν_t = sinh(t)σ + cosh(t)ν, so the evolved jet is linear in the original one.
        let jet: JetFn = Arc::new(move |u: &[f64]| {
            let j = c3.jet(u)?;
            let sigma = c * j.sigma + s * j.nu;
            let dsigma: Vec<MinkowskiVector> = j.dsigma.iter().zip(&j.dnu).map(|(a, b)| c * *a + s * *b).collect();
            let mut nu = s * j.sigma + c * j.nu;
            let mut dnu: Vec<MinkowskiVector> = j.dsigma.iter().zip(&j.dnu).map(|(a, b)| s * *a + c * *b).collect();
            if unit_normal(&sigma, &dsigma, o)?.dot(&nu) < 0.0 {
                nu = -1.0 * nu;
                dnu.iter_mut().for_each(|d| *d = -1.0 * *d);
            }
            Ok(Jet { sigma, dsigma, nu, dnu })
        });
        ImmersionChart::analytic(chart.domain().clone(), map, Some(jac), chart.orientation() as i32)?
            .with_exact_jet(jet)?
    } else {
        let jets = chart.jets()?;
        let vals = jets.iter().map(|j| c * j.sigma + s * j.nu).collect();
        ImmersionChart::tabulated(chart.domain().clone(), vals, chart.orientation() as i32)?
    };
    check_immersion(&out)?;
    Ok(out)
}

/// K(V, W) = −1 + II(V,V)II(W,W) − II(V,W)² for an I-orthonormal pair.
pub fn sectional_curvature(node: &NodeShape, v: &[f64], w: &[f64]) -> Result<f64> {
    let n = node.first.nrows();
    if n < 2 || v.len() != n || w.len() != n {
        return Err(GeomError::BadParams("sectional curvature needs n ≥ 2 and matching vectors".into()));
    }
    let (v, w) = (nalgebra::DVector::from_column_slice(v), nalgebra::DVector::from_column_slice(w));
    let i = |a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>| (a.transpose() * &node.first * b)[0];
    let r = (i(&v, &v) - 1.0).abs().max((i(&w, &w) - 1.0).abs()).max(i(&v, &w).abs());
    if r > 1e-8 {
        return Err(GeomError::NotOrthonormal(r));
    }
    let ii_form = 0.5 * (&node.second + node.second.transpose());
    let ii = |a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>| (a.transpose() * &ii_form * b)[0];
    Ok(-1.0 + ii(&v, &v) * ii(&w, &w) - ii(&v, &w).powi(2))
}

/// An I-orthonormal pair spanning the first two coordinate directions.
pub fn orthonormal_pair(node: &NodeShape) -> (Vec<f64>, Vec<f64>) {
    let g = &node.first;
    let n = g.nrows();
    let mut v = vec![0.0; n];
    v[0] = 1.0 / g[(0, 0)].sqrt();
    let mut w = vec![0.0; n];
    // e_1 − proj onto v, then normalize.
    let c = g[(0, 1)] / g[(0, 0)];
    w[0] = -c;
    w[1] = 1.0;
    let wn = (g[(1, 1)] - c * g[(0, 1)]).sqrt();
    for x in &mut w {
        *x /= wn;
    }
    (v, w)
}
