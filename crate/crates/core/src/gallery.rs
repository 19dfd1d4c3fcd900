//! Model hypersurfaces and lifts.
//!
//! Hypersurfaces over the totally geodesic plane {x_{n+1} = 0} use iterated
//! Fermi coordinates P(u) in which the boost along e_1 acts as u_0 ↦ u_0 + c.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{unit_normal, FrameFn, ImmersionChart, LiftChart, LiftFn, LiftJacFn, PointFn};
use crate::error::{GeomError, Result};
use crate::grid::Domain;
use crate::lorentz::{check_n, Isometry, MinkowskiVector};
use crate::utb::{dflow, geodesic_flow, UtbPoint, UtbTangent};

#[derive(Clone)]
pub enum GalleryChart {
    Immersion(ImmersionChart),
    Lift(LiftChart),
}

/// Parameters accepted by [`gallery`]; unset fields take the documented defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct GalleryParams {
    /// Hypersurface dimension (default 2).
    pub n: usize,
    /// Distance of the r-cap, or the cap radius of the glued curve (default 0.5).
    pub r: f64,
    /// Dimension of Q for normal_bundle_NQ (default 1).
    pub k: usize,
    /// Angle of the constant-angle curve (default π/4).
    pub theta0: f64,
    /// Half width of position coordinates (default 0.5; 1.5 for constant_angle_curve).
    pub half_width: Option<f64>,
    /// Samples per axis (default 17).
    pub samples: usize,
}

impl Default for GalleryParams {
    fn default() -> Self {
        GalleryParams { n: 2, r: 0.5, k: 1, theta0: PI / 4.0, half_width: None, samples: 17 }
    }
}

pub const GALLERY_NAMES: [&str; 7] = [
    "plane",
    "horosphere",
    "rcap",
    "sphere_vertical",
    "normal_bundle_NQ",
    "constant_angle_curve",
    "cap_circle_glued_curve",
];

pub fn gallery(name: &str, p: &GalleryParams) -> Result<GalleryChart> {
    let hw = p.half_width;
    Ok(match name {
        "plane" => GalleryChart::Immersion(plane(p.n, hw.unwrap_or(0.5), p.samples)?),
        "horosphere" => GalleryChart::Immersion(horosphere(p.n, hw.unwrap_or(0.5), p.samples)?),
        "rcap" => GalleryChart::Immersion(rcap(p.n, p.r, hw.unwrap_or(0.5), p.samples)?),
        "sphere_vertical" => GalleryChart::Lift(sphere_vertical(p.n, p.samples)?),
        "normal_bundle_NQ" => GalleryChart::Lift(normal_bundle_nq(p.n, p.k, hw.unwrap_or(0.5), p.samples)?),
        "constant_angle_curve" => {
            GalleryChart::Immersion(constant_angle_curve(p.theta0, hw.unwrap_or(1.5), p.samples)?)
        }
        "cap_circle_glued_curve" => GalleryChart::Lift(cap_circle_glued_curve(p.r, p.samples)?),
        other => return Err(GeomError::UnknownGallery(other.to_string())),
    })
}

fn e(d: usize, i: usize) -> MinkowskiVector {
    MinkowskiVector::basis(d, i)
}

/// Iterated Fermi coordinates on the plane {x_{n+1} = 0} and their derivatives.
pub fn fermi_plane(n: usize, u: &[f64]) -> (MinkowskiVector, Vec<MinkowskiVector>) {
    let d = n + 2;
    let (s, c) = (u[0].sinh(), u[0].cosh());
    let mut p = s * e(d, 0) + c * e(d, d - 1);
    let mut dp = vec![c * e(d, 0) + s * e(d, d - 1)];
    for k in 1..n {
        let (sk, ck) = (u[k].sinh(), u[k].cosh());
        for v in dp.iter_mut() {
            *v = ck * *v;
        }
        dp.push(sk * p + ck * e(d, k));
        p = ck * p + sk * e(d, k);
    }
    (p, dp)
}

/// Height function over the plane with its gradient.
pub type Height = Arc<dyn Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync>;

/// σ(u) = cosh h(u) P(u) + sinh h(u) e_{n+1}, normal oriented toward increasing h.
pub fn graph_over_plane(domain: Domain, height: Height) -> Result<ImmersionChart> {
    let n = domain.dim();
    check_n(n)?;
    let d = n + 2;
    let h1 = height.clone();
    let map: PointFn = Arc::new(move |u: &[f64]| {
        let (p, _) = fermi_plane(n, u);
        let (h, _) = h1(u);
        h.cosh() * p + h.sinh() * e(d, n)
    });
    let h2 = height.clone();
    let jac: FrameFn = Arc::new(move |u: &[f64]| {
        let (p, dp) = fermi_plane(n, u);
        let (h, g) = h2(u);
        let nrm = h.sinh() * p + h.cosh() * e(d, n);
        dp.iter().zip(&g).map(|(v, gi)| h.cosh() * *v + *gi * nrm).collect()
    });
    let c = domain.center();
    let probe = ImmersionChart::analytic(domain.clone(), map.clone(), Some(jac.clone()), 1)?;
    let (s, f) = probe.frame(&c)?;
    let nu = unit_normal(&s, &f, 1.0)?;
    let (p, _) = fermi_plane(n, &c);
    let (h, _) = height(&c);
    let up = h.sinh() * p + h.cosh() * e(d, n);
    let o = if nu.dot(&up) >= 0.0 { 1 } else { -1 };
    ImmersionChart::analytic(domain, map, Some(jac), o)
}

fn position_domain(n: usize, half_width: f64, samples: usize) -> Result<Domain> {
    Domain::cube(&vec![-half_width; n], &vec![half_width; n], samples)
}

/// Totally geodesic plane {x_{n+1} = 0}.
pub fn plane(n: usize, half_width: f64, samples: usize) -> Result<ImmersionChart> {
    rcap(n, 0.0, half_width, samples)
}

/// Equidistant hypersurface at distance r, with the increasing-distance normal
/// (principal curvatures −tanh r).
pub fn rcap(n: usize, r: f64, half_width: f64, samples: usize) -> Result<ImmersionChart> {
    check_n(n)?;
    graph_over_plane(position_domain(n, half_width, samples)?, Arc::new(move |u: &[f64]| (r, vec![0.0; u.len()])))
}

/// Horosphere ⟨x, ℓ⟩ = −1 with ℓ = (0, ..., 0, −1, 1) and the inward normal ℓ − σ (B = id).
pub fn horosphere(n: usize, half_width: f64, samples: usize) -> Result<ImmersionChart> {
    check_n(n)?;
    let d = n + 2;
    let map: PointFn = Arc::new(move |u: &[f64]| {
        let q: f64 = u.iter().map(|x| x * x).sum();
        let mut v = MinkowskiVector::zeros(d);
        for (i, x) in u.iter().enumerate() {
            v.set(i, *x);
        }
        v.set(n, -0.5 * q);
        v.set(n + 1, 1.0 + 0.5 * q);
        v
    });
    let jac: FrameFn = Arc::new(move |u: &[f64]| {
        (0..n)
            .map(|i| {
                let mut v = e(d, i);
                v.set(n, -u[i]);
                v.set(n + 1, u[i]);
                v
            })
            .collect()
    });
    let domain = position_domain(n, half_width, samples)?;
    let probe = ImmersionChart::analytic(domain.clone(), map.clone(), Some(jac.clone()), 1)?;
    let c = domain.center();
    let (s, f) = probe.frame(&c)?;
    let nu = unit_normal(&s, &f, 1.0)?;
    let mut ell = MinkowskiVector::zeros(d);
    ell.set(n, -1.0);
    ell.set(n + 1, 1.0);
    let o = if nu.dot(&(ell - s)) >= 0.0 { 1 } else { -1 };
    ImmersionChart::analytic(domain, map, Some(jac), o)
}

/// Unit sphere S^m ⊂ span(e_{first}, ..., e_{first+m}) in angle coordinates,
/// with derivatives. Angles: polar angles first, azimuth last.
fn sphere_coords(d: usize, first: usize, m: usize, a: &[f64]) -> (MinkowskiVector, Vec<MinkowskiVector>) {
    let b = |i: usize| e(d, first + i);
    match m {
        0 => (b(0), vec![]),
        1 => {
            let (s, c) = a[0].sin_cos();
            (c * b(0) + s * b(1), vec![-s * b(0) + c * b(1)])
        }
        2 => {
            let (st, ct) = a[0].sin_cos();
            let (sp, cp) = a[1].sin_cos();
            let v = st * cp * b(0) + st * sp * b(1) + ct * b(2);
            let dt = ct * cp * b(0) + ct * sp * b(1) - st * b(2);
            let dp = -st * sp * b(0) + st * cp * b(1);
            (v, vec![dt, dp])
        }
        3 => {
            let (sx, cx) = a[0].sin_cos();
            let (st, ct) = a[1].sin_cos();
            let (sp, cp) = a[2].sin_cos();
            let v = sx * st * cp * b(0) + sx * st * sp * b(1) + sx * ct * b(2) + cx * b(3);
            let dx = cx * st * cp * b(0) + cx * st * sp * b(1) + cx * ct * b(2) - sx * b(3);
            let dt = sx * ct * cp * b(0) + sx * ct * sp * b(1) - sx * st * b(2);
            let dp = -sx * st * sp * b(0) + sx * st * cp * b(1);
            (v, vec![dx, dt, dp])
        }
        _ => unreachable!("sphere dimension ≤ 3"),
    }
}

fn sphere_axes(m: usize, samples: usize) -> (Vec<f64>, Vec<f64>, Vec<usize>, Vec<bool>) {
    // Polar angles stay away from the coordinate singularities.
    let (mut lo, mut hi, mut ns, mut per) = (vec![], vec![], vec![], vec![]);
    for i in 0..m {
        if i + 1 == m {
            lo.push(0.0);
            hi.push(2.0 * PI);
            ns.push(samples.max(8) * 2);
            per.push(true);
        } else {
            lo.push(0.4);
            hi.push(PI - 0.4);
            ns.push(samples);
            per.push(false);
        }
    }
    (lo, hi, ns, per)
}

/// Fiber of T¹H over the basepoint: ζ(θ) = (x₀, v(θ)), v on the unit sphere.
pub fn sphere_vertical(n: usize, samples: usize) -> Result<LiftChart> {
    normal_bundle_nq(n, 0, 0.5, samples)
}

/// Unit normal bundle of a totally geodesic Q^k through the basepoint:
/// x ∈ Q = span(e_1..e_k, e_{n+2}) ∩ H, v ∈ S^{n−k} ⊂ span(e_{k+1}, ..., e_{n+1}).
pub fn normal_bundle_nq(n: usize, k: usize, half_width: f64, samples: usize) -> Result<LiftChart> {
    check_n(n)?;
    if k > n {
        return Err(GeomError::BadParams(format!("k = {k} exceeds n = {n}")));
    }
    let d = n + 2;
    let m = n - k;
    let (mut lo, mut hi, mut ns, mut per) =
        (vec![-half_width; k], vec![half_width; k], vec![samples; k], vec![false; k]);
    let (slo, shi, sns, sper) = sphere_axes(m, samples);
    lo.extend(slo);
    hi.extend(shi);
    ns.extend(sns);
    per.extend(sper);
    let domain = Domain::new(lo, hi, ns, per)?;
    let pos = move |u: &[f64]| -> (MinkowskiVector, Vec<MinkowskiVector>) {
        if k == 0 {
            return (e(d, d - 1), vec![]);
        }
        // Fermi coordinates of Q inside span(e_1..e_k, e_{n+2}).
        let (s, c) = (u[0].sinh(), u[0].cosh());
        let mut p = s * e(d, 0) + c * e(d, d - 1);
        let mut dp = vec![c * e(d, 0) + s * e(d, d - 1)];
        for j in 1..k {
            let (sj, cj) = (u[j].sinh(), u[j].cosh());
            for v in dp.iter_mut() {
                *v = cj * *v;
            }
            dp.push(sj * p + cj * e(d, j));
            p = cj * p + sj * e(d, j);
        }
        (p, dp)
    };
    let map: LiftFn = Arc::new(move |u: &[f64]| {
        let (x, _) = pos(&u[..k]);
        let (v, _) = sphere_coords(d, k, m, &u[k..]);
        UtbPoint::project_unchecked(x, v)
    });
    let jac: LiftJacFn = Arc::new(move |u: &[f64]| {
        let (x, dx) = pos(&u[..k]);
        let (v, dv) = sphere_coords(d, k, m, &u[k..]);
        let base = UtbPoint::project_unchecked(x, v);
        let z = MinkowskiVector::zeros(d);
        let mut out: Vec<UtbTangent> = dx.iter().map(|w| UtbTangent::project(base, *w, z)).collect();
        out.extend(dv.iter().map(|w| UtbTangent::project(base, z, *w)));
        out
    });
    Ok(LiftChart::analytic(domain, map, Some(jac)))
}

fn gamma(s: f64) -> (MinkowskiVector, MinkowskiVector) {
    let g = MinkowskiVector::from_slice(&[s.sinh(), 0.0, s.cosh()]).expect("finite");
    let dg = MinkowskiVector::from_slice(&[s.cosh(), 0.0, s.sinh()]).expect("finite");
    (g, dg)
}

/// Ψ̂(s) = (γ(s), cos θ₀ γ'(s) + sin θ₀ w) along γ(s) = (sinh s, 0, cosh s), w = e_2.
pub fn constant_angle_lift(theta0: f64, half_width: f64, samples: usize) -> Result<LiftChart> {
    let (st, ct) = theta0.sin_cos();
    let w = e(3, 1);
    let domain = Domain::cube(&[-half_width], &[half_width], samples)?;
    let map: LiftFn = Arc::new(move |u: &[f64]| {
        let (g, dg) = gamma(u[0]);
        UtbPoint::project_unchecked(g, ct * dg + st * w)
    });
    let jac: LiftJacFn = Arc::new(move |u: &[f64]| {
        let (g, dg) = gamma(u[0]);
        let base = UtbPoint::project_unchecked(g, ct * dg + st * w);
        vec![UtbTangent::project(base, dg, ct * g)]
    });
    Ok(LiftChart::analytic(domain, map, Some(jac)))
}

/// The curve π∘φ_{−s cos θ₀}∘Ψ̂(s), whose Gauss map is s ↦ p(Ψ̂(s)); its
/// curvature is tanh(s cos θ₀).
pub fn constant_angle_curve(theta0: f64, half_width: f64, samples: usize) -> Result<ImmersionChart> {
    let (st, ct) = theta0.sin_cos();
    let w = e(3, 1);
    let domain = Domain::cube(&[-half_width], &[half_width], samples)?;
    let parts = move |s: f64| {
        let (g, dg) = gamma(s);
        let v = ct * dg + st * w;
        let dv = ct * g;
        let u = -s * ct;
        (g, dg, v, dv, u)
    };
    let map: PointFn = Arc::new(move |x: &[f64]| {
        let (g, _, v, _, u) = parts(x[0]);
        u.cosh() * g + u.sinh() * v
    });
    let jac: FrameFn = Arc::new(move |x: &[f64]| {
        let (g, dg, v, dv, u) = parts(x[0]);
        let du = -ct;
        vec![u.cosh() * dg + u.sinh() * dv + du * (u.sinh() * g + u.cosh() * v)]
    });
    let probe = ImmersionChart::analytic(domain.clone(), map.clone(), Some(jac.clone()), 1)?;
    let (s0, f0) = probe.frame(&[0.0])?;
    let nu = unit_normal(&s0, &f0, 1.0)?;
    let (_, _, v0, _, _) = parts(0.0);
    let o = if nu.dot(&v0) >= 0.0 { 1 } else { -1 };
    ImmersionChart::analytic(domain, map, Some(jac), o)
}

/// Translation of length c along γ with deck map s ↦ s + c.
pub fn constant_angle_representation(c: f64) -> crate::equivariance::Representation {
    crate::equivariance::Representation::translations(vec![("gen0".into(), Isometry::boost(3, 0, c), vec![c])])
        .expect("boost is an isometry")
}

/// Smooth monotone step: 0 on (−∞, 0], 1 on [1, ∞).
fn smooth_step(x: f64) -> f64 {
    let psi = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        psi(x) / (psi(x) + psi(1.0 - x))
    }
}

/// Arclength curve with curvature k(s) obtained from the frame equations
/// σ' = T, T' = σ + kν, ν' = −kT, tabulated finely and refined by one RK4 step.
struct FrameCurve {
    h: f64,
    table: Vec<[MinkowskiVector; 3]>,
    k: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl FrameCurve {
    fn rhs(&self, s: f64, y: &[MinkowskiVector; 3]) -> [MinkowskiVector; 3] {
        let k = (self.k)(s);
        [y[1], y[0] + k * y[2], -k * y[1]]
    }

    fn rk4(&self, s: f64, y: &[MinkowskiVector; 3], h: f64) -> [MinkowskiVector; 3] {
        let add = |a: &[MinkowskiVector; 3], b: &[MinkowskiVector; 3], c: f64| {
            [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]]
        };
        let k1 = self.rhs(s, y);
        let k2 = self.rhs(s + 0.5 * h, &add(y, &k1, 0.5 * h));
        let k3 = self.rhs(s + 0.5 * h, &add(y, &k2, 0.5 * h));
        let k4 = self.rhs(s + h, &add(y, &k3, h));
        let mut out = *y;
        for i in 0..3 {
            out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }

    fn new(y0: [MinkowskiVector; 3], k: Arc<dyn Fn(f64) -> f64 + Send + Sync>, len: f64, h: f64) -> Self {
        let mut c = FrameCurve { h, table: vec![y0], k };
        let steps = (len / h).ceil() as usize + 2;
        for i in 0..steps {
            let y = c.rk4(i as f64 * h, &c.table[i], h);
            c.table.push(y);
        }
        c
    }

    fn at(&self, s: f64) -> [MinkowskiVector; 3] {
        let i = ((s / self.h).floor().max(0.0) as usize).min(self.table.len() - 1);
        let s0 = i as f64 * self.h;
        let ds = s - s0;
        if ds == 0.0 {
            self.table[i]
        } else {
            self.rk4(s0, &self.table[i], ds)
        }
    }
}

/// Lift of the glued cap/circle curve: a Lagrangian (n = 1) immersion into
/// T¹H² orthogonal to χ whose projections π∘φ_t fail to be immersions for every t.
///
/// σ₊ has curvature tanh r near s = 0, rises through a smooth monotone bump to
/// 1/tanh r at s = T₀ = 2 and stays there until s = 3. For s ≥ 0 the lift is
/// φ_r(σ₊, ν₊)(s); for s < 0 it is φ_{−r}(R₀σ₊(−s), −R₀ν₊(−s)), where R₀ is the
/// half-turn about y₀ = π(φ_r(ζ_{σ₊}(0))).
pub fn cap_circle_glued_curve(r: f64, samples: usize) -> Result<LiftChart> {
    if !(r > 0.0 && r < 3.0) {
        return Err(GeomError::BadParams("cap distance r must lie in (0, 3)".into()));
    }
    let (s1, t0, tend) = (0.3, 2.0, 3.0);
    let (lo, hi) = (r.tanh(), 1.0 / r.tanh());
    let k: Arc<dyn Fn(f64) -> f64 + Send + Sync> =
        Arc::new(move |s: f64| lo + (hi - lo) * smooth_step((s - s1) / (t0 - s1)));
    let mv = |a: [f64; 3]| MinkowskiVector::from_slice(&a).expect("finite");
    // Cap at distance r from ℓ = {x_2 = 0}, normal toward ℓ.
    let y0 = [mv([0.0, r.sinh(), r.cosh()]), mv([1.0, 0.0, 0.0]), mv([0.0, -r.cosh(), -r.sinh()])];
    let curve = Arc::new(FrameCurve::new(y0, k.clone(), tend + 0.1, 1e-3));
    let c1 = curve.clone();
    let eval = move |s: f64| -> UtbPoint {
        if s >= 0.0 {
            let y = c1.at(s);
            geodesic_flow(&UtbPoint::project_unchecked(y[0], y[2]), r)
        } else {
            let y = c1.at(-s);
            geodesic_flow(&UtbPoint::project_unchecked(half_turn(y[0]), -half_turn(y[2])), -r)
        }
    };
    let c2 = curve.clone();
    let k2 = k.clone();
    let tangent = move |s: f64| -> UtbTangent {
        if s >= 0.0 {
            let y = c2.at(s);
            let base = UtbPoint::project_unchecked(y[0], y[2]);
            let t = UtbTangent::project(base, y[1], -k2(s) * y[1]);
            dflow(&t, r)
        } else {
            let y = c2.at(-s);
            let base = UtbPoint::project_unchecked(half_turn(y[0]), -half_turn(y[2]));
            let rt = half_turn(y[1]);
            let t = UtbTangent::project(base, -rt, -k2(-s) * rt);
            dflow(&t, -r)
        }
    };
    let e1 = eval.clone();
    let map: LiftFn = Arc::new(move |u: &[f64]| e1(u[0]));
    let jac: LiftJacFn = Arc::new(move |u: &[f64]| vec![tangent(u[0])]);
    let domain = Domain::cube(&[-tend], &[tend], samples.max(7))?;
    Ok(LiftChart::analytic(domain, map, Some(jac)))
}

/// Half-turn about the time axis: x ↦ −x − 2⟨x, y₀⟩y₀ with y₀ = (0, 0, 1).
fn half_turn(x: MinkowskiVector) -> MinkowskiVector {
    MinkowskiVector::from_slice(&[-x[0], -x[1], x[2]]).expect("finite")
}

/// Seeded random small-curvature perturbation of an r-cap:
/// h(u) = r + Σ a_m sin(⟨k_m, u⟩ + φ_m).
pub fn random_perturbed(
    n: usize,
    seed: u64,
    amplitude: f64,
    r: f64,
    half_width: f64,
    samples: usize,
) -> Result<ImmersionChart> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, Vec<f64>, f64)> = (0..3)
        .map(|_| {
            let a = amplitude * rng.random_range(-1.0..1.0);
            let kv: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let ph = rng.random_range(0.0..2.0 * PI);
            (a, kv, ph)
        })
        .collect();
    graph_over_plane(position_domain(n, half_width, samples)?, height_from_modes(r, modes))
}

/// Height r + Σ a_m sin(⟨k_m, u⟩ + φ_m) with its gradient.
pub fn height_from_modes(r: f64, modes: Vec<(f64, Vec<f64>, f64)>) -> Height {
    Arc::new(move |u: &[f64]| {
        let mut h = r;
        let mut g = vec![0.0; u.len()];
        for (a, kv, ph) in &modes {
            let arg: f64 = kv.iter().zip(u).map(|(k, x)| k * x).sum::<f64>() + ph;
            h += a * arg.sin();
            for (gi, k) in g.iter_mut().zip(kv) {
                *gi += a * k * arg.cos();
            }
        }
        (h, g)
    })
}

/// Small-curvature hypersurface invariant under the boost of length c along e_1:
/// the height is c-periodic in u_0.
pub fn equivariant_wavy(
    n: usize,
    c: f64,
    amplitude: f64,
    r: f64,
    half_width: f64,
    samples: usize,
) -> Result<ImmersionChart> {
    check_n(n)?;
    let kx = 2.0 * PI / c;
    let mut k1 = vec![0.0; n];
    k1[0] = kx;
    let mut k2 = vec![0.0; n];
    k2[0] = 2.0 * kx;
    if n > 1 {
        k2[1] = 1.3;
    }
    let modes = vec![(amplitude, k1, 0.3), (0.5 * amplitude, k2, 1.1)];
    let lo: Vec<f64> = (0..n).map(|a| if a == 0 { -1.2 * c } else { -half_width }).collect();
    let hi: Vec<f64> = (0..n).map(|a| if a == 0 { 1.2 * c } else { half_width }).collect();
    let ns: Vec<usize> = (0..n).map(|a| if a == 0 { samples * 2 } else { samples }).collect();
    graph_over_plane(Domain::new(lo, hi, ns, vec![false; n])?, height_from_modes(r, modes))
}
