//! Representations, holonomy of the pulled-back geodesic fibration, the
//! equivariant integrability verdict and the flux of Lagrangian isotopies.

use nalgebra::{DMatrix, DVector};

use crate::chart::{ImmersionChart, LiftChart};
use crate::config::tol;
use crate::error::{GeomError, Result};
use crate::exec::try_map_range;
use crate::gauss::{desingularize_and_project, gauss_map, integrate_flat_section, mean_curvature_at, GaussChart};
use crate::geodesic_space::{fiber_offset, omega, GTangent};
use crate::grid::{fornberg_weights, simpson, Domain};
use crate::hypersurface::shape_at;
use crate::lorentz::Isometry;
use crate::utb::{connection_form, UtbPoint, UtbTangent};

/// Affine map u ↦ A u + b of the parameter box.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: DMatrix<f64>,
    pub translation: Vec<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, translation: Vec<f64>) -> Result<Self> {
        let n = translation.len();
        if linear.nrows() != n || linear.ncols() != n {
            return Err(GeomError::DimensionMismatch { expected: n, found: linear.nrows() });
        }
        if linear.clone().try_inverse().is_none() {
            return Err(GeomError::BadParams("deck map linear part is singular".into()));
        }
        Ok(AffineMap { linear, translation })
    }

    pub fn translation(t: Vec<f64>) -> Self {
        let n = t.len();
        AffineMap { linear: DMatrix::identity(n, n), translation: t }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let v = &self.linear * DVector::from_column_slice(u);
        v.iter().zip(&self.translation).map(|(a, b)| a + b).collect()
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self.linear.clone().try_inverse().expect("validated at construction");
        let t = -(&inv * DVector::from_column_slice(&self.translation));
        AffineMap { linear: inv, translation: t.iter().cloned().collect() }
    }
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub iso: Isometry,
    pub deck: AffineMap,
}

/// Generators ρ(α) together with their deck maps on the parameter box.
#[derive(Clone, Debug)]
pub struct Representation {
    pub generators: Vec<Generator>,
}

impl Representation {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(GeomError::BadParams(format!("duplicate generator {:?}", g.name)));
            }
        }
        Ok(Representation { generators })
    }

    /// Generators whose deck maps are translations.
    pub fn translations(gens: Vec<(String, Isometry, Vec<f64>)>) -> Result<Self> {
        Self::new(
            gens.into_iter().map(|(name, iso, t)| Generator { name, iso, deck: AffineMap::translation(t) }).collect(),
        )
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    fn get(&self, idx: usize) -> Result<&Generator> {
        self.generators.get(idx).ok_or_else(|| GeomError::BadParams(format!("no generator {idx}")))
    }
}

/// A loop in the quotient: a closed polyline in one chart, or a generator word
/// read from a basepoint (letters are (generator index, ±1)).
#[derive(Clone, Debug, PartialEq)]
pub enum Loop {
    Polyline(Vec<Vec<f64>>),
    Word { basepoint: Vec<f64>, letters: Vec<(usize, i32)> },
}

impl Loop {
    pub fn generator(basepoint: Vec<f64>, idx: usize) -> Self {
        Loop::Word { basepoint, letters: vec![(idx, 1)] }
    }

    fn check_closed(&self) -> Result<()> {
        if let Loop::Polyline(p) = self {
            if p.len() < 2 {
                return Err(GeomError::OpenLoop(f64::INFINITY));
            }
            let gap = p[0].iter().zip(p.last().unwrap()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if gap > tol().tangent {
                return Err(GeomError::OpenLoop(gap));
            }
        }
        Ok(())
    }
}

/// A holonomy value with the spread of its sampled estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolonomyEstimate {
    pub value: f64,
    pub spread: f64,
}

/// Deterministic points p of the box with α·p also in the box (Halton sequence).
pub fn sample_points(dom: &Domain, deck: &AffineMap, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [usize; 3] = [2, 3, 5];
    let halton = |mut i: usize, b: usize| {
        let (mut f, mut r) = (1.0, 0.0);
        while i > 0 {
            f /= b as f64;
            r += f * (i % b) as f64;
            i /= b;
        }
        r
    };
    let n = dom.dim();
    // Shrink slightly so derivative stencils stay inside analytic domains.
    let margin: Vec<f64> = (0..n).map(|a| 0.02 * dom.width(a)).collect();
    let inside = |u: &[f64]| (0..n).all(|a| u[a] >= dom.lo[a] + margin[a] && u[a] <= dom.hi[a] - margin[a]);
    let mut out = Vec::new();
    for i in 1..4096 {
        let u: Vec<f64> = (0..n).map(|a| dom.lo[a] + halton(i, PRIMES[a]) * dom.width(a)).collect();
        if inside(&u) && inside(&deck.apply(&u)) {
            out.push(u);
            if out.len() == count {
                break;
            }
        }
    }
    out
}

/// Largest distance between G(α·p) and ρ(α)·G(p) over sample points.
pub fn equivariance_defect(g: &GaussChart, gen: &Generator, points: &[Vec<f64>]) -> Result<f64> {
    let mut d: f64 = 0.0;
    for p in points {
        let a = g.gmap(&gen.deck.apply(p))?;
        let b = g.gmap(p)?.apply(&gen.iso);
        d = d.max(a.distance(&b));
    }
    Ok(d)
}

/// Number of points used for f-averaging.
pub const F_SAMPLES: usize = 16;

/// t_α = f_σ(α·p) − f_σ(p), averaged over sample points.
pub fn holonomy_from_f(chart: &ImmersionChart, rep: &Representation, gen_idx: usize) -> Result<HolonomyEstimate> {
    let gen = rep.get(gen_idx)?;
    let pts = sample_points(chart.domain(), &gen.deck, F_SAMPLES);
    if pts.is_empty() {
        return Err(GeomError::Precondition("no sample point p with α·p inside the domain".into()));
    }
    let g = gauss_map(chart)?;
    let defect = equivariance_defect(&g, gen, &pts)?;
    let t = 10.0 * tol().holonomy;
    if defect > t {
        return Err(GeomError::Spread { spread: defect, tol: t });
    }
    let f = |u: &[f64]| shape_at(chart, u).and_then(|s| s.f_sigma(u));
    let vals: Vec<f64> = pts.iter().map(|p| Ok(f(&gen.deck.apply(p))? - f(p)?)).collect::<Result<_>>()?;
    let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    let spread = hi - lo;
    if spread > t {
        return Err(GeomError::Spread { spread, tol: t });
    }
    Ok(HolonomyEstimate { value: vals.iter().sum::<f64>() / vals.len() as f64, spread })
}

/// Quadrature samples per path segment (odd, for Simpson).
pub const PATH_SAMPLES: usize = 65;

/// ∫ of a 1-form along the straight segment a → b by composite Simpson;
/// `form(u, d)` evaluates the form at u on the direction d.
fn segment_integral(form: &dyn Fn(&[f64], &[f64]) -> Result<f64>, a: &[f64], b: &[f64], samples: usize) -> Result<f64> {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let m = samples.max(3) | 1;
    let vals: Vec<f64> = (0..m)
        .map(|k| {
            let s = k as f64 / (m - 1) as f64;
            let u: Vec<f64> = a.iter().zip(&d).map(|(x, y)| x + s * y).collect();
            form(&u, &d)
        })
        .collect::<Result<_>>()?;
    Ok(simpson(&vals, 1.0 / (m - 1) as f64))
}

fn directional(t: &[UtbTangent], d: &[f64]) -> UtbTangent {
    let mut acc = t[0].scale(d[0]);
    for (x, c) in t.iter().zip(d).skip(1) {
        acc = acc.add(&x.scale(*c));
    }
    acc
}

/// ζ*ω(d) at u.
fn connection_along(zeta: &LiftChart, u: &[f64], d: &[f64]) -> Result<f64> {
    Ok(connection_form(&directional(&zeta.tangents(u)?, d)))
}

/// Holonomy of one letter via the connection: ∫_p^{αp} ζ*ω + δ with
/// ρ(α)ζ(p) = φ_δ ζ(α·p).
fn letter_connection(zeta: &LiftChart, gen: &Generator, p: &[f64], samples: usize) -> Result<f64> {
    let q = gen.deck.apply(p);
    let line = segment_integral(&|u, d| connection_along(zeta, u, d), p, &q, samples)?;
    let zp = zeta.point(p)?;
    let moved = UtbPoint::project_unchecked(gen.iso.apply(&zp.x()), gen.iso.apply(&zp.v()));
    let zq = zeta.point(&q)?;
    let delta = fiber_offset(&zq, &moved).map_err(|e| match e {
        GeomError::GeodesicMismatch(d) => GeomError::SeamMismatch(d),
        other => other,
    })?;
    Ok(line + delta)
}

/// ∮ ζ*ω around a loop, with deck seams closed through ρ.
pub fn holonomy_from_connection(zeta: &LiftChart, lp: &Loop, rep: &Representation) -> Result<f64> {
    holonomy_from_connection_with(zeta, lp, rep, PATH_SAMPLES)
}

pub fn holonomy_from_connection_with(zeta: &LiftChart, lp: &Loop, rep: &Representation, samples: usize) -> Result<f64> {
    lp.check_closed()?;
    match lp {
        Loop::Polyline(pts) => {
            let mut total = 0.0;
            for w in pts.windows(2) {
                total += segment_integral(&|u, d| connection_along(zeta, u, d), &w[0], &w[1], samples)?;
            }
            Ok(total)
        }
        Loop::Word { basepoint, letters } => {
            let mut total = 0.0;
            for &(g, s) in letters {
                total += s.signum() as f64 * letter_connection(zeta, rep.get(g)?, basepoint, samples)?;
            }
            Ok(total)
        }
    }
}

/// Maslov form μ(d) at u.
fn maslov_along(g: &GaussChart, u: &[f64], d: &[f64]) -> Result<f64> {
    let mc = mean_curvature_at(g, u)?;
    let t: Vec<UtbTangent> = mc.frame.iter().map(|x| *x.rep()).collect();
    omega(&mc.trace, &GTangent::from_utb(&directional(&t, d)))
}

/// ∮ μ_G around a loop; μ is ρ-invariant so letters need no seam term.
pub fn holonomy_from_maslov(g: &GaussChart, lp: &Loop, rep: &Representation) -> Result<f64> {
    holonomy_from_maslov_with(g, lp, rep, PATH_SAMPLES)
}

pub fn holonomy_from_maslov_with(g: &GaussChart, lp: &Loop, rep: &Representation, samples: usize) -> Result<f64> {
    lp.check_closed()?;
    match lp {
        Loop::Polyline(pts) => {
            let mut total = 0.0;
            for w in pts.windows(2) {
                total += segment_integral(&|u, d| maslov_along(g, u, d), &w[0], &w[1], samples)?;
            }
            Ok(total)
        }
        Loop::Word { basepoint, letters } => {
            let mut total = 0.0;
            for &(gi, s) in letters {
                let q = rep.get(gi)?.deck.apply(basepoint);
                total += s.signum() as f64 * segment_integral(&|u, d| maslov_along(g, u, d), basepoint, &q, samples)?;
            }
            Ok(total)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorHolonomy {
    pub name: String,
    /// Via the Maslov form.
    pub maslov: f64,
    /// Via the connection on the chart's lift.
    pub connection: f64,
    /// Largest distance G(α·p) vs ρ(α)G(p) over the samples.
    pub equivariance_defect: f64,
}

#[derive(Clone)]
pub struct Verdict {
    pub holonomy: Vec<GeneratorHolonomy>,
    pub integrable: bool,
    /// Distance of the largest |hol| from the tolerance (positive when decided with room).
    pub margin: f64,
    pub tolerance: f64,
    pub recovered: Option<ImmersionChart>,
    /// Largest |σ(α·p) − ρ(α)σ(p)| of the recovered σ.
    pub recovered_defect: Option<f64>,
}

/// Per-generator holonomy and the ρ-integrability verdict; an integrable
/// input is integrated to an equivariant σ and re-checked.
pub fn rho_integrability_verdict(g: &GaussChart, rep: &Representation, basepoint: &[f64]) -> Result<Verdict> {
    let lag = crate::gauss::lagrangian_residual(g);
    if lag > tol().lagrangian {
        return Err(GeomError::Precondition(format!("not Lagrangian (residual {lag:.3e})")));
    }
    let holonomy: Vec<GeneratorHolonomy> = try_map_range(rep.generators.len(), |i| -> Result<GeneratorHolonomy> {
        let gen = &rep.generators[i];
        let pts = sample_points(g.domain(), &gen.deck, F_SAMPLES);
        let defect = equivariance_defect(g, gen, &pts)?;
        if defect > 10.0 * tol().holonomy {
            return Err(GeomError::Spread { spread: defect, tol: 10.0 * tol().holonomy });
        }
        let lp = Loop::generator(basepoint.to_vec(), i);
        Ok(GeneratorHolonomy {
            name: gen.name.clone(),
            maslov: holonomy_from_maslov(g, &lp, rep)?,
            connection: holonomy_from_connection(g.lift(), &lp, rep)?,
            equivariance_defect: defect,
        })
    })?;
    let t = tol().holonomy;
    let worst = holonomy.iter().map(|h| h.maslov.abs()).fold(0.0, f64::max);
    let integrable = worst < t;
    let margin = (worst - t).abs();
    let (mut recovered, mut recovered_defect) = (None, None);
    if integrable {
        let dom = g.domain();
        let corner = dom.flat(&vec![0; dom.dim()]);
        let flat = integrate_flat_section(g, corner, 0.0)?;
        let des = desingularize_and_project(&flat.lift)?;
        let mut d: f64 = 0.0;
        for gen in &rep.generators {
            for p in sample_points(dom, &gen.deck, F_SAMPLES) {
                let a = des.chart.point(&gen.deck.apply(&p))?;
                let b = gen.iso.apply(&des.chart.point(&p)?);
                d = d.max(a.max_abs_diff(&b));
            }
        }
        recovered = Some(des.chart);
        recovered_defect = Some(d);
    }
    Ok(Verdict { holonomy, integrable, margin, tolerance: t, recovered, recovered_defect })
}

/// Uniformly spaced Lagrangian stages Υ_s, s ∈ [0, 1].
#[derive(Clone)]
pub struct LagrangianIsotopy {
    stages: Vec<GaussChart>,
}

impl LagrangianIsotopy {
    pub fn new(stages: Vec<GaussChart>) -> Result<Self> {
        if stages.len() < 5 {
            return Err(GeomError::BadParams("an isotopy needs at least 5 stages".into()));
        }
        let d0 = stages[0].domain().clone();
        for s in &stages {
            if *s.domain() != d0 {
                return Err(GeomError::StageMismatch);
            }
            let r = crate::gauss::lagrangian_residual(s);
            if r > tol().lagrangian {
                return Err(GeomError::Precondition(format!("stage not Lagrangian (residual {r:.3e})")));
            }
        }
        Ok(LagrangianIsotopy { stages })
    }

    pub fn stages(&self) -> &[GaussChart] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Stage spacing in s.
    pub fn ds(&self) -> f64 {
        1.0 / (self.stages.len() - 1) as f64
    }

    /// ∂_s of the lift point at stage k, fourth-order (shifted near the ends).
    fn velocity(&self, k: usize, u: &[f64]) -> Result<UtbTangent> {
        let m = self.stages.len();
        let start = (k as isize - 2).clamp(0, m as isize - 5) as usize;
        let xs: Vec<f64> = (start..start + 5).map(|j| (j as f64 - k as f64) * self.ds()).collect();
        let w = fornberg_weights(0.0, &xs);
        let base = self.stages[k].lift().point(u)?;
        let d = base.dim();
        let (mut dx, mut dv) = (crate::lorentz::MinkowskiVector::zeros(d), crate::lorentz::MinkowskiVector::zeros(d));
        for (j, wj) in (start..start + 5).zip(w) {
            let p = self.stages[j].lift().point(u)?;
            dx += wj * p.x();
            dv += wj * p.v();
        }
        Ok(UtbTangent::project(base, dx, dv))
    }
}

/// Θ*Ω(∂_s, ∂_τ) at stage k and parameter u along direction d.
fn flux_density(iso: &LagrangianIsotopy, k: usize, u: &[f64], d: &[f64]) -> Result<f64> {
    let xs = GTangent::from_utb(&iso.velocity(k, u)?);
    let yt = GTangent::from_utb(&directional(&iso.stages[k].lift().tangents(u)?, d));
    omega(&xs, &yt)
}

/// Flux over the stage range [k0, k1] (an even number of intervals for Simpson).
pub fn flux_between(iso: &LagrangianIsotopy, lp: &Loop, rep: &Representation, k0: usize, k1: usize) -> Result<f64> {
    lp.check_closed()?;
    if k1 <= k0 || k1 >= iso.len() {
        return Err(GeomError::BadParams("bad stage range".into()));
    }
    let segments: Vec<(Vec<f64>, Vec<f64>, f64)> = match lp {
        Loop::Polyline(p) => p.windows(2).map(|w| (w[0].clone(), w[1].clone(), 1.0)).collect(),
        Loop::Word { basepoint, letters } => letters
            .iter()
            .map(|&(g, s)| Ok((basepoint.clone(), rep.get(g)?.deck.apply(basepoint), s.signum() as f64)))
            .collect::<Result<_>>()?,
    };
    let per_stage: Vec<f64> = try_map_range(k1 - k0 + 1, |j| -> Result<f64> {
        let k = k0 + j;
        let mut tot = 0.0;
        for (a, b, s) in &segments {
            tot += s * segment_integral(&|u, d| flux_density(iso, k, u, d), a, b, PATH_SAMPLES)?;
        }
        Ok(tot)
    })?;
    Ok(simpson(&per_stage, iso.ds()))
}

/// Flux(Υ) along a loop as the integral of Θ*Ω over [0, 1] × loop.
pub fn flux(iso: &LagrangianIsotopy, lp: &Loop, rep: &Representation) -> Result<f64> {
    flux_between(iso, lp, rep, 0, iso.len() - 1)
}
