//! Scene files (`"schema": 1`) and name resolution.
//!
//! Chart, loop and isotopy names resolve against the scene first and then
//! against the built-in gallery, which takes its parameters from the command
//! line.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

use geodloom::chart::{ImmersionChart, LiftChart};
use geodloom::config::Tolerances;
use geodloom::equivariance::{AffineMap, Generator, LagrangianIsotopy, Loop, Representation};
use geodloom::gallery::{
    constant_angle_lift, constant_angle_representation, equivariant_wavy, gallery, random_perturbed, GalleryChart,
    GalleryParams, GALLERY_NAMES,
};
use geodloom::gauss::{gauss_map, GaussChart};
use geodloom::grid::Domain;
use geodloom::hypersurface::normal_evolution;
use geodloom::lorentz::{Isometry, MinkowskiVector};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub schema: u32,
    #[serde(default)]
    pub description: Option<String>,
    pub dimension: usize,
    #[serde(default)]
    pub charts: Vec<NamedChart>,
    #[serde(default)]
    pub representation: Option<RepSpec>,
    #[serde(default)]
    pub loops: Vec<NamedLoop>,
    #[serde(default)]
    pub isotopies: Vec<NamedIsotopy>,
    #[serde(default)]
    pub tolerances: TolOverrides,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedChart {
    pub name: String,
    pub chart: ChartSpec,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartSpec {
    Gallery {
        name: String,
        r: Option<f64>,
        k: Option<usize>,
        theta0: Option<f64>,
        half_width: Option<f64>,
        samples: Option<usize>,
    },
    RandomPerturbed {
        seed: u64,
        amplitude: f64,
        r: f64,
        half_width: f64,
        samples: usize,
    },
    EquivariantWavy {
        c: f64,
        amplitude: f64,
        r: f64,
        half_width: f64,
        samples: usize,
    },
    /// Hyperboloid coordinates at the grid nodes, axis 0 fastest.
    Tabulated {
        lo: Vec<f64>,
        hi: Vec<f64>,
        samples: Vec<usize>,
        #[serde(default)]
        periodic: Option<Vec<bool>>,
        points: Vec<Vec<f64>>,
        #[serde(default = "one")]
        orientation: i32,
    },
}

fn one() -> i32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RepSpec {
    ConstantAngle { c: f64 },
    Generators(Vec<GenSpec>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub name: String,
    /// Matrix product of the factors in the listed order.
    pub isometry: Vec<IsoSpec>,
    pub deck: DeckSpec,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum IsoSpec {
    Boost { axis: usize, t: f64 },
    Rotation { i: usize, j: usize, theta: f64 },
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeckSpec {
    #[serde(default)]
    pub linear: Option<Vec<Vec<f64>>>,
    pub translation: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedLoop {
    pub name: String,
    #[serde(rename = "loop")]
    pub spec: LoopSpec,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopSpec {
    Generator { generator: String, basepoint: Vec<f64> },
    Word { basepoint: Vec<f64>, letters: Vec<(String, i32)> },
    Polyline { points: Vec<Vec<f64>> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedIsotopy {
    pub name: String,
    pub isotopy: IsotopySpec,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum IsotopySpec {
    /// Gauss maps of the listed charts, in order.
    Stages {
        charts: Vec<String>,
    },
    ConstantAngle {
        from: f64,
        to: f64,
        stages: usize,
        half_width: Option<f64>,
        samples: Option<usize>,
    },
    NormalEvolution {
        chart: String,
        t_end: f64,
        stages: usize,
    },
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolOverrides {
    pub tangent: Option<f64>,
    pub geodesic: Option<f64>,
    pub fd_step: Option<f64>,
    pub immersion_rel: Option<f64>,
    pub lagrangian: Option<f64>,
    pub holonomy: Option<f64>,
    pub curvature_margin: Option<f64>,
}

impl TolOverrides {
    pub fn apply(&self, t: &mut Tolerances) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut t.tangent, self.tangent);
        set(&mut t.geodesic, self.geodesic);
        set(&mut t.fd_step, self.fd_step);
        set(&mut t.immersion_rel, self.immersion_rel);
        set(&mut t.lagrangian, self.lagrangian);
        set(&mut t.holonomy, self.holonomy);
        set(&mut t.curvature_margin, self.curvature_margin);
    }

    /// `key=value` pairs separated by commas, as read from `GEODLOOM_TOL`.
    pub fn parse_env(s: &str) -> Result<Self, CliError> {
        let mut o = TolOverrides::default();
        for item in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Schema(format!("GEODLOOM_TOL: expected key=value, got {item:?}")))?;
            let v: f64 =
                v.trim().parse().map_err(|_| CliError::Schema(format!("GEODLOOM_TOL: {k}: not a number: {v:?}")))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Schema(format!("GEODLOOM_TOL: {k} must be positive")));
            }
            let slot = match k.trim() {
                "tangent" => &mut o.tangent,
                "geodesic" => &mut o.geodesic,
                "fd_step" => &mut o.fd_step,
                "immersion_rel" => &mut o.immersion_rel,
                "lagrangian" => &mut o.lagrangian,
                "holonomy" => &mut o.holonomy,
                "curvature_margin" => &mut o.curvature_margin,
                other => return Err(CliError::Schema(format!("GEODLOOM_TOL: unknown tolerance {other:?}"))),
            };
            *slot = Some(v);
        }
        Ok(o)
    }
}

impl Scene {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scene = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Schema(m));
        if self.schema != SCHEMA_VERSION {
            return bad(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema));
        }
        if !(1..=3).contains(&self.dimension) {
            return bad(format!("dimension must be 1, 2 or 3, got {}", self.dimension));
        }
        unique("chart", self.charts.iter().map(|c| &c.name))?;
        unique("loop", self.loops.iter().map(|c| &c.name))?;
        unique("isotopy", self.isotopies.iter().map(|c| &c.name))?;
        let n = self.dimension;
        let d = n + 2;
        for c in &self.charts {
            match &c.chart {
                ChartSpec::Gallery { name, .. } if name == "constant_angle_curve" && n != 1 => {
                    return bad(format!("chart {:?}: constant_angle_curve needs dimension 1", c.name));
                }
                ChartSpec::Tabulated { lo, hi, samples, points, .. } => {
                    if lo.len() != n || hi.len() != n || samples.len() != n {
                        return bad(format!("chart {:?}: domain arrays must have length {n}", c.name));
                    }
                    let want: usize = samples.iter().product();
                    if points.len() != want {
                        return bad(format!("chart {:?}: {} points for {want} nodes", c.name, points.len()));
                    }
                    if let Some(p) = points.iter().find(|p| p.len() != d) {
                        return bad(format!("chart {:?}: point of length {} (expected {d})", c.name, p.len()));
                    }
                }
                _ => {}
            }
        }
        let mut gens = BTreeSet::new();
        match &self.representation {
            Some(RepSpec::ConstantAngle { .. }) => {
                if n != 1 {
                    return bad("constant_angle representation needs dimension 1".into());
                }
                gens.insert("gen0".to_string());
            }
            Some(RepSpec::Generators(list)) => {
                unique("generator", list.iter().map(|g| &g.name))?;
                for g in list {
                    if g.deck.translation.len() != n {
                        return bad(format!("generator {:?}: translation must have length {n}", g.name));
                    }
                    for f in &g.isometry {
                        match f {
                            IsoSpec::Boost { axis, .. } if *axis >= d - 1 => {
                                return bad(format!("generator {:?}: boost axis {axis} out of range", g.name))
                            }
                            IsoSpec::Rotation { i, j, .. } if *i >= d - 1 || *j >= d - 1 || i == j => {
                                return bad(format!("generator {:?}: bad rotation plane", g.name))
                            }
                            IsoSpec::Matrix(m) if m.len() != d => {
                                return bad(format!("generator {:?}: matrix must be {d}×{d}", g.name))
                            }
                            _ => {}
                        }
                    }
                    gens.insert(g.name.clone());
                }
            }
            None => {}
        }
        for l in &self.loops {
            let pts: Vec<&Vec<f64>> = match &l.spec {
                LoopSpec::Generator { generator, basepoint } => {
                    if self.representation.is_some() && !gens.contains(generator) {
                        return bad(format!("loop {:?}: unknown generator {generator:?}", l.name));
                    }
                    vec![basepoint]
                }
                LoopSpec::Word { basepoint, letters } => {
                    if let Some((g, _)) =
                        letters.iter().find(|(g, _)| self.representation.is_some() && !gens.contains(g))
                    {
                        return bad(format!("loop {:?}: unknown generator {g:?}", l.name));
                    }
                    vec![basepoint]
                }
                LoopSpec::Polyline { points } => points.iter().collect(),
            };
            if pts.iter().any(|p| p.len() != n) {
                return bad(format!("loop {:?}: points must have length {n}", l.name));
            }
        }
        let charts: BTreeSet<&str> = self.charts.iter().map(|c| c.name.as_str()).collect();
        for iso in &self.isotopies {
            let refs: Vec<&String> = match &iso.isotopy {
                IsotopySpec::Stages { charts } => charts.iter().collect(),
                IsotopySpec::NormalEvolution { chart, .. } => vec![chart],
                IsotopySpec::ConstantAngle { .. } => {
                    if n != 1 {
                        return bad(format!("isotopy {:?}: constant_angle needs dimension 1", iso.name));
                    }
                    vec![]
                }
            };
            if let Some(r) = refs.iter().find(|r| !charts.contains(r.as_str()) && !is_builtin(r)) {
                return bad(format!("isotopy {:?}: unknown chart {r:?}", iso.name));
            }
        }
        Ok(())
    }
}

fn unique<'a>(what: &str, names: impl Iterator<Item = &'a String>) -> Result<(), CliError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(CliError::Schema(format!("duplicate {what} name {n:?}")));
        }
    }
    Ok(())
}

/// Gallery parameters taken from the command line.
#[derive(Clone, Debug, Default)]
pub struct ChartArgs {
    pub n: Option<usize>,
    pub r: Option<f64>,
    pub k: Option<usize>,
    pub theta0: Option<f64>,
    pub theta1: Option<f64>,
    pub c: Option<f64>,
    pub samples: Option<usize>,
    pub half_width: Option<f64>,
    pub seed: Option<u64>,
    pub amplitude: Option<f64>,
    pub stages: Option<usize>,
}

pub const EXTRA_NAMES: [&str; 3] = ["constant_angle", "random_perturbed", "equivariant_wavy"];

pub fn is_builtin(name: &str) -> bool {
    GALLERY_NAMES.contains(&name) || EXTRA_NAMES.contains(&name)
}

pub fn default_samples(n: usize) -> usize {
    match n {
        1 => 33,
        2 => 11,
        _ => 7,
    }
}

#[derive(Clone)]
pub enum Resolved {
    Immersion(ImmersionChart),
    Lift(LiftChart),
}

impl Resolved {
    pub fn n(&self) -> usize {
        match self {
            Resolved::Immersion(c) => c.n(),
            Resolved::Lift(l) => l.n(),
        }
    }

    pub fn domain(&self) -> &Domain {
        match self {
            Resolved::Immersion(c) => c.domain(),
            Resolved::Lift(l) => l.domain(),
        }
    }

    pub fn immersion(&self, name: &str) -> Result<&ImmersionChart, CliError> {
        match self {
            Resolved::Immersion(c) => Ok(c),
            Resolved::Lift(_) => Err(CliError::Schema(format!("{name:?} is a lift, not a hypersurface chart"))),
        }
    }

    pub fn gauss(&self) -> Result<GaussChart, CliError> {
        Ok(match self {
            Resolved::Immersion(c) => gauss_map(c)?,
            Resolved::Lift(l) => GaussChart::from_lift(l.clone()),
        })
    }
}

/// What a chart name resolved to, carrying enough to pick a default representation.
pub struct ChartRef {
    pub chart: Resolved,
    pub constant_angle: bool,
    /// Translation length under which the chart is invariant, when known.
    pub period: Option<f64>,
}

pub struct Context {
    pub scene: Option<Scene>,
    pub args: ChartArgs,
}

impl Context {
    pub fn dimension(&self) -> usize {
        self.scene.as_ref().map(|s| s.dimension).or(self.args.n).unwrap_or(2)
    }

    fn params(&self, name: &str) -> GalleryParams {
        let n = if name == "constant_angle_curve" { 1 } else { self.dimension() };
        let d = GalleryParams::default();
        GalleryParams {
            n,
            r: self.args.r.unwrap_or(d.r),
            k: self.args.k.unwrap_or(d.k),
            theta0: self.args.theta0.unwrap_or(d.theta0),
            half_width: self.args.half_width,
            samples: self.args.samples.unwrap_or(default_samples(n)),
        }
    }

    pub fn chart(&self, name: &str) -> Result<ChartRef, CliError> {
        if let Some(spec) = self.scene.as_ref().and_then(|s| s.charts.iter().find(|c| c.name == name)) {
            return self.build(&spec.chart);
        }
        let a = &self.args;
        let n = self.dimension();
        let samples = a.samples.unwrap_or(default_samples(n));
        let hw = a.half_width.unwrap_or(0.5);
        let chart = match name {
            "constant_angle" => {
                let p = self.params("constant_angle_curve");
                return self.gallery_ref("constant_angle_curve", &p);
            }
            "random_perturbed" => Resolved::Immersion(random_perturbed(
                n,
                a.seed.unwrap_or(0),
                a.amplitude.unwrap_or(0.05),
                a.r.unwrap_or(0.2),
                hw,
                samples,
            )?),
            "equivariant_wavy" => {
                let c = a.c.unwrap_or(2.0);
                let chart = equivariant_wavy(n, c, a.amplitude.unwrap_or(0.01), a.r.unwrap_or(0.2), hw, samples)?;
                return Ok(ChartRef { chart: Resolved::Immersion(chart), constant_angle: false, period: Some(c) });
            }
            g if GALLERY_NAMES.contains(&g) => return self.gallery_ref(g, &self.params(g)),
            other => return Err(CliError::Schema(format!("unknown chart {other:?}"))),
        };
        Ok(ChartRef { chart, constant_angle: false, period: None })
    }

    fn gallery_ref(&self, name: &str, p: &GalleryParams) -> Result<ChartRef, CliError> {
        let chart = match gallery(name, p)? {
            GalleryChart::Immersion(c) => Resolved::Immersion(c),
            GalleryChart::Lift(l) => Resolved::Lift(l),
        };
        Ok(ChartRef { chart, constant_angle: name == "constant_angle_curve", period: None })
    }

    fn build(&self, spec: &ChartSpec) -> Result<ChartRef, CliError> {
        let n = self.dimension();
        match spec {
            ChartSpec::Gallery { name, r, k, theta0, half_width, samples } => {
                if !GALLERY_NAMES.contains(&name.as_str()) {
                    return Err(CliError::Schema(format!("unknown gallery entry {name:?}")));
                }
                let d = GalleryParams::default();
                let n = if name == "constant_angle_curve" { 1 } else { n };
                let p = GalleryParams {
                    n,
                    r: r.unwrap_or(d.r),
                    k: k.unwrap_or(d.k),
                    theta0: theta0.unwrap_or(d.theta0),
                    half_width: *half_width,
                    samples: samples.unwrap_or(default_samples(n)),
                };
                self.gallery_ref(name, &p)
            }
            ChartSpec::RandomPerturbed { seed, amplitude, r, half_width, samples } => Ok(ChartRef {
                chart: Resolved::Immersion(random_perturbed(n, *seed, *amplitude, *r, *half_width, *samples)?),
                constant_angle: false,
                period: None,
            }),
            ChartSpec::EquivariantWavy { c, amplitude, r, half_width, samples } => Ok(ChartRef {
                chart: Resolved::Immersion(equivariant_wavy(n, *c, *amplitude, *r, *half_width, *samples)?),
                constant_angle: false,
                period: Some(*c),
            }),
            ChartSpec::Tabulated { lo, hi, samples, periodic, points, orientation } => {
                let periodic = periodic.clone().unwrap_or_else(|| vec![false; n]);
                let dom = Domain::new(lo.clone(), hi.clone(), samples.clone(), periodic)?;
                let values = points.iter().map(|p| MinkowskiVector::from_slice(p)).collect::<Result<Vec<_>, _>>()?;
                Ok(ChartRef {
                    chart: Resolved::Immersion(ImmersionChart::tabulated(dom, values, *orientation)?),
                    constant_angle: false,
                    period: None,
                })
            }
        }
    }

    fn default_c(&self, r: &ChartRef) -> f64 {
        r.period.or(self.args.c).unwrap_or(if r.constant_angle { 0.5 } else { 0.6 })
    }

    /// The scene's representation, or a boost along e_1 with deck map u_0 ↦ u_0 + c
    /// (c the chart's period when it has one).
    pub fn representation(&self, r: &ChartRef) -> Result<Representation, CliError> {
        if let Some(spec) = self.scene.as_ref().and_then(|s| s.representation.as_ref()) {
            return build_rep(spec, self.dimension());
        }
        let c = self.default_c(r);
        if r.constant_angle {
            return Ok(constant_angle_representation(c));
        }
        let n = r.chart.n();
        let mut t = vec![0.0; n];
        t[0] = c;
        Ok(Representation::translations(vec![("gen0".into(), Isometry::boost(n + 2, 0, c), t)])?)
    }

    /// Scene loops, then `genK` from a basepoint half a period left of the domain center.
    pub fn lp(&self, name: &str, rep: &Representation, dom: &Domain) -> Result<Loop, CliError> {
        if let Some(l) = self.scene.as_ref().and_then(|s| s.loops.iter().find(|l| l.name == name)) {
            let idx = |g: &str| rep.index(g).ok_or_else(|| CliError::Schema(format!("unknown generator {g:?}")));
            return Ok(match &l.spec {
                LoopSpec::Generator { generator, basepoint } => Loop::generator(basepoint.clone(), idx(generator)?),
                LoopSpec::Word { basepoint, letters } => Loop::Word {
                    basepoint: basepoint.clone(),
                    letters: letters.iter().map(|(g, s)| Ok((idx(g)?, *s))).collect::<Result<_, CliError>>()?,
                },
                LoopSpec::Polyline { points } => Loop::Polyline(points.clone()),
            });
        }
        let k: usize = name
            .strip_prefix("gen")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Schema(format!("unknown loop {name:?}")))?;
        let gen =
            rep.generators.get(k).ok_or_else(|| CliError::Schema(format!("no generator {k} for loop {name:?}")))?;
        let center = dom.center();
        let shift = gen.deck.apply(&center);
        let base: Vec<f64> = center.iter().zip(&shift).map(|(c, s)| c - 0.5 * (s - c)).collect();
        Ok(Loop::generator(base, k))
    }

    /// Scene isotopies, or the built-in constant-angle family θ₀ → θ₁.
    pub fn isotopy(&self, name: &str) -> Result<(LagrangianIsotopy, ChartRef), CliError> {
        let a = &self.args;
        let spec = self.scene.as_ref().and_then(|s| s.isotopies.iter().find(|i| i.name == name)).map(|i| &i.isotopy);
        let builtin;
        let spec = match spec {
            Some(s) => s,
            None if name == "constant_angle" => {
                builtin = IsotopySpec::ConstantAngle {
                    from: a.theta0.unwrap_or(FRAC_PI_6),
                    to: a.theta1.unwrap_or(FRAC_PI_4),
                    stages: a.stages.unwrap_or(33),
                    half_width: a.half_width,
                    samples: a.samples,
                };
                &builtin
            }
            None => return Err(CliError::Schema(format!("unknown isotopy {name:?}"))),
        };
        match spec {
            IsotopySpec::ConstantAngle { from, to, stages, half_width, samples } => {
                let m = *stages;
                if m < 2 {
                    return Err(CliError::Schema("an isotopy needs at least 2 stages".into()));
                }
                let hw = half_width.unwrap_or(1.5);
                let s = samples.unwrap_or(33);
                let stages = (0..m)
                    .map(|k| {
                        let th = from + (to - from) * k as f64 / (m - 1) as f64;
                        Ok(GaussChart::from_lift(constant_angle_lift(th, hw, s)?))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                let first = Resolved::Lift(stages[0].lift().clone());
                Ok((LagrangianIsotopy::new(stages)?, ChartRef { chart: first, constant_angle: true, period: None }))
            }
            IsotopySpec::Stages { charts } => {
                let refs = charts.iter().map(|c| self.chart(c)).collect::<Result<Vec<_>, _>>()?;
                let stages = refs.iter().map(|r| r.chart.gauss()).collect::<Result<Vec<_>, _>>()?;
                let first = refs.into_iter().next().ok_or_else(|| CliError::Schema("empty isotopy".into()))?;
                Ok((LagrangianIsotopy::new(stages)?, first))
            }
            IsotopySpec::NormalEvolution { chart, t_end, stages } => {
                let r = self.chart(chart)?;
                let c = r.chart.immersion(chart)?.clone();
                let m = (*stages).max(2);
                let stages = (0..m)
                    .map(|k| Ok(gauss_map(&normal_evolution(&c, t_end * k as f64 / (m - 1) as f64)?)?))
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok((LagrangianIsotopy::new(stages)?, r))
            }
        }
    }
}

fn build_rep(spec: &RepSpec, n: usize) -> Result<Representation, CliError> {
    let d = n + 2;
    match spec {
        RepSpec::ConstantAngle { c } => Ok(constant_angle_representation(*c)),
        RepSpec::Generators(list) => {
            let gens = list
                .iter()
                .map(|g| {
                    let mut iso = Isometry::identity(d);
                    for f in &g.isometry {
                        let step = match f {
                            IsoSpec::Boost { axis, t } => Isometry::boost(d, *axis, *t),
                            IsoSpec::Rotation { i, j, theta } => Isometry::rotation(d, *i, *j, *theta),
                            IsoSpec::Matrix(rows) => Isometry::from_rows(rows)?,
                        };
                        iso = iso.compose(&step);
                    }
                    let deck = match &g.deck.linear {
                        None => AffineMap::translation(g.deck.translation.clone()),
                        Some(rows) => {
                            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                                return Err(CliError::Schema(format!(
                                    "generator {:?}: linear part must be {n}×{n}",
                                    g.name
                                )));
                            }
                            AffineMap::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]), g.deck.translation.clone())?
                        }
                    };
                    Ok(Generator { name: g.name.clone(), iso, deck })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Representation::new(gens)?)
        }
    }
}
