//! Normal-speed flows dσ/dt = f_t ν_t on tabulated charts, and checks of the
//! evolution equations they induce on lifts and Gauss maps.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::{ImmersionChart, Jet};
use crate::error::{GeomError, Result};
use crate::exec::map_range;
use crate::geodesic_space::{g_metric, gram, j_para, GTangent};
use crate::grid::{grid_deriv, Domain};
use crate::hypersurface::{check_immersion, fundamental_data, ShapeData};
use crate::lorentz::{HPoint, MinkowskiVector};
use crate::utb::{chi, UtbPoint, UtbTangent};

/// Speed field f_t.
#[derive(Clone)]
pub enum Speed {
    Constant(f64),
    /// f_t = f_{σ_t}.
    FSigma,
    /// f(u, t).
    Field(Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Speed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Speed::Constant(c) => write!(f, "Constant({c})"),
            Speed::FSigma => write!(f, "FSigma"),
            Speed::Field(_) => write!(f, "Field"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Euler,
    Rk4,
}

#[derive(Clone, Debug)]
pub struct FlowState {
    pub chart: ImmersionChart,
    pub t: f64,
    pub speed: Speed,
}

pub const MAX_HALVINGS: usize = 8;

impl FlowState {
    /// Starts a flow; analytic charts are sampled at their grid nodes.
    pub fn new(chart: &ImmersionChart, speed: Speed) -> Result<Self> {
        let chart = if chart.is_analytic() { chart.tabulate()? } else { chart.clone() };
        check_immersion(&chart)?;
        Ok(FlowState { chart, t: 0.0, speed })
    }

    /// Speeds at the nodes of `chart` at time t.
    pub fn speeds(&self, chart: &ImmersionChart, sd: Option<&ShapeData>, t: f64) -> Result<Vec<f64>> {
        let dom = chart.domain();
        match &self.speed {
            Speed::Constant(c) => Ok(vec![*c; dom.len()]),
            Speed::Field(f) => Ok(map_range(dom.len(), |i| f(&dom.coords(i), t))),
            Speed::FSigma => {
                let owned;
                let sd = match sd {
                    Some(s) => s,
                    None => {
                        owned = fundamental_data(chart)?;
                        &owned
                    }
                };
                crate::hypersurface::f_sigma(sd)
            }
        }
    }
}

fn velocity(state: &FlowState, chart: &ImmersionChart, t: f64) -> Result<(Vec<MinkowskiVector>, Vec<Jet>)> {
    let jets = chart.jets()?;
    let sd = match state.speed {
        Speed::FSigma => Some(fundamental_data(chart)?),
        _ => None,
    };
    let f = state.speeds(chart, sd.as_ref(), t)?;
    Ok((jets.iter().zip(&f).map(|(j, fi)| *fi * j.nu).collect(), jets))
}

fn advance(vals: &[MinkowskiVector], k: &[MinkowskiVector], h: f64) -> Vec<MinkowskiVector> {
    vals.iter().zip(k).map(|(x, d)| HPoint::project_unchecked(*x + h * *d).vec()).collect()
}

fn attempt(state: &FlowState, dt: f64, scheme: Scheme) -> Result<ImmersionChart> {
    let dom = state.chart.domain().clone();
    let o = state.chart.orientation() as i32;
    let y0 = state.chart.node_values()?;
    let (k1, jets0) = velocity(state, &state.chart, state.t)?;
    let next = match scheme {
        Scheme::Euler => advance(&y0, &k1, dt),
        Scheme::Rk4 => {
            let stage = |v: Vec<MinkowskiVector>| ImmersionChart::tabulated(dom.clone(), v, o);
            let c2 = stage(advance(&y0, &k1, 0.5 * dt))?;
            let (k2, _) = velocity(state, &c2, state.t + 0.5 * dt)?;
            let c3 = stage(advance(&y0, &k2, 0.5 * dt))?;
            let (k3, _) = velocity(state, &c3, state.t + 0.5 * dt)?;
            let c4 = stage(advance(&y0, &k3, dt))?;
            let (k4, _) = velocity(state, &c4, state.t + dt)?;
            let k: Vec<MinkowskiVector> =
                (0..y0.len()).map(|i| (1.0 / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
            advance(&y0, &k, dt)
        }
    };
    let chart = ImmersionChart::tabulated(dom, next, o)?;
    check_immersion(&chart)?;
    let jets1 = chart.jets()?;
    if let Some(i) = jets0.iter().zip(&jets1).position(|(a, b)| a.nu.dot(&b.nu) <= 0.0) {
        return Err(GeomError::RankDeficient { node: state.chart.domain().coords(i), singular: 0.0 });
    }
    Ok(chart)
}

/// One step of size dt (halved up to [`MAX_HALVINGS`] times on failure).
/// Returns the new state and the step actually taken.
pub fn flow_step(state: &FlowState, dt: f64, scheme: Scheme) -> Result<(FlowState, f64)> {
    let mut h = dt;
    for _ in 0..=MAX_HALVINGS {
        match attempt(state, h, scheme) {
            Ok(chart) => return Ok((FlowState { chart, t: state.t + h, speed: state.speed.clone() }, h)),
            Err(_) => h *= 0.5,
        }
    }
    Err(GeomError::StepFailed { t: state.t, halvings: MAX_HALVINGS })
}

/// Nodewise data entering the evolution equations at one state.
struct Snapshot {
    zeta: Vec<UtbPoint>,
    dzeta: Vec<Vec<UtbTangent>>,
    sd: ShapeData,
    f: Vec<f64>,
}

fn snapshot(state: &FlowState, chart: &ImmersionChart, t: f64) -> Result<Snapshot> {
    let sd = fundamental_data(chart)?;
    let f = state.speeds(chart, Some(&sd), t)?;
    let zeta: Vec<UtbPoint> = sd.nodes.iter().map(|s| UtbPoint::project_unchecked(s.jet.sigma, s.jet.nu)).collect();
    let dzeta = sd
        .nodes
        .iter()
        .zip(&zeta)
        .map(|(s, z)| (0..s.jet.dsigma.len()).map(|a| UtbTangent::project(*z, s.jet.dsigma[a], s.jet.dnu[a])).collect())
        .collect();
    Ok(Snapshot { zeta, dzeta, sd, f })
}

fn combine(t: &[UtbTangent], c: &DVector<f64>) -> UtbTangent {
    let mut acc = UtbTangent::zero(*t[0].base());
    for (x, ci) in t.iter().zip(c.iter()) {
        acc = acc.add(&x.scale(*ci));
    }
    acc
}

/// ∇̄f = Ī⁻¹ df at node i, with Ī the pullback of ĝ by ζ.
fn gradient(snap: &Snapshot, dom: &Domain, i: usize) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let frame: Vec<GTangent> = snap.dzeta[i].iter().map(GTangent::from_utb).collect();
    let ibar = gram(&frame)?;
    let df = DVector::from_iterator(dom.dim(), (0..dom.dim()).map(|a| grid_deriv(dom, &snap.f, i, a)));
    let g = ibar
        .clone()
        .lu()
        .solve(&df)
        .ok_or_else(|| GeomError::Degenerate(format!("Ī singular at {:?}", dom.coords(i))))?;
    Ok((g, ibar))
}

/// −dζ(B∇̄f) − J(dζ∇̄f) + fχ at node i.
fn lift_rhs(snap: &Snapshot, dom: &Domain, i: usize) -> Result<UtbTangent> {
    let (g, _) = gradient(snap, dom, i)?;
    let b = &snap.sd.nodes[i].b;
    let t = &snap.dzeta[i];
    let dg = combine(t, &g);
    let dbg = combine(t, &(b * &g));
    let jdg = UtbTangent::project(snap.zeta[i], dg.vd, dg.xd);
    Ok(dbg.scale(-1.0).sub(&jdg).add(&chi(&snap.zeta[i]).scale(snap.f[i])))
}

/// Central time difference of ζ at node i.
fn lift_velocity(prev: &Snapshot, next: &Snapshot, here: &Snapshot, i: usize, dt: f64) -> UtbTangent {
    let c = 0.5 / dt;
    let dx = (next.zeta[i].x() - prev.zeta[i].x()) * c;
    let dv = (next.zeta[i].v() - prev.zeta[i].v()) * c;
    UtbTangent::project(here.zeta[i], dx, dv)
}

fn neighbors(state: &FlowState, dt: f64) -> Result<(Snapshot, Snapshot, Snapshot)> {
    let (fwd, h1) = flow_step(state, dt, Scheme::Rk4)?;
    let (bwd, h2) = flow_step(state, -dt, Scheme::Rk4)?;
    if h1 != dt || h2 != -dt {
        return Err(GeomError::StepFailed { t: state.t, halvings: 1 });
    }
    Ok((
        snapshot(state, &bwd.chart, state.t - dt)?,
        snapshot(state, &state.chart, state.t)?,
        snapshot(state, &fwd.chart, state.t + dt)?,
    ))
}

/// max over nodes of ‖∂_t ζ − RHS‖ with ∂_t ζ by central differences of rk4 steps ±dt.
pub fn verify_lift_evolution(state: &FlowState, dt: f64) -> Result<f64> {
    let (prev, here, next) = neighbors(state, dt)?;
    let dom = state.chart.domain();
    let mut r: f64 = 0.0;
    for i in 0..dom.len() {
        let lhs = lift_velocity(&prev, &next, &here, i, dt);
        let rhs = lift_rhs(&here, dom, i)?;
        r = r.max(lhs.sub(&rhs).split_norm());
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussEvolution {
    /// ‖∂_t G − (−dG(B∇̄f) − 𝕁dG(∇̄f))‖.
    pub residual: f64,
    /// ‖∂_t G − (H̄ + B(𝕁H̄))‖ when f = f_σ.
    pub mcf_residual: Option<f64>,
}

/// Gauss-map evolution check (χ-free parts of the lift equation), plus the
/// mean-curvature-flow form when the speed is f_σ.
pub fn verify_gauss_evolution(state: &FlowState, dt: f64) -> Result<GaussEvolution> {
    let (prev, here, next) = neighbors(state, dt)?;
    let dom = state.chart.domain();
    let fsig = matches!(state.speed, Speed::FSigma);
    let mut r: f64 = 0.0;
    let mut m: f64 = 0.0;
    for i in 0..dom.len() {
        let lhs = GTangent::from_utb(&lift_velocity(&prev, &next, &here, i, dt));
        let rhs = GTangent::from_utb(&lift_rhs(&here, dom, i)?);
        r = r.max(lhs.rep().sub(rhs.rep()).split_norm());
        if fsig {
            let (g, ibar) = gradient(&here, dom, i)?;
            let frame: Vec<GTangent> = here.dzeta[i].iter().map(GTangent::from_utb).collect();
            let t: Vec<UtbTangent> = frame.iter().map(|x| *x.rep()).collect();
            let h = j_para(&GTangent::from_utb(&combine(&t, &g))).scale(-1.0);
            // Coordinates of 𝕁H̄ in the dG basis, then B applied to them.
            let jh = j_para(&h);
            let pair = DVector::from_iterator(t.len(), frame.iter().map(|x| g_metric(x, &jh).unwrap_or(f64::NAN)));
            let c = ibar.lu().solve(&pair).ok_or(GeomError::SingularResolvent)?;
            let b = &here.sd.nodes[i].b;
            let bjh = combine(&t, &(b * c));
            let mcf = GTangent::from_utb(&h.rep().add(&bjh));
            m = m.max(lhs.rep().sub(mcf.rep()).split_norm());
        }
    }
    Ok(GaussEvolution { residual: r, mcf_residual: fsig.then_some(m) })
}

/// One row of a flow time series.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowRecord {
    pub t: f64,
    pub dt: f64,
    pub min_lambda: f64,
    pub max_lambda: f64,
    pub mean_f: f64,
    /// Largest |⟨σ,σ⟩ + 1| over the nodes.
    pub constraint_drift: f64,
    pub small_curvature: bool,
}

#[derive(Clone, Debug)]
pub struct FlowRun {
    pub records: Vec<FlowRecord>,
    pub state: FlowState,
    /// First recorded time at which some |λ_i| ≥ 1.
    pub first_violation: Option<f64>,
}

pub const CSV_HEADER: [&str; 7] =
    ["t", "dt", "min_lambda", "max_lambda", "mean_f", "constraint_drift", "small_curvature"];

impl FlowRecord {
    pub fn csv_fields(&self) -> [String; 7] {
        let f = |x: f64| format!("{x:.16e}");
        [
            f(self.t),
            f(self.dt),
            f(self.min_lambda),
            f(self.max_lambda),
            f(self.mean_f),
            f(self.constraint_drift),
            self.small_curvature.to_string(),
        ]
    }
}

fn record(state: &FlowState, dt: f64) -> Result<FlowRecord> {
    let sd = fundamental_data(&state.chart)?;
    let lam: Vec<f64> = sd.nodes.iter().flat_map(|n| n.lambdas.iter().cloned()).collect();
    let (lo, hi) = lam.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(*x), h.max(*x)));
    let small = lam.iter().all(|l| l.abs() < 1.0);
    let f = if small || !matches!(state.speed, Speed::FSigma) {
        state.speeds(&state.chart, Some(&sd), state.t)?
    } else {
        vec![f64::NAN]
    };
    let drift = state.chart.node_values()?.iter().map(|x| (x.norm2() + 1.0).abs()).fold(0.0, f64::max);
    Ok(FlowRecord {
        t: state.t,
        dt,
        min_lambda: lo,
        max_lambda: hi,
        mean_f: f.iter().sum::<f64>() / f.len() as f64,
        constraint_drift: drift,
        small_curvature: small,
    })
}

/// Integrates to time `t_end` with nominal step dt, recording every step.
pub fn run_flow(state: FlowState, t_end: f64, dt: f64, scheme: Scheme) -> Result<FlowRun> {
    if !(dt > 0.0) || !(t_end >= state.t) {
        return Err(GeomError::BadParams("need dt > 0 and t_end ≥ t".into()));
    }
    let mut st = state;
    let first = record(&st, 0.0)?;
    let mut first_violation = (!first.small_curvature).then_some(first.t);
    let mut records = vec![first];
    while st.t < t_end - 1e-12 * dt {
        let h = dt.min(t_end - st.t);
        let (next, taken) = flow_step(&st, h, scheme)?;
        st = next;
        let rec = record(&st, taken)?;
        if !rec.small_curvature && first_violation.is_none() {
            first_violation = Some(rec.t);
        }
        records.push(rec);
    }
    Ok(FlowRun { records, state: st, first_violation })
}
