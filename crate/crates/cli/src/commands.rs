//! One function per subcommand. Each returns a report, an optional CSV table,
//! the charts to plot and the checks that decide exit code 3.

use std::collections::BTreeMap;
use std::sync::Arc;

use geodloom::chart::{ImmersionChart, LiftChart};
use geodloom::config::tol;
use geodloom::equivariance::{
    flux, holonomy_from_connection, holonomy_from_f, holonomy_from_maslov, rho_integrability_verdict, Loop,
};
use geodloom::flows::{run_flow, verify_gauss_evolution, verify_lift_evolution, FlowState, Scheme, Speed, CSV_HEADER};
use geodloom::gallery::GALLERY_NAMES;
use geodloom::gauss::{
    aligned_distance, desingularize_and_project, first_form_identity_residual, integrate_flat_section,
    lagrangian_residual, lift_differential_residual, maslov_form, pullback_grams, pullback_signature,
    riemannian_residual, GaussChart,
};
use geodloom::geodesic_space::p_project;
use geodloom::grid::Domain;
use geodloom::hypersurface::{f_sigma, fundamental_data, normal_evolution};
use geodloom::utb::{geodesic_flow, UtbPoint};
use serde_json::Value;

use crate::error::CliError;
use crate::report::{cell, checks, matrix, num, nums, opt, tolerances, Check, Obj, Table};
use crate::scene::{ChartRef, Context, Resolved, EXTRA_NAMES};
use crate::svg::Layer;
use crate::tensors;

pub struct Output {
    pub report: Value,
    pub table: Option<Table>,
    pub layers: Vec<Layer>,
    pub checks: Vec<Check>,
}

/// Agreement required between the three holonomy computations.
pub const HOLONOMY_AGREEMENT: f64 = 1e-6;
/// Ī = I − III and lift-differential tolerance.
pub const FORM_TOL: f64 = 1e-8;
/// Evolution-law tolerance.
pub const EVOLUTION_TOL: f64 = 1e-8;
/// Maslov identity and mean-curvature agreement (finite-difference limited).
pub const MASLOV_TOL: f64 = 5e-4;
/// Round-trip recovery tolerance.
pub const ROUND_TRIP_TOL: f64 = 1e-7;
/// Eigenvalues below this are counted as zero in signatures.
pub const SIGNATURE_ZERO: f64 = 1e-9;

fn head(command: &str) -> Obj {
    Obj::new().put("command", command).put("tolerances", tolerances(&tol()))
}

fn center_index(dom: &Domain) -> usize {
    let mid: Vec<usize> = dom.samples.iter().map(|s| s / 2).collect();
    dom.flat(&mid)
}

fn layer(label: &str, chart: &ImmersionChart) -> Result<Layer, CliError> {
    Ok(Layer { label: label.to_string(), domain: chart.domain().clone(), points: chart.node_values()? })
}

fn lift_layer(label: &str, lift: &LiftChart) -> Layer {
    Layer {
        label: label.to_string(),
        domain: lift.domain().clone(),
        points: lift.node_points().iter().map(|p| p.x()).collect(),
    }
}

fn signature_histogram(sig: &[(usize, usize)]) -> Value {
    let mut h: BTreeMap<String, usize> = BTreeMap::new();
    for (p, q) in sig {
        *h.entry(format!("({p},{q})")).or_default() += 1;
    }
    let mut o = Obj::new();
    for (k, v) in h {
        o.insert(&k, v);
    }
    o.into()
}

/// The Gauss map through p∘ζ only, so that nothing downstream sees σ.
fn canonical(g: &GaussChart) -> Result<GaussChart, CliError> {
    if !g.lift().is_analytic() {
        return Ok(GaussChart::from_node_geodesics(g.domain().clone(), &g.node_geodesics())?);
    }
    let l = g.lift().clone();
    Ok(GaussChart::from_geodesics(
        g.domain().clone(),
        Arc::new(move |u: &[f64]| p_project(&l.point(u).expect("lift inside its domain"))),
    )?)
}

pub fn tensors_check(samples: usize, seed: u64) -> Result<Output, CliError> {
    let suite = tensors::run(samples, seed)?;
    let report = head("tensors-check")
        .put("samples", samples)
        .put("seed", seed)
        .put("checks", checks(&suite.checks))
        .put(
            "curvature_sign",
            Obj::new()
                .put("measured", "d omega = -p*Omega")
                .f("step", tensors::CURVATURE_STEP)
                .f("max_residual_minus", suite.checks.last().map_or(f64::NAN, |c| c.residual))
                .f("max_residual_plus", suite.curvature_plus),
        )
        .into();
    let mut table = Table::new(&["identity", "max_residual", "tol", "pass"]);
    for c in &suite.checks {
        table.push(vec![c.name.clone(), cell(c.residual), cell(c.tol), c.pass().to_string()]);
    }
    Ok(Output { report, table: Some(table), layers: vec![], checks: suite.checks })
}

pub fn gauss(ctx: &Context, name: &str) -> Result<Output, CliError> {
    let r = ctx.chart(name)?;
    let g = r.chart.gauss()?;
    let t = tol();
    let dom = r.chart.domain().clone();
    let lag = lagrangian_residual(&g);
    let sig = pullback_signature(&g, SIGNATURE_ZERO)?;
    let mut rep = head("gauss")
        .put("chart", name)
        .put("n", r.chart.n())
        .put("nodes", dom.len())
        .f("lagrangian_residual", lag)
        .put("signature_counts", signature_histogram(&sig));
    let mut list = Vec::new();
    let mut table = None;
    let layers;
    match &r.chart {
        Resolved::Immersion(c) => {
            list.push(Check::new("lagrangian", lag, t.lagrangian));
            list.push(Check::new("first_form_identity", first_form_identity_residual(c)?, FORM_TOL));
            list.push(Check::new("lift_differential", lift_differential_residual(c)?, FORM_TOL));
            let sd = fundamental_data(c)?;
            let grams = pullback_grams(&g)?;
            let i = center_index(&dom);
            let node = &sd.nodes[i];
            let ibar_minus_i =
                sd.nodes.iter().zip(&grams).map(|(s, gm)| (gm - &s.first).abs().max()).fold(0.0, f64::max);
            rep = rep.f("riemannian_residual", riemannian_residual(&g)?).f("max_ibar_minus_i", ibar_minus_i).put(
                "center",
                Obj::new()
                    .put("u", nums(&sd.coords[i]))
                    .put("first", matrix(&node.first))
                    .put("third", matrix(&node.third()))
                    .put("ibar", matrix(&grams[i]))
                    .put("lambdas", nums(&node.lambdas)),
            );
            let f = f_sigma(&sd).ok();
            let n = c.n();
            let mut cols: Vec<String> = (0..n).map(|a| format!("u{a}")).collect();
            cols.extend((0..n).map(|a| format!("lambda{a}")));
            cols.extend(["f_sigma".into(), "sig_pos".into(), "sig_neg".into()]);
            let mut tb = Table { header: cols, rows: vec![] };
            for (k, s) in sd.nodes.iter().enumerate() {
                let mut row: Vec<String> = sd.coords[k].iter().map(|x| cell(*x)).collect();
                row.extend(s.lambdas.iter().map(|x| cell(*x)));
                row.push(f.as_ref().map_or(String::new(), |f| cell(f[k])));
                row.push(sig[k].0.to_string());
                row.push(sig[k].1.to_string());
                tb.push(row);
            }
            table = Some(tb);
            layers = vec![layer(name, c)?];
        }
        Resolved::Lift(l) => {
            rep = rep.put("lagrangian", lag < t.lagrangian);
            layers = vec![lift_layer(name, l)];
        }
    }
    rep.insert("checks", checks(&list));
    Ok(Output { report: rep.into(), table, layers, checks: list })
}

/// λ ↦ (λ − tanh t)/(1 − λ tanh t), i.e. tanh(μ − t) for λ = tanh μ.
fn evolved_lambda(l: f64, t: f64) -> f64 {
    let th = t.tanh();
    (l - th) / (1.0 - l * th)
}

pub fn evolve(ctx: &Context, name: &str, t: f64) -> Result<Output, CliError> {
    let r = ctx.chart(name)?;
    let c = r.chart.immersion(name)?;
    let ct = normal_evolution(c, t)?;
    let (sd0, sdt) = (fundamental_data(c)?, fundamental_data(&ct)?);
    let (f0, ft) = (f_sigma(&sd0).ok(), f_sigma(&sdt).ok());
    let n = c.n();
    let mut cols: Vec<String> = (0..n).map(|a| format!("u{a}")).collect();
    for a in 0..n {
        cols.extend([format!("lambda{a}_0"), format!("lambda{a}_t"), format!("lambda{a}_predicted")]);
    }
    cols.extend(["f_0".into(), "f_t".into()]);
    let mut table = Table { header: cols, rows: vec![] };
    let mut lam_err: f64 = 0.0;
    for (k, (a, b)) in sd0.nodes.iter().zip(&sdt.nodes).enumerate() {
        let mut pred: Vec<f64> = a.lambdas.iter().map(|l| evolved_lambda(*l, t)).collect();
        pred.sort_by(f64::total_cmp);
        let mut row: Vec<String> = sd0.coords[k].iter().map(|x| cell(*x)).collect();
        for i in 0..n {
            lam_err = lam_err.max((b.lambdas[i] - pred[i]).abs());
            row.extend([cell(a.lambdas[i]), cell(b.lambdas[i]), cell(pred[i])]);
        }
        row.push(f0.as_ref().map_or(String::new(), |f| cell(f[k])));
        row.push(ft.as_ref().map_or(String::new(), |f| cell(f[k])));
        table.push(row);
    }
    let mut list = vec![Check::new("principal_curvature_law", lam_err, EVOLUTION_TOL)];
    let f_err = match (&f0, &ft) {
        (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| (y - (x - t)).abs()).fold(0.0, f64::max)),
        _ => None,
    };
    if let Some(e) = f_err {
        list.push(Check::new("f_sigma_shift", e, EVOLUTION_TOL));
    }
    let (l0, lt) = (c.lift(), ct.lift());
    let mut gap: f64 = 0.0;
    for i in 0..c.domain().len() {
        let u = c.domain().coords(i);
        gap = gap.max(lt.point(&u)?.max_abs_diff(&geodesic_flow(&l0.point(&u)?, t)));
    }
    list.push(Check::new("lift_is_flowed_lift", gap, 1e-9));
    let report = head("evolve")
        .put("chart", name)
        .f("t", t)
        .put("small_curvature_before", f0.is_some())
        .put("small_curvature_after", ft.is_some())
        .put("checks", checks(&list))
        .into();
    let layers = vec![layer(&format!("{name} t=0"), c)?, layer(&format!("{name} t={t}"), &ct)?];
    Ok(Output { report, table: Some(table), layers, checks: list })
}

pub fn integrate(ctx: &Context, name: &str, basepoint: usize) -> Result<Output, CliError> {
    let r = ctx.chart(name)?;
    let (g, reference) = match &r.chart {
        Resolved::Immersion(c) => (canonical(&r.chart.gauss()?)?, Some(c.clone())),
        Resolved::Lift(l) => (GaussChart::from_lift(l.clone()), None),
    };
    if basepoint >= g.domain().len() {
        return Err(CliError::Schema(format!("basepoint index {basepoint} outside {} nodes", g.domain().len())));
    }
    let flat = integrate_flat_section(&g, basepoint, 0.0)?;
    let mut rep =
        head("integrate").put("chart", name).put("basepoint", basepoint).f("path_residual", flat.path_residual);
    let mut list = Vec::new();
    let mut layers = Vec::new();
    match reference {
        Some(c) => {
            let zs = c.lift();
            let (shift, dist) = aligned_distance(&flat.lift, &zs)?;
            list.push(Check::new("round_trip_distance", dist, ROUND_TRIP_TOL));
            let aligned = flat.lift.map_points(Arc::new(move |_: &[f64], p: UtbPoint| geodesic_flow(&p, shift)));
            let des = desingularize_and_project(&aligned)?;
            let rec = des
                .chart
                .node_values()?
                .iter()
                .zip(c.node_values()?)
                .fold(0.0f64, |m, (a, b)| m.max((*a - b).euclid()));
            list.push(Check::new("sigma_recovery", rec, ROUND_TRIP_TOL));
            rep = rep.f("shift", shift).f("t_star", des.t).put("boundary", opt(des.boundary));
            layers.push(layer(name, &c)?);
            layers.push(layer("recovered", &des.chart)?);
        }
        None => {
            let des = desingularize_and_project(&flat.lift)?;
            rep = rep.f("t_star", des.t).put("boundary", opt(des.boundary));
            layers.push(layer("recovered", &des.chart)?);
        }
    }
    rep.insert("checks", checks(&list));
    Ok(Output { report: rep.into(), table: None, layers, checks: list })
}

pub fn maslov(ctx: &Context, name: &str) -> Result<Output, CliError> {
    let r = ctx.chart(name)?;
    let g = r.chart.gauss()?;
    let mf = maslov_form(&g)?;
    let mut list = vec![Check::new("mean_curvature_agreement", mf.mean_curvature_gap, MASLOV_TOL)];
    if let Some(e) = mf.identity_residual {
        list.push(Check::new("maslov_identity", e, MASLOV_TOL));
    }
    let n = r.chart.n();
    let dom = g.domain();
    let mut cols: Vec<String> = (0..n).map(|a| format!("u{a}")).collect();
    cols.extend((0..n).map(|a| format!("mu{a}")));
    cols.push("f_sigma".into());
    let mut table = Table { header: cols, rows: vec![] };
    for (k, mu) in mf.one_form.iter().enumerate() {
        let mut row: Vec<String> = dom.coords(k).iter().map(|x| cell(*x)).collect();
        row.extend(mu.iter().map(|x| cell(*x)));
        row.push(mf.fsigma.as_ref().map_or(String::new(), |f| cell(f[k])));
        table.push(row);
    }
    let report = head("maslov")
        .put("chart", name)
        .f("closedness_residual", mf.closedness_residual)
        .put("identity_residual", opt(mf.identity_residual))
        .f("mean_curvature_gap", mf.mean_curvature_gap)
        .put("checks", checks(&list))
        .into();
    Ok(Output { report, table: Some(table), layers: vec![], checks: list })
}

fn loop_basepoint(lp: &Loop) -> Vec<f64> {
    match lp {
        Loop::Word { basepoint, .. } => basepoint.clone(),
        Loop::Polyline(p) => p[0].clone(),
    }
}

fn loop_value(lp: &Loop) -> Value {
    match lp {
        Loop::Word { basepoint, letters } => Obj::new()
            .put("basepoint", nums(basepoint))
            .put(
                "letters",
                Value::Array(
                    letters.iter().map(|(g, s)| Value::from(vec![Value::from(*g), Value::from(*s)])).collect(),
                ),
            )
            .into(),
        Loop::Polyline(p) => Obj::new().put("polyline", Value::Array(p.iter().map(|x| nums(x)).collect())).into(),
    }
}

pub fn holonomy(ctx: &Context, name: &str, loop_name: &str) -> Result<Output, CliError> {
    let r: ChartRef = ctx.chart(name)?;
    let rep = ctx.representation(&r)?;
    let lp = ctx.lp(loop_name, &rep, r.chart.domain())?;
    let g = r.chart.gauss()?;
    let via_connection = holonomy_from_connection(canonical(&g)?.lift(), &lp, &rep)?;
    let via_maslov = holonomy_from_maslov(&g, &lp, &rep)?;
    let via_f = match (&r.chart, &lp) {
        (Resolved::Immersion(c), Loop::Word { letters, .. }) if letters.len() == 1 && letters[0].1 == 1 => {
            Some(holonomy_from_f(c, &rep, letters[0].0)?.value)
        }
        _ => None,
    };
    let mut vals = vec![via_connection, via_maslov];
    vals.extend(via_f);
    let spread =
        vals.iter().fold(f64::NEG_INFINITY, |a, x| a.max(*x)) - vals.iter().fold(f64::INFINITY, |a, x| a.min(*x));
    let list = vec![Check::new("pairwise_agreement", spread, HOLONOMY_AGREEMENT)];
    let verdict = rho_integrability_verdict(&g, &rep, &loop_basepoint(&lp))?;
    let gens: Vec<Value> = verdict
        .holonomy
        .iter()
        .map(|h| {
            Obj::new()
                .put("name", h.name.clone())
                .f("maslov", h.maslov)
                .f("connection", h.connection)
                .f("equivariance_defect", h.equivariance_defect)
                .into()
        })
        .collect();
    let report = head("holonomy")
        .put("chart", name)
        .put("loop", Obj::new().put("name", loop_name).put("path", loop_value(&lp)))
        .put(
            "values",
            Obj::new().put("from_f", opt(via_f)).f("from_connection", via_connection).f("from_maslov", via_maslov),
        )
        .f("max_pairwise_difference", spread)
        .put(
            "verdict",
            Obj::new()
                .put("result", if verdict.integrable { "INTEGRABLE" } else { "NOT integrable" })
                .put("integrable", verdict.integrable)
                .f("margin", verdict.margin)
                .f("tolerance", verdict.tolerance)
                .put("recovered_defect", opt(verdict.recovered_defect))
                .put("generators", Value::Array(gens)),
        )
        .put("checks", checks(&list))
        .into();
    let mut layers = Vec::new();
    if let Resolved::Immersion(c) = &r.chart {
        layers.push(layer(name, c)?);
    }
    if let Some(rc) = &verdict.recovered {
        layers.push(layer("recovered", rc)?);
    }
    Ok(Output { report, table: None, layers, checks: list })
}

pub fn flux_cmd(ctx: &Context, name: &str, loop_name: &str) -> Result<Output, CliError> {
    let (iso, first) = ctx.isotopy(name)?;
    let rep = ctx.representation(&first)?;
    let lp = ctx.lp(loop_name, &rep, first.chart.domain())?;
    let fl = flux(&iso, &lp, &rep)?;
    let stages = iso.stages();
    let h0 = holonomy_from_connection(stages[0].lift(), &lp, &rep)?;
    let h1 = holonomy_from_connection(stages[stages.len() - 1].lift(), &lp, &rep)?;
    let dh = h1 - h0;
    let report = head("flux")
        .put("isotopy", name)
        .put("stages", iso.len())
        .put("loop", Obj::new().put("name", loop_name).put("path", loop_value(&lp)))
        .f("flux", fl)
        .f("holonomy_start", h0)
        .f("holonomy_end", h1)
        .f("holonomy_change", dh)
        .f("gap_flux_minus_change", (fl - dh).abs())
        .f("gap_flux_plus_change", (fl + dh).abs())
        .into();
    Ok(Output { report, table: None, layers: vec![], checks: vec![] })
}

pub struct FlowArgs<'a> {
    pub speed: &'a str,
    pub t_end: f64,
    pub dt: f64,
    pub scheme: &'a str,
}

fn parse_speed(s: &str) -> Result<Speed, CliError> {
    if s == "fsigma" {
        return Ok(Speed::FSigma);
    }
    let v = s.strip_prefix("const:").unwrap_or(s);
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(Speed::Constant)
        .ok_or_else(|| CliError::Schema(format!("--speed: expected fsigma, const:<c> or a number, got {s:?}")))
}

pub fn flow(ctx: &Context, name: &str, a: &FlowArgs) -> Result<Output, CliError> {
    let r = ctx.chart(name)?;
    let c = r.chart.immersion(name)?;
    let scheme = match a.scheme {
        "rk4" => Scheme::Rk4,
        "euler" => Scheme::Euler,
        other => return Err(CliError::Schema(format!("--scheme: expected rk4 or euler, got {other:?}"))),
    };
    let speed = parse_speed(a.speed)?;
    if !(a.dt > 0.0) || !(a.t_end >= 0.0) {
        return Err(CliError::Schema("need --dt > 0 and --T >= 0".into()));
    }
    let st = FlowState::new(c, speed)?;
    let probe = a.dt.min(1e-2);
    let lift0 = verify_lift_evolution(&st, probe).ok();
    let gauss0 = verify_gauss_evolution(&st, probe).ok();
    let run = run_flow(st, a.t_end, a.dt, scheme)?;
    let mut table = Table::new(&CSV_HEADER);
    for rec in &run.records {
        table.push(rec.csv_fields().to_vec());
    }
    let last = run.records.last().expect("initial record");
    let drift = run.records.iter().map(|r| r.constraint_drift).fold(0.0, f64::max);
    let report = head("flow")
        .put("chart", name)
        .put("speed", a.speed)
        .put("scheme", a.scheme)
        .f("dt", a.dt)
        .f("t_end", a.t_end)
        .put("steps", run.records.len() - 1)
        .put("first_violation", opt(run.first_violation))
        .f("max_constraint_drift", drift)
        .put(
            "final",
            Obj::new()
                .f("t", last.t)
                .f("min_lambda", last.min_lambda)
                .f("max_lambda", last.max_lambda)
                .f("mean_f", last.mean_f),
        )
        .put(
            "initial_residuals",
            Obj::new()
                .f("probe_dt", probe)
                .put("lift", opt(lift0))
                .put("gauss", opt(gauss0.map(|g| g.residual)))
                .put("mcf", opt(gauss0.and_then(|g| g.mcf_residual))),
        )
        .into();
    let layers = vec![layer(&format!("{name} t=0"), c)?, layer(&format!("{name} t={}", last.t), &run.state.chart)?];
    Ok(Output { report, table: Some(table), layers, checks: vec![] })
}

pub fn examples(ctx: &Context) -> Result<Output, CliError> {
    let mut entries = Vec::new();
    let mut table =
        Table::new(&["name", "kind", "n", "nodes", "lagrangian_residual", "min_lambda", "max_lambda", "signatures"]);
    for name in GALLERY_NAMES.iter().chain(EXTRA_NAMES.iter().filter(|n| **n != "constant_angle")) {
        let r = ctx.chart(name)?;
        let g = r.chart.gauss()?;
        let lag = lagrangian_residual(&g);
        let sig = pullback_signature(&g, SIGNATURE_ZERO)?;
        let (kind, lo, hi) = match &r.chart {
            Resolved::Immersion(c) => {
                let sd = fundamental_data(c)?;
                let l: Vec<f64> = sd.nodes.iter().flat_map(|s| s.lambdas.iter().cloned()).collect();
                (
                    "immersion",
                    l.iter().cloned().fold(f64::INFINITY, f64::min),
                    l.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                )
            }
            Resolved::Lift(_) => ("lift", f64::NAN, f64::NAN),
        };
        let hist = signature_histogram(&sig);
        table.push(vec![
            name.to_string(),
            kind.into(),
            r.chart.n().to_string(),
            r.chart.domain().len().to_string(),
            cell(lag),
            if lo.is_finite() { cell(lo) } else { String::new() },
            if hi.is_finite() { cell(hi) } else { String::new() },
            hist.to_string(),
        ]);
        entries.push(
            Obj::new()
                .put("name", *name)
                .put("kind", kind)
                .put("n", r.chart.n())
                .put("nodes", r.chart.domain().len())
                .put("lagrangian_residual", num(lag))
                .put("min_lambda", num(lo))
                .put("max_lambda", num(hi))
                .put("signature_counts", hist)
                .into(),
        );
    }
    let report = head("examples").put("gallery", Value::Array(entries)).into();
    Ok(Output { report, table: Some(table), layers: vec![], checks: vec![] })
}
