//! Acceptance suite: one line per criterion.
//!
//! Criteria listed in KNOWN_FAILURES are evaluated exactly as stated and are
//! expected to fail (see README, "Known failures"); the runner exits non-zero
//! if any other criterion fails or if a known failure unexpectedly passes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use geodloom::chart::ImmersionChart;
use geodloom::equivariance::{
    flux, holonomy_from_connection, holonomy_from_f, holonomy_from_maslov, rho_integrability_verdict,
    LagrangianIsotopy, Loop,
};
use geodloom::flows::{verify_gauss_evolution, verify_lift_evolution, FlowState, Speed};
use geodloom::gallery::{
    constant_angle_curve, constant_angle_lift, constant_angle_representation, gallery, horosphere, normal_bundle_nq,
    random_perturbed, rcap, sphere_vertical, GalleryChart, GalleryParams, GALLERY_NAMES,
};
use geodloom::gauss::{
    aligned_distance, desingularize_and_project, first_form_identity_residual, gauss_map, integrate_flat_section,
    j_eigen_residuals, lagrangian_residual, maslov_form, pullback_grams, pullback_signature, GaussChart,
};
use geodloom::geodesic_space::{p_project, pullback_omega};
use geodloom::hypersurface::{f_sigma_eigen, fundamental_data, normal_evolution, shape_at};
use geodloom::lorentz::{HPoint, MinkowskiVector};
use geodloom::utb::{chi, curvature_fd, hlift, vlift, UtbPoint, UtbTangent};
use geodloom::GeomError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: [usize; 2] = [1, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_unit_tangent_point(rng: &mut ChaCha8Rng, n: usize) -> UtbPoint {
    let d = n + 2;
    let mut x = MinkowskiVector::zeros(d);
    let mut r2 = 0.0;
    for i in 0..=n {
        let s = rng.random_range(-1.0..1.0);
        x.set(i, s);
        r2 += s * s;
    }
    x.set(n + 1, (1.0 + r2).sqrt());
    let x = HPoint::new(x).unwrap().vec();
    let mut v = MinkowskiVector::zeros(d);
    for i in 0..d {
        v.set(i, rng.random_range(-1.0..1.0));
    }
    UtbPoint::project(x, v).unwrap()
}

fn random_tangent(rng: &mut ChaCha8Rng, p: &UtbPoint) -> UtbTangent {
    let d = p.dim();
    let mut a = MinkowskiVector::zeros(d);
    let mut b = MinkowskiVector::zeros(d);
    for i in 0..d {
        a.set(i, rng.random_range(-0.5..0.5));
        b.set(i, rng.random_range(-0.5..0.5));
    }
    let h = hlift(p, &a, true).unwrap();
    let v = vlift(p, &b, true).unwrap();
    h.add(&v).add(&chi(p).scale(rng.random_range(-0.5..0.5)))
}

/// Basis cases (H,H), (V,V), (H_i,V_j) and (H_i,V_i) at a point, then random pairs.
fn curvature_samples() -> Vec<(String, UtbPoint, UtbTangent, UtbTangent)> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=3 {
        let p = random_unit_tangent_point(&mut rng, n);
        // An orthonormal pair in x^⊥ ∩ v^⊥ from Gram-Schmidt.
        let mut frame: Vec<MinkowskiVector> = Vec::new();
        for i in 0..n + 2 {
            let mut w = MinkowskiVector::basis(n + 2, i);
            w = w + w.dot(&p.x()) * p.x() - w.dot(&p.v()) * p.v();
            for f in &frame {
                w = w - w.dot(f) * *f;
            }
            if w.norm2() > 1e-6 {
                frame.push(w * (1.0 / w.norm2().sqrt()));
            }
        }
        let (w1, w2) = (frame[0], frame[1]);
        let h = |w: &MinkowskiVector| hlift(&p, w, false).unwrap();
        let v = |w: &MinkowskiVector| vlift(&p, w, false).unwrap();
        out.push((format!("n={n} H1,H2"), p, h(&w1), h(&w2)));
        out.push((format!("n={n} V1,V2"), p, v(&w1), v(&w2)));
        out.push((format!("n={n} H1,V2"), p, h(&w1), v(&w2)));
        out.push((format!("n={n} H1,V1"), p, h(&w1), v(&w1)));
    }
    while out.len() < 200 {
        let n = 1 + out.len() % 3;
        let p = random_unit_tangent_point(&mut rng, n);
        let (x, y) = (random_tangent(&mut rng, &p), random_tangent(&mut rng, &p));
        out.push((format!("random n={n}"), p, x, y));
    }
    out
}

fn curvature_errors(sign: f64) -> (f64, f64, String) {
    let h = 1e-4;
    let mut worst = 0.0;
    let mut mixed = f64::NAN;
    let mut label = String::new();
    for (name, p, x, y) in curvature_samples() {
        let fd = curvature_fd(&p, &x, &y, h).unwrap();
        let target = sign * pullback_omega(&x, &y).unwrap();
        let e = (fd - target).abs();
        if name.ends_with("H1,V1") && mixed.is_nan() {
            mixed = fd;
        }
        if e > worst {
            worst = e;
            label = name;
        }
    }
    (worst, mixed, label)
}

fn c1_curvature_identity() -> Outcome {
    let (worst, mixed, label) = curvature_errors(1.0);
    let tol = 50.0 * 1e-4;
    outcome(
        worst < tol,
        format!("max |dω_fd − p*Ω| = {worst:.3e} (tol {tol:.1e}, worst case {label}); mixed case dω_fd = {mixed:.6}"),
    )
}

fn corrected_curvature_identity() -> Outcome {
    let (worst, _, label) = curvature_errors(-1.0);
    let tol = 50.0 * 1e-4;
    outcome(worst < tol, format!("max |dω_fd + p*Ω| = {worst:.3e} (tol {tol:.1e}, worst case {label})"))
}

fn gallery_immersions() -> Vec<(String, ImmersionChart)> {
    let mut out = Vec::new();
    for name in GALLERY_NAMES {
        for n in 1..=3 {
            let p = GalleryParams { n, samples: if n == 3 { 9 } else { 13 }, ..Default::default() };
            if name == "constant_angle_curve" && n != 1 {
                continue;
            }
            if let Ok(GalleryChart::Immersion(c)) = gallery(name, &p) {
                out.push((format!("{name} n={n}"), c));
            }
        }
    }
    out
}

fn random_charts(count: usize) -> Vec<(String, ImmersionChart)> {
    (0..count)
        .map(|k| {
            let n = 1 + k % 3;
            let samples = if n == 3 { 9 } else { 13 };
            (format!("random seed={k} n={n}"), random_perturbed(n, k as u64, 0.05, 0.2, 0.5, samples).unwrap())
        })
        .collect()
}

fn c2_gauss_pullback() -> Outcome {
    let mut worst = (0.0, String::new());
    let charts: Vec<_> = gallery_immersions().into_iter().chain(random_charts(20)).collect();
    for (name, c) in &charts {
        let r = first_form_identity_residual(c).unwrap();
        if r > worst.0 {
            worst = (r, name.clone());
        }
    }
    outcome(
        worst.0 < 1e-8,
        format!("max ‖Ī − (I − III)‖ = {:.3e} over {} charts (worst {})", worst.0, charts.len(), worst.1),
    )
}

fn c3_evolution_laws() -> Outcome {
    let mut charts = vec![("rcap n=2".to_string(), rcap(2, 0.5, 0.5, 9).unwrap())];
    charts.extend(random_charts(4));
    let mut worst_l: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for (_, c) in &charts {
        let probe: Vec<Vec<f64>> =
            vec![c.domain().center(), c.domain().coords(1), c.domain().coords(c.domain().len() - 2)];
        for t in [0.3, -0.3, 1.5, -1.5] {
            let ct = normal_evolution(c, t).unwrap();
            for u in &probe {
                let s0 = shape_at(c, u).unwrap();
                let st = shape_at(&ct, u).unwrap();
                let mut expect: Vec<f64> = s0.lambdas.iter().map(|l| (l.atanh() - t).tanh()).collect();
                expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (a, b) in st.lambdas.iter().zip(&expect) {
                    worst_l = worst_l.max((a - b).abs());
                }
                let f0 = s0.f_sigma(u).unwrap();
                let ft = st.f_sigma(u).unwrap();
                worst_f = worst_f.max((ft - (f0 - t)).abs());
            }
        }
    }
    outcome(
        worst_l < 1e-8 && worst_f < 1e-8,
        format!("max |λ_i(t) − tanh(μ_i − t)| = {worst_l:.3e}, max |f_t − (f − t)| = {worst_f:.3e} (tol 1e-8)"),
    )
}

fn c4_maslov_identity() -> Outcome {
    let mut charts: Vec<(String, ImmersionChart)> =
        gallery_immersions().into_iter().filter(|(n, _)| !n.starts_with("horosphere")).collect();
    charts.extend(random_charts(6));
    let (mut id, mut gap) = ((0.0, String::new()), (0.0, String::new()));
    for (name, c) in &charts {
        let m = maslov_form(&gauss_map(c).unwrap()).unwrap();
        let r = m.identity_residual.unwrap();
        if r >= id.0 {
            id = (r, name.clone());
        }
        if m.mean_curvature_gap >= gap.0 {
            gap = (m.mean_curvature_gap, name.clone());
        }
    }
    outcome(
        id.0 < 5e-4 && gap.0 < 5e-4,
        format!(
            "max ‖μ − df_σ‖ = {:.3e} ({}), max trace/closed-form gap = {:.3e} ({}) over {} charts (tol 5e-4)",
            id.0,
            id.1,
            gap.0,
            gap.1,
            charts.len()
        ),
    )
}

fn canonical_gauss(lift: &geodloom::chart::LiftChart) -> GaussChart {
    let l = lift.clone();
    GaussChart::from_geodesics(lift.domain().clone(), Arc::new(move |u: &[f64]| p_project(&l.point(u).unwrap())))
        .unwrap()
}

fn c5_holonomy_triangle() -> Outcome {
    let mut ok = true;
    let mut worst_pair: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    let mut notes = Vec::new();
    for c in [0.5, 1.0] {
        for th in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_2] {
            let curve = constant_angle_curve(th, 1.5, 33).unwrap();
            let rep = constant_angle_representation(c);
            let lp = Loop::generator(vec![-1.2], 0);
            let g = gauss_map(&curve).unwrap();
            let hf = holonomy_from_f(&curve, &rep, 0).unwrap().value;
            let hw = holonomy_from_connection(canonical_gauss(g.lift()).lift(), &lp, &rep).unwrap();
            let hm = holonomy_from_maslov(&g, &lp, &rep).unwrap();
            let pair = (hf - hw).abs().max((hw - hm).abs()).max((hf - hm).abs());
            worst_pair = worst_pair.max(pair);
            let v = rho_integrability_verdict(&g, &rep, &[-1.2]).unwrap();
            if th == FRAC_PI_2 {
                ok &= hf.abs() < 1e-6 && hw.abs() < 1e-6 && hm.abs() < 1e-6 && v.integrable;
                if let Some(d) = v.recovered_defect {
                    notes.push(format!("recovered σ equivariance defect {d:.1e} at c={c}"));
                }
            } else {
                ok &= !v.integrable && v.margin > 1e-3;
                min_margin = min_margin.min(v.margin);
            }
        }
    }
    ok &= worst_pair < 1e-6;
    outcome(
        ok,
        format!("max pairwise |hol_f − hol_ω − hol_μ| gap = {worst_pair:.3e} (tol 1e-6); min NOT-integrable margin = {min_margin:.3e}; {}", notes.join(", ")),
    )
}

fn c6_round_trip() -> Outcome {
    let mut charts = vec![("rcap n=2".to_string(), rcap(2, 0.5, 0.5, 11).unwrap())];
    charts.push(("constant_angle θ=π/4".into(), constant_angle_curve(FRAC_PI_4, 1.5, 33).unwrap()));
    charts.extend(random_charts(3));
    let mut worst: f64 = 0.0;
    let mut t_ok = true;
    for (_, c) in &charts {
        let zs = c.lift();
        let flat = integrate_flat_section(&canonical_gauss(&zs), 0, 0.0).unwrap();
        let (_, d) = aligned_distance(&flat.lift, &zs).unwrap();
        worst = worst.max(d);
        let des = desingularize_and_project(&flat.lift).unwrap();
        t_ok &= des.t == 0.0;
    }
    outcome(
        worst < 1e-7 && t_ok,
        format!(
            "max aligned distance to ζ_σ = {worst:.3e} (tol 1e-7); t* = 0 on all {} Riemannian inputs: {t_ok}",
            charts.len()
        ),
    )
}

fn c7_counterexample() -> Outcome {
    let zeta = geodloom::gallery::cap_circle_glued_curve(0.5, 241).unwrap();
    let lag = lagrangian_residual(&GaussChart::from_lift(zeta.clone()));
    match desingularize_and_project(&zeta) {
        Err(GeomError::NoAdmissibleTime { report, lo, hi }) => {
            let complete = report.len() == geodloom::gauss::SCAN_SAMPLES && report.iter().all(|r| r.node.len() == 1);
            let flips = report.iter().filter(|r| r.orientation_flip).count();
            outcome(
                lag == 0.0 && complete,
                format!("Lagrangian residual {lag:.1e}; no admissible t in [{lo}, {hi}]; {} per-t reports ({flips} with orientation flips)", report.len()),
            )
        }
        Err(e) => outcome(false, format!("unexpected error {e}")),
        Ok(d) => outcome(false, format!("unexpectedly admissible at t = {}", d.t)),
    }
}

fn flux_data() -> (f64, f64) {
    let c = 0.5;
    let rep = constant_angle_representation(c);
    let (ta, tb) = (FRAC_PI_6, FRAC_PI_4);
    let m = 33;
    let stages: Vec<GaussChart> = (0..m)
        .map(|k| {
            let s = k as f64 / (m - 1) as f64;
            GaussChart::from_lift(constant_angle_lift(ta + s * (tb - ta), 1.5, 33).unwrap())
        })
        .collect();
    let iso = LagrangianIsotopy::new(stages).unwrap();
    let lp = Loop::generator(vec![-1.0], 0);
    let fl = flux(&iso, &lp, &rep).unwrap();
    let h0 = holonomy_from_connection(iso.stages()[0].lift(), &lp, &rep).unwrap();
    let h1 = holonomy_from_connection(iso.stages()[m - 1].lift(), &lp, &rep).unwrap();
    (fl, h1 - h0)
}

fn c8_flux() -> Outcome {
    let (fl, dh) = flux_data();
    let e = (fl - dh).abs();
    outcome(e < 1e-5, format!("flux = {fl:.9}, hol₁ − hol₀ = {dh:.9}, |flux − Δhol| = {e:.3e} (tol 1e-5)"))
}

fn corrected_flux() -> Outcome {
    let (fl, dh) = flux_data();
    let e = (fl + dh).abs();
    outcome(e < 1e-5, format!("|flux + Δhol| = {e:.3e} (tol 1e-5)"))
}

fn c9_flow_equations() -> Outcome {
    let chart = random_perturbed(2, 3, 0.05, 0.2, 0.5, 15).unwrap();
    let dts = [1e-2, 5e-3, 2.5e-3];
    let mut ok = true;
    let mut lines = Vec::new();
    let speeds = [
        ("field", Speed::Field(Arc::new(|u: &[f64], t: f64| 0.3 * u[0] + 0.2 * (u[1] + t).sin()))),
        ("f_σ", Speed::FSigma),
    ];
    for (name, sp) in speeds {
        let st = FlowState::new(&chart, sp).unwrap();
        let mut lift = Vec::new();
        let mut gauss = Vec::new();
        for dt in dts {
            lift.push(verify_lift_evolution(&st, dt).unwrap());
            let g = verify_gauss_evolution(&st, dt).unwrap();
            gauss.push(g.residual);
            if let Some(m) = g.mcf_residual {
                ok &= m < 100.0 * dt;
                lines.push(format!("MCF residual {m:.2e} at dt={dt}"));
            }
        }
        let order = |r: &[f64]| (0..r.len() - 1).map(|i| (r[i] / r[i + 1]).log2()).fold(f64::INFINITY, f64::min);
        let (ol, og) = (order(&lift), order(&gauss));
        ok &= ol >= 1.0 && og >= 1.0;
        lines.push(format!("{name}: lift order {ol:.2}, Gauss order {og:.2}"));
    }
    outcome(ok, lines.join("; "))
}

fn c10_signatures() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 1..=3 {
        let s = if n == 3 { 7 } else { 11 };
        let g = GaussChart::from_lift(sphere_vertical(n, s).unwrap());
        let max_eig = pullback_grams(&g)
            .unwrap()
            .iter()
            .map(|m| m.symmetric_eigenvalues().iter().cloned().fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::NEG_INFINITY, f64::max);
        ok &= max_eig < 0.0;
        notes.push(format!("sphere n={n} max eig {max_eig:.2}"));
        for k in 0..=n {
            let g = GaussChart::from_lift(normal_bundle_nq(n, k, 0.5, s).unwrap());
            let sig = pullback_signature(&g, 1e-9).unwrap();
            let exact = sig.iter().all(|&(p, q)| p == k && q == n - k);
            ok &= exact;
            if !exact {
                notes.push(format!("NQ n={n} k={k} signature mismatch"));
            }
        }
        let (plus, minus) = j_eigen_residuals(&horosphere(n, 0.5, s).unwrap().lift());
        ok &= plus.min(minus) < 1e-8;
        notes.push(format!("horosphere n={n} J residual {:.1e}", plus.min(minus)));
    }
    outcome(ok, format!("{}; all NQ(k) signatures (k, n−k) at every node: {}", notes.join(", "), ok))
}

fn main() -> ExitCode {
    let n0 = Instant::now();
    // Side check that f_σ and its eigenvalue form agree on one chart.
    let sd = fundamental_data(&rcap(2, 0.5, 0.5, 9).unwrap()).unwrap();
    assert!((f_sigma_eigen(&sd.nodes[0].lambdas) + 0.5).abs() < 1e-9);
    let criteria: Vec<(usize, &str, fn() -> Outcome)> = vec![
        (1, "curvature identity dω = p*Ω", c1_curvature_identity),
        (2, "Gauss pullback Ī = I − III", c2_gauss_pullback),
        (3, "evolution laws", c3_evolution_laws),
        (4, "Maslov identity", c4_maslov_identity),
        (5, "holonomy triangle", c5_holonomy_triangle),
        (6, "round trip", c6_round_trip),
        (7, "counterexample", c7_counterexample),
        (8, "flux = Δholonomy", c8_flux),
        (9, "flow equations", c9_flow_equations),
        (10, "signature gallery", c10_signatures),
    ];
    let mut unexpected = 0;
    for (id, name, f) in criteria {
        let t = Instant::now();
        let o = f();
        let known = KNOWN_FAILURES.contains(&id);
        let status = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known: sign convention conflict)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
            (true, true) => {
                unexpected += 1;
                "PASS (unexpected: remove from KNOWN_FAILURES)"
            }
        };
        println!("criterion {id:>2} {name}: {status} [{:.1}s] {}", t.elapsed().as_secs_f64(), o.detail);
    }
    for (name, f) in [
        ("corrected sign: dω = −p*Ω", corrected_curvature_identity as fn() -> Outcome),
        ("corrected sign: flux = −Δholonomy", corrected_flux),
    ] {
        let o = f();
        if !o.pass {
            unexpected += 1;
        }
        println!("supplement {name}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance finished in {:.1}s; unexpected outcomes: {unexpected}", n0.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
