use std::sync::Arc;

use geodloom::flows::{
    flow_step, run_flow, verify_gauss_evolution, verify_lift_evolution, FlowState, Scheme, Speed, CSV_HEADER,
};
use geodloom::gallery::{horosphere, plane, random_perturbed, rcap};
use geodloom::gauss::gauss_map;
use geodloom::hypersurface::normal_evolution;

fn max_gap(a: &geodloom::chart::ImmersionChart, b: &geodloom::chart::ImmersionChart) -> f64 {
    let (x, y) = (a.node_values().unwrap(), b.node_values().unwrap());
    x.iter().zip(&y).map(|(p, q)| p.max_abs_diff(q)).fold(0.0, f64::max)
}

#[test]
fn zero_speed_is_the_identity() {
    let st = FlowState::new(&random_perturbed(2, 4, 0.05, 0.2, 0.5, 9).unwrap(), Speed::Constant(0.0)).unwrap();
    for scheme in [Scheme::Euler, Scheme::Rk4] {
        let (next, h) = flow_step(&st, 0.1, scheme).unwrap();
        assert_eq!(h, 0.1);
        assert!(max_gap(&st.chart, &next.chart) < 1e-15);
    }
}

#[test]
fn unit_speed_is_normal_evolution() {
    let st = FlowState::new(&random_perturbed(2, 6, 0.05, 0.2, 0.5, 9).unwrap(), Speed::Constant(1.0)).unwrap();
    let mut errs = Vec::new();
    for dt in [0.1, 0.05] {
        let (next, _) = flow_step(&st, dt, Scheme::Rk4).unwrap();
        let want = normal_evolution(&st.chart, dt).unwrap();
        errs.push(max_gap(&next.chart, &want));
    }
    assert!(errs[0] < 1e-6, "{errs:?}");
    assert!(errs[1] < errs[0] || errs[1] < 1e-10, "{errs:?}");
}

/// The radius obeys dr/dt = −r, integrated here as a scalar ODE.
#[test]
fn rcap_relaxes_exponentially() {
    let r0 = 0.5;
    let st = FlowState::new(&rcap(2, r0, 0.5, 11).unwrap(), Speed::FSigma).unwrap();
    let (dt, t_end) = (0.0025, 0.3);
    let run = run_flow(st, t_end, dt, Scheme::Rk4).unwrap();
    let mut r = r0;
    let mut t = 0.0;
    for rec in &run.records[1..] {
        let h = rec.dt;
        let k1 = -r;
        let k2 = -(r + 0.5 * h * k1);
        let k3 = -(r + 0.5 * h * k2);
        let k4 = -(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        assert!((rec.t - t).abs() < 1e-12);
        assert!((rec.mean_f + r).abs() < 1e-4, "t={t}: f={} r={r}", rec.mean_f);
    }
    assert!((r - r0 * (-t_end).exp()).abs() < 1e-9);
    assert!(run.first_violation.is_none());
}

#[test]
fn constraint_drift_stays_small() {
    let st = FlowState::new(&random_perturbed(2, 8, 0.05, 0.2, 0.5, 7).unwrap(), Speed::Constant(0.1)).unwrap();
    let run = run_flow(st, 1.0, 1e-3, Scheme::Rk4).unwrap();
    assert_eq!(run.records.len(), 1001);
    let drift = run.records.iter().map(|r| r.constraint_drift).fold(0.0, f64::max);
    assert!(drift < 1e-8, "drift {drift:e}");
}

#[test]
fn constant_speed_keeps_the_gauss_map() {
    let st = FlowState::new(&random_perturbed(2, 10, 0.05, 0.2, 0.5, 9).unwrap(), Speed::Constant(0.7)).unwrap();
    let dt = 1e-2;
    let g = verify_gauss_evolution(&st, dt).unwrap();
    assert!(g.residual < dt * dt, "{g:?}");
    assert!(g.mcf_residual.is_none());
    assert!(verify_lift_evolution(&st, 1e-2).unwrap() < 1e-2);
    let (next, _) = flow_step(&st, 0.2, Scheme::Rk4).unwrap();
    let (a, b) = (gauss_map(&st.chart).unwrap().node_geodesics(), gauss_map(&next.chart).unwrap().node_geodesics());
    for (x, y) in a.iter().zip(&b) {
        assert!(x.distance(y) < 1e-6);
    }
}

#[test]
fn plane_is_stationary_under_f_sigma() {
    let st = FlowState::new(&plane(2, 0.5, 9).unwrap(), Speed::FSigma).unwrap();
    let (next, _) = flow_step(&st, 0.1, Scheme::Rk4).unwrap();
    assert!(max_gap(&st.chart, &next.chart) < 1e-12);
    let g = verify_gauss_evolution(&st, 1e-2).unwrap();
    assert!(g.residual < 1e-10 && g.mcf_residual.unwrap() < 1e-10, "{g:?}");
    assert!(verify_lift_evolution(&st, 1e-2).unwrap() < 1e-10);
}

#[test]
fn residuals_shrink_with_dt() {
    let chart = random_perturbed(2, 12, 0.05, 0.2, 0.5, 15).unwrap();
    let st = FlowState::new(&chart, Speed::Field(Arc::new(|u: &[f64], t: f64| 0.2 * u[1] - 0.1 * (u[0] - t).cos())))
        .unwrap();
    let rs: Vec<f64> = [4e-2, 2e-2].iter().map(|&dt| verify_lift_evolution(&st, dt).unwrap()).collect();
    assert!(rs[0] < 1.0 && (rs[0] / rs[1]).log2() >= 1.0, "{rs:?}");
    let fs = FlowState::new(&chart, Speed::FSigma).unwrap();
    let dt = 5e-3;
    assert!(verify_gauss_evolution(&fs, dt).unwrap().mcf_residual.unwrap() < 100.0 * dt);
}

#[test]
fn violations_are_reported() {
    // Horospheres have λ ≡ 1, so the very first record already violates.
    let st = FlowState::new(&horosphere(2, 0.5, 7).unwrap(), Speed::Constant(0.1)).unwrap();
    let run = run_flow(st, 0.02, 1e-2, Scheme::Euler).unwrap();
    assert_eq!(run.first_violation, Some(0.0));
    assert!(run.records.iter().all(|r| !r.small_curvature));
}

#[test]
fn csv_rows_match_the_header() {
    let st = FlowState::new(&rcap(1, 0.3, 0.5, 9).unwrap(), Speed::FSigma).unwrap();
    let run = run_flow(st, 0.05, 0.01, Scheme::Rk4).unwrap();
    assert_eq!(CSV_HEADER[0], "t");
    for rec in &run.records {
        let fields = rec.csv_fields();
        assert_eq!(fields.len(), CSV_HEADER.len());
        let t: f64 = fields[0].parse().unwrap();
        assert_eq!(t, rec.t);
        assert_eq!(fields[6], "true");
    }
}
