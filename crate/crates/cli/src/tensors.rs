//! Identity suite for the unit tangent bundle and the space of geodesics,
//! evaluated on seeded random samples for n = 1, 2, 3.

use geodloom::geodesic_space::{g_metric, j_para, p_project, pullback_omega, transport_to, GTangent};
use geodloom::lorentz::{geodesic_endpoint, HPoint, Isometry, MinkowskiVector};
use geodloom::utb::{
    chi, connection_form, curvature_fd, d_omega_exact, dflow, geodesic_flow, ghat_metric, hlift, j_endo, sasaki_metric,
    split_tangent, vlift, UtbPoint, UtbTangent,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::report::Check;

pub const CURVATURE_STEP: f64 = 1e-4;

fn point(rng: &mut ChaCha8Rng, n: usize) -> UtbPoint {
    let d = n + 2;
    let mut x = MinkowskiVector::zeros(d);
    let mut r2 = 0.0;
    for i in 0..=n {
        let s = rng.random_range(-1.0..1.0);
        x.set(i, s);
        r2 += s * s;
    }
    x.set(n + 1, (1.0 + r2).sqrt());
    let mut v = MinkowskiVector::zeros(d);
    for i in 0..d {
        v.set(i, rng.random_range(-1.0..1.0));
    }
    v = v + v.dot(&x) * x;
    if v.norm2() < 1e-4 {
        v = MinkowskiVector::basis(d, 0) + MinkowskiVector::basis(d, 0).dot(&x) * x;
    }
    UtbPoint::project(x, v).expect("projected sample")
}

fn tangent(rng: &mut ChaCha8Rng, p: &UtbPoint, with_chi: bool) -> UtbTangent {
    let d = p.dim();
    let (mut a, mut b) = (MinkowskiVector::zeros(d), MinkowskiVector::zeros(d));
    for i in 0..d {
        a.set(i, rng.random_range(-0.5..0.5));
        b.set(i, rng.random_range(-0.5..0.5));
    }
    let t = hlift(p, &a, true).expect("projected lift").add(&vlift(p, &b, true).expect("projected lift"));
    if with_chi {
        t.add(&chi(p).scale(rng.random_range(-0.5..0.5)))
    } else {
        t
    }
}

#[derive(Default)]
struct Max(f64);

impl Max {
    fn see(&mut self, x: f64) {
        self.0 = self.0.max(if x.is_nan() { f64::INFINITY } else { x });
    }
}

/// Per-identity maximum residuals, with the sign convention of the curvature sweep.
pub struct Suite {
    pub checks: Vec<Check>,
    /// Max |curvature_fd − p*Ω|, the opposite orientation of the sweep.
    pub curvature_plus: f64,
}

pub fn run(samples: usize, seed: u64) -> Result<Suite, CliError> {
    if samples == 0 {
        return Err(CliError::Schema("--samples must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = [
        "hyperboloid_under_isometries",
        "flow_additivity",
        "endpoint_flow_invariance",
        "para_sasaki_flow_isometry",
        "omega_flow_invariance",
        "j_involution",
        "j_anti_isometry",
        "j_commutes_with_flow",
        "connection_reconstruction",
        "projection_forgets_flow",
        "transport_preserves_norm",
        "neutral_antisymmetry",
        "d_omega_closed_form",
        "d_omega_minus_pullback",
    ];
    let mut m: Vec<Max> = names.iter().map(|_| Max::default()).collect();
    let mut plus = Max::default();
    for k in 0..samples {
        let n = 1 + k % 3;
        let d = n + 2;
        let p = point(&mut rng, n);
        let (x, y) = (tangent(&mut rng, &p, true), tangent(&mut rng, &p, true));
        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let t: f64 = rng.random_range(-1.5..1.5);

        let iso = Isometry::boost(d, 0, a).compose(&Isometry::rotation(d, 0, n, 3.0 * b));
        let q = iso.apply(&p.x());
        m[0].see((q.dot(&q) + 1.0).abs());

        let one = geodesic_flow(&geodesic_flow(&p, a), b);
        let two = geodesic_flow(&p, a + b);
        m[1].see(one.max_abs_diff(&two) / (1.0 + two.x().euclid()));

        let hp = HPoint::new(p.x())?;
        let ft = geodesic_flow(&p, t);
        let hq = HPoint::new(ft.x())?;
        for sign in [1, -1] {
            m[2].see(geodesic_endpoint(&hp, &p.v(), sign)?.distance(&geodesic_endpoint(&hq, &ft.v(), sign)?));
        }

        let s0 = sasaki_metric(&x, &y)?;
        let s1 = sasaki_metric(&dflow(&x, t), &dflow(&y, t))?;
        m[3].see((s0 - s1).abs() / (1.0 + (2.0 * t).cosh()));
        m[4].see((connection_form(&dflow(&x, t)) - connection_form(&x)).abs() / (1.0 + t.cosh()));

        let (xh, yh) = (x.chi_free(), y.chi_free());
        let jx = j_endo(&xh)?;
        m[5].see(j_endo(&jx)?.sub(&xh).split_norm());
        let g = ghat_metric(&xh, &yh)?;
        m[6].see((g + ghat_metric(&jx, &j_endo(&yh)?)?).abs() / (1.0 + g.abs()));
        m[7].see(dflow(&jx, t).sub(&j_endo(&dflow(&xh, t))?).split_norm() / (1.0 + t.cosh()));

        let sp = split_tangent(&x)?;
        let rebuilt = chi(&p).scale(sp.chi_coeff).add(&hlift(&p, &sp.h0, false)?).add(&vlift(&p, &sp.v0, false)?);
        m[8].see(rebuilt.sub(&x).split_norm() / (1.0 + x.split_norm()));

        m[9].see(p_project(&ft).distance(&p_project(&p)));

        let gx = GTangent::new(xh)?;
        let moved = transport_to(&gx, &ft)?;
        let (n0, n1) = (g_metric(&gx, &gx)?, g_metric(&moved, &moved)?);
        m[10].see((n0 - n1).abs() / ((1.0 + n0.abs()) * (2.0 * t).cosh()));
        let gy = GTangent::new(yh)?;
        let w = geodloom::geodesic_space::omega(&gx, &gy)? + geodloom::geodesic_space::omega(&gy, &gx)?;
        m[11].see(w.abs() + (g_metric(&gx, &gy)? + g_metric(&j_para(&gx), &j_para(&gy))?).abs() / (1.0 + g.abs()));

        let fd = curvature_fd(&p, &x, &y, CURVATURE_STEP)?;
        m[12].see((fd - d_omega_exact(&x, &y)).abs());
        let pw = pullback_omega(&x, &y)?;
        m[13].see((fd + pw).abs());
        plus.see((fd - pw).abs());
    }
    let tols = [1e-10, 1e-10, 1e-9, 1e-10, 1e-10, 1e-12, 1e-12, 1e-10, 1e-12, 1e-9, 1e-10, 1e-12];
    let mut checks: Vec<Check> =
        names[..12].iter().zip(&m).zip(tols).map(|((nm, r), tol)| Check::new(nm, r.0, tol)).collect();
    let curv_tol = 50.0 * CURVATURE_STEP;
    checks.push(Check::new(names[12], m[12].0, curv_tol));
    checks.push(Check::new(names[13], m[13].0, curv_tol));
    Ok(Suite { checks, curvature_plus: plus.0 })
}
