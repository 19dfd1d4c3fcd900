//! Session-level tolerances and execution policy.
//!
//! Configuration is set once (typically by the CLI at start-up) and read by
//! every operation. Reads take a copy, so workers never share mutable state.

use std::sync::RwLock;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Validity of points and tangents (hyperboloid, unit tangent bundle relations).
    pub tangent: f64,
    /// Endpoint comparison of oriented geodesics in the normalized slice.
    pub geodesic: f64,
    /// Default step for `curvature_fd`.
    pub fd_step: f64,
    /// Relative smallest-singular-value threshold of the immersion check.
    pub immersion_rel: f64,
    /// Lagrangian residual accepted by integrability preconditions.
    pub lagrangian: f64,
    /// Absolute holonomy tolerance of the integrability verdict.
    pub holonomy: f64,
    /// Curvature margin: |lambda| must stay below `1 - curvature_margin`.
    pub curvature_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tangent: 1e-8,
            geodesic: 1e-8,
            fd_step: 1e-4,
            immersion_rel: 1e-6,
            lagrangian: 1e-7,
            holonomy: 1e-5,
            curvature_margin: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    /// Data-parallel node sweeps (rayon). Falls back to sequential when the
    /// `parallel` feature is disabled.
    #[default]
    Parallel,
    Sequential,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Config {
    pub tol: Tolerances,
    pub exec: Exec,
}

static CONFIG: RwLock<Config> = RwLock::new(Config {
    tol: Tolerances {
        tangent: 1e-8,
        geodesic: 1e-8,
        fd_step: 1e-4,
        immersion_rel: 1e-6,
        lagrangian: 1e-7,
        holonomy: 1e-5,
        curvature_margin: 1e-9,
    },
    exec: Exec::Parallel,
});

pub fn config() -> Config {
    *CONFIG.read().unwrap_or_else(|e| e.into_inner())
}

pub fn tol() -> Tolerances {
    config().tol
}

pub fn set_config(c: Config) {
    *CONFIG.write().unwrap_or_else(|e| e.into_inner()) = c;
}

pub fn set_exec(exec: Exec) {
    let mut c = config();
    c.exec = exec;
    set_config(c);
}
