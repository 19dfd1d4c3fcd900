//! Hypersurfaces in hyperbolic space H^{n+1}, their lifts to the unit tangent
//! bundle, and Gauss maps into the space of oriented geodesics.
//!
//! Points are stored in the hyperboloid model inside R^{n+1,1}; every
//! constructor validates its inputs against [`config::Tolerances`].

pub mod chart;
pub mod config;
pub mod equivariance;
pub mod error;
pub mod exec;
pub mod flows;
pub mod gallery;
pub mod gauss;
pub mod geodesic_space;
pub mod grid;
pub mod hypersurface;
pub mod lorentz;
pub mod utb;

pub use error::{GeomError, Result};
