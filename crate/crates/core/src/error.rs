use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

/// Worst node found while scanning one flow time in `desingularize_and_project`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanFailure {
    pub t: f64,
    pub node: Vec<f64>,
    pub min_singular: f64,
    pub orientation_flip: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (n must be 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("{what}: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Invariant { what: &'static str, residual: f64, tol: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("tangent not orthogonal to the geodesic flow generator (chi coefficient {0:.3e})")]
    NotHorizontalToChi(f64),
    #[error("tangent vectors live over different base points")]
    BaseMismatch,
    #[error("points do not lie on the same oriented geodesic (endpoint distance {0:.3e})")]
    GeodesicMismatch(f64),
    #[error("finite-difference step {h:.3e} too small: Richardson disagreement {diff:.3e}")]
    Cancellation { h: f64, diff: f64 },
    #[error("grid too coarse: Richardson disagreement {diff:.3e} above {tol:.3e}")]
    GridTooCoarse { diff: f64, tol: f64 },
    #[error("rank deficiency at node {node:?}: smallest singular value {singular:.3e}")]
    RankDeficient { node: Vec<f64>, singular: f64 },
    #[error("principal curvature {lambda:.6} at node {node:?} is not small")]
    LargeCurvature { node: Vec<f64>, lambda: f64 },
    #[error("singular resolvent id - tanh(t) B")]
    SingularResolvent,
    #[error("pair is not orthonormal for the first fundamental form (residual {0:.3e})")]
    NotOrthonormal(f64),
    #[error("unknown gallery entry {0:?}")]
    UnknownGallery(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("path-independence residual {residual:.3e} above {tol:.3e} on a simply connected domain")]
    PathDependent { residual: f64, tol: f64 },
    #[error("no admissible flow time in [{lo}, {hi}]; {} scan entries", .report.len())]
    NoAdmissibleTime { lo: f64, hi: f64, report: Vec<ScanFailure> },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("loop is not closed (gap {0:.3e})")]
    OpenLoop(f64),
    #[error("seam mismatch {0:.3e}: the map is not equivariant at a deck seam")]
    SeamMismatch(f64),
    #[error("holonomy spread {spread:.3e} above {tol:.3e}: Gauss map not equivariant")]
    Spread { spread: f64, tol: f64 },
    #[error("isotopy stage grids differ")]
    StageMismatch,
    #[error("flow step failed after {halvings} halvings at t = {t}")]
    StepFailed { t: f64, halvings: usize },
}
