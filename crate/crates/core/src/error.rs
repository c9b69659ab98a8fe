use thiserror::Error;

/// Errors raised by the geometry, kinematics and integration layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rotation angle {angle} is within 1e-6 of pi; logarithm branch is ambiguous")]
    AngleNearPi { angle: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge ({from}, {to}) of face {face} is shared by more than two faces or is inconsistently wound")]
    NonManifoldEdge { face: usize, from: usize, to: usize },
    #[error("edge ({from}, {to}) of face {face} has no opposite face")]
    OpenBoundary { face: usize, from: usize, to: usize },
    #[error("face {face} is degenerate (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },
    #[error("vertex {vertex} is not a single manifold fan")]
    NonManifoldVertex { vertex: usize },
    #[error("vertex {vertex} is not referenced by any face")]
    IsolatedVertex { vertex: usize },
    #[error("face {face} references vertex {vertex} which does not exist")]
    BadIndex { face: usize, vertex: usize },
    #[error("mesh encloses negative volume; faces are wound inward")]
    InvertedOrientation,
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),
    #[error("interpolated normal vanishes on face {face}")]
    ZeroNormal { face: usize },
    #[error("collision report is not penetrating")]
    NotPenetrating,

    #[error("tangent hint is parallel to the surface normal")]
    DegenerateHint,
    #[error("geodesic trace stuck at vertex {vertex}")]
    StuckAtVertex { vertex: usize },

    #[error("relative curvature system is singular (smallest singular value {sigma:e})")]
    SingularRelativeCurvature { sigma: f64 },
    #[error("chart point ({u}, {v}) is at or near a chart singularity")]
    ChartSingularity { u: f64, v: f64 },
    #[error("spin solve did not converge after {iterations} iterations")]
    SpinIkDiverged { iterations: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("integration failed at step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
