use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero-length vector")]
    ZeroLengthVector,

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid tetrahedron: {0}")]
    InvalidTetrahedron(&'static str),

    #[error(
        "no opposite-edge pair has its common perpendicular through both midpoints (best residual {residual:.3e})"
    )]
    NotBoundarySymmetric { residual: f64 },

    #[error("terminals are not coplanar")]
    NotCoplanar,

    #[error("invalid trapezium: {0}")]
    InvalidTrapezium(&'static str),

    #[error("angle {degrees}° is outside {range}")]
    ThetaOutOfRange { degrees: f64, range: &'static str },

    #[error("construction nodes cross: bridge length {bridge:.3e} < 0")]
    DegenerateBridge { bridge: f64 },

    #[error("full Steiner topology collapses: bridge length {bridge:.3e} < 0")]
    TopologyCollapse { bridge: f64 },

    #[error("weights violate the strict triangle inequalities: {0}")]
    InfeasibleWeights(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
}
