//! Error type shared by all modules.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range (non-positive, NaN,
    /// degenerate basis, malformed polyline, empty scan range, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The Voronoi circumradius reaches pi/2, where the warp factor
    /// degenerates; the metric is only defined below that threshold.
    #[error("cell circumradius {radius} is not below pi/2; shrink the lattice parameter")]
    CellTooLarge { radius: f64 },

    /// The requested manifold type does not pair with the given lattice
    /// or basis (wrong point symmetry, non-orthogonal basis, ...).
    #[error("incompatible geometry: {0}")]
    IncompatibleGeometry(String),

    /// A structurally valid request outside the supported catalogue
    /// (deck power out of range, flat-only manifold with a warped
    /// metric, displacement bound outside its proved window, ...).
    #[error("unsupported combination: {0}")]
    Unsupported(String),

    /// The discretisation would exceed the configured node budget.
    #[error("grid of {nodes} nodes exceeds the cap of {cap} (set SYSTOLIC_NODE_CAP to raise)")]
    NodeCapExceeded { nodes: usize, cap: usize },

    /// The graph region cannot contain the requested query.
    #[error("graph region too small: {0}")]
    RegionTooSmall(String),

    /// No shortest-path estimate could be produced within bounds.
    #[error("no path found: {0}")]
    NoPath(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the command line front end: 2 for invalid
    /// configuration, 3 for domain violations detected while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::IncompatibleGeometry(_) | Error::Unsupported(_) => 2,
            Error::CellTooLarge { .. }
            | Error::NodeCapExceeded { .. }
            | Error::RegionTooSmall(_)
            | Error::NoPath(_) => 3,
        }
    }
}
