use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("region discovery exceeded the vertex cap of {cap}")]
    RegionExplosion { cap: usize },
    #[error("region root {0} is not a member of the region")]
    DisconnectedRoot(String),
    #[error(
        "vertex {vertex} lies beyond the materialized depth cap (max distance {max_distance})"
    )]
    DepthCapExceeded { vertex: String, max_distance: u64 },
    #[error("vertex {0} does not belong to this graph")]
    UnknownVertex(String),
    #[error("no open edge in the percolation box")]
    EmptyCluster,
    #[error("linear system is singular: {0}")]
    Singular(String),
    #[error("solver did not converge: residual {residual:e}")]
    NotConverged { residual: f64 },
    #[error("vertex sets must be disjoint and nonempty: {0}")]
    Disjointness(String),
    #[error("residual killed mass {mass:e} after {steps} steps exceeds tolerance")]
    ResidualMass { mass: f64, steps: usize },
    #[error("region too small: exit mass {mass:e} exceeds {tolerance:e}")]
    RegionTooSmall { mass: f64, tolerance: f64 },
    #[error("tree height {height} too small for radius {radius}")]
    HeightTooSmall { height: usize, radius: usize },
    #[error("{failed} of {total} replicates failed (last error: {last})")]
    ReplicateFailures {
        failed: usize,
        total: usize,
        last: String,
    },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad user input or parameters that do not
    /// fit together (caps, depths, heights).
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpec(_)
                | Error::Json(_)
                | Error::Disjointness(_)
                | Error::DisconnectedRoot(_)
                | Error::UnknownVertex(_)
                | Error::RegionExplosion { .. }
                | Error::DepthCapExceeded { .. }
                | Error::HeightTooSmall { .. }
                | Error::EmptyCluster
        )
    }

    /// True when a solver, oracle or estimator failed its own tolerance.
    pub fn is_numerical_failure(&self) -> bool {
        matches!(
            self,
            Error::Singular(_)
                | Error::NotConverged { .. }
                | Error::ResidualMass { .. }
                | Error::RegionTooSmall { .. }
                | Error::ReplicateFailures { .. }
        )
    }
}
