use thiserror::Error;

/// Errors raised by the analysis modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node {node:?} is too close to the grid boundary for the stencil")]
    OutOfStencil { node: [usize; 3] },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{0} leaves the field domain")]
    Domain(String),

    #[error("degenerate point: |grad rho| = {norm:e} < {min:e}")]
    DegeneratePoint { norm: f64, min: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("kernel under-resolved: delta = {delta:e} but grid spacing is {spacing:e} (need delta >= 2h)")]
    UnderResolvedKernel { delta: f64, spacing: f64 },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("an atom lies on the boundary of cell {0}")]
    AmbiguousCell(String),

    #[error("non-finite value at {0}")]
    NonFinite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
