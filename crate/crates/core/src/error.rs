use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("pole of the psi-transform at z = {z} (atom at {atom})")]
    Pole { z: f64, atom: f64 },

    #[error("{what} = {value} is outside the attainable range ({lo}, {hi})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    /// The input distribution is a single point mass, which the
    /// R-diagonal recipe excludes.
    #[error("distribution of H is the Dirac mass at {location}")]
    DiracInput { location: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolve(String),

    #[error("singular value decomposition failed: {0}")]
    Svd(String),

    #[error("unknown operator tag `{0}`")]
    UnknownTag(String),

    #[error("malformed word spec: {0}")]
    WordSyntax(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Log-determinant sentinels (nodes sitting on an eigenvalue) leaked
    /// into a Laplacian stencil.
    #[error("{} grid node(s) carry a -inf sentinel, first at {:?}", nodes.len(), nodes.first())]
    Sentinel { nodes: Vec<(usize, usize)> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Two independent routes disagreed. This falsifies the implementation,
    /// not the input.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}
