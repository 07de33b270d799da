use thiserror::Error;

/// Errors produced by the numeric kernels and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("eigendecomposition did not converge after {max_sweeps} sweeps for matrix {matrix}")]
    EigNonConvergence { max_sweeps: usize, matrix: String },

    #[error("matrix is not positive definite (offending eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("matrix is not positive semi-definite (pivot {pivot:e})")]
    Indefinite { pivot: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("cannot decompose a matrix with non-positive trace")]
    ZeroTrace,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("edge mask is empty; the edge error is undefined")]
    EmptyEdgeMask,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid scene definition: {0}")]
    InvalidScene(String),

    #[error("at pixel ({x}, {y}): {source}")]
    AtPixel {
        x: usize,
        y: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("raster channel {channel}: {detail}")]
    Raster { channel: String, detail: String },

    #[error("malformed file {path}: {detail}")]
    Format { path: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image encoding failed: {0}")]
    Png(String),
}

impl Error {
    /// Attach pixel coordinates to an error bubbling out of a per-pixel kernel.
    pub fn at_pixel(self, x: usize, y: usize) -> Self {
        Error::AtPixel {
            x,
            y,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
