use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error)]
pub enum CsqError {
    /// A point fell outside the chart where an evaluation was requested.
    #[error("chart violation at ({x}, {y}): {reason}")]
    ChartViolation { x: f64, y: f64, reason: String },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed: requested tol {requested:e}, achieved {achieved:e} after {cells} cells (max depth {max_depth})")]
    QuadratureFailed {
        requested: f64,
        achieved: f64,
        cells: usize,
        max_depth: usize,
    },

    /// Invalid model or operation parameter.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// Coefficient matrices at different levels cannot be combined.
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: usize, right: usize },

    /// Measure calibration rejected because the per-sample integrals spread too much.
    #[error("calibration rejected: spread {spread:e} exceeds {limit:e} (measure not of the required homogeneous form)")]
    CalibrationRejected { spread: f64, limit: f64 },

    /// A 3-point sample too close to the zero set of the propagator for a stable logarithm.
    #[error("triple too spread: min pairwise weighted modulus {min_modulus:e} below {threshold:e}")]
    TripleTooSpread { min_modulus: f64, threshold: f64 },

    /// Mesh too coarse for the requested field strength.
    #[error("mesh too coarse for level {n}: max face phase {max_phase} within {margin} of pi")]
    MeshTooCoarse { n: u32, max_phase: f64, margin: f64 },
}

pub type Result<T> = std::result::Result<T, CsqError>;
