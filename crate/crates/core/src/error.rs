use thiserror::Error;

/// Errors raised by the geometry pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("inflection point at sample {index}: Frenet frame undefined")]
    InflectionPoint { index: usize },

    #[error("binormal field does not close (propagated binormal returns reversed)")]
    NonPeriodicBinormal,

    #[error("degenerate tangent at sample {index}")]
    DegenerateTangent { index: usize },

    #[error("operation requires a closed curve")]
    OpenCurve,

    #[error("parameter ({u}, {v}) outside the surface domain")]
    OutOfDomain { u: f64, v: f64 },

    #[error("surface singular at (u, v) = ({u}, {v})")]
    SingularPoint { u: f64, v: f64 },

    #[error("seam identification residual {residual:e} exceeds tolerance {tolerance:e}")]
    SeamMismatch { residual: f64, tolerance: f64 },

    #[error("sigma must be positive, found {value} at sample {index}")]
    NonPositiveSigma { index: usize, value: f64 },

    #[error("infeasible synthesis problem: {0}")]
    Infeasible(String),

    #[error(
        "optimizer did not converge after {iterations} iterations (last step {last_step:e}, kkt residual {kkt:e})"
    )]
    NonConvergence { iterations: usize, last_step: f64, kkt: f64 },

    #[error("numerical integration failed: {0}")]
    Integration(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable identifier used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DegenerateCurve(_) => "DegenerateCurve",
            Error::InflectionPoint { .. } => "InflectionPoint",
            Error::NonPeriodicBinormal => "NonPeriodicBinormal",
            Error::DegenerateTangent { .. } => "DegenerateTangent",
            Error::OpenCurve => "OpenCurve",
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::SingularPoint { .. } => "SingularPoint",
            Error::SeamMismatch { .. } => "SeamMismatch",
            Error::NonPositiveSigma { .. } => "NonPositiveSigma",
            Error::Infeasible(_) => "Infeasible",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::Integration(_) => "Integration",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
