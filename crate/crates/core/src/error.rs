use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("lossless resonance singularity at omega = {omega}")]
    LosslessResonance { omega: f64 },

    #[error(
        "grid too coarse: {points:.1} grid points per resolved feature, need at least {required}"
    )]
    GridTooCoarse { points: f64, required: usize },

    #[error("CFL condition violated: dt = {dt} exceeds dx = {dx}")]
    Cfl { dt: f64, dx: f64 },

    #[error("numerical blow-up at step {step}")]
    BlowUp { step: usize },

    #[error("array length mismatch: {0}")]
    LengthMismatch(String),

    #[error("operation requires a periodic boundary")]
    NotPeriodic,

    #[error("step size too large: {0}")]
    StepSize(String),

    #[error("spectral grid does not cover the kernel: {0}")]
    GridCoverage(String),

    #[error(
        "field did not decay (residual {residual:.3e}); increase run length or enable windowing"
    )]
    InsufficientDecay { residual: f64 },

    #[error("mismatched configurations: {0}")]
    Mismatch(String),
}
