use thiserror::Error;

/// Failures raised by models, steppers and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state outside model domain: {0}")]
    Domain(String),
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error("no real positive momentum reaches energy {energy}: {reason}")]
    InfeasibleEnergy { energy: f64, reason: String },
    #[error("kinetic flow hits a coordinate singularity: {0}")]
    Singularity(String),
    #[error("non-finite result after {0}")]
    Overflow(String),
    #[error("stage {stage} of scheme `{scheme}` failed: {source}")]
    Stage {
        scheme: String,
        stage: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("adaptive step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("time grids differ: {0}")]
    GridMismatch(String),
    #[error("degenerate orbit: {0}")]
    Degenerate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
