use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("beam splitter is not unitary: |r|^2 + |t|^2 = {norm}")]
    NonUnitarySplitter { norm: f64 },

    #[error("port {port} carries zero norm; post-selection probability vanishes")]
    ZeroNormPort { port: u8 },

    #[error("tolerance {0} outside the supported range [1e-13, 1e-6]")]
    InvalidTolerance(f64),

    #[error("step size underflow at t = {t:e} s (h = {h:e} s); problem appears stiff")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {t_end:e} s")]
    TooManySteps { max_steps: usize, t_end: f64 },

    #[error("vortex populations vanish in the averaging window; ratio undefined")]
    UndefinedRatio,

    #[error("quadrature for `{name}` did not converge (error estimate {estimate:e})")]
    QuadratureNotConverged { name: String, estimate: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::NonUnitarySplitter { .. }
            | Error::InvalidTolerance(_)
            | Error::Config(_)
            | Error::Io(_) => 2,
            Error::ZeroNormPort { .. }
            | Error::StepSizeUnderflow { .. }
            | Error::TooManySteps { .. }
            | Error::UndefinedRatio
            | Error::QuadratureNotConverged { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
