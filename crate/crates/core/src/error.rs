use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size limit exceeded: {sites} sites > cap {cap}")]
    SizeLimit { sites: usize, cap: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("factorization failed at energy {energy}: pivot {pivot:e} below threshold after retries")]
    Factorization { energy: f64, pivot: f64 },

    #[error("energy {energy} outside interpolation range [{lo}, {hi}]")]
    OutOfRange { energy: f64, lo: f64, hi: f64 },

    #[error("interpolation undefined at energy {0}: bracketing value is zero")]
    UndefinedRegion(f64),

    #[error("fit window too wide: target {target:e} exceeds the landscape-law range at energy {energy}")]
    WindowTooWide { energy: f64, target: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("scaling regime violated: {0}")]
    ScalingRegime(String),

    #[error("dense oracle disagrees at energy {energy}: inertia count {inertia}, dense count {dense}")]
    OracleMismatch { energy: f64, inertia: usize, dense: usize },

    #[error("realization {index} failed: {source}")]
    Realization {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    /// `origin` names where the offending value came from, e.g. `config line 3`.
    #[error("{origin}: {message}")]
    Config { origin: String, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical kernels, as opposed to usage or I/O problems.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular(_)
            | Error::Convergence { .. }
            | Error::Factorization { .. }
            | Error::OutOfRange { .. }
            | Error::UndefinedRegion(_)
            | Error::WindowTooWide { .. }
            | Error::InsufficientData(_)
            | Error::ScalingRegime(_)
            | Error::SizeLimit { .. }
            | Error::OracleMismatch { .. } => true,
            Error::Realization { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => e.is_io_error(),
            Error::Realization { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
