use thiserror::Error;

/// Errors raised by the solvers, the driver and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-physical state: {0}")]
    NonPhysicalState(String),
    #[error("vacuum state: {0}")]
    VacuumState(String),
    #[error("root finder did not converge: {0}")]
    NoConvergence(String),
    #[error("supersonic interface trace: {0}")]
    SupersonicInterface(String),
    #[error("negative interface velocity: {0}")]
    NegativeVelocity(String),
    #[error("singular GRP system (det = {det:e})")]
    SingularSystem { det: f64 },
    #[error("singular coupling matrix (det = {det:e})")]
    SingularCoupling { det: f64 },
    #[error("t-axis is not inside the intermediate region: {0}")]
    SonicFan(String),
    #[error("step [{t}, {t_end}] leaves the boundary window [{t0}, {t1}]")]
    WindowExceeded { t: f64, t_end: f64, t0: f64, t1: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("snapshots have mismatched geometry: {0}")]
    MismatchedDomains(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping any context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Parse { .. } | Error::Validation(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
