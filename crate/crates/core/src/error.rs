use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("singular denominator in steady-state amplitudes (|S| = {0:e})")]
    SingularDenominator(f64),

    #[error("non-convergent self-consistency after {iterations} iterations (last step {last_step:e} rad/s)")]
    NonConvergent { iterations: usize, last_step: f64 },

    #[error("eigen-solver failure: {0}")]
    EigenSolver(String),

    #[error("unstable system (spectral abscissa {0:e} rad/s)")]
    Unstable(f64),

    #[error("Lyapunov solver breakdown: {0}")]
    SolverBreakdown(String),

    #[error("symplectic eigenvalue pairing failed: {0}")]
    Pairing(String),

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("unsupported mode count {0} (expected {1})")]
    UnsupportedModeCount(usize, &'static str),

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no stable point found in {0} evaluations")]
    NoStablePoint(usize),

    #[error("not entangled at floor temperature ({measure} = {value:e} at {floor_k} K)")]
    NotEntangledAtFloor { measure: String, value: f64, floor_k: f64 },

    #[error("{measure} still above threshold at T_max = {t_max} K")]
    NotVanished { measure: String, t_max: f64 },

    #[error("non-monotone temperature profile for {measure}")]
    NonMonotone { measure: String, samples: Vec<(f64, f64)> },

    #[error("at parameter point [{context}]: {source}")]
    AtPoint {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Strips parameter-point context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
