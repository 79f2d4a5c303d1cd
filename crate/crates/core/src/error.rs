use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "target frequency {target} GHz is outside the flux arc [{min}, {max}] GHz of mode {mode}"
    )]
    OutOfArcRange {
        mode: String,
        target: f64,
        min: f64,
        max: f64,
    },

    #[error("sample {index} ({value} GHz) is outside the flux arc of mode {mode}")]
    OutOfArcRangeAt {
        mode: String,
        index: usize,
        value: f64,
    },

    #[error("Hilbert space dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{file}:{line}: {message}")]
    Validation {
        file: String,
        line: usize,
        message: String,
    },

    #[error("failed to parse {file}: {message}")]
    Parse { file: String, message: String },

    #[error("dressed-state labeling is ambiguous for {label:?} (overlap {overlap:.3})")]
    AmbiguousLabeling { label: Vec<usize>, overlap: f64 },

    #[error("no avoided crossing found within the sweep window")]
    NoCrossingInWindow,

    #[error("dimension `{dim}` value {value} is outside [{low}, {high}]")]
    OutOfRange {
        dim: String,
        value: f64,
        low: f64,
        high: f64,
    },

    #[error("capacitance block labels do not match: {0}")]
    LabelMismatch(String),

    #[error("capacitance matrix is singular")]
    SingularMatrix,

    #[error("target {quantity} = {target} is outside the attainable range [{min}, {max}]")]
    Unreachable {
        quantity: String,
        target: f64,
        min: f64,
        max: f64,
    },

    #[error("search did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("inverse distortion filter is unstable (pole magnitude {pole:.6})")]
    UnstableInverse { pole: f64 },

    #[error("time step did not converge after {refinements} refinements (change {change:.3e})")]
    NonConvergedStep { refinements: usize, change: f64 },

    #[error("conditional phase does not cross 180 degrees inside the search box [{low}, {high}]")]
    NoBracket { low: f64, high: f64 },

    #[error("randomized benchmarking fit failed: {0}")]
    FitFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Validation { .. }
                | Error::Parse { .. }
                | Error::UnknownMode(_)
                | Error::OutOfRange { .. }
                | Error::LabelMismatch(_)
                | Error::DimensionCap { .. }
                | Error::OutOfArcRange { .. }
                | Error::OutOfArcRangeAt { .. }
                | Error::Io(_)
        )
    }
}
