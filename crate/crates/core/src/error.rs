use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("grid resolves {found} dyadic shells, at least {required} required")]
    TooFewShells { found: usize, required: usize },

    #[error("dyadic block {l} outside partition range [{min}, {max}]")]
    BlockOutOfRange { l: i32, min: i32, max: i32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coupling weight {alpha} breaks the energy equivalence (largest admissible {boundary})")]
    EquivalenceViolation { alpha: f64, boundary: f64 },

    #[error("vacuum: min density {rho_min:e} below floor {floor:e}")]
    Vacuum { rho_min: f64, floor: f64 },

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("malformed field data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
