use thiserror::Error;

pub const EXIT_OK: i32 = 0;
/// I/O failures and failed validation runs.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_UNREACHABLE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("lattice side {side} exceeds the resource cap of {max}; use --lattice-side {max} or smaller (or raise --max-side)")]
    ResourceCap { side: usize, max: usize },
    #[error("{0}")]
    Unreachable(String),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error(transparent)]
    Core(#[from] percwalk::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use percwalk::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::ResourceCap { .. } => EXIT_RESOURCE,
            CliError::Unreachable(_) => EXIT_UNREACHABLE,
            CliError::Core(e) => match e {
                E::TooLarge(_) => EXIT_RESOURCE,
                E::Unreachable(_) | E::Domain(_) => EXIT_UNREACHABLE,
                E::Config(_) | E::OutOfRange { .. } | E::Shape(_) => EXIT_CONFIG,
                _ => EXIT_FAILURE,
            },
            CliError::ValidationFailed(_) | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => EXIT_FAILURE,
        }
    }
}
