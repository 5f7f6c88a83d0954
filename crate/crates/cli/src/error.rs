use tfl::cones::ConeError;
use tfl::fermat::FermatError;
use tfl::gridmin::GridError;
use tfl::polyconfig::PolyError;
use tfl::tensions::TensionError;
use thiserror::Error;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }
}

impl From<TensionError> for CliError {
    fn from(e: TensionError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<FermatError> for CliError {
    fn from(e: FermatError) -> Self {
        match e {
            FermatError::NonConvergence { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Quadrature(_) | PolyError::TangentialCrossing { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ConeError> for CliError {
    fn from(e: ConeError) -> Self {
        match e {
            ConeError::Fermat(f) => f.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::NoJunctionInWindow | GridError::MultipleJunctions { .. } => {
                CliError::Numerical(e.to_string())
            }
            GridError::Io(io) => CliError::Io(io),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Numerical(format!("serialization: {e}"))
    }
}
