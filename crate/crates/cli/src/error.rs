use sierpile::growth::GrowthError;
use sierpile::{GasketError, RadialError, RenderError, SandpileError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("capacity: {0}")]
    Capacity(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Capacity(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<GasketError> for CliError {
    fn from(e: GasketError) -> Self {
        CliError::Capacity(e.to_string())
    }
}

impl From<GrowthError> for CliError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::Usage(s) => CliError::Usage(s),
            GrowthError::Gasket(_) | GrowthError::Capacity(_) | GrowthError::Budget(_) => {
                CliError::Capacity(e.to_string())
            }
            GrowthError::Hierarchy(_) | GrowthError::Certificate(_) => {
                CliError::Verification(e.to_string())
            }
        }
    }
}

impl From<SandpileError> for CliError {
    fn from(e: SandpileError) -> Self {
        match e {
            SandpileError::Gasket(_) | SandpileError::Budget { .. } => {
                CliError::Capacity(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<RadialError> for CliError {
    fn from(e: RadialError) -> Self {
        match e {
            RadialError::Growth(g) => g.into(),
            RadialError::Gasket(g) => g.into(),
            RadialError::RemainderBound { .. } => CliError::Verification(e.to_string()),
            RadialError::Usage(s) => CliError::Usage(s),
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Usage(s) => CliError::Usage(s),
            RenderError::Image(_) => CliError::Capacity(e.to_string()),
        }
    }
}
