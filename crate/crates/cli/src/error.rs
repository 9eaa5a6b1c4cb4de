use thiserror::Error;

/// Command failures, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("pipeline failed: {0}")]
    Pipeline(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("refused: {0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Pipeline(_) => 1,
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Config(format!("{}: {e}", path.display()))
    }
}

impl From<hetrank::Error> for CliError {
    fn from(e: hetrank::Error) -> Self {
        match e {
            hetrank::Error::Config(_) | hetrank::Error::Domain(_) | hetrank::Error::Parse { .. } => {
                CliError::Config(e.to_string())
            }
            hetrank::Error::SizeLimit { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Pipeline(e.to_string()),
        }
    }
}
