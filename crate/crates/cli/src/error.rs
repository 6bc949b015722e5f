use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numeric(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<dcesim::Error> for CliError {
    fn from(e: dcesim::Error) -> Self {
        use dcesim::Error as E;
        match e {
            E::InvalidParameter { .. } | E::DegenerateGeometry { .. } | E::CutoffTooSmall { .. } => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Numeric(other.to_string()),
        }
    }
}
