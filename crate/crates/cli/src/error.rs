use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure during {stage}: {source}")]
    Numeric {
        stage: &'static str,
        #[source]
        source: lqrpid::Error,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn numeric(stage: &'static str) -> impl FnOnce(lqrpid::Error) -> CliError {
        move |source| CliError::Numeric { stage, source }
    }

    /// Process exit status: 2 config, 3 numeric, 1 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}
