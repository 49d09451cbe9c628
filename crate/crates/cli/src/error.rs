use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<triplewave::Error> for CliError {
    fn from(e: triplewave::Error) -> Self {
        match e {
            triplewave::Error::Io(m) => Self::Io(m),
            other => Self::Config(other.to_string()),
        }
    }
}
