use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("evaluation domain error: {0}")]
    Domain(String),
    #[error("degenerate metric: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("flow extinct at t = {extinction}: {msg}")]
    Extinction { extinction: f64, msg: String },
    #[error("step size error: {0}")]
    StepSize(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}
