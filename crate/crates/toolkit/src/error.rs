use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToolError {
    #[error(transparent)]
    Core(#[from] dms_core::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("complex is disconnected")]
    Disconnected,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ToolError>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> ToolError {
    ToolError::Parse { line, msg: msg.into() }
}
