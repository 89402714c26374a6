use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("value {value} outside the domain [{lo}, {hi}] of the {kernel} kernel")]
    Domain {
        kernel: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("refusing oracle computation: {0}")]
    Guard(String),

    #[error("unstable network: worst-case load {0} is not below 1")]
    Stability(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
