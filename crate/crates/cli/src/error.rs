use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Compute(#[from] qkern_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    exit_code: i32,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    /// 1 for usage errors, 2 for everything raised while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) | CliError::Io { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Compute(e) => e.kind(),
            CliError::Io { .. } => "io",
        }
    }

    /// `{"error": {"kind", "message", "exit_code"}}`
    pub fn to_json(&self) -> String {
        let report = ErrorReport {
            error: ErrorBody {
                kind: self.kind(),
                message: self.to_string(),
                exit_code: self.exit_code(),
            },
        };
        crate::output::to_json_string(&report).expect("error report serialises")
    }
}
