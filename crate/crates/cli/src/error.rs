use serde::Serialize;

use crate::output::SCHEMA_VERSION;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] betaplane::Error),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub status: &'static str,
    pub category: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<&'static str>,
    pub message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Model(e) if e.is_validation() => 2,
            Self::Model(_) => 3,
            Self::Io(_) | Self::Json(_) => 1,
        }
    }

    pub fn report(&self) -> ErrorReport {
        let category = match self.exit_code() {
            2 => "validation",
            3 => "numerical",
            _ => "io",
        };
        let hypothesis = match self {
            Self::Model(e) => e.violated_hypothesis().map(|h| h.as_str()),
            _ => None,
        };
        ErrorReport {
            schema_version: SCHEMA_VERSION,
            status: "error",
            category,
            hypothesis,
            message: self.to_string(),
        }
    }
}
