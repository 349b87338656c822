use std::path::PathBuf;

use qwalk_core::Error as CoreError;

/// Failure categories surfaced to the shell. Each maps to a fixed exit code
/// and a stable lowercase name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Config,
    Io,
    Simulation,
    Numeric,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Config => "config",
            Category::Io => "io",
            Category::Simulation => "simulation",
            Category::Numeric => "numeric",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 2,
            Category::Io => 3,
            Category::Simulation => 4,
            Category::Numeric => 5,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("W = {disorder}, realization {realization}: {source}")]
    Simulation {
        disorder: f64,
        realization: usize,
        #[source]
        source: CoreError,
    },

    #[error("W = {disorder}, t = {time}, {observable}: {source}")]
    Numeric {
        disorder: f64,
        time: usize,
        observable: &'static str,
        #[source]
        source: CoreError,
    },

    #[error("non-finite {observable} at W = {disorder}, t = {time}")]
    NonFinite {
        disorder: f64,
        time: usize,
        observable: String,
    },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(vec![message.into()])
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> Category {
        match self {
            CliError::Config(_) => Category::Config,
            CliError::Io { .. } | CliError::Format { .. } => Category::Io,
            CliError::Simulation { .. } => Category::Simulation,
            CliError::Numeric { .. } | CliError::NonFinite { .. } => Category::Numeric,
        }
    }

    /// `{"error": <category>, "message": <text>}` on one line.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.category().name(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
