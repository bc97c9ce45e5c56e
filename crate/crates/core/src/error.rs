use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = MsdeError> = std::result::Result<T, E>;

/// Every failure the library can report. Each variant belongs to one pipeline
/// module (see [`MsdeError::module`]) and maps onto a CLI exit code.
#[derive(Debug, Error)]
pub enum MsdeError {
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot load {}: {detail}", path.display())]
    Load { path: PathBuf, detail: String },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("shape mismatch in {module}: {detail}")]
    Shape { module: &'static str, detail: String },

    #[error("cannot fit {what}: {detail}")]
    Fit { what: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("neighbor graph: {0}")]
    Graph(String),

    #[error("density weights: {0}")]
    Density(String),

    #[error("numeric failure in {module}: {detail}")]
    Numeric { module: &'static str, detail: String },

    #[error("metric undefined: {0}")]
    Metric(String),

    #[error("cannot split dataset: {0}")]
    Split(String),

    #[error("usage: {0}")]
    Usage(String),
}

impl MsdeError {
    /// Name of the pipeline module that raised the error, used as the
    /// machine-parsable prefix `MSDE-ERR <module>:` on the command line.
    pub fn module(&self) -> &'static str {
        match self {
            MsdeError::Io { .. } | MsdeError::Load { .. } | MsdeError::InvalidMatrix(_) => {
                "data_io"
            }
            MsdeError::Shape { module, .. } | MsdeError::Numeric { module, .. } => module,
            MsdeError::Fit { what, .. } => match *what {
                "standardizer" => "data_io",
                _ => "scoring",
            },
            MsdeError::Config(_) | MsdeError::Usage(_) => "cli",
            MsdeError::Graph(_) => "knn_graph",
            MsdeError::Density(_) => "density_weights",
            MsdeError::Metric(_) => "eval",
            MsdeError::Split(_) => "tune",
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            MsdeError::Config(_) | MsdeError::Usage(_) => 1,
            MsdeError::Numeric { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MsdeError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn load(path: impl Into<PathBuf>, detail: impl Into<String>) -> Self {
        MsdeError::Load {
            path: path.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn shape(module: &'static str, detail: impl Into<String>) -> Self {
        MsdeError::Shape {
            module,
            detail: detail.into(),
        }
    }

    pub(crate) fn numeric(module: &'static str, detail: impl Into<String>) -> Self {
        MsdeError::Numeric {
            module,
            detail: detail.into(),
        }
    }
}
