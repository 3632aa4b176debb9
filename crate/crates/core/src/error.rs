use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the assessment pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("grids are not aligned: {0}")]
    Alignment(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("land-use positive and negative layers overlap in {} cell(s), first {:?}", .cells.len(), &.cells[..(.cells.len().min(10))])]
    LayerOverlap { cells: Vec<usize> },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid roughness length {0} m (must lie in (0, 10))")]
    InvalidRoughness(f64),
    #[error("LCOE undefined for annual energy {0} kWh/kW")]
    UndefinedLcoe(f64),
    #[error("perfect separation detected: coefficient `{0}` diverged")]
    Separation(String),
    #[error("collinear design matrix: column `{0}` is a linear combination of earlier columns")]
    Collinearity(String),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {msg}", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code for the CLI: 1 for configuration errors, 2 for data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            _ => 2,
        }
    }

    /// File the error refers to, when there is one.
    pub fn path(&self) -> Option<&std::path::Path> {
        match self {
            Error::Io { path, .. } | Error::Parse { path, .. } => Some(path),
            _ => None,
        }
    }

    /// Short machine-readable category used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Alignment(_) => "alignment",
            Error::Data(_) => "data",
            Error::LayerOverlap { .. } => "layer_overlap",
            Error::Config(_) => "config",
            Error::InvalidRoughness(_) => "invalid_roughness",
            Error::UndefinedLcoe(_) => "undefined_lcoe",
            Error::Separation(_) => "separation",
            Error::Collinearity(_) => "collinearity",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Csv(_) => "csv",
        }
    }
}
