use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] mscs_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("solver stopped after {iterations} iterations without reaching tolerance")]
    NotConverged { iterations: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 configuration, 3 data, 4 non-convergence, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(mscs_core::Error::Config(_)) => 2,
            Self::Core(mscs_core::Error::InvalidParameter(_)) => 2,
            Self::Core(mscs_core::Error::DimensionMismatch { .. }) => 2,
            Self::Core(mscs_core::Error::EmptyBand(_)) => 3,
            Self::Io { .. } | Self::Data(_) | Self::Image(_) | Self::Csv(_) => 3,
            Self::NotConverged { .. } => 4,
            Self::Core(mscs_core::Error::NonConvergence { .. }) => 4,
            Self::Core(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
