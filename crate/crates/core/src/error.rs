use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triangle (signed area {area:e})")]
    DegenerateTriangle { area: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("triangle {triangle} references vertex {vertex}, but the mesh has {count} vertices")]
    Index {
        triangle: usize,
        vertex: i64,
        count: usize,
    },

    #[error("triangle {0} duplicates an earlier triangle")]
    DuplicateTriangle(usize),

    #[error("point ({x}, {y}) is outside the mesh")]
    PointOutsideMesh { x: f64, y: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no triangle rule of degree {0} (available: 2, 5, 8, 10)")]
    UnsupportedDegree(usize),

    #[error("inadmissible enriched functionals: det N = {det:e}")]
    InadmissibleFunctionals { det: f64 },

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("triangle {index}: {source}")]
    AtTriangle {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Name of the variant, without payload; `AtTriangle` reports its cause.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateTriangle { .. } => "DegenerateTriangle",
            Error::Parse { .. } => "ParseError",
            Error::Index { .. } => "IndexError",
            Error::DuplicateTriangle(_) => "DuplicateTriangle",
            Error::PointOutsideMesh { .. } => "PointOutsideMesh",
            Error::Domain(_) => "DomainError",
            Error::UnsupportedDegree(_) => "UnsupportedDegree",
            Error::InadmissibleFunctionals { .. } => "InadmissibleFunctionals",
            Error::UnknownFunction(_) => "UnknownFunction",
            Error::UnknownElement(_) => "UnknownElement",
            Error::Config(_) => "ConfigError",
            Error::Io { .. } => "IoError",
            Error::AtTriangle { source, .. } => source.kind(),
        }
    }

    /// Whether the error comes from invalid user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownFunction(_) | Error::UnknownElement(_) | Error::UnsupportedDegree(_)
        )
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
