use std::path::PathBuf;

use thiserror::Error;

use crate::dataset::TrackId;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{file}: missing required column `{name}`")]
    MissingColumn { file: PathBuf, name: String },
    #[error("track {0}: frames are not contiguous")]
    NonContiguousFrames(TrackId),
    #[error("{file}: row {row}: cannot parse `{column}` from `{value}`")]
    UnitParse { file: PathBuf, row: usize, column: String, value: String },
    #[error("track {0} has no entry in the tracks meta file")]
    MissingTrackMeta(TrackId),
    #[error("track {0}: vehicle dimensions must be positive")]
    InvalidDimensions(TrackId),
    #[error("{0}: recording meta file has no data row")]
    EmptyRecordingMeta(PathBuf),
    #[error("frame rate must be positive, got {0}")]
    InvalidFrameRate(f64),
    #[error("{file}: {source}")]
    Csv { file: PathBuf, source: csv::Error },
    #[error("{file}: {source}")]
    Io { file: PathBuf, source: std::io::Error },
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("region `{0}`: polygon is self-intersecting")]
    SelfIntersectingPolygon(String),
    #[error("region `{id}`: unknown region type `{kind}`")]
    UnknownRegionType { id: String, kind: String },
    #[error("region `{0}`: polygon needs at least three distinct vertices and positive area")]
    DegeneratePolygon(String),
    #[error("region `{0}` is defined more than once")]
    DuplicateRegionId(String),
    #[error("region `{0}`: direction reference strays more than 5 m from the polygon")]
    DirectionRefOutside(String),
    #[error("{file}: {source}")]
    Json { file: PathBuf, source: serde_json::Error },
    #[error("{file}: {source}")]
    Io { file: PathBuf, source: std::io::Error },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{file}: {source}")]
    Io { file: PathBuf, source: std::io::Error },
    #[error("{file}: {message}")]
    Parse { file: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{file}: {source}")]
    Io { file: PathBuf, source: std::io::Error },
    #[error("{file}: {source}")]
    Csv { file: PathBuf, source: csv::Error },
    #[error("{file}: {source}")]
    Json { file: PathBuf, source: serde_json::Error },
    #[error("{file}: {message}")]
    Malformed { file: PathBuf, message: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
