//! Batch analysis of bird's-eye-view road-user trajectory recordings.
//!
//! A recording is scanned for fourteen elementary traffic characteristics
//! (detections) per road user and timestep. Detections are scored, weighted
//! by how rare they are in their map region, and composed into interaction,
//! anomaly and relevance scores at punctual, track, region and dataset level.

pub mod clustering;
pub mod config;
pub mod dataset;
pub mod detection;
pub mod error;
pub mod geometry;
pub mod map;
pub mod pipeline;
pub mod report;
pub mod scoring;
pub mod synthetic;

pub use config::Config;
pub use error::{Error, Result};
pub use pipeline::{analyze, Analysis, ScoreKind, Scores};
