use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ReportError;

use super::output::ReportJson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub recording_id: u32,
    pub location_id: String,
    pub duration: f64,
    pub track_count: usize,
    pub interaction: f64,
    pub anomaly: f64,
    pub relevance: f64,
    pub interaction_per_track: f64,
    pub anomaly_per_track: f64,
    pub relevance_per_track: f64,
    /// Interaction from waiting periods and conflict-point detections only.
    pub baseline_interaction: f64,
}

pub fn compare(reports: &[ReportJson]) -> Vec<ComparisonRow> {
    reports
        .iter()
        .map(|r| {
            let per = |x: f64| if r.track_count > 0 { x / r.track_count as f64 } else { 0.0 };
            let s = r.dataset_scores;
            ComparisonRow {
                recording_id: r.recording_id,
                location_id: r.location_id.clone(),
                duration: r.duration,
                track_count: r.track_count,
                interaction: s.interaction,
                anomaly: s.anomaly,
                relevance: s.relevance,
                interaction_per_track: per(s.interaction),
                anomaly_per_track: per(s.anomaly),
                relevance_per_track: per(s.relevance),
                baseline_interaction: r.baseline_interaction,
            }
        })
        .collect()
}

/// Write the table as CSV to `path` and as JSON next to it.
pub fn write_comparison(rows: &[ComparisonRow], path: &Path) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv { file: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| ReportError::Io { file: path.to_path_buf(), source })?;
    let json_path = path.with_extension("json");
    let json =
        serde_json::to_string_pretty(rows).map_err(|source| ReportError::Json { file: json_path.clone(), source })?;
    std::fs::write(&json_path, json + "\n").map_err(|source| ReportError::Io { file: json_path, source })
}
