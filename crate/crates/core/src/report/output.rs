use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::TrackId;
use crate::detection::DetectionType;
use crate::error::ReportError;
use crate::pipeline::{Analysis, ScoreKind, Scores, OFF_MAP_ID};

use super::aggregate::{top_k, Ranked};

pub const REPORT_JSON: &str = "report.json";
pub const TRACK_SCORES_CSV: &str = "track_scores.csv";
pub const REGION_SCORES_CSV: &str = "region_scores.csv";
pub const DETECTIONS_CSV: &str = "detections.csv";
pub const PUNCTUAL_SCORES_CSV: &str = "punctual_scores.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackJson {
    pub id: TrackId,
    pub class: String,
    pub scores: Scores,
    pub peak_frame: u32,
    pub dominant_type: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionJson {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub scores: Scores,
    pub users: u64,
    pub detection_counts: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub recording_id: u32,
    pub location_id: String,
    pub scenario: String,
    pub frame_rate: f64,
    pub duration: f64,
    pub track_count: usize,
    pub detection_count: usize,
    pub config_hash: String,
    pub version: String,
    pub dataset_scores: Scores,
    pub baseline_interaction: f64,
    pub tracks: Vec<TrackJson>,
    pub regions: Vec<RegionJson>,
    pub detection_counts_by_type: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackRow {
    pub track_id: TrackId,
    pub class: String,
    pub interaction: f64,
    pub anomaly: f64,
    pub relevance: f64,
    pub peak_frame: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PunctualRow {
    pub track_id: TrackId,
    pub frame: u32,
    pub interaction: f64,
    pub anomaly: f64,
    pub relevance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub id: usize,
    #[serde(rename = "type")]
    pub kind: String,
    pub subject: TrackId,
    pub partner: Option<TrackId>,
    pub start_frame: u32,
    pub end_frame: u32,
    pub value: f64,
    pub score: f64,
    pub gamma: f64,
    pub weighted_score: f64,
    pub region: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Track,
    Punctual,
}

impl Level {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "track" => Some(Level::Track),
            "punctual" => Some(Level::Punctual),
            _ => None,
        }
    }
}

fn region_name(a: &Analysis, r: usize) -> String {
    a.regions.get(r).map_or_else(|| OFF_MAP_ID.to_string(), |x| x.id.clone())
}

fn counts_map(counts: &[u64]) -> BTreeMap<String, u64> {
    DetectionType::ALL.iter().map(|t| (t.as_str().to_string(), counts[t.index()])).collect()
}

impl ReportJson {
    pub fn from_analysis(a: &Analysis) -> ReportJson {
        let mut totals = [0u64; DetectionType::ALL.len()];
        a.detections.iter().for_each(|d| totals[d.detection.kind.index()] += 1);
        ReportJson {
            recording_id: a.recording_id,
            location_id: a.location_id.clone(),
            scenario: a.config.scenario.as_str().to_string(),
            frame_rate: a.frame_rate,
            duration: a.duration,
            track_count: a.tracks.len(),
            detection_count: a.detections.len(),
            config_hash: a.config_hash.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            dataset_scores: a.dataset,
            baseline_interaction: a.baseline_interaction,
            tracks: a
                .tracks
                .iter()
                .map(|t| TrackJson {
                    id: t.track_id,
                    class: t.class.as_str().to_string(),
                    scores: t.scores,
                    peak_frame: t.peak_frame,
                    dominant_type: t.dominant_type.map(|d| d.as_str().to_string()),
                })
                .collect(),
            regions: a
                .regions
                .iter()
                .map(|r| RegionJson {
                    id: r.id.clone(),
                    kind: r.kind.clone(),
                    scores: r.scores,
                    users: r.users,
                    detection_counts: counts_map(&r.detection_counts),
                })
                .collect(),
            detection_counts_by_type: counts_map(&totals),
        }
    }
}

fn io_err(file: &Path) -> impl Fn(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { file: file.to_path_buf(), source }
}

fn csv_err(file: &Path) -> impl Fn(csv::Error) -> ReportError + '_ {
    move |source| ReportError::Csv { file: file.to_path_buf(), source }
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, ReportError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(csv_err(path))
}

/// Write every report file into `dir`, creating it if needed. Punctual
/// scores are written only for frames where some score is non-zero.
pub fn write_outputs(a: &Analysis, dir: &Path) -> Result<(), ReportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(REPORT_JSON);
    let mut f = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
    let json = serde_json::to_string_pretty(&ReportJson::from_analysis(a))
        .map_err(|source| ReportError::Json { file: path.clone(), source })?;
    f.write_all(json.as_bytes()).and_then(|_| f.write_all(b"\n")).and_then(|_| f.flush()).map_err(io_err(&path))?;

    write_rows(
        &dir.join(TRACK_SCORES_CSV),
        a.tracks.iter().map(|t| TrackRow {
            track_id: t.track_id,
            class: t.class.as_str().to_string(),
            interaction: t.scores.interaction,
            anomaly: t.scores.anomaly,
            relevance: t.scores.relevance,
            peak_frame: t.peak_frame,
        }),
    )?;

    let path = dir.join(REGION_SCORES_CSV);
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    let mut header = vec!["region_id", "type", "interaction", "anomaly", "relevance", "users"];
    header.extend(DetectionType::ALL.iter().map(|t| t.as_str()));
    w.write_record(&header).map_err(csv_err(&path))?;
    for r in &a.regions {
        let mut rec = vec![
            r.id.clone(),
            r.kind.clone(),
            r.scores.interaction.to_string(),
            r.scores.anomaly.to_string(),
            r.scores.relevance.to_string(),
            r.users.to_string(),
        ];
        rec.extend(r.detection_counts.iter().map(|c| c.to_string()));
        w.write_record(&rec).map_err(csv_err(&path))?;
    }
    w.flush().map_err(io_err(&path))?;

    for (name, grid) in &a.heatmaps {
        let path = dir.join(format!("heatmap_{name}.csv"));
        let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
        w.write_record(["x", "y", "value"]).map_err(csv_err(&path))?;
        for (c, v) in grid.cells() {
            w.write_record([c.x.to_string(), c.y.to_string(), v.to_string()]).map_err(csv_err(&path))?;
        }
        w.flush().map_err(io_err(&path))?;
    }

    write_rows(
        &dir.join(DETECTIONS_CSV),
        a.detections.iter().enumerate().map(|(id, s)| DetectionRow {
            id,
            kind: s.detection.kind.as_str().to_string(),
            subject: s.detection.subject,
            partner: s.detection.partner,
            start_frame: s.detection.start_frame,
            end_frame: s.detection.end_frame,
            value: s.detection.value,
            score: s.score,
            gamma: s.gamma,
            weighted_score: s.weighted(),
            region: region_name(a, s.region),
        }),
    )?;

    write_rows(
        &dir.join(PUNCTUAL_SCORES_CSV),
        a.series.iter().flat_map(|ser| {
            (0..ser.interaction.len()).filter_map(move |k| {
                let s = ser.at(k);
                (s.interaction != 0.0 || s.anomaly != 0.0).then_some(PunctualRow {
                    track_id: ser.track_id,
                    frame: ser.first_frame + k as u32,
                    interaction: s.interaction,
                    anomaly: s.anomaly,
                    relevance: s.relevance,
                })
            })
        }),
    )
}

pub fn read_report(dir: &Path) -> Result<ReportJson, ReportError> {
    let path: PathBuf = dir.join(REPORT_JSON);
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|source| ReportError::Json { file: path, source })
}

pub fn read_track_scores(dir: &Path) -> Result<Vec<TrackRow>, ReportError> {
    read_rows(&dir.join(TRACK_SCORES_CSV))
}

pub fn read_punctual(dir: &Path) -> Result<Vec<PunctualRow>, ReportError> {
    read_rows(&dir.join(PUNCTUAL_SCORES_CSV))
}

pub fn read_detections(dir: &Path) -> Result<Vec<DetectionRow>, ReportError> {
    read_rows(&dir.join(DETECTIONS_CSV))
}

/// Detections of `track` active at `frame`.
pub fn contributing(detections: &[DetectionRow], track: TrackId, frame: u32) -> Vec<&DetectionRow> {
    detections.iter().filter(|d| d.subject == track && d.start_frame <= frame && frame <= d.end_frame).collect()
}

/// Ranked extract straight from an in-memory analysis.
pub fn ranked_from_analysis(a: &Analysis, which: ScoreKind, level: Level, k: usize) -> Vec<Ranked> {
    let items: Vec<Ranked> = match level {
        Level::Track => a
            .tracks
            .iter()
            .map(|t| Ranked { track_id: t.track_id, frame: Some(t.peak_frame), score: t.scores.get(which) })
            .collect(),
        Level::Punctual => a
            .series
            .iter()
            .flat_map(|s| {
                (0..s.interaction.len()).map(move |k| Ranked {
                    track_id: s.track_id,
                    frame: Some(s.first_frame + k as u32),
                    score: s.at(k).get(which),
                })
            })
            .collect(),
    };
    top_k(items, k)
}
