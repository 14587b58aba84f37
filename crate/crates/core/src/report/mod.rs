//! Aggregated outputs: positive-variation and max-based aggregation,
//! heatmaps, ranked extracts, report files and cross-recording comparison.

mod aggregate;
mod compare;
mod heatmap;
mod output;

pub use aggregate::{anomaly_abstract, positive_variation, rank_cmp, top_k, Ranked, WeightedItem};
pub use compare::{compare, write_comparison, ComparisonRow};
pub use heatmap::{heatmap, Heatmap};
pub use output::{
    contributing, ranked_from_analysis, read_detections, read_punctual, read_report, read_track_scores, write_outputs,
    DetectionRow, Level, PunctualRow, RegionJson, ReportJson, TrackJson, TrackRow,
};
