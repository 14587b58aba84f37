use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::dataset::TrackId;
use crate::detection::DetectionType;

/// Sum of the positive increments of a series. The first value counts as a
/// rise from zero, so a track entering mid-conflict still scores.
pub fn positive_variation(series: &[f64]) -> f64 {
    let Some(&first) = series.first() else { return 0.0 };
    first.max(0.0) + series.windows(2).map(|w| (w[1] - w[0]).max(0.0)).sum::<f64>()
}

/// One weighted detection as seen by the detection-based aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedItem {
    pub region: usize,
    pub track: TrackId,
    pub kind: DetectionType,
    pub weighted: f64,
}

/// Group by (region, road user, type), keep each group's maximum and sum
/// the maxima.
pub fn anomaly_abstract(items: impl IntoIterator<Item = WeightedItem>) -> f64 {
    let mut best: BTreeMap<(usize, TrackId, DetectionType), f64> = BTreeMap::new();
    for it in items {
        let e = best.entry((it.region, it.track, it.kind)).or_insert(f64::NEG_INFINITY);
        *e = e.max(it.weighted);
    }
    best.values().sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ranked {
    pub track_id: TrackId,
    pub frame: Option<u32>,
    pub score: f64,
}

/// Highest scores first; ties go to the lower track id, then the earlier frame.
pub fn top_k(mut items: Vec<Ranked>, k: usize) -> Vec<Ranked> {
    items.sort_by(rank_cmp);
    items.truncate(k);
    items
}

pub fn rank_cmp(a: &Ranked, b: &Ranked) -> Ordering {
    b.score.total_cmp(&a.score).then(a.track_id.cmp(&b.track_id)).then(a.frame.cmp(&b.frame))
}
