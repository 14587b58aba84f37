//! Full analysis of one recording: detections, context weights, punctual
//! scores and their aggregation.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::config::Config;
use crate::dataset::{Recording, TrackId};
use crate::detection::context::{assign_recording, context_detections, Assignment};
use crate::detection::relation::relation_detections;
use crate::detection::state::{check_speed_limit, check_vehicle_state};
use crate::detection::{candidate_pairs, sort_detections, Detection, DetectionType, TrackGeometry};
use crate::error::ConfigError;
use crate::map::SemanticMap;
use crate::report::{anomaly_abstract, heatmap, positive_variation, Heatmap, WeightedItem};
use crate::scoring::{interaction_punctual, relevance_punctual, score_detection, select_context, RegionContext};

/// Interaction, anomaly and relevance, in that order wherever a triple is used.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Scores {
    pub interaction: f64,
    pub anomaly: f64,
    pub relevance: f64,
}

impl Scores {
    pub fn get(&self, which: ScoreKind) -> f64 {
        match which {
            ScoreKind::Interaction => self.interaction,
            ScoreKind::Anomaly => self.anomaly,
            ScoreKind::Relevance => self.relevance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScoreKind {
    Interaction,
    Anomaly,
    Relevance,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 3] = [ScoreKind::Interaction, ScoreKind::Anomaly, ScoreKind::Relevance];

    pub fn as_str(self) -> &'static str {
        match self {
            ScoreKind::Interaction => "interaction",
            ScoreKind::Anomaly => "anomaly",
            ScoreKind::Relevance => "relevance",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

/// A detection with its score, rarity weight and the region it is booked to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredDetection {
    pub detection: Detection,
    pub score: f64,
    pub gamma: f64,
    /// Region index; `n_regions` for off-map.
    pub region: usize,
}

impl ScoredDetection {
    pub fn weighted(&self) -> f64 {
        self.score * self.gamma
    }
}

/// Punctual scores of one track over its frames.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSeries {
    pub track_id: TrackId,
    pub first_frame: u32,
    pub interaction: Vec<f64>,
    pub anomaly: Vec<f64>,
    pub relevance: Vec<f64>,
}

impl TrackSeries {
    pub fn at(&self, k: usize) -> Scores {
        Scores { interaction: self.interaction[k], anomaly: self.anomaly[k], relevance: self.relevance[k] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackSummary {
    pub track_id: TrackId,
    pub class: crate::dataset::RoadUserClass,
    pub scores: Scores,
    /// Frame of the highest punctual relevance, earliest on ties.
    pub peak_frame: u32,
    /// Type with the largest summed detection score.
    pub dominant_type: Option<DetectionType>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionSummary {
    /// Map region id, or "off_map".
    pub id: String,
    pub kind: String,
    pub scores: Scores,
    pub users: u64,
    pub detection_counts: [u64; DetectionType::ALL.len()],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub recording_id: u32,
    pub location_id: String,
    pub frame_rate: f64,
    pub duration: f64,
    pub config: Config,
    pub config_hash: String,
    /// Sorted canonically; a detection's id is its index.
    pub detections: Vec<ScoredDetection>,
    pub series: Vec<TrackSeries>,
    pub tracks: Vec<TrackSummary>,
    /// Map regions in map order followed by the off-map pseudo-region.
    pub regions: Vec<RegionSummary>,
    pub dataset: Scores,
    /// Dataset interaction using waiting periods and conflict-point
    /// detections only, for comparison with pairwise-conflict schemes.
    pub baseline_interaction: f64,
    pub heatmaps: BTreeMap<&'static str, Heatmap>,
}

pub const OFF_MAP_ID: &str = "off_map";

/// Every detection of a recording in canonical order.
pub fn detect(recording: &Recording, map: &SemanticMap, assignment: &Assignment, cfg: &Config) -> Vec<Detection> {
    let d = &cfg.detection;
    let geoms: Vec<TrackGeometry> = recording.tracks.par_iter().map(|t| TrackGeometry::new(t, d)).collect();
    let gate = candidate_pairs(recording, d.gating_radius);
    let mut out = relation_detections(recording, &geoms, &gate, d, cfg.scenario);
    let state: Vec<Detection> = recording
        .tracks
        .par_iter()
        .zip(assignment)
        .flat_map_iter(|(t, memberships)| {
            t.states.iter().zip(memberships).flat_map(move |(s, m)| {
                check_vehicle_state(t.track_id, s, t.class).into_iter().chain(check_speed_limit(t.track_id, s, m, map))
            })
        })
        .collect();
    out.extend(state);
    out.extend(context_detections(recording, map, assignment, d));
    sort_detections(&mut out);
    out
}

pub fn analyze(recording: &Recording, map: &SemanticMap, cfg: &Config) -> Result<Analysis, ConfigError> {
    cfg.validate()?;
    let assignment = assign_recording(recording, map);
    let detections = detect(recording, map, &assignment, cfg);
    Ok(score_and_aggregate(recording, map, &assignment, detections, cfg))
}

/// Second pass: weigh detections against their region contexts and lift
/// the punctual scores to tracks, regions and the whole recording.
pub fn score_and_aggregate(
    recording: &Recording,
    map: &SemanticMap,
    assignment: &Assignment,
    detections: Vec<Detection>,
    cfg: &Config,
) -> Analysis {
    let sc = &cfg.scoring;
    let n_regions = map.regions.len();
    let index: HashMap<TrackId, usize> = recording.tracks.iter().enumerate().map(|(i, t)| (t.track_id, i)).collect();
    let memberships = |id: TrackId, frame: u32| {
        let i = index[&id];
        &assignment[i][recording.tracks[i].index_of(frame).expect("detection frame inside its track")][..]
    };
    let ctx = RegionContext::build(recording, assignment, n_regions, &detections, sc.context_weight_cap);

    let scored: Vec<ScoredDetection> = detections
        .par_iter()
        .map(|d| {
            let candidates: Vec<(usize, f64, f64)> =
                ctx.detection_regions(d, memberships).into_iter().map(|(r, f)| (r, f, ctx.gamma(r, d.kind))).collect();
            let choice = select_context(&candidates);
            ScoredDetection {
                detection: *d,
                score: score_detection(d, sc),
                gamma: choice.gamma,
                region: choice.primary,
            }
        })
        .collect();

    // relation detections grouped by frame
    let mut by_frame: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, s) in scored.iter().enumerate() {
        if s.detection.kind.is_relation() {
            by_frame.entry(s.detection.start_frame).or_default().push(i);
        }
    }
    let mut series: Vec<TrackSeries> = recording
        .tracks
        .iter()
        .map(|t| TrackSeries {
            track_id: t.track_id,
            first_frame: t.first_frame(),
            interaction: vec![0.0; t.states.len()],
            anomaly: vec![0.0; t.states.len()],
            relevance: vec![0.0; t.states.len()],
        })
        .collect();
    let mut baseline: Vec<Vec<f64>> = recording.tracks.iter().map(|t| vec![0.0; t.states.len()]).collect();
    let frame_results: Vec<Vec<(usize, usize, f64, f64)>> = by_frame
        .par_iter()
        .map(|(&frame, ids)| {
            let all: Vec<(&Detection, f64)> = ids.iter().map(|&i| (&scored[i].detection, scored[i].score)).collect();
            let base: Vec<(&Detection, f64)> = all
                .iter()
                .copied()
                .filter(|(d, _)| matches!(d.kind, DetectionType::Wp | DetectionType::Dmttcp))
                .collect();
            let mut subjects: Vec<TrackId> = all.iter().map(|(d, _)| d.subject).collect();
            subjects.sort_unstable();
            subjects.dedup();
            subjects
                .into_iter()
                .map(|s| {
                    let i = index[&s];
                    let k = recording.tracks[i].index_of(frame).expect("detection frame inside its track");
                    (i, k, interaction_punctual(s, &all).total, interaction_punctual(s, &base).total)
                })
                .collect()
        })
        .collect();
    for (i, k, total, base) in frame_results.into_iter().flatten() {
        series[i].interaction[k] = total;
        baseline[i][k] = base;
    }
    for s in &scored {
        let d = &s.detection;
        let i = index[&d.subject];
        let t = &recording.tracks[i];
        for f in d.start_frame..=d.end_frame {
            if let Some(k) = t.index_of(f) {
                series[i].anomaly[k] += s.weighted();
            }
        }
    }
    for ser in &mut series {
        for k in 0..ser.interaction.len() {
            ser.relevance[k] = relevance_punctual(ser.interaction[k], ser.anomaly[k], sc);
        }
    }

    let weighted_item = |s: &ScoredDetection| WeightedItem {
        region: s.region,
        track: s.detection.subject,
        kind: s.detection.kind,
        weighted: s.weighted(),
    };
    let mut per_track: Vec<Vec<usize>> = vec![Vec::new(); recording.tracks.len()];
    for (id, s) in scored.iter().enumerate() {
        per_track[index[&s.detection.subject]].push(id);
    }
    let tracks: Vec<TrackSummary> = recording
        .tracks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let ser = &series[i];
            let mine = || per_track[i].iter().map(|&id| &scored[id]);
            let mut type_sum = [0.0f64; DetectionType::ALL.len()];
            mine().for_each(|s| type_sum[s.detection.kind.index()] += s.score);
            let dominant = (0..type_sum.len())
                .filter(|&k| type_sum[k] > 0.0)
                .max_by(|&a, &b| type_sum[a].total_cmp(&type_sum[b]).then(b.cmp(&a)))
                .map(|k| DetectionType::ALL[k]);
            let peak = (0..ser.relevance.len())
                .max_by(|&a, &b| ser.relevance[a].total_cmp(&ser.relevance[b]).then(b.cmp(&a)))
                .unwrap_or(0);
            TrackSummary {
                track_id: t.track_id,
                class: t.class,
                scores: Scores {
                    interaction: positive_variation(&ser.interaction),
                    anomaly: anomaly_abstract(mine().map(weighted_item)),
                    relevance: positive_variation(&ser.relevance),
                },
                peak_frame: t.states[peak].frame,
                dominant_type: dominant,
            }
        })
        .collect();

    // regions: positive variation over each within-region visit
    let slots = n_regions + 1;
    let mut region_ir = vec![(0.0f64, 0.0f64); slots];
    for (i, ser) in series.iter().enumerate() {
        let inside = |k: usize, r: usize| {
            let m = &assignment[i][k];
            if r == n_regions {
                m.is_empty()
            } else {
                m.iter().any(|x| x.region == r)
            }
        };
        for (r, acc) in region_ir.iter_mut().enumerate() {
            let mut k = 0;
            let n = ser.interaction.len();
            while k < n {
                if !inside(k, r) {
                    k += 1;
                    continue;
                }
                let start = k;
                while k < n && inside(k, r) {
                    k += 1;
                }
                acc.0 += positive_variation(&ser.interaction[start..k]);
                acc.1 += positive_variation(&ser.relevance[start..k]);
            }
        }
    }
    let regions: Vec<RegionSummary> = (0..slots)
        .map(|r| {
            let (id, kind) = if r < n_regions {
                (map.regions[r].id.clone(), map.regions[r].kind.as_str().to_string())
            } else {
                (OFF_MAP_ID.to_string(), OFF_MAP_ID.to_string())
            };
            RegionSummary {
                id,
                kind,
                scores: Scores {
                    interaction: region_ir[r].0,
                    anomaly: anomaly_abstract(scored.iter().filter(|s| s.region == r).map(weighted_item)),
                    relevance: region_ir[r].1,
                },
                users: ctx.users[r],
                detection_counts: ctx.counts[r],
            }
        })
        .collect();

    let dataset = Scores {
        interaction: tracks.iter().map(|t| t.scores.interaction).sum(),
        anomaly: anomaly_abstract(scored.iter().map(weighted_item)),
        relevance: tracks.iter().map(|t| t.scores.relevance).sum(),
    };
    let baseline_interaction = baseline.iter().map(|b| positive_variation(b)).sum();

    let mut heatmaps = BTreeMap::new();
    for which in ScoreKind::ALL {
        let values: Vec<f64> = regions[..n_regions].iter().map(|r| r.scores.get(which)).collect();
        heatmaps.insert(which.as_str(), heatmap(map, &values, cfg.report.heatmap_resolution));
    }

    Analysis {
        recording_id: recording.recording_id,
        location_id: recording.location_id.clone(),
        frame_rate: recording.frame_rate,
        duration: recording.duration,
        config: cfg.clone(),
        config_hash: cfg.hash(),
        detections: scored,
        series,
        tracks,
        regions,
        dataset,
        baseline_interaction,
        heatmaps,
    }
}
