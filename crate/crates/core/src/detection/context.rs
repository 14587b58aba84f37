//! Deviations from the map context: traffic rules tied to regions, and
//! density-based outliers among the behaviors and paths seen in a region.

use rayon::prelude::*;

use crate::clustering::hdbscan_with_resolution;
use crate::config::DetectionConfig;
use crate::dataset::{Recording, Track, TrackId, TrackState};
use crate::geometry::{angle_between, discrete_frechet, resample_states, PolyPath};
use crate::map::{assign_regions, footprint_of, RegionMembership, RegionType, SemanticMap};

use super::behavior::{behavior_clustering, BehaviorPoint};
use super::types::{sort_detections, Aux, Detection, DetectionType};

/// Mutual-reachability distances below this are not told apart when the
/// cluster hierarchy is built, m.
pub const TRAJECTORY_RESOLUTION: f64 = 0.5;

/// Region memberships per track and state, indexed like `Recording::tracks`
/// and `Track::states`. An empty list means off-map.
pub type Assignment = Vec<Vec<Vec<RegionMembership>>>;

pub fn assign_recording(recording: &Recording, map: &SemanticMap) -> Assignment {
    recording
        .tracks
        .par_iter()
        .map(|t| t.states.iter().map(|s| assign_regions(&footprint_of(t, s), map)).collect())
        .collect()
}

/// Violation when the class may use none of the assigned regions. Being
/// off-map counts as a violation.
pub fn check_area_usage(
    track: &Track,
    state: &TrackState,
    assigned: &[RegionMembership],
    map: &SemanticMap,
) -> Option<Detection> {
    let allowed = assigned.iter().any(|m| map.regions[m.region].kind.allows(track.class));
    (!allowed).then(|| Detection::punctual(DetectionType::AreaUsage, track.track_id, state.frame, 1.0, Aux::None))
}

/// Wrong-way driving: a moving motorized road user whose heading is more
/// than 90 degrees off the reference direction of every directed street
/// region it is in. The value is the smallest deviation, rad.
pub fn check_driving_direction(
    track: &Track,
    state: &TrackState,
    assigned: &[RegionMembership],
    map: &SemanticMap,
    min_speed: f64,
) -> Option<Detection> {
    if !track.class.is_motorized() || state.speed <= min_speed {
        return None;
    }
    let deviation = assigned
        .iter()
        .map(|m| &map.regions[m.region])
        .filter(|r| r.kind == RegionType::Street)
        .filter_map(|r| r.direction_at(state.position))
        .map(|dir| angle_between(state.heading, dir))
        .reduce(f64::min)?;
    (deviation > std::f64::consts::FRAC_PI_2).then(|| {
        Detection::punctual(DetectionType::DrivingDirection, track.track_id, state.frame, deviation, Aux::None)
    })
}

/// A maximal run of consecutive states of one track inside one region.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub track: TrackId,
    pub region: usize,
    pub start_frame: u32,
    pub end_frame: u32,
    pub path: PolyPath,
}

/// Region visits of every track, grouped by region.
pub fn region_episodes(
    recording: &Recording,
    assignment: &Assignment,
    n_regions: usize,
    spacing: f64,
) -> Vec<Vec<Episode>> {
    let mut out: Vec<Vec<Episode>> = vec![Vec::new(); n_regions];
    for (track, memberships) in recording.tracks.iter().zip(assignment) {
        let mut open: Vec<Option<usize>> = vec![None; n_regions];
        let inside = |k: usize, r: usize| memberships[k].iter().any(|m| m.region == r);
        for k in 0..=track.states.len() {
            for r in 0..n_regions {
                let now = k < track.states.len() && inside(k, r);
                match (open[r], now) {
                    (None, true) => open[r] = Some(k),
                    (Some(start), false) => {
                        let states = &track.states[start..k];
                        out[r].push(Episode {
                            track: track.track_id,
                            region: r,
                            start_frame: states[0].frame,
                            end_frame: states[states.len() - 1].frame,
                            path: resample_states(states, spacing),
                        });
                        open[r] = None;
                    }
                    _ => {}
                }
            }
        }
    }
    out
}

pub fn min_cluster_size_for(n: usize) -> usize {
    ((1.0 + 0.005 * n as f64).round() as usize).max(2)
}

/// Region visits whose path fits no cluster of the region's paths. The
/// value is the Fréchet distance to the nearest clustered path. Without any
/// cluster there is no reference and nothing is reported.
pub fn trajectory_clustering(episodes: &[Episode]) -> Vec<Detection> {
    if episodes.len() < 2 {
        return Vec::new();
    }
    let paths: Vec<&[crate::geometry::Vec2]> = episodes.iter().map(|e| e.path.points.as_slice()).collect();
    let result = hdbscan_with_resolution(
        &paths,
        |a, b| discrete_frechet(a, b),
        min_cluster_size_for(episodes.len()),
        TRAJECTORY_RESOLUTION,
    );
    if result.n_clusters() == 0 {
        return Vec::new();
    }
    episodes
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let value = result.outlier_distance[i]?;
            Some(Detection {
                kind: DetectionType::Trajectory,
                subject: e.track,
                partner: None,
                start_frame: e.start_frame,
                end_frame: e.end_frame,
                value,
                aux: Aux::None,
                region: Some(e.region),
            })
        })
        .collect()
}

/// All map-context detections of a recording, in canonical order.
pub fn context_detections(
    recording: &Recording,
    map: &SemanticMap,
    assignment: &Assignment,
    cfg: &DetectionConfig,
) -> Vec<Detection> {
    let n_regions = map.regions.len();
    let mut out: Vec<Detection> = recording
        .tracks
        .par_iter()
        .zip(assignment)
        .flat_map_iter(|(track, memberships)| {
            track.states.iter().zip(memberships).flat_map(move |(s, m)| {
                check_area_usage(track, s, m, map).into_iter().chain(check_driving_direction(
                    track,
                    s,
                    m,
                    map,
                    cfg.direction_min_speed,
                ))
            })
        })
        .collect();

    let mut points: Vec<Vec<BehaviorPoint>> = vec![Vec::new(); n_regions];
    for (track, memberships) in recording.tracks.iter().zip(assignment) {
        for (s, m) in track.states.iter().zip(memberships) {
            for membership in m {
                points[membership.region].push(BehaviorPoint {
                    track: track.track_id,
                    frame: s.frame,
                    region: membership.region,
                    heading: s.heading,
                    speed: s.speed,
                });
            }
        }
    }
    let behavior: Vec<Detection> = points
        .par_iter()
        .flat_map_iter(|p| behavior_clustering(p, cfg.behavior_eps, cfg.behavior_minor_share))
        .collect();
    out.extend(behavior);

    let episodes = region_episodes(recording, assignment, n_regions, cfg.path_spacing);
    let trajectory: Vec<Detection> = episodes.par_iter().flat_map_iter(|e| trajectory_clustering(e)).collect();
    out.extend(trajectory);

    sort_detections(&mut out);
    out
}
