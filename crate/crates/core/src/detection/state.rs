//! Vehicle-state exceedances of normal driving limits and of local speed
//! limits.

use std::f64::consts::PI;

use crate::dataset::{RoadUserClass, TrackId, TrackState};
use crate::map::{RegionMembership, SemanticMap};

use super::types::{Aux, Detection, DetectionType};

/// Normal-driving limits as functions of speed in km/h.
pub struct StateLimits;

impl StateLimits {
    /// Longitudinal acceleration, m/s².
    pub fn lon(v_kmh: f64) -> f64 {
        if v_kmh <= 50.0 {
            4.0
        } else if v_kmh <= 100.0 {
            4.0 - 2.0 * (v_kmh - 50.0) / 100.0
        } else {
            2.0
        }
    }

    /// Lateral acceleration, m/s². The last band starts above 100 km/h.
    pub fn lat(v_kmh: f64) -> f64 {
        if v_kmh <= 40.0 {
            2.5 + 4.5 * v_kmh / 40.0
        } else if v_kmh <= 50.0 {
            7.0
        } else if v_kmh <= 100.0 {
            7.0 - 4.0 * (v_kmh - 50.0) / 50.0
        } else {
            3.0
        }
    }

    /// Yaw rate, rad/s.
    pub fn yaw(v_kmh: f64) -> f64 {
        if v_kmh <= 50.0 {
            50.0 / 180.0 * PI
        } else {
            15.0 / 180.0 * PI
        }
    }

    /// Sideslip angle, rad.
    pub fn sideslip(_v_kmh: f64) -> f64 {
        10f64.to_radians()
    }
}

/// Exceedances of the four vehicle-state limits. VRUs are exempt.
pub fn check_vehicle_state(subject: TrackId, state: &TrackState, class: RoadUserClass) -> Vec<Detection> {
    if class.is_vru() {
        return Vec::new();
    }
    let v = state.speed * 3.6;
    let checks = [
        (DetectionType::LonAccel, state.accel_lon, StateLimits::lon(v)),
        (DetectionType::LatAccel, state.accel_lat, StateLimits::lat(v)),
        (DetectionType::YawRate, state.yaw_rate, StateLimits::yaw(v)),
        (DetectionType::Sideslip, state.sideslip, StateLimits::sideslip(v)),
    ];
    checks
        .into_iter()
        .filter(|(_, observed, limit)| observed.abs() > *limit)
        .map(|(kind, observed, limit)| Detection::punctual(kind, subject, state.frame, observed, Aux::Limit { limit }))
        .collect()
}

/// Speeding against the most permissive limit among the assigned regions.
pub fn check_speed_limit(
    subject: TrackId,
    state: &TrackState,
    assignment: &[RegionMembership],
    map: &SemanticMap,
) -> Option<Detection> {
    let limit = assignment.iter().filter_map(|m| map.regions[m.region].speed_limit).reduce(f64::max)?;
    (state.speed > limit)
        .then(|| Detection::punctual(DetectionType::Velocity, subject, state.frame, state.speed, Aux::Limit { limit }))
}
