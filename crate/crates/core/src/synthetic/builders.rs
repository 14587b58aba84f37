use crate::dataset::{derive_kinematics, RoadUserClass, Track, TrackId, TrackState, VRU_FOOTPRINT_RADIUS};
use crate::geometry::{wrap_angle, Vec2};

/// Below this speed the heading is carried over instead of taken from the
/// velocity direction.
const HEADING_SPEED: f64 = 0.2;

/// Build a track from sampled positions. Velocities come from central
/// differences of the positions, headings from the velocity direction, and
/// the remaining kinematics from [`derive_kinematics`].
#[allow(clippy::too_many_arguments)]
pub fn build_track(
    id: TrackId,
    class: RoadUserClass,
    length: f64,
    width: f64,
    first_frame: u32,
    frame_rate: f64,
    positions: &[Vec2],
    initial_heading: f64,
) -> Track {
    assert!(!positions.is_empty(), "a track needs at least one position");
    let n = positions.len();
    let dt = 1.0 / frame_rate;
    let mut heading = wrap_angle(initial_heading);
    let states = (0..n)
        .map(|i| {
            let (lo, hi) = match (i, n) {
                (_, 1) => (0, 0),
                (0, _) => (0, 1),
                (i, n) if i == n - 1 => (n - 2, n - 1),
                (i, _) => (i - 1, i + 1),
            };
            let velocity =
                if hi > lo { (positions[hi] - positions[lo]) * (1.0 / ((hi - lo) as f64 * dt)) } else { Vec2::ZERO };
            if velocity.norm() > HEADING_SPEED {
                heading = velocity.angle();
            }
            let frame = first_frame + i as u32;
            TrackState {
                frame,
                t: frame as f64 * dt,
                position: positions[i],
                heading,
                speed: 0.0,
                velocity,
                accel_lon: 0.0,
                accel_lat: 0.0,
                yaw_rate: 0.0,
                sideslip: 0.0,
            }
        })
        .collect();
    let vru = class.is_vru();
    let track = Track {
        track_id: id,
        class,
        width: if vru { 0.0 } else { width },
        length: if vru { 0.0 } else { length },
        states,
        footprint_radius: vru.then_some(VRU_FOOTPRINT_RADIUS),
        accel_from_source: false,
    };
    derive_kinematics(track, frame_rate)
}

/// Positions of a road user moving along `heading` from `start`, with the
/// speed of each frame given; the first frame sits at `start`.
pub fn positions_from_speeds(start: Vec2, heading: f64, speeds: &[f64], frame_rate: f64) -> Vec<Vec2> {
    let dir = Vec2::from_angle(heading);
    let mut s = 0.0;
    let mut out = Vec::with_capacity(speeds.len());
    for (i, v) in speeds.iter().enumerate() {
        if i > 0 {
            s += 0.5 * (speeds[i - 1] + v) / frame_rate;
        }
        out.push(start + dir * s);
    }
    out
}

/// Constant-speed straight motion over `n` frames.
pub fn straight_positions(start: Vec2, heading: f64, speed: f64, n: usize, frame_rate: f64) -> Vec<Vec2> {
    let dir = Vec2::from_angle(heading);
    (0..n).map(|i| start + dir * (speed * i as f64 / frame_rate)).collect()
}
