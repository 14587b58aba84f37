//! Derivation of the kinematic quantities drone datasets do not ship:
//! yaw rate, sideslip and (when absent) body-frame accelerations.

use crate::geometry::{wrap_angle, Vec2};

use super::types::{Track, STANDING_SPEED};

/// Fill in yaw rate, sideslip and speed from positions, velocities and
/// headings. Accelerations are re-derived from the velocity series unless
/// they came from the source file. Depends only on fields it never writes,
/// so applying it twice is the same as applying it once.
pub fn derive_kinematics(mut track: Track, frame_rate: f64) -> Track {
    let n = track.states.len();
    if n == 0 {
        return track;
    }
    let dt = 1.0 / frame_rate;

    let mut unwrapped = Vec::with_capacity(n);
    let mut prev = track.states[0].heading;
    unwrapped.push(prev);
    for s in &track.states[1..] {
        let next = *unwrapped.last().unwrap() + wrap_angle(s.heading - prev);
        unwrapped.push(next);
        prev = s.heading;
    }

    let velocities: Vec<Vec2> = track.states.iter().map(|s| s.velocity).collect();
    let derive_accel = !track.accel_from_source;

    for i in 0..n {
        let (lo, hi) = if n == 1 {
            (i, i)
        } else if i == 0 {
            (0, 1)
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let span = (hi - lo) as f64 * dt;

        let st = &mut track.states[i];
        st.speed = st.velocity.norm();
        st.yaw_rate = if span > 0.0 { (unwrapped[hi] - unwrapped[lo]) / span } else { 0.0 };
        st.sideslip = if st.speed > STANDING_SPEED { wrap_angle(st.velocity.angle() - st.heading) } else { 0.0 };
        if derive_accel {
            let a = if span > 0.0 { (velocities[hi] - velocities[lo]) * (1.0 / span) } else { Vec2::ZERO };
            let fwd = Vec2::from_angle(st.heading);
            let left = Vec2::new(-fwd.y, fwd.x);
            st.accel_lon = a.dot(fwd);
            st.accel_lat = a.dot(left);
        }
    }
    track
}
