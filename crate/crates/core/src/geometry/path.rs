use crate::dataset::{Track, TrackState};

use super::polygon::project_on_segment;
use super::vec2::Vec2;

/// Default arc-length spacing of resampled paths, meters.
pub const DEFAULT_PATH_SPACING: f64 = 0.5;

/// Consecutive positions closer than this are treated as standstill jitter.
const STANDSTILL_EPS: f64 = 0.05;

/// A driven path resampled at uniform arc-length spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPath {
    pub spacing: f64,
    pub points: Vec<Vec2>,
    pub cumulative_s: Vec<f64>,
    /// Path tangent direction at each point, radians.
    pub tangents: Vec<f64>,
    /// Source frame closest to each point.
    pub frames: Vec<u32>,
    /// Arc length reached at each source state, indexed like the states.
    pub state_s: Vec<f64>,
    pub first_frame: u32,
}

/// Closest point of a path to some query position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathProjection {
    pub s: f64,
    pub lateral: f64,
    pub tangent: f64,
    pub point: Vec2,
}

impl PolyPath {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn length(&self) -> f64 {
        *self.cumulative_s.last().unwrap_or(&0.0)
    }

    /// Arc length at which the road user is located at `frame`.
    pub fn s_at_frame(&self, frame: u32) -> Option<f64> {
        let i = frame.checked_sub(self.first_frame)? as usize;
        self.state_s.get(i).copied()
    }

    fn segment_index(&self, s: f64) -> usize {
        // last i with cumulative_s[i] <= s
        match self.cumulative_s.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
        .min(self.points.len().saturating_sub(1))
    }

    pub fn point_at(&self, s: f64) -> Vec2 {
        let n = self.points.len();
        if n == 1 || s <= 0.0 {
            return self.points[0];
        }
        if s >= self.length() {
            return self.points[n - 1];
        }
        let i = self.segment_index(s).min(n - 2);
        let (s0, s1) = (self.cumulative_s[i], self.cumulative_s[i + 1]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        self.points[i].lerp(self.points[i + 1], t)
    }

    pub fn tangent_at(&self, s: f64) -> f64 {
        self.tangents[self.segment_index(s.max(0.0))]
    }

    /// Project `p` onto the stretch of path with arc length in
    /// `[s_from, s_to]`. Returns the closest such point.
    pub fn project(&self, p: Vec2, s_from: f64, s_to: f64) -> Option<PathProjection> {
        let n = self.points.len();
        if n == 0 || s_to < s_from {
            return None;
        }
        if n == 1 {
            return Some(PathProjection {
                s: 0.0,
                lateral: p.dist(self.points[0]),
                tangent: self.tangents[0],
                point: self.points[0],
            });
        }
        let start = self.segment_index(s_from).min(n - 2);
        let mut best: Option<PathProjection> = None;
        for i in start..n - 1 {
            let (s0, s1) = (self.cumulative_s[i], self.cumulative_s[i + 1]);
            if s0 > s_to {
                break;
            }
            let (q, t) = project_on_segment(p, self.points[i], self.points[i + 1]);
            let s = (s0 + t * (s1 - s0)).clamp(s_from, s_to);
            let q = if s != s0 + t * (s1 - s0) { self.point_at(s) } else { q };
            let d = q.dist(p);
            if best.is_none_or(|b| d < b.lateral) {
                best = Some(PathProjection { s, lateral: d, tangent: self.tangents[i], point: q });
            }
        }
        best
    }
}

/// Resample a track's driven path at uniform arc-length spacing `ds`.
pub fn resample_path(track: &Track, ds: f64) -> PolyPath {
    resample_states(&track.states, ds)
}

/// Resample a contiguous run of states. Standstill jitter below 5 cm is
/// collapsed; a fully stationary run yields a single-point path.
pub fn resample_states(states: &[TrackState], ds: f64) -> PolyPath {
    assert!(!states.is_empty(), "cannot resample an empty state sequence");
    assert!(ds > 0.0, "spacing must be positive");

    // collapse jitter into a polyline of kept vertices
    let mut verts: Vec<(Vec2, f64, u32)> = Vec::new(); // (pos, s, frame)
    let mut state_s = Vec::with_capacity(states.len());
    for st in states {
        match verts.last() {
            None => verts.push((st.position, 0.0, st.frame)),
            Some(&(p, s, _)) => {
                let d = p.dist(st.position);
                if d >= STANDSTILL_EPS {
                    verts.push((st.position, s + d, st.frame));
                }
            }
        }
        state_s.push(verts.last().unwrap().1);
    }

    let total = verts.last().unwrap().1;
    let mut points = Vec::new();
    let mut cumulative_s = Vec::new();
    let mut tangents = Vec::new();
    let mut frames = Vec::new();

    if verts.len() == 1 {
        points.push(verts[0].0);
        cumulative_s.push(0.0);
        tangents.push(states[0].heading);
        frames.push(verts[0].2);
    } else {
        let n_full = (total / ds).floor() as usize;
        let mut seg = 0usize;
        let mut push = |s: f64, seg: usize| {
            let (a, sa, fa) = verts[seg];
            let (b, sb, fb) = verts[seg + 1];
            let t = if sb > sa { ((s - sa) / (sb - sa)).clamp(0.0, 1.0) } else { 0.0 };
            points.push(a.lerp(b, t));
            cumulative_s.push(s);
            tangents.push((b - a).angle());
            frames.push((fa as f64 + t * (fb as f64 - fa as f64)).round() as u32);
        };
        for k in 0..=n_full {
            let s = k as f64 * ds;
            while seg + 2 < verts.len() && verts[seg + 1].1 <= s {
                seg += 1;
            }
            push(s, seg);
        }
        if total - n_full as f64 * ds > 1e-9 {
            push(total, verts.len() - 2);
        }
    }

    PolyPath { spacing: ds, points, cumulative_s, tangents, frames, state_s, first_frame: states[0].frame }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RoadUserClass;
    use std::f64::consts::PI;

    pub(crate) fn track_through(points: &[Vec2]) -> Track {
        let states = points
            .iter()
            .enumerate()
            .map(|(i, &p)| TrackState {
                frame: 100 + i as u32,
                t: i as f64 * 0.04,
                position: p,
                heading: 0.0,
                speed: 1.0,
                velocity: Vec2::new(1.0, 0.0),
                accel_lon: 0.0,
                accel_lat: 0.0,
                yaw_rate: 0.0,
                sideslip: 0.0,
            })
            .collect();
        Track {
            track_id: 1,
            class: RoadUserClass::Car,
            width: 1.8,
            length: 4.5,
            states,
            footprint_radius: None,
            accel_from_source: false,
        }
    }

    #[test]
    fn straight_ten_meters_gives_21_points() {
        let pts: Vec<Vec2> = (0..=40).map(|i| Vec2::new(i as f64 * 0.25, 0.0)).collect();
        let p = resample_path(&track_through(&pts), 0.5);
        assert_eq!(p.len(), 21);
        assert!((p.length() - 10.0).abs() < 1e-12);
        for w in p.cumulative_s.windows(2) {
            assert!((w[1] - w[0] - 0.5).abs() < 1e-6);
        }
        assert_eq!(p.s_at_frame(120), Some(5.0));
    }

    #[test]
    fn stationary_track_collapses() {
        let pts: Vec<Vec2> = (0..20).map(|i| Vec2::new(3.0 + 0.001 * (i % 3) as f64, 2.0)).collect();
        let p = resample_path(&track_through(&pts), 0.5);
        assert_eq!(p.len(), 1);
        assert_eq!(p.cumulative_s, vec![0.0]);
    }

    #[test]
    fn quarter_circle_arc_length() {
        let r = 10.0;
        let pts: Vec<Vec2> = (0..=200)
            .map(|i| {
                let a = PI / 2.0 * i as f64 / 200.0;
                Vec2::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let p = resample_path(&track_through(&pts), 0.5);
        let expected = 5.0 * PI;
        assert!((p.length() - expected).abs() / expected < 0.01);
    }

    #[test]
    fn projection_respects_window() {
        let pts: Vec<Vec2> = (0..=20).map(|i| Vec2::new(i as f64, 0.0)).collect();
        let p = resample_path(&track_through(&pts), 0.5);
        let pr = p.project(Vec2::new(7.3, 0.4), 2.0, 20.0).unwrap();
        assert!((pr.s - 7.3).abs() < 1e-9);
        assert!((pr.lateral - 0.4).abs() < 1e-9);
        let clipped = p.project(Vec2::new(1.0, 0.0), 2.0, 20.0).unwrap();
        assert!((clipped.s - 2.0).abs() < 1e-9);
        assert!((clipped.lateral - 1.0).abs() < 1e-9);
    }
}
