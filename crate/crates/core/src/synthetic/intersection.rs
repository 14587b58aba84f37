//! A seeded four-arm urban intersection with mixed traffic and a sprinkling
//! of planted anomalies (wrong-way drivers, speeders, hard brakers,
//! jaywalkers).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Recording, RoadUserClass, Track};
use crate::geometry::Vec2;
use crate::map::{MapFile, RegionFile, SemanticMap};

use super::builders::build_track;

const ARM: f64 = 60.0;
const LANE: f64 = 3.5;
const WALK: f64 = 3.0;
/// Distance of the crosswalk centerlines from the intersection center.
const CROSSWALK_AT: f64 = 8.5;
const CROSSWALK_HALF_WIDTH: f64 = 1.5;
const STOP_LINE: f64 = 12.0;
const SPEED_LIMIT: f64 = 50.0 / 3.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub n_tracks: usize,
    pub duration: f64,
    pub frame_rate: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec { seed: 7, n_tracks: 500, duration: 900.0, frame_rate: 25.0 }
    }
}

fn rect(id: &str, kind: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> RegionFile {
    RegionFile {
        id: id.into(),
        kind: kind.into(),
        polygon: vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
        speed_limit_mps: None,
        direction_ref: None,
    }
}

fn lane(id: &str, x0: f64, y0: f64, x1: f64, y1: f64, from: [f64; 2], to: [f64; 2]) -> RegionFile {
    RegionFile {
        speed_limit_mps: Some(SPEED_LIMIT),
        direction_ref: Some(vec![from, to]),
        ..rect(id, "street", x0, y0, x1, y1)
    }
}

/// Two crossing two-lane roads with sidewalks, crosswalks on every arm and
/// grass in the corners. Right-hand traffic.
pub fn intersection_map_file() -> MapFile {
    let (a, l, w) = (ARM, LANE, WALK);
    let mut regions = vec![
        lane("lane_eastbound", -a, -l, a, 0.0, [-a, -l / 2.0], [a, -l / 2.0]),
        lane("lane_westbound", -a, 0.0, a, l, [a, l / 2.0], [-a, l / 2.0]),
        lane("lane_northbound", 0.0, -a, l, a, [l / 2.0, -a], [l / 2.0, a]),
        lane("lane_southbound", -l, -a, 0.0, a, [-l / 2.0, a], [-l / 2.0, -a]),
        rect("walk_west_north", "walkway", -a, l, -l, l + w),
        rect("walk_west_south", "walkway", -a, -l - w, -l, -l),
        rect("walk_east_north", "walkway", l, l, a, l + w),
        rect("walk_east_south", "walkway", l, -l - w, a, -l),
        rect("walk_north_west", "walkway", -l - w, l + w, -l, a),
        rect("walk_north_east", "walkway", l, l + w, l + w, a),
        rect("walk_south_west", "walkway", -l - w, -a, -l, -l - w),
        rect("walk_south_east", "walkway", l, -a, l + w, -l - w),
    ];
    let (c0, c1) = (CROSSWALK_AT - CROSSWALK_HALF_WIDTH, CROSSWALK_AT + CROSSWALK_HALF_WIDTH);
    regions.push(rect("crosswalk_west", "walkway", -c1, -l, -c0, l));
    regions.push(rect("crosswalk_east", "walkway", c0, -l, c1, l));
    regions.push(rect("crosswalk_north", "walkway", -l, c0, l, c1));
    regions.push(rect("crosswalk_south", "walkway", -l, -c1, l, -c0));
    let g = l + w;
    regions.push(rect("grass_ne", "grass", g, g, a, a));
    regions.push(rect("grass_nw", "grass", -a, g, -g, a));
    regions.push(rect("grass_se", "grass", g, -a, a, -g));
    regions.push(rect("grass_sw", "grass", -a, -a, -g, -g));
    MapFile { location_id: "synthetic_intersection".into(), regions }
}

pub fn intersection_map() -> SemanticMap {
    SemanticMap::from_file(intersection_map_file()).expect("built-in map is valid")
}

/// Densely sampled polyline with arc-length lookup.
struct Route {
    pts: Vec<Vec2>,
    s: Vec<f64>,
}

impl Route {
    fn new(pts: Vec<Vec2>) -> Route {
        let mut s = vec![0.0];
        for w in pts.windows(2) {
            s.push(s[s.len() - 1] + w[0].dist(w[1]));
        }
        Route { pts, s }
    }

    fn length(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    fn at(&self, s: f64) -> Vec2 {
        let s = s.clamp(0.0, self.length());
        let i = match self.s.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(i) => return self.pts[i],
            Err(i) => i.clamp(1, self.pts.len() - 1),
        };
        let (s0, s1) = (self.s[i - 1], self.s[i]);
        let t = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        self.pts[i - 1].lerp(self.pts[i], t)
    }
}

fn segment(a: Vec2, b: Vec2, step: f64, out: &mut Vec<Vec2>) {
    let n = ((a.dist(b) / step).ceil() as usize).max(1);
    out.extend((0..n).map(|k| a.lerp(b, k as f64 / n as f64)));
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Turn {
    Straight,
    Right,
    Left,
}

/// Vehicle route entering along `dir` in its right-hand lane.
fn vehicle_route(dir: Vec2, turn: Turn, wrong_way: bool) -> Route {
    let right = Vec2::new(dir.y, -dir.x);
    let offset = if wrong_way { -LANE / 2.0 } else { LANE / 2.0 };
    let entry = dir * -ARM + right * offset;
    let exit_dir = match turn {
        Turn::Straight => dir,
        Turn::Right => right,
        Turn::Left => right * -1.0,
    };
    let exit_right = Vec2::new(exit_dir.y, -exit_dir.x);
    let exit = exit_dir * ARM + exit_right * offset;
    let mut pts = Vec::new();
    if turn == Turn::Straight {
        segment(entry, exit, 0.25, &mut pts);
    } else {
        // where the entry and exit lane centerlines meet
        let corner = right * offset + exit_right * offset;
        let radius = if turn == Turn::Right { 4.0 } else { 7.0 };
        let a = corner - dir * radius;
        let b = corner + exit_dir * radius;
        segment(entry, a, 0.25, &mut pts);
        for k in 0..40 {
            let t = k as f64 / 40.0;
            let p = a * ((1.0 - t) * (1.0 - t)) + corner * (2.0 * t * (1.0 - t)) + b * (t * t);
            pts.push(p);
        }
        segment(b, exit, 0.25, &mut pts);
    }
    pts.push(exit);
    Route::new(pts)
}

/// Pedestrian route: along a sidewalk toward the crossing, over the
/// crosswalk (or straight over the road when jaywalking), and back out on
/// the other side.
fn pedestrian_route(arm: Vec2, from_left: bool, jaywalk: bool) -> Route {
    let side = Vec2::new(-arm.y, arm.x) * if from_left { 1.0 } else { -1.0 };
    let walk_mid = LANE + WALK / 2.0;
    let at = if jaywalk { 25.0 } else { CROSSWALK_AT };
    let start = arm * ARM + side * walk_mid;
    let curb_a = arm * at + side * walk_mid;
    let curb_b = arm * at - side * walk_mid;
    let end = arm * ARM - side * walk_mid;
    let mut pts = Vec::new();
    segment(start, curb_a, 0.25, &mut pts);
    segment(curb_a, curb_b, 0.25, &mut pts);
    segment(curb_b, end, 0.25, &mut pts);
    pts.push(end);
    Route::new(pts)
}

#[derive(Debug, Clone, Copy)]
struct Profile {
    cruise: f64,
    accel: f64,
    brake: f64,
    /// Arc length to stop at, and standing time.
    stop: Option<(f64, f64)>,
}

/// Arc length per frame driving `route` with `profile` until its end.
fn drive(route: &Route, p: Profile, fps: f64, start_speed: f64) -> Vec<f64> {
    let dt = 1.0 / fps;
    let mut s = 0.0;
    let mut v = start_speed;
    let mut out = vec![0.0];
    let mut stop = p.stop;
    let mut waited = 0.0;
    while s < route.length() && out.len() < 100_000 {
        match stop {
            Some((at, wait)) if s < at => {
                let gap = at - s;
                if v <= 0.0 && gap < 0.5 || gap < 0.05 {
                    v = 0.0;
                    waited += dt;
                    if waited >= wait {
                        stop = None;
                    }
                } else if v * v / (2.0 * p.brake) >= gap - 0.3 {
                    v = (v - p.brake * dt).max(0.0);
                    if v == 0.0 && gap >= 0.5 {
                        v = 0.3;
                    }
                } else {
                    v = (v + p.accel * dt).min(p.cruise);
                }
            }
            Some(_) => stop = None,
            None => v = (v + p.accel * dt).min(p.cruise),
        }
        s += v * dt;
        out.push(s.min(route.length()));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn build(
    id: u32,
    class: RoadUserClass,
    dims: (f64, f64),
    first: u32,
    fps: f64,
    route: &Route,
    s: &[f64],
    last_frame: u32,
) -> Option<Track> {
    let n = s.len().min((last_frame + 1).saturating_sub(first) as usize);
    if n < 2 {
        return None;
    }
    let pts: Vec<Vec2> = s[..n].iter().map(|&x| route.at(x)).collect();
    let heading = (pts[1] - pts[0]).angle();
    Some(build_track(id, class, dims.0, dims.1, first, fps, &pts, heading))
}

/// Deterministic for a given spec.
pub fn intersection_recording(spec: SyntheticSpec) -> Recording {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fps = spec.frame_rate;
    let last_frame = (spec.duration * fps).round() as u32 - 1;
    let dirs = [Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(0.0, -1.0)];
    let mut tracks = Vec::with_capacity(spec.n_tracks);
    let mut id = 0u32;
    while tracks.len() < spec.n_tracks {
        id += 1;
        let roll: f64 = rng.gen();
        let class = match roll {
            x if x < 0.62 => RoadUserClass::Car,
            x if x < 0.68 => RoadUserClass::TruckBus,
            x if x < 0.74 => RoadUserClass::Van,
            x if x < 0.77 => RoadUserClass::Motorcycle,
            x if x < 0.86 => RoadUserClass::Bicycle,
            _ => RoadUserClass::Pedestrian,
        };
        let first = rng.gen_range(0..last_frame.saturating_sub((8.0 * fps) as u32).max(1));
        let dir = *dirs.choose(&mut rng).unwrap();
        let track = if class == RoadUserClass::Pedestrian {
            let jaywalk = rng.gen_bool(0.05);
            let route = pedestrian_route(dir, rng.gen_bool(0.5), jaywalk);
            let speed = rng.gen_range(1.1..1.7);
            let stop = rng.gen_bool(0.3).then(|| (route.length() / 2.0 - 4.0, rng.gen_range(1.5..6.0)));
            let s = drive(&route, Profile { cruise: speed, accel: 1.0, brake: 1.0, stop }, fps, speed);
            build(id, class, (0.0, 0.0), first, fps, &route, &s, last_frame)
        } else {
            let (dims, cruise): ((f64, f64), f64) = match class {
                RoadUserClass::TruckBus => ((rng.gen_range(8.0..12.0), 2.5), rng.gen_range(7.0..11.0)),
                RoadUserClass::Van => ((5.2, 2.0), rng.gen_range(8.0..12.0)),
                RoadUserClass::Motorcycle => ((2.4, 0.9), rng.gen_range(9.0..14.0)),
                RoadUserClass::Bicycle => ((0.0, 0.0), rng.gen_range(3.5..6.5)),
                _ => ((rng.gen_range(4.2..4.9), rng.gen_range(1.7..1.95)), rng.gen_range(8.0..13.0)),
            };
            let turn = match rng.gen_range(0..10) {
                0..=5 => Turn::Straight,
                6..=7 => Turn::Right,
                _ => Turn::Left,
            };
            let wrong_way = class.is_motorized() && rng.gen_bool(0.01);
            let speeder = rng.gen_bool(0.02);
            let turn = if wrong_way || speeder { Turn::Straight } else { turn };
            let cruise = if speeder {
                rng.gen_range(16.0..19.0)
            } else {
                match turn {
                    Turn::Straight => cruise,
                    Turn::Right => cruise.min(rng.gen_range(3.5..4.5)),
                    Turn::Left => cruise.min(rng.gen_range(4.5..5.5)),
                }
            };
            let route = vehicle_route(dir, turn, wrong_way);
            let brake = if rng.gen_bool(0.03) { rng.gen_range(6.0..8.0) } else { rng.gen_range(1.5..3.0) };
            let stop = rng.gen_bool(0.35).then(|| (ARM - STOP_LINE, rng.gen_range(1.0..8.0)));
            let profile = Profile { cruise, accel: rng.gen_range(1.0..2.0), brake, stop };
            let s = drive(&route, profile, fps, cruise);
            build(id, class, dims, first, fps, &route, &s, last_frame)
        };
        if let Some(t) = track {
            tracks.push(t);
        }
    }
    Recording {
        recording_id: (spec.seed % 1000) as u32,
        location_id: "synthetic_intersection".into(),
        frame_rate: fps,
        duration: spec.duration,
        tracks,
    }
}
