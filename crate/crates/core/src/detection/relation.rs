//! Relation indicators between road users: THW, TTC, DRAC, ΔmTTCP and the
//! waiting period.

use rayon::prelude::*;

use crate::config::DetectionConfig;
use crate::dataset::{Recording, Track};
use crate::geometry::conflict::swept_cells;
use crate::geometry::{angle_between, intersect_swept, resample_path, BodyShape, ConflictCell, PolyPath, SweptCells};

use super::pairs::PairGate;
use super::types::{sort_detections, Aux, Detection, DetectionType, Scenario};

/// Path and swept body of one track, prepared once per analysis.
#[derive(Debug, Clone)]
pub struct TrackGeometry {
    pub path: PolyPath,
    pub body: BodyShape,
    pub swept: SweptCells,
}

impl TrackGeometry {
    pub fn new(track: &Track, cfg: &DetectionConfig) -> Self {
        let path = resample_path(track, cfg.path_spacing);
        let body = body_of(track, cfg);
        let swept = swept_cells(&path, body, cfg.conflict_raster);
        TrackGeometry { path, body, swept }
    }
}

pub fn body_of(track: &Track, cfg: &DetectionConfig) -> BodyShape {
    if track.is_vru() {
        BodyShape::Disc { radius: cfg.vru_body_radius }
    } else {
        BodyShape::Rect { length: track.length, width: track.width }
    }
}

/// Length used for bumper-to-bumper gaps; VRUs count as points.
fn body_length(track: &Track) -> f64 {
    if track.is_vru() {
        0.0
    } else {
        track.length
    }
}

/// The partner, seen from a subject following it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Following {
    /// Center-to-center distance along the subject's path, m.
    pub gap: f64,
    /// Gap minus half of both body lengths, m.
    pub bumper_gap: f64,
    pub subject_speed: f64,
    pub partner_speed: f64,
}

impl Following {
    pub fn closing_speed(&self) -> f64 {
        self.subject_speed - self.partner_speed
    }
}

/// Whether `subject` follows `partner` at `frame`: the partner sits on the
/// subject's future path (within the lateral tolerance, roughly aligned
/// with it) no farther ahead than the gating radius.
pub fn following(
    subject: &Track,
    geom: &TrackGeometry,
    partner: &Track,
    frame: u32,
    cfg: &DetectionConfig,
) -> Option<Following> {
    let s = subject.state_at(frame)?;
    let p = partner.state_at(frame)?;
    if s.speed < cfg.standing_speed {
        return None;
    }
    let rel = p.position - s.position;
    if rel.dot(crate::geometry::Vec2::from_angle(s.heading)) <= 0.0 && rel.norm() > cfg.follow_lateral_tolerance {
        return None;
    }
    let s_now = geom.path.s_at_frame(frame)?;
    let proj = geom.path.project(p.position, s_now, s_now + cfg.gating_radius)?;
    if proj.lateral > cfg.follow_lateral_tolerance {
        return None;
    }
    if angle_between(p.heading, proj.tangent) >= cfg.follow_heading_tolerance_deg.to_radians() {
        return None;
    }
    let gap = proj.s - s_now;
    if gap <= 0.0 {
        return None;
    }
    let bumper_gap = gap - 0.5 * body_length(partner) - 0.5 * body_length(subject);
    Some(Following { gap, bumper_gap, subject_speed: s.speed, partner_speed: p.speed })
}

fn follow_aux(f: &Following) -> Aux {
    Aux::Follow { gap: f.gap, closing_speed: f.closing_speed() }
}

/// Time headway; emitted up to the horizon.
pub fn thw_from(f: &Following, cfg: &DetectionConfig) -> Option<f64> {
    let thw = f.gap / f.subject_speed;
    (thw <= cfg.horizon).then_some(thw)
}

/// Time to collision on the bumper gap; emitted in (0, horizon].
pub fn ttc_from(f: &Following, cfg: &DetectionConfig) -> Option<f64> {
    let closing = f.closing_speed();
    if closing <= 0.0 || f.bumper_gap <= 0.0 {
        return None;
    }
    let ttc = f.bumper_gap / closing;
    (ttc > 0.0 && ttc <= cfg.horizon).then_some(ttc)
}

/// Deceleration rate to avoid a crash, (Δv)² / (2Δx).
pub fn drac_from(f: &Following, cfg: &DetectionConfig) -> Option<f64> {
    let closing = f.closing_speed();
    if closing <= 0.0 || f.bumper_gap <= 0.0 {
        return None;
    }
    let drac = closing * closing / (2.0 * f.bumper_gap);
    (drac >= cfg.drac_min).then_some(drac)
}

fn following_detection(
    kind: DetectionType,
    value: Option<f64>,
    subject: &Track,
    partner: &Track,
    frame: u32,
    f: &Following,
) -> Option<Detection> {
    value.map(|v| Detection::punctual(kind, subject.track_id, frame, v, follow_aux(f)).with_partner(partner.track_id))
}

pub fn compute_thw(
    subject: &Track,
    geom: &TrackGeometry,
    partner: &Track,
    frame: u32,
    cfg: &DetectionConfig,
) -> Option<Detection> {
    let f = following(subject, geom, partner, frame, cfg)?;
    following_detection(DetectionType::Thw, thw_from(&f, cfg), subject, partner, frame, &f)
}

pub fn compute_ttc(
    subject: &Track,
    geom: &TrackGeometry,
    partner: &Track,
    frame: u32,
    cfg: &DetectionConfig,
) -> Option<Detection> {
    let f = following(subject, geom, partner, frame, cfg)?;
    following_detection(DetectionType::Ttc, ttc_from(&f, cfg), subject, partner, frame, &f)
}

pub fn compute_drac(
    subject: &Track,
    geom: &TrackGeometry,
    partner: &Track,
    frame: u32,
    cfg: &DetectionConfig,
) -> Option<Detection> {
    let f = following(subject, geom, partner, frame, cfg)?;
    following_detection(DetectionType::Drac, drac_from(&f, cfg), subject, partner, frame, &f)
}

/// THW, TTC and DRAC of `subject` behind `partner`, sharing one projection.
pub fn following_detections(
    subject: &Track,
    geom: &TrackGeometry,
    partner: &Track,
    frame: u32,
    cfg: &DetectionConfig,
    out: &mut Vec<Detection>,
) {
    let Some(f) = following(subject, geom, partner, frame, cfg) else { return };
    out.extend(following_detection(DetectionType::Thw, thw_from(&f, cfg), subject, partner, frame, &f));
    out.extend(following_detection(DetectionType::Ttc, ttc_from(&f, cfg), subject, partner, frame, &f));
    out.extend(following_detection(DetectionType::Drac, drac_from(&f, cfg), subject, partner, frame, &f));
}

/// Conflict cells of two tracks whose path directions differ by at least
/// `beta_min` radians.
pub fn gated_conflicts(a: &TrackGeometry, b: &TrackGeometry, beta_min: f64) -> Vec<ConflictCell> {
    intersect_swept(&a.swept, &b.swept)
        .cells
        .into_iter()
        .filter(|c| angle_between(c.heading_a, c.heading_b) >= beta_min)
        .collect()
}

/// ΔmTTCP of the pair at `frame` over precomputed gated conflict cells.
/// Returns one detection per user, mirrored.
pub fn compute_dmttcp(
    a: &Track,
    ga: &TrackGeometry,
    b: &Track,
    gb: &TrackGeometry,
    cells: &[ConflictCell],
    frame: u32,
    cfg: &DetectionConfig,
) -> Option<[Detection; 2]> {
    if cells.is_empty() {
        return None;
    }
    let (sa, sb) = (a.state_at(frame)?, b.state_at(frame)?);
    if sa.speed < cfg.standing_speed || sb.speed < cfg.standing_speed {
        return None;
    }
    let (na, nb) = (ga.path.s_at_frame(frame)?, gb.path.s_at_frame(frame)?);
    let mut best: Option<(f64, &ConflictCell, f64, f64)> = None;
    for c in cells {
        let (ra, rb) = (c.s_a - na, c.s_b - nb);
        if ra < 0.0 || rb < 0.0 {
            continue;
        }
        let (ta, tb) = (ra / sa.speed, rb / sb.speed);
        if ta > cfg.horizon || tb > cfg.horizon {
            continue;
        }
        let delta = (ta - tb).abs();
        if best.is_none_or(|(d, ..)| delta < d) {
            best = Some((delta, c, ta, tb));
        }
    }
    let (delta, cell, ta, tb) = best?;
    let da = Detection::punctual(
        DetectionType::Dmttcp,
        a.track_id,
        frame,
        delta,
        Aux::Conflict { ccp: cell.center, mttcp_subject: ta, mttcp_partner: tb },
    )
    .with_partner(b.track_id);
    let db = Detection::punctual(
        DetectionType::Dmttcp,
        b.track_id,
        frame,
        delta,
        Aux::Conflict { ccp: cell.center, mttcp_subject: tb, mttcp_partner: ta },
    )
    .with_partner(a.track_id);
    Some([da, db])
}

/// Waiting periods: standing runs of at least the minimum duration after
/// which the track moves on. One detection per standing frame, valued with
/// the standing time elapsed so far.
pub fn compute_wp(track: &Track, frame_rate: f64, cfg: &DetectionConfig) -> Vec<Detection> {
    let states = &track.states;
    let mut out = Vec::new();
    let mut i = 0;
    while i < states.len() {
        if states[i].speed >= cfg.standing_speed {
            i += 1;
            continue;
        }
        let start = i;
        while i < states.len() && states[i].speed < cfg.standing_speed {
            i += 1;
        }
        let run = i - start;
        let long_enough = run as f64 / frame_rate >= cfg.wp_min_duration;
        let moves_on = states[i..].iter().any(|s| s.speed > cfg.wp_resume_speed);
        if long_enough && moves_on {
            for (k, st) in states[start..i].iter().enumerate() {
                out.push(Detection::punctual(
                    DetectionType::Wp,
                    track.track_id,
                    st.frame,
                    k as f64 / frame_rate,
                    Aux::None,
                ));
            }
        }
    }
    out
}

/// All relation detections of a recording, in canonical order.
pub fn relation_detections(
    recording: &Recording,
    geoms: &[TrackGeometry],
    gate: &PairGate,
    cfg: &DetectionConfig,
    scenario: Scenario,
) -> Vec<Detection> {
    let beta_min = cfg.beta_min(scenario);
    let pairs: Vec<((usize, usize), Vec<u32>)> = gate.by_pair().into_iter().collect();
    let mut out: Vec<Detection> = pairs
        .par_iter()
        .flat_map_iter(|((i, j), frames)| {
            let (a, b) = (&recording.tracks[*i], &recording.tracks[*j]);
            let (ga, gb) = (&geoms[*i], &geoms[*j]);
            let cells = gated_conflicts(ga, gb, beta_min);
            let mut d = Vec::new();
            for &f in frames {
                following_detections(a, ga, b, f, cfg, &mut d);
                following_detections(b, gb, a, f, cfg, &mut d);
                if let Some(pair) = compute_dmttcp(a, ga, b, gb, &cells, f, cfg) {
                    d.extend(pair);
                }
            }
            d
        })
        .collect();
    out.par_extend(recording.tracks.par_iter().flat_map_iter(|t| compute_wp(t, recording.frame_rate, cfg)));
    sort_detections(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::RoadUserClass;
    use crate::geometry::Vec2;
    use crate::synthetic::{build_track, positions_from_speeds, straight_positions};
    use std::f64::consts::{FRAC_PI_2, PI};

    const FPS: f64 = 25.0;

    fn cfg() -> DetectionConfig {
        DetectionConfig::default()
    }

    fn car(id: u32, pts: &[Vec2], heading: f64, length: f64, width: f64) -> (Track, TrackGeometry) {
        let t = build_track(id, RoadUserClass::Car, length, width, 0, FPS, pts, heading);
        let g = TrackGeometry::new(&t, &cfg());
        (t, g)
    }

    fn straight_car(id: u32, start: Vec2, heading: f64, speed: f64, n: usize) -> (Track, TrackGeometry) {
        car(id, &straight_positions(start, heading, speed, n, FPS), heading, 4.0, 1.8)
    }

    #[test]
    fn thw_one_second() {
        let (f, gf) = straight_car(1, Vec2::ZERO, 0.0, 10.0, 100);
        let (l, _) = straight_car(2, Vec2::new(10.0, 0.0), 0.0, 10.0, 100);
        let d = compute_thw(&f, &gf, &l, 0, &cfg()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-9);
        assert_eq!(d.partner, Some(2));
        // the leader does not follow the follower
        let (_, gl) = straight_car(2, Vec2::new(10.0, 0.0), 0.0, 10.0, 100);
        assert!(compute_thw(&l, &gl, &f, 0, &cfg()).is_none());
    }

    #[test]
    fn thw_beyond_horizon_not_emitted() {
        let (f, gf) = straight_car(1, Vec2::ZERO, 0.0, 10.0, 400);
        let (l, _) = straight_car(2, Vec2::new(100.0, 0.0), 0.0, 10.0, 400);
        assert!(compute_thw(&f, &gf, &l, 0, &cfg()).is_none());
    }

    #[test]
    fn thw_on_bend_uses_path_length() {
        let r = 20.0;
        let v = 5.0;
        let n = 200;
        let arc: Vec<Vec2> = (0..n)
            .map(|i| {
                let a = -FRAC_PI_2 + v * i as f64 / FPS / r;
                Vec2::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let (f, gf) = car(1, &arc, 0.0, 4.0, 1.8);
        // partner a quarter of the bend ahead, moving along the tangent there
        let theta = PI / 4.0;
        let a = -FRAC_PI_2 + theta;
        let ppos = Vec2::new(r * a.cos(), r * a.sin());
        let (p, _) = straight_car(2, ppos, a + FRAC_PI_2, v, 10);
        let d = compute_thw(&f, &gf, &p, 0, &cfg()).unwrap();
        let arc_thw = r * theta / v;
        let chord_thw = f.states[0].position.dist(ppos) / v;
        assert!(d.value > chord_thw);
        assert!((d.value - arc_thw).abs() / arc_thw < 0.01, "{} vs {}", d.value, arc_thw);
    }

    #[test]
    fn ttc_bumper_gap() {
        // 20 m bumper to bumper with 4 m cars, closing at 5 m/s
        let (f, gf) = straight_car(1, Vec2::ZERO, 0.0, 10.0, 150);
        let (l, _) = straight_car(2, Vec2::new(24.0, 0.0), 0.0, 5.0, 150);
        let d = compute_ttc(&f, &gf, &l, 0, &cfg()).unwrap();
        assert!((d.value - 4.0).abs() < 1e-9);
        let (fast, _) = straight_car(3, Vec2::new(24.0, 0.0), 0.0, 15.0, 150);
        assert!(compute_ttc(&f, &gf, &fast, 0, &cfg()).is_none());
    }

    #[test]
    fn ttc_decreases_behind_braking_leader() {
        let (f, gf) = straight_car(1, Vec2::ZERO, 0.0, 10.0, 200);
        let speeds: Vec<f64> = (0..60).map(|i| (10.0 - 4.0 * i as f64 / FPS).max(0.0)).collect();
        let pts = positions_from_speeds(Vec2::new(24.0, 0.0), 0.0, &speeds, FPS);
        let (l, _) = car(2, &pts, 0.0, 4.0, 1.8);
        let series: Vec<f64> = (0..50).filter_map(|k| compute_ttc(&f, &gf, &l, k, &cfg())).map(|d| d.value).collect();
        assert!(series.len() > 20);
        for w in series.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(series.iter().all(|t| *t > 0.0 && *t <= 5.0));
    }

    #[test]
    fn drac_formula() {
        let (f, gf) = straight_car(1, Vec2::ZERO, 0.0, 15.0, 200);
        let (l, _) = straight_car(2, Vec2::new(54.0, 0.0), 0.0, 5.0, 200);
        let d = compute_drac(&f, &gf, &l, 0, &cfg()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-9);
        let (same, _) = straight_car(3, Vec2::new(54.0, 0.0), 0.0, 15.0, 200);
        assert!(compute_drac(&f, &gf, &same, 0, &cfg()).is_none());
    }

    #[test]
    fn drac_matches_formula_grid() {
        for dv in [1.0, 2.5, 4.0, 7.0] {
            for dx in [5.0, 12.0, 30.0] {
                let vf = 12.0;
                let (f, gf) = straight_car(1, Vec2::ZERO, 0.0, vf, 300);
                let (l, _) = straight_car(2, Vec2::new(dx + 4.0, 0.0), 0.0, vf - dv, 300);
                let expected = dv * dv / (2.0 * dx);
                match compute_drac(&f, &gf, &l, 0, &cfg()) {
                    Some(d) => assert!((d.value - expected).abs() < 1e-9),
                    None => assert!(expected < 0.5),
                }
            }
        }
    }

    /// Point-sized users crossing at (0.1, 0.1), `da` and `db` meters away.
    fn crossing(da: f64, db: f64, va: f64, vb: f64, angle: f64, dims: (f64, f64)) -> Option<[Detection; 2]> {
        let c = Vec2::new(0.1, 0.1);
        let pa = straight_positions(c - Vec2::new(da, 0.0), 0.0, va, 200, FPS);
        let hb = angle;
        let pb = straight_positions(c - Vec2::from_angle(hb) * db, hb, vb, 200, FPS);
        let (a, ga) = car(1, &pa, 0.0, dims.0, dims.1);
        let (b, gb) = car(2, &pb, hb, dims.0, dims.1);
        let cells = gated_conflicts(&ga, &gb, cfg().beta_min(Scenario::Urban));
        compute_dmttcp(&a, &ga, &b, &gb, &cells, 0, &cfg())
    }

    #[test]
    fn dmttcp_crossing() {
        let [a, b] = crossing(10.0, 30.0, 10.0, 10.0, FRAC_PI_2, (0.0, 0.0)).unwrap();
        assert!((a.value - 2.0).abs() < 0.05, "{}", a.value);
        assert_eq!(a.value, b.value);
        assert_eq!(a.partner, Some(2));
        assert_eq!(b.partner, Some(1));
        let [s, _] = crossing(10.0, 10.0, 10.0, 10.0, FRAC_PI_2, (0.0, 0.0)).unwrap();
        assert!(s.value.abs() < 0.05);
        // real bodies: symmetric crossing still meets at the same time
        let [s, _] = crossing(10.0, 10.0, 10.0, 10.0, FRAC_PI_2, (4.5, 1.8)).unwrap();
        assert!(s.value.abs() < 0.05);
    }

    #[test]
    fn dmttcp_scales_with_speed() {
        let [slow, _] = crossing(10.0, 25.0, 8.0, 8.0, FRAC_PI_2, (0.0, 0.0)).unwrap();
        let [fast, _] = crossing(10.0, 25.0, 16.0, 16.0, FRAC_PI_2, (0.0, 0.0)).unwrap();
        assert!((fast.value - slow.value / 2.0).abs() < 1e-9);
        if let (Aux::Conflict { mttcp_subject: s1, .. }, Aux::Conflict { mttcp_subject: s2, .. }) = (slow.aux, fast.aux)
        {
            assert!((s2 - s1 / 2.0).abs() < 1e-9);
        } else {
            panic!("conflict aux expected");
        }
    }

    #[test]
    fn dmttcp_respects_horizon() {
        assert!(crossing(10.0, 60.0, 10.0, 10.0, FRAC_PI_2, (4.5, 1.8)).is_none());
    }

    #[test]
    fn dmttcp_matches_exhaustive_minimum() {
        let c = Vec2::new(0.0, 0.0);
        let pa = straight_positions(c - Vec2::new(12.0, 0.0), 0.0, 9.0, 200, FPS);
        let hb = 1.2;
        let pb = straight_positions(c - Vec2::from_angle(hb) * 17.0, hb, 7.0, 200, FPS);
        let (a, ga) = car(1, &pa, 0.0, 4.5, 1.8);
        let (b, gb) = car(2, &pb, hb, 4.5, 1.8);
        let cells = crate::geometry::conflict_points(&ga.path, ga.body, &gb.path, gb.body).cells;
        assert!(cells.len() > 10);
        for frame in [0u32, 10, 20] {
            let got = compute_dmttcp(&a, &ga, &b, &gb, &gated_conflicts(&ga, &gb, 20f64.to_radians()), frame, &cfg());
            let (na, nb) = (ga.path.s_at_frame(frame).unwrap(), gb.path.s_at_frame(frame).unwrap());
            let (va, vb) = (a.state_at(frame).unwrap().speed, b.state_at(frame).unwrap().speed);
            let expected = cells
                .iter()
                .filter(|c| angle_between(c.heading_a, c.heading_b) >= 20f64.to_radians())
                .filter(|c| c.s_a >= na && c.s_b >= nb)
                .map(|c| ((c.s_a - na) / va, (c.s_b - nb) / vb))
                .filter(|(ta, tb)| *ta <= 5.0 && *tb <= 5.0)
                .map(|(ta, tb)| (ta - tb).abs())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(got.map(|d| d[0].value).unwrap_or(f64::INFINITY), expected);
        }
    }

    #[test]
    fn angle_gate_by_scenario() {
        let h = 15f64.to_radians();
        let pa = straight_positions(Vec2::new(-20.0, 0.0), 0.0, 10.0, 100, FPS);
        let pb = straight_positions(Vec2::from_angle(h) * -22.0, h, 10.0, 100, FPS);
        let (a, ga) = car(1, &pa, 0.0, 4.5, 1.8);
        let (b, gb) = car(2, &pb, h, 4.5, 1.8);
        let urban = gated_conflicts(&ga, &gb, cfg().beta_min(Scenario::Urban));
        assert!(compute_dmttcp(&a, &ga, &b, &gb, &urban, 0, &cfg()).is_none());
        let highway = gated_conflicts(&ga, &gb, cfg().beta_min(Scenario::Highway));
        assert!(compute_dmttcp(&a, &ga, &b, &gb, &highway, 0, &cfg()).is_some());
    }

    fn wp_track(speeds: &[f64]) -> Track {
        let pts = positions_from_speeds(Vec2::ZERO, 0.0, speeds, FPS);
        build_track(7, RoadUserClass::Car, 4.5, 1.8, 0, FPS, &pts, 0.0)
    }

    fn ramps(d: &[Detection]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for x in d {
            if x.value == 0.0 {
                out.push(Vec::new());
            }
            out.last_mut().unwrap().push(x.value);
        }
        out
    }

    #[test]
    fn wp_ramp_mid_route() {
        let speeds: Vec<f64> = [vec![8.0; 50], vec![0.0; 250], vec![8.0; 50]].concat();
        let d = compute_wp(&wp_track(&speeds), FPS, &cfg());
        let r = ramps(&d);
        assert_eq!(r.len(), 1);
        assert!((r[0].len() as i64 - 250).abs() <= 2);
        assert!((r[0].last().unwrap() - 10.0).abs() < 0.2);
        for w in r[0].windows(2) {
            assert!((w[1] - w[0] - 1.0 / FPS).abs() < 1e-12);
        }
    }

    #[test]
    fn wp_not_at_track_end() {
        let speeds: Vec<f64> = [vec![8.0; 50], vec![0.0; 250]].concat();
        assert!(compute_wp(&wp_track(&speeds), FPS, &cfg()).is_empty());
    }

    #[test]
    fn wp_stop_and_go() {
        let speeds: Vec<f64> =
            [vec![6.0; 40], vec![0.0; 60], vec![6.0; 40], vec![0.0; 80], vec![6.0; 40], vec![0.0; 40], vec![6.0; 40]]
                .concat();
        let d = compute_wp(&wp_track(&speeds), FPS, &cfg());
        let r = ramps(&d);
        assert_eq!(r.len(), 3);
        let lens: Vec<usize> = r.iter().map(Vec::len).collect();
        for (l, e) in lens.iter().zip([60, 80, 40]) {
            assert!((*l as i64 - e).abs() <= 2, "{lens:?}");
        }
        // a stop shorter than a second is not a waiting period
        let short: Vec<f64> = [vec![6.0; 40], vec![0.0; 20], vec![6.0; 40]].concat();
        assert!(compute_wp(&wp_track(&short), FPS, &cfg()).is_empty());
    }
}
