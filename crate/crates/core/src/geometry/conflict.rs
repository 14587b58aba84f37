//! Conflict points of two driven paths: raster cells swept by both road
//! users' bodies, each annotated with where along either path it is reached.

use std::collections::HashMap;

use super::path::PolyPath;
use super::vec2::Vec2;

/// Default conflict raster resolution, meters.
pub const DEFAULT_RASTER: f64 = 0.5;

pub type CellKey = (i32, i32);

/// Physical body outline used when sweeping a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BodyShape {
    Rect { length: f64, width: f64 },
    Disc { radius: f64 },
}

impl BodyShape {
    fn half_extent(&self) -> f64 {
        match *self {
            BodyShape::Rect { length, width } => 0.5 * length.hypot(width),
            BodyShape::Disc { radius } => radius,
        }
    }

    fn covers(&self, local: Vec2) -> bool {
        match *self {
            BodyShape::Rect { length, width } => local.x.abs() <= 0.5 * length && local.y.abs() <= 0.5 * width,
            BodyShape::Disc { radius } => local.norm_sq() <= radius * radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Visit {
    s: f64,
    heading: f64,
    d2: f64,
}

/// Cells covered by one road user's body along its whole path.
#[derive(Debug, Clone)]
pub struct SweptCells {
    pub resolution: f64,
    cells: HashMap<CellKey, Visit>,
}

impl SweptCells {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, key: CellKey) -> bool {
        self.cells.contains_key(&key)
    }
}

#[inline]
pub fn cell_of(p: Vec2, res: f64) -> CellKey {
    ((p.x / res).floor() as i32, (p.y / res).floor() as i32)
}

#[inline]
pub fn cell_center(key: CellKey, res: f64) -> Vec2 {
    Vec2::new((key.0 as f64 + 0.5) * res, (key.1 as f64 + 0.5) * res)
}

/// Rasterize the union of body outlines placed at every path point. A cell
/// is covered when its center lies inside the outline; bodies too small to
/// cover any center still mark the cell holding their reference point. Each
/// cell keeps the arc length of the cell center projected onto the tangent
/// of the nearest covering path point.
pub fn swept_cells(path: &PolyPath, shape: BodyShape, res: f64) -> SweptCells {
    let mut cells: HashMap<CellKey, Visit> = HashMap::new();
    let reach = shape.half_extent();
    let total = path.length();
    for ((&p, &s0), &heading) in path.points.iter().zip(&path.cumulative_s).zip(&path.tangents) {
        let fwd = Vec2::from_angle(heading);
        let left = Vec2::new(-fwd.y, fwd.x);
        let (lo, hi) = (cell_of(p - Vec2::new(reach, reach), res), cell_of(p + Vec2::new(reach, reach), res));
        let mut offer = |key: CellKey, c: Vec2| {
            let rel = c - p;
            let d2 = rel.norm_sq();
            let s = (s0 + rel.dot(fwd)).clamp(0.0, total);
            cells
                .entry(key)
                .and_modify(|v| {
                    if d2 < v.d2 || (d2 == v.d2 && s < v.s) {
                        *v = Visit { s, heading, d2 };
                    }
                })
                .or_insert(Visit { s, heading, d2 });
        };
        let mut any = false;
        for i in lo.0..=hi.0 {
            for j in lo.1..=hi.1 {
                let c = cell_center((i, j), res);
                let rel = c - p;
                if shape.covers(Vec2::new(rel.dot(fwd), rel.dot(left))) {
                    offer((i, j), c);
                    any = true;
                }
            }
        }
        if !any {
            let key = cell_of(p, res);
            offer(key, cell_center(key, res));
        }
    }
    SweptCells { resolution: res, cells }
}

/// One shared cell with per-user arc length and path heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictCell {
    pub key: CellKey,
    pub center: Vec2,
    pub s_a: f64,
    pub s_b: f64,
    pub heading_a: f64,
    pub heading_b: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConflictPointSet {
    pub resolution: f64,
    /// Sorted by cell key.
    pub cells: Vec<ConflictCell>,
}

impl ConflictPointSet {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }
}

/// Intersect two precomputed sweeps.
pub fn intersect_swept(a: &SweptCells, b: &SweptCells) -> ConflictPointSet {
    debug_assert_eq!(a.resolution, b.resolution);
    let res = a.resolution;
    let (small, large, flipped) = if a.cells.len() <= b.cells.len() { (a, b, false) } else { (b, a, true) };
    let mut cells: Vec<ConflictCell> = small
        .cells
        .iter()
        .filter_map(|(key, v_small)| {
            let v_large = large.cells.get(key)?;
            let (va, vb) = if flipped { (v_large, v_small) } else { (v_small, v_large) };
            Some(ConflictCell {
                key: *key,
                center: cell_center(*key, res),
                s_a: va.s,
                s_b: vb.s,
                heading_a: va.heading,
                heading_b: vb.heading,
            })
        })
        .collect();
    cells.sort_unstable_by_key(|c| c.key);
    ConflictPointSet { resolution: res, cells }
}

/// Conflict points of two paths with their body shapes, on the default
/// 0.5 m raster.
pub fn conflict_points(
    path_a: &PolyPath,
    shape_a: BodyShape,
    path_b: &PolyPath,
    shape_b: BodyShape,
) -> ConflictPointSet {
    conflict_points_at(path_a, shape_a, path_b, shape_b, DEFAULT_RASTER)
}

pub fn conflict_points_at(
    path_a: &PolyPath,
    shape_a: BodyShape,
    path_b: &PolyPath,
    shape_b: BodyShape,
    res: f64,
) -> ConflictPointSet {
    intersect_swept(&swept_cells(path_a, shape_a, res), &swept_cells(path_b, shape_b, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TrackState;
    use crate::geometry::path::resample_states;
    use std::collections::BTreeSet;

    fn straight(from: Vec2, to: Vec2, n: usize) -> PolyPath {
        let states: Vec<TrackState> = (0..n)
            .map(|i| TrackState {
                frame: i as u32,
                t: 0.0,
                position: from.lerp(to, i as f64 / (n - 1) as f64),
                heading: (to - from).angle(),
                speed: 10.0,
                velocity: Vec2::ZERO,
                accel_lon: 0.0,
                accel_lat: 0.0,
                yaw_rate: 0.0,
                sideslip: 0.0,
            })
            .collect();
        resample_states(&states, 0.5)
    }

    const CAR: BodyShape = BodyShape::Rect { length: 4.0, width: 2.0 };

    /// Dense 5 cm sampling of where both swept bodies overlap, computed from
    /// the analytic corridor geometry rather than the raster.
    #[test]
    fn perpendicular_crossing_matches_dense_oracle() {
        let a = straight(Vec2::new(-20.0, 0.1), Vec2::new(20.0, 0.1), 81);
        let b = straight(Vec2::new(0.1, -20.0), Vec2::new(0.1, 20.0), 81);
        let set = conflict_points(&a, CAR, &b, CAR);
        assert!(!set.is_empty());

        // analytic sweeps: |y-0.1| <= 1 and |x-0.1| <= 1 near the crossing
        let mut dense = Vec::new();
        let step = 0.05;
        for i in -60..=60 {
            for j in -60..=60 {
                let p = Vec2::new(i as f64 * step, j as f64 * step);
                if (p.y - 0.1).abs() <= 1.0 && (p.x - 0.1).abs() <= 1.0 {
                    dense.push(p);
                }
            }
        }
        let dense_min_x = dense.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let dense_max_x = dense.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
        let xs: Vec<f64> = set.cells.iter().map(|c| c.center.x).collect();
        let min_x = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_x = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // extent agrees with the true overlap within one raster cell
        assert!((min_x - dense_min_x).abs() <= 0.5 && (max_x - dense_max_x).abs() <= 0.5);
        // every raster cell center lies inside the true overlap
        for c in &set.cells {
            assert!((c.center.y - 0.1).abs() <= 1.0 && (c.center.x - 0.1).abs() <= 1.0);
        }
        // centered on the crossing
        let cx = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((cx - 0.1).abs() < 0.3);
    }

    #[test]
    fn parallel_paths_far_apart_do_not_conflict() {
        let a = straight(Vec2::new(0.0, 0.0), Vec2::new(50.0, 0.0), 60);
        let b = straight(Vec2::new(0.0, 10.0), Vec2::new(50.0, 10.0), 60);
        assert!(conflict_points(&a, CAR, &b, CAR).is_empty());
    }

    #[test]
    fn identical_paths_share_every_cell_with_equal_s() {
        let a = straight(Vec2::new(0.0, 0.0), Vec2::new(30.0, 5.0), 60);
        let sa = swept_cells(&a, CAR, 0.5);
        let set = conflict_points(&a, CAR, &a, CAR);
        assert_eq!(set.len(), sa.len());
        assert!(set.cells.iter().all(|c| c.s_a == c.s_b));
    }

    #[test]
    fn cell_sets_are_symmetric() {
        let a = straight(Vec2::new(-10.0, -3.0), Vec2::new(15.0, 4.0), 50);
        let b = straight(Vec2::new(2.0, -12.0), Vec2::new(-1.0, 14.0), 50);
        let ab: BTreeSet<CellKey> = conflict_points(&a, CAR, &b, CAR).cells.iter().map(|c| c.key).collect();
        let ba: BTreeSet<CellKey> = conflict_points(&b, CAR, &a, CAR).cells.iter().map(|c| c.key).collect();
        assert_eq!(ab, ba);
        let set = conflict_points(&a, CAR, &b, CAR);
        let rev = conflict_points(&b, CAR, &a, CAR);
        for (x, y) in set.cells.iter().zip(&rev.cells) {
            assert_eq!((x.s_a, x.s_b), (y.s_b, y.s_a));
        }
    }

    /// Cells fully inside the analytic overlap survive a finer path spacing.
    #[test]
    fn finer_spacing_keeps_full_cells() {
        let mk = |ds: f64, from: Vec2, to: Vec2| {
            let states: Vec<TrackState> = (0..2)
                .map(|i| TrackState {
                    frame: i,
                    t: 0.0,
                    position: if i == 0 { from } else { to },
                    heading: (to - from).angle(),
                    speed: 10.0,
                    velocity: Vec2::ZERO,
                    accel_lon: 0.0,
                    accel_lat: 0.0,
                    yaw_rate: 0.0,
                    sideslip: 0.0,
                })
                .collect::<Vec<_>>();
            resample_states(&states, ds)
        };
        for ds in [0.5, 0.25] {
            let a = mk(ds, Vec2::new(-15.0, 0.3), Vec2::new(15.0, 0.3));
            let b = mk(ds, Vec2::new(-10.0, -10.0), Vec2::new(10.0, 10.0));
            let set = conflict_points(&a, CAR, &b, CAR);
            let keys: BTreeSet<CellKey> = set.cells.iter().map(|c| c.key).collect();
            // cells whose whole square lies within both corridors
            for i in -8..8 {
                for j in -8..8 {
                    let corners = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
                        .map(|(dx, dy)| Vec2::new(i as f64 * 0.5 + dx, j as f64 * 0.5 + dy));
                    let in_a = corners.iter().all(|p| (p.y - 0.3).abs() <= 1.0);
                    let in_b = corners.iter().all(|p| ((p.y - p.x) / 2f64.sqrt()).abs() <= 1.0);
                    if in_a && in_b {
                        assert!(keys.contains(&(i, j)), "ds {ds}: missing cell {i},{j}");
                    }
                }
            }
        }
    }

    #[test]
    fn point_bodies_still_mark_cells() {
        let a = straight(Vec2::new(-5.0, 0.0), Vec2::new(5.0, 0.0), 21);
        let tiny = BodyShape::Rect { length: 0.0, width: 0.0 };
        let sweep = swept_cells(&a, tiny, 0.5);
        assert_eq!(sweep.len(), 21);
    }
}
