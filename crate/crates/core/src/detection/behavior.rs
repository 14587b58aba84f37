//! Driving-behavior clustering: DBSCAN over (heading, speed) points of one
//! region, with a grid index so regions with tens of thousands of states
//! stay tractable.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::clustering::{renumber, UnionFind};
use crate::dataset::TrackId;
use crate::geometry::wrap_angle;

use super::types::{Aux, Detection, DetectionType};

/// Speed below which velocity differences are no longer scaled down, m/s.
pub const SPEED_SCALE_FLOOR: f64 = 1.5;

/// One (state, region) membership seen as a behavior sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehaviorPoint {
    pub track: TrackId,
    pub frame: u32,
    pub region: usize,
    pub heading: f64,
    pub speed: f64,
}

/// Distance between two behaviors: wrapped heading difference combined with
/// a speed difference relative to the faster of the two.
pub fn behavior_distance(a: &BehaviorPoint, b: &BehaviorPoint) -> f64 {
    let dpsi = wrap_angle(a.heading - b.heading);
    let dv = (a.speed - b.speed) / a.speed.max(b.speed).max(SPEED_SCALE_FLOOR);
    (dpsi * dpsi + dv * dv).sqrt()
}

pub fn min_samples_for(n: usize) -> usize {
    ((2.0 + 0.01 * n as f64).round() as usize).max(2)
}

/// Log-like speed coordinate. The speed term of `behavior_distance` is at
/// most |dw| and at least 1 - exp(-|dw|), which is what the grid relies on.
fn speed_coord(v: f64) -> f64 {
    let v = v.max(0.0);
    if v <= SPEED_SCALE_FLOOR {
        v / SPEED_SCALE_FLOOR
    } else {
        1.0 + (v / SPEED_SCALE_FLOOR).ln()
    }
}

#[inline]
fn ordered_distance(points: &[BehaviorPoint], i: usize, j: usize) -> f64 {
    // same argument order as a condensed matrix so results match bit for bit
    if i < j {
        behavior_distance(&points[i], &points[j])
    } else {
        behavior_distance(&points[j], &points[i])
    }
}

struct Grid {
    /// Point indices per cell, ascending.
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
    /// Cells that may hold points within eps of a cell, itself included.
    neighbours: Vec<Vec<usize>>,
}

impl Grid {
    fn new(points: &[BehaviorPoint], eps: f64) -> Grid {
        // cells small enough that any two points inside are within eps
        let side = eps / 2f64.sqrt() * 0.999;
        let n_psi = ((2.0 * PI / side).ceil() as i64).max(1);
        let s_psi = 2.0 * PI / n_psi as f64;
        let key = |p: &BehaviorPoint| {
            let ip = (((wrap_angle(p.heading) + PI) / s_psi).floor() as i64).clamp(0, n_psi - 1);
            let iw = (speed_coord(p.speed) / side).floor() as i64;
            (ip, iw)
        };
        let mut index: HashMap<(i64, i64), usize> = HashMap::new();
        let mut keys: Vec<(i64, i64)> = Vec::new();
        let mut cells: Vec<Vec<usize>> = Vec::new();
        let mut cell_of = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let k = key(p);
            let c = *index.entry(k).or_insert_with(|| {
                keys.push(k);
                cells.push(Vec::new());
                cells.len() - 1
            });
            cells[c].push(i);
            cell_of.push(c);
        }
        let lower_bound = |a: (i64, i64), b: (i64, i64)| {
            let g = (a.0 - b.0).rem_euclid(n_psi);
            let g = g.min(n_psi - g);
            let dpsi = (g - 1).max(0) as f64 * s_psi;
            let dw = ((a.1 - b.1).abs() - 1).max(0) as f64 * side;
            let term = 1.0 - (-dw).exp();
            (dpsi * dpsi + term * term).sqrt()
        };
        let neighbours =
            keys.iter().map(|&a| (0..keys.len()).filter(|&c| lower_bound(a, keys[c]) <= eps).collect()).collect();
        Grid { cells, cell_of, neighbours }
    }

    fn candidates(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbours[self.cell_of[i]].iter().flat_map(move |&c| self.cells[c].iter().copied())
    }
}

/// DBSCAN under `behavior_distance`. Produces exactly the labels of
/// `clustering::dbscan` with the same parameters.
pub fn behavior_dbscan(points: &[BehaviorPoint], eps: f64, min_samples: usize) -> Vec<Option<usize>> {
    assert!(eps > 0.0 && min_samples >= 1);
    let n = points.len();
    let grid = Grid::new(points, eps);

    let mut core = vec![false; n];
    for members in &grid.cells {
        if members.len() >= min_samples {
            members.iter().for_each(|&i| core[i] = true);
        }
    }
    for i in 0..n {
        if core[i] {
            continue;
        }
        let mut count = 0;
        for j in grid.candidates(i) {
            if ordered_distance(points, i, j) <= eps {
                count += 1;
                if count >= min_samples {
                    core[i] = true;
                    break;
                }
            }
        }
    }

    let mut uf = UnionFind::new(n);
    for (c, members) in grid.cells.iter().enumerate() {
        let cores: Vec<usize> = members.iter().copied().filter(|&i| core[i]).collect();
        for w in cores.windows(2) {
            uf.union(w[0], w[1]);
        }
        let Some(&rep) = cores.first() else { continue };
        for &d in &grid.neighbours[c] {
            if d <= c {
                continue;
            }
            let other = grid.cells[d].iter().copied().find(|&j| core[j]);
            let Some(other) = other else { continue };
            if uf.find(rep) == uf.find(other) {
                continue;
            }
            let linked =
                cores.iter().any(|&i| grid.cells[d].iter().any(|&j| core[j] && ordered_distance(points, i, j) <= eps));
            if linked {
                uf.union(rep, other);
            }
        }
    }

    let mut cluster_of_root = vec![usize::MAX; n];
    let mut next = 0;
    let mut labels: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        if core[i] {
            let r = uf.find(i);
            if cluster_of_root[r] == usize::MAX {
                cluster_of_root[r] = next;
                next += 1;
            }
            labels[i] = Some(cluster_of_root[r]);
        }
    }
    for i in 0..n {
        if !core[i] {
            labels[i] = grid
                .candidates(i)
                .filter(|&j| core[j] && ordered_distance(points, i, j) <= eps)
                .filter_map(|j| labels[j])
                .min();
        }
    }
    renumber(labels).0
}

/// Unusual behaviors within one region: noise points and members of
/// clusters holding less than `minor_share` of all points. The value is the
/// distance to the nearest other member of the largest cluster, or `eps`
/// when nothing clusters.
pub fn behavior_clustering(points: &[BehaviorPoint], eps: f64, minor_share: f64) -> Vec<Detection> {
    let n = points.len();
    if n < 2 {
        return Vec::new();
    }
    let labels = behavior_dbscan(points, eps, min_samples_for(n));
    let k = labels.iter().flatten().map(|c| c + 1).max().unwrap_or(0);
    let mut sizes = vec![0usize; k];
    labels.iter().flatten().for_each(|&c| sizes[c] += 1);
    let largest = (0..k).fold(None, |best: Option<usize>, c| match best {
        Some(b) if sizes[b] >= sizes[c] => Some(b),
        _ => Some(c),
    });
    let largest_members: Vec<usize> = match largest {
        Some(l) => (0..n).filter(|&i| labels[i] == Some(l)).collect(),
        None => Vec::new(),
    };
    let grid = (!largest_members.is_empty()).then(|| Grid::new(points, eps));

    let unusual = |i: usize| match labels[i] {
        None => true,
        Some(c) => (sizes[c] as f64) < minor_share * n as f64,
    };
    let nearest = |i: usize| -> f64 {
        let Some(grid) = &grid else { return eps };
        let l = largest.unwrap();
        let near = grid
            .candidates(i)
            .filter(|&j| j != i && labels[j] == Some(l))
            .map(|j| ordered_distance(points, i, j))
            .fold(f64::INFINITY, f64::min);
        if near <= eps {
            return near;
        }
        // anything outside the neighbouring cells is farther than eps
        largest_members
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| ordered_distance(points, i, j))
            .fold(f64::INFINITY, f64::min)
    };
    (0..n)
        .filter(|&i| unusual(i))
        .map(|i| {
            let p = &points[i];
            let value = nearest(i);
            let value = if value.is_finite() { value } else { eps };
            Detection::punctual(DetectionType::DrivingBehavior, p.track, p.frame, value, Aux::None).in_region(p.region)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::dbscan;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(i: usize, heading: f64, speed: f64) -> BehaviorPoint {
        BehaviorPoint { track: i as u32, frame: i as u32, region: 0, heading, speed }
    }

    #[test]
    fn min_samples_rounding() {
        assert_eq!(min_samples_for(100), 3);
        assert_eq!(min_samples_for(0), 2);
        assert_eq!(min_samples_for(149), 3);
        assert_eq!(min_samples_for(150), 4);
    }

    #[test]
    fn distance_by_hand() {
        let a = pt(0, 0.0, 10.0);
        let b = pt(1, 0.3, 6.0);
        assert!((behavior_distance(&a, &b) - (0.09f64 + 0.16).sqrt()).abs() < 1e-12);
        // floor at 1.5 m/s
        let c = pt(2, 0.0, 0.0);
        let d = pt(3, 0.0, 0.75);
        assert!((behavior_distance(&c, &d) - 0.5).abs() < 1e-12);
        // across the +-pi seam
        let e = pt(4, PI - 0.05, 3.0);
        let f = pt(5, -PI + 0.05, 3.0);
        assert!((behavior_distance(&e, &f) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn reversed_point_is_the_only_detection() {
        let mut pts: Vec<BehaviorPoint> = (0..100).map(|i| pt(i, 0.5, 8.0)).collect();
        pts.push(pt(100, 0.5 + PI, 8.0));
        let d = behavior_clustering(&pts, 0.7, 0.1);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].subject, 100);
        assert!((d[0].value - PI).abs() < 1e-9);
        assert_eq!(d[0].region, Some(0));
    }

    #[test]
    fn minor_cluster_flagged() {
        let mut pts: Vec<BehaviorPoint> = (0..95).map(|i| pt(i, 0.0, 10.0)).collect();
        pts.extend((95..100).map(|i| pt(i, 1.5, 10.0)));
        let d = behavior_clustering(&pts, 0.7, 0.1);
        assert_eq!(d.len(), 5);
        assert!(d.iter().all(|x| x.subject >= 95 && (x.value - 1.5).abs() < 1e-12));
    }

    #[test]
    fn nothing_clusters_gives_eps() {
        let pts = vec![pt(0, 0.0, 5.0), pt(1, 2.0, 5.0)];
        let d = behavior_clustering(&pts, 0.7, 0.1);
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|x| x.value == 0.7));
    }

    fn pedestrians(rng: &mut ChaCha8Rng, n: usize) -> Vec<BehaviorPoint> {
        (0..n).map(|i| pt(i, rng.gen_range(-PI..PI), rng.gen_range(1.0..2.0))).collect()
    }

    #[test]
    fn matches_generic_dbscan_on_pedestrians() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [10, 60, 300] {
            let pts = pedestrians(&mut rng, n);
            for ms in [2, 3, 5, 9] {
                let generic = dbscan(&pts, behavior_distance, 0.7, ms);
                assert_eq!(behavior_dbscan(&pts, 0.7, ms), generic.labels, "n={n} ms={ms}");
            }
        }
    }

    #[test]
    fn matches_generic_dbscan_on_traffic_mix() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let lanes = [0.0, PI / 2.0, PI, -PI / 2.0, 3.1];
        let pts: Vec<BehaviorPoint> = (0..800)
            .map(|i| {
                let h = lanes[rng.gen_range(0..lanes.len())] + rng.gen_range(-0.1..0.1);
                let v = if rng.gen_bool(0.2) { rng.gen_range(0.0..0.6) } else { rng.gen_range(5.0..15.0) };
                pt(i, h, v)
            })
            .collect();
        for eps in [0.2, 0.7, 1.3] {
            let generic = dbscan(&pts, behavior_distance, eps, 10);
            assert_eq!(behavior_dbscan(&pts, eps, 10), generic.labels, "eps={eps}");
        }
    }

    proptest! {
        #[test]
        fn distance_properties(
            h1 in -10.0f64..10.0, h2 in -10.0f64..10.0, v1 in 0.0f64..40.0, v2 in 0.0f64..40.0,
        ) {
            let a = pt(0, h1, v1);
            let b = pt(1, h2, v2);
            let d = behavior_distance(&a, &b);
            prop_assert!((d - behavior_distance(&b, &a)).abs() < 1e-12);
            prop_assert!(behavior_distance(&a, &a) == 0.0);
            let shifted = behavior_distance(&pt(0, h1 + 2.0 * PI, v1), &pt(1, h2 + 2.0 * PI, v2));
            prop_assert!((d - shifted).abs() < 1e-9);
            let speed_term = (v1 - v2) / v1.max(v2).max(SPEED_SCALE_FLOOR);
            prop_assert!(speed_term.abs() <= (v1 - v2).abs() / 1.5 + 1e-12);
            // the grid's bounds on the speed term
            let dw = (speed_coord(v1) - speed_coord(v2)).abs();
            prop_assert!(speed_term.abs() <= dw + 1e-12);
            prop_assert!(speed_term.abs() >= 1.0 - (-dw).exp() - 1e-12);
        }

        #[test]
        fn grid_equals_generic(
            raw in prop::collection::vec((-PI..PI, 0.0f64..20.0), 2..120),
            ms in 2usize..6,
            eps in 0.05f64..1.5,
        ) {
            let pts: Vec<BehaviorPoint> = raw.iter().enumerate().map(|(i, &(h, v))| pt(i, h, v)).collect();
            prop_assert_eq!(behavior_dbscan(&pts, eps, ms), dbscan(&pts, behavior_distance, eps, ms).labels);
        }

        #[test]
        fn detections_are_noise_or_minor(raw in prop::collection::vec((-PI..PI, 0.0f64..20.0), 2..150)) {
            let pts: Vec<BehaviorPoint> = raw.iter().enumerate().map(|(i, &(h, v))| pt(i, h, v)).collect();
            let labels = behavior_dbscan(&pts, 0.7, min_samples_for(pts.len()));
            let mut sizes = std::collections::HashMap::new();
            labels.iter().flatten().for_each(|c| *sizes.entry(*c).or_insert(0usize) += 1);
            for d in behavior_clustering(&pts, 0.7, 0.1) {
                let i = d.subject as usize;
                prop_assert!(labels[i].is_none_or(|c| (sizes[&c] as f64) < 0.1 * pts.len() as f64));
                prop_assert!(d.value >= 0.0 && d.value.is_finite());
            }
        }

        #[test]
        fn duplicating_points_never_adds_detections(raw in prop::collection::vec((-PI..PI, 0.0f64..20.0), 2..80)) {
            let pts: Vec<BehaviorPoint> = raw.iter().enumerate().map(|(i, &(h, v))| pt(i, h, v)).collect();
            let mut doubled = pts.clone();
            doubled.extend(pts.iter().enumerate().map(|(i, p)| BehaviorPoint { track: (pts.len() + i) as u32, ..*p }));
            let before = behavior_clustering(&pts, 0.7, 0.1).len();
            let after = behavior_clustering(&doubled, 0.7, 0.1).len();
            prop_assert!(after <= 2 * before, "{} -> {}", before, after);
        }
    }
}
