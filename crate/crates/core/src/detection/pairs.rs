use std::collections::{BTreeMap, HashMap};

use crate::dataset::Recording;

/// Track pairs (by index into `Recording::tracks`, lower index first) whose
/// centers are within the gating radius, per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGate {
    pub radius: f64,
    /// Ascending by frame; only frames with at least one pair.
    pub frames: Vec<(u32, Vec<(usize, usize)>)>,
}

impl PairGate {
    pub fn pairs_at(&self, frame: u32) -> &[(usize, usize)] {
        match self.frames.binary_search_by_key(&frame, |(f, _)| *f) {
            Ok(i) => &self.frames[i].1,
            Err(_) => &[],
        }
    }

    /// Frames per pair, ascending.
    pub fn by_pair(&self) -> BTreeMap<(usize, usize), Vec<u32>> {
        let mut out: BTreeMap<(usize, usize), Vec<u32>> = BTreeMap::new();
        for (f, pairs) in &self.frames {
            for p in pairs {
                out.entry(*p).or_default().push(*f);
            }
        }
        out
    }

    pub fn total(&self) -> usize {
        self.frames.iter().map(|(_, p)| p.len()).sum()
    }
}

/// Uniform spatial hashing with cells as wide as the radius, so only the
/// 3x3 neighbourhood of a track's cell needs checking.
pub fn candidate_pairs(recording: &Recording, radius: f64) -> PairGate {
    assert!(radius > 0.0, "gating radius must be positive");
    let Some((first, last)) = recording.frame_span() else {
        return PairGate { radius, frames: Vec::new() };
    };
    let mut by_start: Vec<usize> = (0..recording.tracks.len()).collect();
    by_start.sort_by_key(|&i| (recording.tracks[i].first_frame(), i));

    let r2 = radius * radius;
    let mut next = 0;
    let mut active: Vec<usize> = Vec::new();
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut frames = Vec::new();
    for frame in first..=last {
        while next < by_start.len() && recording.tracks[by_start[next]].first_frame() == frame {
            active.push(by_start[next]);
            next += 1;
        }
        active.retain(|&i| recording.tracks[i].last_frame() >= frame);
        if active.len() < 2 {
            continue;
        }
        grid.values_mut().for_each(Vec::clear);
        let cell = |i: usize| {
            let p = recording.tracks[i].state_at(frame).unwrap().position;
            ((p.x / radius).floor() as i64, (p.y / radius).floor() as i64)
        };
        for &i in &active {
            grid.entry(cell(i)).or_default().push(i);
        }
        let mut pairs = Vec::new();
        for &i in &active {
            let (cx, cy) = cell(i);
            let pi = recording.tracks[i].state_at(frame).unwrap().position;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(members) = grid.get(&(cx + dx, cy + dy)) else { continue };
                    for &j in members {
                        if j > i && recording.tracks[j].state_at(frame).unwrap().position.dist_sq(pi) <= r2 {
                            pairs.push((i, j));
                        }
                    }
                }
            }
        }
        if !pairs.is_empty() {
            pairs.sort_unstable();
            frames.push((frame, pairs));
        }
    }
    PairGate { radius, frames }
}
