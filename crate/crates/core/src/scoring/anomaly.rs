use crate::dataset::Recording;
use crate::detection::{Detection, DetectionType};
use crate::map::RegionMembership;

/// Above this many candidate regions the cheapest-first heuristic replaces
/// exhaustive subset search.
pub const SUBSET_ENUMERATION_LIMIT: usize = 16;
const COVER_TOLERANCE: f64 = 1e-9;

/// Detection counts per region and type and the number of road users seen
/// in each region. The last region slot stands for everything off the map.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionContext {
    pub n_regions: usize,
    pub counts: Vec<[u64; DetectionType::ALL.len()]>,
    pub users: Vec<u64>,
    pub weight_cap: f64,
}

impl RegionContext {
    pub fn off_map(&self) -> usize {
        self.n_regions
    }

    /// Count detections and road users. `assignment` is indexed like the
    /// recording's tracks and states.
    pub fn build(
        recording: &Recording,
        assignment: &[Vec<Vec<RegionMembership>>],
        n_regions: usize,
        detections: &[Detection],
        weight_cap: f64,
    ) -> RegionContext {
        let slots = n_regions + 1;
        let mut users = vec![0u64; slots];
        for memberships in assignment {
            let mut seen = vec![false; slots];
            for m in memberships {
                if m.is_empty() {
                    seen[n_regions] = true;
                }
                m.iter().for_each(|x| seen[x.region] = true);
            }
            seen.iter().zip(users.iter_mut()).filter(|(s, _)| **s).for_each(|(_, u)| *u += 1);
        }
        let mut ctx =
            RegionContext { n_regions, counts: vec![[0; DetectionType::ALL.len()]; slots], users, weight_cap };
        let index: std::collections::HashMap<_, _> =
            recording.tracks.iter().enumerate().map(|(i, t)| (t.track_id, i)).collect();
        for d in detections {
            for (r, _) in ctx.detection_regions(d, |id, frame| {
                let i = index[&id];
                let k = recording.tracks[i].index_of(frame).expect("detection frame inside its track");
                &assignment[i][k]
            }) {
                ctx.counts[r][d.kind.index()] += 1;
            }
        }
        ctx
    }

    /// Regions a detection belongs to with the subject's footprint fraction
    /// in each. Clustering detections stay in the region they were found in.
    pub fn detection_regions<'a>(
        &self,
        d: &Detection,
        memberships: impl Fn(crate::dataset::TrackId, u32) -> &'a [RegionMembership],
    ) -> Vec<(usize, f64)> {
        if let Some(r) = d.region {
            return vec![(r, 1.0)];
        }
        let m = memberships(d.subject, d.start_frame);
        if m.is_empty() {
            vec![(self.off_map(), 1.0)]
        } else {
            m.iter().map(|x| (x.region, x.fraction)).collect()
        }
    }

    /// Rarity weight U / M^(3/2), capped.
    pub fn gamma(&self, region: usize, kind: DetectionType) -> f64 {
        let m = self.counts[region][kind.index()] as f64;
        let u = self.users[region] as f64;
        if m == 0.0 {
            return self.weight_cap;
        }
        (u / m.powf(1.5)).min(self.weight_cap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextChoice {
    /// Fraction-weighted weight over the chosen regions.
    pub gamma: f64,
    /// Chosen region holding the largest share of the footprint.
    pub primary: usize,
    pub chosen: Vec<usize>,
}

/// Pick regions covering the whole footprint so that the fraction-weighted
/// rarity weight is smallest. Candidates are `(region, fraction, gamma)`.
/// When even all candidates together cover less than the footprint, all of
/// them are used.
pub fn select_context(candidates: &[(usize, f64, f64)]) -> ContextChoice {
    assert!(!candidates.is_empty(), "a detection always has a context");
    let n = candidates.len();
    let weighted = |set: &[usize]| {
        let f: f64 = set.iter().map(|&i| candidates[i].1).sum();
        let g: f64 = set.iter().map(|&i| candidates[i].1 * candidates[i].2).sum();
        (f, if f > 0.0 { g / f } else { set.iter().map(|&i| candidates[i].2).fold(f64::INFINITY, f64::min) })
    };
    let all: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    if n <= SUBSET_ENUMERATION_LIMIT {
        for mask in 1u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let (f, g) = weighted(&set);
            if f + COVER_TOLERANCE >= 1.0 && best.as_ref().is_none_or(|(bg, _)| g < *bg) {
                best = Some((g, set));
            }
        }
    } else {
        let mut order = all.clone();
        order.sort_by(|&a, &b| candidates[a].2.total_cmp(&candidates[b].2).then(candidates[a].0.cmp(&candidates[b].0)));
        let mut set = Vec::new();
        let mut f = 0.0;
        for i in order {
            set.push(i);
            f += candidates[i].1;
            if f + COVER_TOLERANCE >= 1.0 {
                best = Some((weighted(&set).1, set));
                break;
            }
        }
    }
    let (gamma, set) = best.unwrap_or_else(|| (weighted(&all).1, all));
    let primary = set
        .iter()
        .copied()
        .max_by(|&a, &b| candidates[a].1.total_cmp(&candidates[b].1).then(candidates[b].0.cmp(&candidates[a].0)))
        .map(|i| candidates[i].0)
        .unwrap();
    let mut chosen: Vec<usize> = set.iter().map(|&i| candidates[i].0).collect();
    chosen.sort_unstable();
    ContextChoice { gamma, primary, chosen }
}
