//! Density clustering over arbitrary items with pluggable distances.

mod dbscan;
mod hdbscan;

pub use dbscan::dbscan;
pub use hdbscan::{hdbscan_cluster, hdbscan_with_resolution};

use rayon::prelude::*;

/// Above this item count pairwise distances are recomputed on demand
/// instead of being held in a matrix.
pub const MATRIX_CACHE_LIMIT: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Cluster id per item, `None` for noise. Ids are dense from 0 and
    /// numbered by their smallest member index.
    pub labels: Vec<Option<usize>>,
    pub cluster_sizes: Vec<usize>,
    /// For noise items: distance to the nearest clustered item, infinite
    /// when no cluster exists. `None` for clustered items.
    pub outlier_distance: Vec<Option<f64>>,
}

impl ClusterResult {
    pub fn n_clusters(&self) -> usize {
        self.cluster_sizes.len()
    }

    pub fn is_noise(&self, i: usize) -> bool {
        self.labels[i].is_none()
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    /// Index of the cluster with the most members; lowest id on ties.
    pub fn largest_cluster(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (c, &s) in self.cluster_sizes.iter().enumerate() {
            if best.is_none_or(|b| s > self.cluster_sizes[b]) {
                best = Some(c);
            }
        }
        best
    }

    /// Build from raw labels: renumber densely by smallest member and fill
    /// sizes and outlier distances. Outlier distances are measured to the
    /// nearest clustered item accepted by `anchor`.
    pub(crate) fn from_raw_labels(
        raw: Vec<Option<usize>>,
        dist: &Distances<'_>,
        anchor: impl Fn(usize) -> bool,
    ) -> ClusterResult {
        let (labels, k) = renumber(raw);
        let mut cluster_sizes = vec![0usize; k];
        for c in labels.iter().flatten() {
            cluster_sizes[*c] += 1;
        }
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i].is_some() && anchor(i)).collect();
        let outlier_distance = (0..labels.len())
            .map(|i| labels[i].is_none().then(|| members.iter().map(|&j| dist.get(i, j)).fold(f64::INFINITY, f64::min)))
            .collect();
        ClusterResult { labels, cluster_sizes, outlier_distance }
    }
}

/// Renumber cluster ids densely in order of each cluster's smallest member.
/// Returns the new labels and the cluster count.
pub(crate) fn renumber(raw: Vec<Option<usize>>) -> (Vec<Option<usize>>, usize) {
    let mut remap: Vec<Option<usize>> = Vec::new();
    let mut next = 0usize;
    let labels = raw
        .into_iter()
        .map(|l| {
            l.map(|c| {
                if c >= remap.len() {
                    remap.resize(c + 1, None);
                }
                *remap[c].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
        })
        .collect();
    (labels, next)
}

/// Pairwise distance access, backed by a condensed matrix for small inputs.
pub struct Distances<'a> {
    n: usize,
    matrix: Option<Vec<f64>>,
    f: Box<dyn Fn(usize, usize) -> f64 + Sync + 'a>,
}

impl<'a> Distances<'a> {
    pub fn new<T: Sync, D>(items: &'a [T], distance: D) -> Distances<'a>
    where
        D: Fn(&T, &T) -> f64 + Sync + 'a,
    {
        let n = items.len();
        let f: Box<dyn Fn(usize, usize) -> f64 + Sync + 'a> = Box::new(move |i, j| distance(&items[i], &items[j]));
        let matrix = (n <= MATRIX_CACHE_LIMIT && n > 1).then(|| {
            let rows: Vec<Vec<f64>> =
                (0..n - 1).into_par_iter().map(|i| (i + 1..n).map(|j| f(i, j)).collect()).collect();
            rows.concat()
        });
        Distances { n, matrix, f }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.matrix {
            Some(m) => {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                // row a starts after the a previous rows of decreasing length
                m[a * (2 * self.n - a - 1) / 2 + (b - a - 1)]
            }
            None => (self.f)(i, j),
        }
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use std::collections::BTreeSet;

    use super::ClusterResult;

    /// Partition as a set of member sets plus the noise set; label
    /// numbering does not matter.
    pub fn partition(r: &ClusterResult) -> (BTreeSet<BTreeSet<usize>>, BTreeSet<usize>) {
        let mut groups = vec![BTreeSet::new(); r.n_clusters()];
        let mut noise = BTreeSet::new();
        for (i, l) in r.labels.iter().enumerate() {
            match l {
                Some(c) => {
                    groups[*c].insert(i);
                }
                None => {
                    noise.insert(i);
                }
            }
        }
        (groups.into_iter().collect(), noise)
    }
}

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns the new root, or `None` if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some(ra)
    }
}
