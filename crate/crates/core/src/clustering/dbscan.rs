use super::{ClusterResult, Distances, UnionFind};

/// Classic DBSCAN. `min_samples` counts the point itself. Clusters are the
/// connected components of core points numbered by their smallest core
/// index; a border point joins the lowest-numbered cluster it can reach,
/// which is what index-order expansion produces. Outlier distances are
/// measured to the nearest core point, so they always exceed `eps`.
pub fn dbscan<T, D>(items: &[T], distance: D, eps: f64, min_samples: usize) -> ClusterResult
where
    T: Sync,
    D: Fn(&T, &T) -> f64 + Sync,
{
    assert!(eps > 0.0, "eps must be positive");
    assert!(min_samples >= 1, "min_samples must be at least 1");
    let n = items.len();
    let dist = Distances::new(items, distance);

    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| dist.get(i, j) <= eps).count() >= min_samples).collect();

    let mut uf = UnionFind::new(n);
    for i in 0..n {
        if core[i] {
            for j in i + 1..n {
                if core[j] && dist.get(i, j) <= eps {
                    uf.union(i, j);
                }
            }
        }
    }

    // component root -> cluster id in order of smallest core index
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
            labels[i] = (0..n).filter(|&j| core[j] && dist.get(i, j) <= eps).filter_map(|j| labels[j]).min();
        }
    }
    ClusterResult::from_raw_labels(labels, &dist, |i| core[i])
}
