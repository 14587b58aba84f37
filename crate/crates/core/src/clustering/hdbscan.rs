use super::{ClusterResult, Distances, UnionFind};

const MIN_RESOLUTION: f64 = 1e-9;

/// Hierarchical density clustering with excess-of-mass selection.
pub fn hdbscan_cluster<T, D>(items: &[T], distance: D, min_cluster_size: usize) -> ClusterResult
where
    T: Sync,
    D: Fn(&T, &T) -> f64 + Sync,
{
    hdbscan_with_resolution(items, distance, min_cluster_size, MIN_RESOLUTION)
}

/// As [`hdbscan_cluster`], treating mutual reachability distances below
/// `resolution` as equal. Density levels are λ = 1 / max(d, resolution), so
/// items closer than the measuring resolution cannot split off spurious
/// micro-clusters.
///
/// When the hierarchy holds no cluster besides the root, the root itself is
/// used, keeping only items that stay in it up to the finest level.
pub fn hdbscan_with_resolution<T, D>(
    items: &[T],
    distance: D,
    min_cluster_size: usize,
    resolution: f64,
) -> ClusterResult
where
    T: Sync,
    D: Fn(&T, &T) -> f64 + Sync,
{
    let mcs = min_cluster_size.max(2);
    let resolution = resolution.max(MIN_RESOLUTION);
    let n = items.len();
    let dist = Distances::new(items, distance);
    if n < 2 {
        return ClusterResult::from_raw_labels(vec![None; n], &dist, |_| true);
    }

    let core = core_distances(&dist, mcs);
    let mst = prim_mst(&dist, &core);
    let dendro = single_linkage(n, mst);
    let tree = condense(&dendro, n, mcs, resolution);
    let labels = select_and_label(&tree, n, resolution);
    ClusterResult::from_raw_labels(labels, &dist, |_| true)
}

/// Distance to the k-th nearest item, the item itself counted first.
fn core_distances(dist: &Distances<'_>, k: usize) -> Vec<f64> {
    let n = dist.len();
    let k = k.min(n);
    let mut row = Vec::with_capacity(n);
    (0..n)
        .map(|i| {
            row.clear();
            row.extend((0..n).map(|j| dist.get(i, j)));
            let (_, kth, _) = row.select_nth_unstable_by(k - 1, f64::total_cmp);
            *kth
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    a: usize,
    b: usize,
    w: f64,
}

/// Dense Prim over mutual reachability distances.
fn prim_mst(dist: &Distances<'_>, core: &[f64]) -> Vec<Edge> {
    let n = core.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut from = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut cur = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let mut next = usize::MAX;
        let mut next_w = f64::INFINITY;
        for j in 0..n {
            if in_tree[j] {
                continue;
            }
            let mr = dist.get(cur, j).max(core[cur]).max(core[j]);
            if mr < best[j] {
                best[j] = mr;
                from[j] = cur;
            }
            if best[j] < next_w || next == usize::MAX {
                next_w = best[j];
                next = j;
            }
        }
        in_tree[next] = true;
        edges.push(Edge { a: from[next], b: next, w: next_w });
        cur = next;
    }
    edges
}

#[derive(Debug, Clone, Copy)]
struct Merge {
    left: usize,
    right: usize,
    w: f64,
    size: usize,
}

/// Dendrogram; merge k creates node n + k.
fn single_linkage(n: usize, mut edges: Vec<Edge>) -> Vec<Merge> {
    edges.sort_by(|x, y| {
        x.w.total_cmp(&y.w).then(x.a.min(x.b).cmp(&y.a.min(y.b))).then(x.a.max(x.b).cmp(&y.a.max(y.b)))
    });
    let mut uf = UnionFind::new(n);
    let mut node_of_root: Vec<usize> = (0..n).collect();
    let mut sizes = vec![1usize; 2 * n - 1];
    let mut merges = Vec::with_capacity(n - 1);
    for e in edges {
        let (ra, rb) = (uf.find(e.a), uf.find(e.b));
        let (left, right) = (node_of_root[ra], node_of_root[rb]);
        let root = uf.union(ra, rb).expect("spanning tree edges join distinct components");
        let id = n + merges.len();
        sizes[id] = sizes[left] + sizes[right];
        merges.push(Merge { left, right, w: e.w, size: sizes[id] });
        node_of_root[root] = id;
    }
    merges
}

#[derive(Debug, Clone, Copy)]
struct Row {
    parent: usize,
    /// point index, or cluster id when `is_cluster`
    child: usize,
    is_cluster: bool,
    lambda: f64,
    size: usize,
}

#[derive(Debug, Default)]
struct CondensedTree {
    rows: Vec<Row>,
    /// birth level per cluster; cluster 0 is the root
    birth: Vec<f64>,
}

/// Walk the dendrogram top-down. Merges at the same level (after clamping
/// to the resolution) are taken as a single multi-way split so that tied
/// distances cannot make the result depend on input order.
fn condense(dendro: &[Merge], n: usize, mcs: usize, resolution: f64) -> CondensedTree {
    let size_of = |node: usize| if node < n { 1 } else { dendro[node - n].size };
    let leaves = |node: usize| {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x < n {
                out.push(x);
            } else {
                stack.push(dendro[x - n].right);
                stack.push(dendro[x - n].left);
            }
        }
        out
    };
    // children of `node` after flattening merges at the node's own level
    let split = |node: usize| {
        let level = |x: usize| dendro[x - n].w.max(resolution);
        let w = level(node);
        let mut parts = Vec::new();
        let mut stack = vec![dendro[node - n].right, dendro[node - n].left];
        while let Some(x) = stack.pop() {
            if x >= n && level(x) == w {
                stack.push(dendro[x - n].right);
                stack.push(dendro[x - n].left);
            } else {
                parts.push(x);
            }
        }
        parts
    };

    let mut tree = CondensedTree { rows: Vec::new(), birth: vec![0.0] };
    let root = n + dendro.len() - 1;
    let mut stack = vec![(root, 0usize)];
    while let Some((node, cluster)) = stack.pop() {
        let lambda = 1.0 / dendro[node - n].w.max(resolution);
        let parts = split(node);
        let big = parts.iter().filter(|&&p| size_of(p) >= mcs).count();
        for &part in &parts {
            let size = size_of(part);
            if size < mcs {
                for p in leaves(part) {
                    tree.rows.push(Row { parent: cluster, child: p, is_cluster: false, lambda, size: 1 });
                }
            } else if big == 1 {
                stack.push((part, cluster));
            } else {
                let id = tree.birth.len();
                tree.birth.push(lambda);
                tree.rows.push(Row { parent: cluster, child: id, is_cluster: true, lambda, size });
                stack.push((part, id));
            }
        }
    }
    tree
}

fn select_and_label(tree: &CondensedTree, n: usize, resolution: f64) -> Vec<Option<usize>> {
    let nc = tree.birth.len();
    let mut stability = vec![0.0f64; nc];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nc];
    let mut parent_of = vec![usize::MAX; nc];
    let mut fall_out = vec![(0usize, 0.0f64); n];
    for r in &tree.rows {
        stability[r.parent] += (r.lambda - tree.birth[r.parent]) * r.size as f64;
        if r.is_cluster {
            children[r.parent].push(r.child);
            parent_of[r.child] = r.parent;
        } else {
            fall_out[r.child] = (r.parent, r.lambda);
        }
    }

    let mut selected = vec![false; nc];
    if nc == 1 {
        // only the root: keep items that never left it before the finest level
        let finest = 1.0 / resolution;
        let members: Vec<usize> = (0..n).filter(|&p| fall_out[p].1 >= finest).collect();
        let mut labels = vec![None; n];
        if members.len() >= 2 {
            for p in members {
                labels[p] = Some(0);
            }
        }
        return labels;
    }

    // children always carry larger ids than their parent
    for c in (1..nc).rev() {
        let subtree: f64 = children[c].iter().map(|&k| stability[k]).sum();
        if subtree > stability[c] {
            stability[c] = subtree;
        } else {
            selected[c] = true;
            let mut stack = children[c].clone();
            while let Some(k) = stack.pop() {
                selected[k] = false;
                stack.extend(children[k].iter().copied());
            }
        }
    }

    (0..n)
        .map(|p| {
            let mut c = fall_out[p].0;
            while c != 0 {
                if selected[c] {
                    return Some(c);
                }
                c = parent_of[c];
            }
            None
        })
        .collect()
}
