use super::path::PolyPath;
use super::vec2::Vec2;

/// Discrete Fréchet distance between two point sequences (Eiter & Mannila
/// dynamic program, two rolling rows, squared distances until the end).
pub fn discrete_frechet(a: &[Vec2], b: &[Vec2]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "Fréchet distance needs non-empty sequences");
    let m = b.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];

    prev[0] = a[0].dist_sq(b[0]);
    for j in 1..m {
        prev[j] = prev[j - 1].max(a[0].dist_sq(b[j]));
    }
    for ai in &a[1..] {
        cur[0] = prev[0].max(ai.dist_sq(b[0]));
        for j in 1..m {
            let reach = prev[j].min(prev[j - 1]).min(cur[j - 1]);
            cur[j] = reach.max(ai.dist_sq(b[j]));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1].sqrt()
}

impl PolyPath {
    pub fn frechet(&self, other: &PolyPath) -> f64 {
        discrete_frechet(&self.points, &other.points)
    }
}
