//! Planar polygon primitives: areas, orientation, simplicity checks and
//! clipping of arbitrary simple polygons against convex windows.

use serde::{Deserialize, Serialize};

use super::vec2::Vec2;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: Vec2 { x: f64::INFINITY, y: f64::INFINITY },
        max: Vec2 { x: f64::NEG_INFINITY, y: f64::NEG_INFINITY },
    };

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Vec2>) -> Aabb {
        let mut b = Aabb::EMPTY;
        for p in pts {
            b.expand(*p);
        }
        b
    }

    pub fn expand(&mut self, p: Vec2) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb {
            min: Vec2::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            max: Vec2::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        }
    }

    pub fn intersects(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y
    }

    pub fn inflate(&self, margin: f64) -> Aabb {
        Aabb {
            min: Vec2::new(self.min.x - margin, self.min.y - margin),
            max: Vec2::new(self.max.x + margin, self.max.y + margin),
        }
    }
}

/// Shoelace signed area; positive for counter-clockwise rings. The ring is
/// implicitly closed.
pub fn signed_area(ring: &[Vec2]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut prev = ring[ring.len() - 1];
    for &p in ring {
        acc += prev.cross(p);
        prev = p;
    }
    0.5 * acc
}

pub fn area(ring: &[Vec2]) -> f64 {
    signed_area(ring).abs()
}

pub fn centroid(ring: &[Vec2]) -> Vec2 {
    let a = signed_area(ring);
    if a.abs() < 1e-12 {
        let n = ring.len().max(1) as f64;
        let s = ring.iter().fold(Vec2::ZERO, |acc, p| acc + *p);
        return s * (1.0 / n);
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut prev = ring[ring.len() - 1];
    for &p in ring {
        let c = prev.cross(p);
        cx += (prev.x + p.x) * c;
        cy += (prev.y + p.y) * c;
        prev = p;
    }
    Vec2::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// Drop a repeated closing vertex and consecutive duplicates.
pub fn normalize_ring(mut ring: Vec<Vec2>) -> Vec<Vec2> {
    ring.dedup_by(|a, b| a.dist_sq(*b) < 1e-18);
    while ring.len() > 1 && ring[0].dist_sq(ring[ring.len() - 1]) < 1e-18 {
        ring.pop();
    }
    ring
}

/// Reorder to counter-clockwise winding.
pub fn make_ccw(ring: &mut [Vec2]) {
    if signed_area(ring) < 0.0 {
        ring.reverse();
    }
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) - 1e-12
        && p.x <= a.x.max(b.x) + 1e-12
        && p.y >= a.y.min(b.y) - 1e-12
        && p.y <= a.y.max(b.y) + 1e-12
}

/// Closed-segment intersection test including collinear overlap.
pub fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// True when no two non-adjacent edges of the ring touch. O(n^2), which is
/// fine for hand-authored map polygons.
pub fn is_simple(ring: &[Vec2]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        for j in (i + 1)..n {
            // adjacent edges share a vertex by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Even-odd point-in-polygon test.
pub fn contains_point(ring: &[Vec2], p: Vec2) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Clip an arbitrary simple `subject` polygon against a convex,
/// counter-clockwise `window` (Sutherland-Hodgman). For concave subjects the
/// output may contain zero-width bridges between pieces; its shoelace area is
/// still the exact intersection area.
pub fn clip_to_convex(subject: &[Vec2], window: &[Vec2]) -> Vec<Vec2> {
    let mut output: Vec<Vec2> = subject.to_vec();
    let m = window.len();
    let mut input = Vec::with_capacity(subject.len() + m);
    for i in 0..m {
        if output.is_empty() {
            break;
        }
        let a = window[i];
        let b = window[(i + 1) % m];
        std::mem::swap(&mut input, &mut output);
        output.clear();
        let inside = |p: Vec2| orient(a, b, p) >= 0.0;
        let mut prev = input[input.len() - 1];
        let mut prev_in = inside(prev);
        for &cur in input.iter() {
            let cur_in = inside(cur);
            if cur_in {
                if !prev_in {
                    output.push(line_intersection(prev, cur, a, b));
                }
                output.push(cur);
            } else if prev_in {
                output.push(line_intersection(prev, cur, a, b));
            }
            prev = cur;
            prev_in = cur_in;
        }
    }
    output
}

fn line_intersection(p: Vec2, q: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let r = q - p;
    let s = b - a;
    let denom = r.cross(s);
    if denom.abs() < 1e-300 {
        return p;
    }
    let t = (a - p).cross(s) / denom;
    p + r * t
}

/// Area of `subject ∩ window` where `window` is convex and counter-clockwise.
pub fn overlap_area_convex(subject: &[Vec2], window: &[Vec2]) -> f64 {
    area(&clip_to_convex(subject, window))
}

/// Oriented rectangle centred at `center`, long axis along `heading`.
pub fn oriented_rect(center: Vec2, heading: f64, length: f64, width: f64) -> [Vec2; 4] {
    let f = Vec2::from_angle(heading);
    let l = Vec2::new(-f.y, f.x);
    let hf = f * (0.5 * length);
    let hl = l * (0.5 * width);
    [center - hf - hl, center + hf - hl, center + hf + hl, center - hf + hl]
}

/// Regular counter-clockwise n-gon with circumradius `radius`.
pub fn regular_polygon(center: Vec2, radius: f64, n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            center + Vec2::from_angle(a) * radius
        })
        .collect()
}

/// Closest point on segment `ab` to `p`, with its parameter in [0, 1].
pub fn project_on_segment(p: Vec2, a: Vec2, b: Vec2) -> (Vec2, f64) {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 <= 0.0 {
        return (a, 0.0);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a + ab * t, t)
}

/// Euclidean distance from `p` to the polygon (0 inside).
pub fn distance_to_polygon(ring: &[Vec2], p: Vec2) -> f64 {
    if contains_point(ring, p) {
        return 0.0;
    }
    let n = ring.len();
    (0..n)
        .map(|i| {
            let (q, _) = project_on_segment(p, ring[i], ring[(i + 1) % n]);
            q.dist(p)
        })
        .fold(f64::INFINITY, f64::min)
}
