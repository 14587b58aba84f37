use crate::geometry::polygon::{centroid, contains_point};
use crate::geometry::Vec2;
use crate::map::SemanticMap;

/// Raster over the map extent; `values` is row-major with rows along y.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub origin: Vec2,
    pub resolution: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl Heatmap {
    pub fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// (cell center, value) in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (Vec2, f64)> + '_ {
        (0..self.ny)
            .flat_map(move |iy| (0..self.nx).map(move |ix| (self.cell_center(ix, iy), self.values[iy * self.nx + ix])))
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    fn index_of(&self, p: Vec2) -> (usize, usize) {
        let ix = ((p.x - self.origin.x) / self.resolution).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let iy = ((p.y - self.origin.y) / self.resolution).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (ix, iy)
    }
}

/// Spread each region's score evenly over the cells whose centers lie in
/// the region. A region too small to hold a cell center puts its whole score
/// into the cell under its centroid. Overlapping regions add up.
pub fn heatmap(map: &SemanticMap, region_scores: &[f64], resolution: f64) -> Heatmap {
    assert!(resolution > 0.0, "heatmap resolution must be positive");
    let b = map.bounds;
    let origin = Vec2::new((b.min.x / resolution).floor() * resolution, (b.min.y / resolution).floor() * resolution);
    let nx = (((b.max.x - origin.x) / resolution).ceil() as usize).max(1);
    let ny = (((b.max.y - origin.y) / resolution).ceil() as usize).max(1);
    let mut grid = Heatmap { origin, resolution, nx, ny, values: vec![0.0; nx * ny] };
    for (region, &score) in map.regions.iter().zip(region_scores) {
        if score == 0.0 {
            continue;
        }
        let (x0, y0) = grid.index_of(region.bbox.min);
        let (x1, y1) = grid.index_of(region.bbox.max);
        let covered: Vec<usize> = (y0..=y1)
            .flat_map(|iy| (x0..=x1).map(move |ix| (ix, iy)))
            .filter(|&(ix, iy)| contains_point(&region.polygon, grid.cell_center(ix, iy)))
            .map(|(ix, iy)| iy * nx + ix)
            .collect();
        if covered.is_empty() {
            let (ix, iy) = grid.index_of(centroid(&region.polygon));
            grid.values[iy * nx + ix] += score;
        } else {
            let share = score / covered.len() as f64;
            covered.into_iter().for_each(|c| grid.values[c] += share);
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{MapFile, RegionFile};

    fn square(id: &str, x0: f64, y0: f64, s: f64) -> RegionFile {
        RegionFile {
            id: id.into(),
            kind: "street".into(),
            polygon: vec![[x0, y0], [x0 + s, y0], [x0 + s, y0 + s], [x0, y0 + s]],
            speed_limit_mps: None,
            direction_ref: None,
        }
    }

    fn map_of(regions: Vec<RegionFile>) -> SemanticMap {
        SemanticMap::from_file(MapFile { location_id: "t".into(), regions }).unwrap()
    }

    #[test]
    fn uniform_spread() {
        let m = map_of(vec![square("a", 0.0, 0.0, 10.0)]);
        let h = heatmap(&m, &[100.0], 2.0);
        assert_eq!((h.nx, h.ny), (5, 5));
        assert!(h.values.iter().all(|&v| (v - 4.0).abs() < 1e-12));
        let z = heatmap(&m, &[0.0], 2.0);
        assert!(z.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn overlaps_add() {
        let m = map_of(vec![square("a", 0.0, 0.0, 10.0), square("b", 4.0, 4.0, 6.0)]);
        let h = heatmap(&m, &[25.0, 9.0], 2.0);
        // b covers 3x3 cells of a's 5x5
        for (c, v) in h.cells() {
            let in_b = c.x > 4.0 && c.y > 4.0;
            let expected = 1.0 + if in_b { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-12, "{c:?}");
        }
        assert!((h.total() - 34.0).abs() < 1e-9);
    }

    #[test]
    fn tiny_region_keeps_its_mass() {
        let m = map_of(vec![square("a", 0.0, 0.0, 10.0), square("tiny", 3.1, 3.1, 0.5)]);
        let h = heatmap(&m, &[0.0, 7.0], 2.0);
        assert!((h.total() - 7.0).abs() < 1e-12);
    }
}
