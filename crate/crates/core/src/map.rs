//! Region-decomposed semantic map and road-user-to-region assignment.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{RoadUserClass, Track, TrackState};
use crate::error::MapError;
use crate::geometry::polygon::{self, Aabb};
use crate::geometry::Vec2;

/// Overlap that makes a road user a member of a region, m².
pub const MEMBERSHIP_MIN_OVERLAP: f64 = 2.0;
/// Share of a region's area that makes a road user a member.
pub const MEMBERSHIP_MIN_REGION_SHARE: f64 = 0.5;
/// Vertex count of the polygon standing in for a VRU disc.
pub const VRU_POLYGON_SIDES: usize = 16;
const DIRECTION_REF_TOLERANCE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionType {
    Street,
    Walkway,
    Parking,
    Grass,
    BicycleLane,
}

impl RegionType {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "street" => RegionType::Street,
            "walkway" => RegionType::Walkway,
            "parking" => RegionType::Parking,
            "grass" => RegionType::Grass,
            "bicycle_lane" => RegionType::BicycleLane,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionType::Street => "street",
            RegionType::Walkway => "walkway",
            RegionType::Parking => "parking",
            RegionType::Grass => "grass",
            RegionType::BicycleLane => "bicycle_lane",
        }
    }

    /// Whether `class` may legally use this kind of area.
    pub fn allows(self, class: RoadUserClass) -> bool {
        match self {
            RegionType::Street => class.is_motorized() || class == RoadUserClass::Bicycle,
            RegionType::Walkway => class == RoadUserClass::Pedestrian,
            RegionType::Parking => class.is_motorized(),
            RegionType::Grass => false,
            RegionType::BicycleLane => class == RoadUserClass::Bicycle,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub id: String,
    pub kind: RegionType,
    /// Counter-clockwise, without a repeated closing vertex.
    pub polygon: Vec<Vec2>,
    /// m/s
    pub speed_limit: Option<f64>,
    pub direction_ref: Option<Vec<Vec2>>,
    pub area: f64,
    pub bbox: Aabb,
}

impl Region {
    /// Reference driving direction at the point of `direction_ref` nearest
    /// to `p`, radians.
    pub fn direction_at(&self, p: Vec2) -> Option<f64> {
        let line = self.direction_ref.as_ref()?;
        if line.len() < 2 {
            return None;
        }
        let mut best = (f64::INFINITY, 0.0);
        for w in line.windows(2) {
            let (q, _) = polygon::project_on_segment(p, w[0], w[1]);
            let d = q.dist_sq(p);
            if d < best.0 {
                best = (d, (w[1] - w[0]).angle());
            }
        }
        Some(best.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticMap {
    pub location_id: String,
    pub regions: Vec<Region>,
    pub bounds: Aabb,
}

/// On-disk map schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub location_id: String,
    pub regions: Vec<RegionFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub polygon: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_limit_mps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction_ref: Option<Vec<[f64; 2]>>,
}

impl SemanticMap {
    /// Validate and build a map from its file representation.
    pub fn from_file(file: MapFile) -> Result<SemanticMap, MapError> {
        let mut seen = HashSet::new();
        let mut regions = Vec::with_capacity(file.regions.len());
        for r in file.regions {
            if !seen.insert(r.id.clone()) {
                return Err(MapError::DuplicateRegionId(r.id));
            }
            let kind = RegionType::parse(&r.kind)
                .ok_or_else(|| MapError::UnknownRegionType { id: r.id.clone(), kind: r.kind.clone() })?;
            let mut ring = polygon::normalize_ring(r.polygon.into_iter().map(Vec2::from).collect());
            if ring.len() < 3 {
                return Err(MapError::DegeneratePolygon(r.id));
            }
            if !polygon::is_simple(&ring) {
                return Err(MapError::SelfIntersectingPolygon(r.id));
            }
            if polygon::area(&ring) <= 0.0 {
                return Err(MapError::DegeneratePolygon(r.id));
            }
            polygon::make_ccw(&mut ring);
            let direction_ref: Option<Vec<Vec2>> = r.direction_ref.map(|pts| pts.into_iter().map(Vec2::from).collect());
            if let Some(line) = &direction_ref {
                if line.iter().any(|p| polygon::distance_to_polygon(&ring, *p) > DIRECTION_REF_TOLERANCE) {
                    return Err(MapError::DirectionRefOutside(r.id));
                }
            }
            let area = polygon::area(&ring);
            let bbox = Aabb::from_points(&ring);
            regions.push(Region {
                id: r.id,
                kind,
                polygon: ring,
                speed_limit: r.speed_limit_mps,
                direction_ref,
                area,
                bbox,
            });
        }
        let bounds = regions.iter().fold(Aabb::EMPTY, |b, r| b.union(&r.bbox));
        Ok(SemanticMap { location_id: file.location_id, regions, bounds })
    }

    pub fn from_json_str(s: &str, origin: &Path) -> Result<SemanticMap, MapError> {
        let file: MapFile =
            serde_json::from_str(s).map_err(|source| MapError::Json { file: origin.to_path_buf(), source })?;
        SemanticMap::from_file(file)
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            location_id: self.location_id.clone(),
            regions: self
                .regions
                .iter()
                .map(|r| RegionFile {
                    id: r.id.clone(),
                    kind: r.kind.as_str().to_string(),
                    polygon: r.polygon.iter().map(|p| [p.x, p.y]).collect(),
                    speed_limit_mps: r.speed_limit,
                    direction_ref: r.direction_ref.as_ref().map(|l| l.iter().map(|p| [p.x, p.y]).collect()),
                })
                .collect(),
        }
    }

    pub fn region_index(&self, id: &str) -> Option<usize> {
        self.regions.iter().position(|r| r.id == id)
    }
}

/// Read and validate a map JSON file.
pub fn load_map(path: impl AsRef<Path>) -> Result<SemanticMap, MapError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MapError::Io { file: path.to_path_buf(), source })?;
    SemanticMap::from_json_str(&text, path)
}

/// Physical outline of a road user at one state: an oriented rectangle for
/// vehicles, an area-preserving 16-gon for VRU discs.
pub fn footprint_of(track: &Track, state: &TrackState) -> Vec<Vec2> {
    match track.footprint_radius {
        Some(r) => {
            let n = VRU_POLYGON_SIDES as f64;
            // circumradius giving the n-gon the disc's area
            let scale = (std::f64::consts::PI / (0.5 * n * (2.0 * std::f64::consts::PI / n).sin())).sqrt();
            polygon::regular_polygon(state.position, r * scale, VRU_POLYGON_SIDES)
        }
        None => polygon::oriented_rect(state.position, state.heading, track.length, track.width).to_vec(),
    }
}

/// Footprint of `track` at `frame`, if the track exists then.
pub fn footprint(track: &Track, frame: u32) -> Option<Vec<Vec2>> {
    track.state_at(frame).map(|s| footprint_of(track, s))
}

/// One region a footprint is a member of.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMembership {
    pub region: usize,
    pub overlap_area: f64,
    /// overlap / footprint area
    pub fraction: f64,
}

/// Regions the convex `footprint` belongs to: overlap of at least 2 m², or
/// more than half of the region covered. Empty means off-map.
pub fn assign_regions(footprint: &[Vec2], map: &SemanticMap) -> Vec<RegionMembership> {
    let mut window = footprint.to_vec();
    polygon::make_ccw(&mut window);
    let fp_area = polygon::area(&window);
    let fp_box = Aabb::from_points(&window);
    let mut out = Vec::new();
    for (idx, region) in map.regions.iter().enumerate() {
        if !region.bbox.intersects(&fp_box) {
            continue;
        }
        let overlap = polygon::overlap_area_convex(&region.polygon, &window);
        if overlap >= MEMBERSHIP_MIN_OVERLAP || overlap / region.area > MEMBERSHIP_MIN_REGION_SHARE {
            let fraction = if fp_area > 0.0 { (overlap / fp_area).min(1.0) } else { 0.0 };
            out.push(RegionMembership { region: idx, overlap_area: overlap, fraction });
        }
    }
    out
}
