use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;

pub type TrackId = u32;

/// Radius of the disc standing in for a vulnerable road user's footprint.
pub const VRU_FOOTPRINT_RADIUS: f64 = 2.5;

/// Below this speed a road user counts as standing.
pub const STANDING_SPEED: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoadUserClass {
    Car,
    TruckBus,
    Van,
    Motorcycle,
    Bicycle,
    Pedestrian,
    Unknown,
}

impl RoadUserClass {
    pub fn is_vru(self) -> bool {
        matches!(self, RoadUserClass::Bicycle | RoadUserClass::Pedestrian)
    }

    /// Unknown objects are treated as motorized when rules are applied.
    pub fn is_motorized(self) -> bool {
        !self.is_vru()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RoadUserClass::Car => "car",
            RoadUserClass::TruckBus => "truck_bus",
            RoadUserClass::Van => "van",
            RoadUserClass::Motorcycle => "motorcycle",
            RoadUserClass::Bicycle => "bicycle",
            RoadUserClass::Pedestrian => "pedestrian",
            RoadUserClass::Unknown => "unknown",
        }
    }

    /// Parse the class strings used by drone datasets. Returns `None` for
    /// anything unrecognized.
    pub fn parse(s: &str) -> Option<Self> {
        let c = match s.trim().to_ascii_lowercase().as_str() {
            "car" => RoadUserClass::Car,
            "truck_bus" | "truck" | "bus" | "trailer" => RoadUserClass::TruckBus,
            "van" => RoadUserClass::Van,
            "motorcycle" | "motorbike" => RoadUserClass::Motorcycle,
            "bicycle" | "bike" | "cyclist" => RoadUserClass::Bicycle,
            "pedestrian" => RoadUserClass::Pedestrian,
            "unknown" => RoadUserClass::Unknown,
            _ => return None,
        };
        Some(c)
    }
}

/// Kinematic state of one road user at one frame. All quantities SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackState {
    pub frame: u32,
    pub t: f64,
    pub position: Vec2,
    /// Orientation in (-pi, pi].
    pub heading: f64,
    pub speed: f64,
    pub velocity: Vec2,
    pub accel_lon: f64,
    pub accel_lat: f64,
    pub yaw_rate: f64,
    pub sideslip: f64,
}

impl TrackState {
    pub fn is_standing(&self) -> bool {
        self.speed < STANDING_SPEED
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub track_id: TrackId,
    pub class: RoadUserClass,
    pub width: f64,
    pub length: f64,
    /// Contiguous frames, strictly increasing by one.
    pub states: Vec<TrackState>,
    /// Set for vulnerable road users only.
    pub footprint_radius: Option<f64>,
    /// Accelerations came from the source file and must not be re-derived.
    #[serde(default)]
    pub accel_from_source: bool,
}

impl Track {
    pub fn first_frame(&self) -> u32 {
        self.states[0].frame
    }

    pub fn last_frame(&self) -> u32 {
        self.states[self.states.len() - 1].frame
    }

    pub fn contains_frame(&self, frame: u32) -> bool {
        frame >= self.first_frame() && frame <= self.last_frame()
    }

    /// Index into `states` for `frame`, relying on frame contiguity.
    #[inline]
    pub fn index_of(&self, frame: u32) -> Option<usize> {
        let first = self.first_frame();
        if frame < first {
            return None;
        }
        let i = (frame - first) as usize;
        (i < self.states.len()).then_some(i)
    }

    #[inline]
    pub fn state_at(&self, frame: u32) -> Option<&TrackState> {
        self.index_of(frame).map(|i| &self.states[i])
    }

    pub fn is_vru(&self) -> bool {
        self.class.is_vru()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recording {
    pub recording_id: u32,
    pub location_id: String,
    pub frame_rate: f64,
    pub duration: f64,
    pub tracks: Vec<Track>,
}

impl Recording {
    pub fn dt(&self) -> f64 {
        1.0 / self.frame_rate
    }

    pub fn frame_span(&self) -> Option<(u32, u32)> {
        let first = self.tracks.iter().map(Track::first_frame).min()?;
        let last = self.tracks.iter().map(Track::last_frame).max()?;
        Some((first, last))
    }

    pub fn track(&self, id: TrackId) -> Option<&Track> {
        self.tracks.iter().find(|t| t.track_id == id)
    }
}
