use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::TrackId;
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionType {
    Thw,
    Ttc,
    Drac,
    Dmttcp,
    Wp,
    LonAccel,
    LatAccel,
    Sideslip,
    YawRate,
    AreaUsage,
    DrivingDirection,
    Velocity,
    DrivingBehavior,
    Trajectory,
}

impl DetectionType {
    pub const ALL: [DetectionType; 14] = [
        DetectionType::Thw,
        DetectionType::Ttc,
        DetectionType::Drac,
        DetectionType::Dmttcp,
        DetectionType::Wp,
        DetectionType::LonAccel,
        DetectionType::LatAccel,
        DetectionType::Sideslip,
        DetectionType::YawRate,
        DetectionType::AreaUsage,
        DetectionType::DrivingDirection,
        DetectionType::Velocity,
        DetectionType::DrivingBehavior,
        DetectionType::Trajectory,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectionType::Thw => "thw",
            DetectionType::Ttc => "ttc",
            DetectionType::Drac => "drac",
            DetectionType::Dmttcp => "dmttcp",
            DetectionType::Wp => "wp",
            DetectionType::LonAccel => "lon_accel",
            DetectionType::LatAccel => "lat_accel",
            DetectionType::Sideslip => "sideslip",
            DetectionType::YawRate => "yaw_rate",
            DetectionType::AreaUsage => "area_usage",
            DetectionType::DrivingDirection => "driving_direction",
            DetectionType::Velocity => "velocity",
            DetectionType::DrivingBehavior => "driving_behavior",
            DetectionType::Trajectory => "trajectory",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Relation indicators feed the interaction score.
    pub fn is_relation(self) -> bool {
        matches!(
            self,
            DetectionType::Thw | DetectionType::Ttc | DetectionType::Drac | DetectionType::Dmttcp | DetectionType::Wp
        )
    }

    pub fn is_bilateral(self) -> bool {
        matches!(self, DetectionType::Thw | DetectionType::Ttc | DetectionType::Drac | DetectionType::Dmttcp)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DetectionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Type-specific extras carried by a detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Aux {
    None,
    /// The limit that was exceeded.
    Limit {
        limit: f64,
    },
    /// Following geometry: center gap along the follower's path and closing speed.
    Follow {
        gap: f64,
        closing_speed: f64,
    },
    /// Critical conflict point and the two times needed to reach it.
    Conflict {
        ccp: Vec2,
        mttcp_subject: f64,
        mttcp_partner: f64,
    },
}

impl Aux {
    pub fn limit(&self) -> Option<f64> {
        match *self {
            Aux::Limit { limit } => Some(limit),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub kind: DetectionType,
    pub subject: TrackId,
    pub partner: Option<TrackId>,
    pub start_frame: u32,
    pub end_frame: u32,
    pub value: f64,
    pub aux: Aux,
    /// Region a context-clustering detection was found in.
    pub region: Option<usize>,
}

impl Detection {
    pub fn punctual(kind: DetectionType, subject: TrackId, frame: u32, value: f64, aux: Aux) -> Self {
        Detection { kind, subject, partner: None, start_frame: frame, end_frame: frame, value, aux, region: None }
    }

    pub fn with_partner(mut self, partner: TrackId) -> Self {
        self.partner = Some(partner);
        self
    }

    pub fn in_region(mut self, region: usize) -> Self {
        self.region = Some(region);
        self
    }

    pub fn covers(&self, frame: u32) -> bool {
        frame >= self.start_frame && frame <= self.end_frame
    }

    /// Canonical ordering: frame, subject, partner, type, region, end.
    pub fn canonical_cmp(&self, o: &Detection) -> Ordering {
        (self.start_frame, self.subject, self.partner, self.kind, self.region, self.end_frame)
            .cmp(&(o.start_frame, o.subject, o.partner, o.kind, o.region, o.end_frame))
            .then(self.value.total_cmp(&o.value))
    }
}

/// Sort detections into their canonical order.
pub fn sort_detections(d: &mut [Detection]) {
    d.sort_by(Detection::canonical_cmp);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    #[default]
    Urban,
    Highway,
}

impl Scenario {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "urban" => Some(Scenario::Urban),
            "highway" => Some(Scenario::Highway),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Urban => "urban",
            Scenario::Highway => "highway",
        }
    }
}
