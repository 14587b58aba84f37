//! Trajectory recordings: domain types, CSV ingestion and kinematic derivation.

mod io;
mod kinematics;
mod types;

pub use io::{load_recording, write_recording, RECORDING_META_COLUMNS, TRACK_COLUMNS, TRACK_META_COLUMNS};
pub use kinematics::derive_kinematics;
pub use types::{Recording, RoadUserClass, Track, TrackId, TrackState, STANDING_SPEED, VRU_FOOTPRINT_RADIUS};
