//! Synthetic recordings and track builders for tests, benches and demos.

mod builders;
mod intersection;

pub use builders::{build_track, positions_from_speeds, straight_positions};
pub use intersection::{intersection_map, intersection_map_file, intersection_recording, SyntheticSpec};
