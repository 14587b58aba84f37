//! The fourteen detection types: relation indicators between road users,
//! vehicle-state exceedances and map-context deviations.

pub mod behavior;
pub mod context;
pub mod pairs;
pub mod relation;
pub mod state;
mod types;

pub use pairs::{candidate_pairs, PairGate};
pub use relation::TrackGeometry;
pub use types::{sort_detections, Aux, Detection, DetectionType, Scenario};
