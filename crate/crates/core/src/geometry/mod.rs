//! Geometric primitives shared by detections and clustering.

pub mod conflict;
mod frechet;
pub mod path;
pub mod polygon;
mod vec2;

pub use conflict::{conflict_points, intersect_swept, BodyShape, ConflictCell, ConflictPointSet, SweptCells};
pub use frechet::discrete_frechet;
pub use path::{resample_path, resample_states, PathProjection, PolyPath, DEFAULT_PATH_SPACING};
pub use polygon::Aabb;
pub use vec2::{angle_between, wrap_angle, Vec2};
