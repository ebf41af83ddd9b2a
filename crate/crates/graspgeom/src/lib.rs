//! Geometry-based grasp pose detection for single-view tabletop scenes.
//!
//! The pipeline turns one depth-camera point cloud into a 6-DoF grasp:
//!
//! 1. **cloudio** – cloud I/O (ASCII PCD/PLY), rigid transforms, workspace crop.
//! 2. **plane_seg** – RANSAC dominant-plane fit; plane/object split.
//! 3. **object_model** – plane-corrected centroid + PCA orientation.
//! 4. **grasp_gen** – top/side grasp pose synthesis with feasibility checks.
//! 5. **synthscene** – synthetic single-view scene generator with ground truth.
//! 6. **eval** – geometric grasp-outcome simulation, benchmark, Fisher test.
//!
//! Everything is deterministic given the seeds carried in the parameter
//! structs; all functions are pure and safe to call concurrently.

pub mod cloudio;
pub mod config;
pub mod eval;
pub mod grasp_gen;
mod math;
pub mod object_model;
pub mod pipeline;
pub mod plane_seg;
pub mod synthscene;

pub use cloudio::{Aabb, Frame, Point3, PointCloud, RigidTransform};
pub use config::PipelineConfig;
pub use pipeline::{detect_grasp, detect_grasp_baseline, PipelineError};

/// 3-component column vector, world units in meters.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3×3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
