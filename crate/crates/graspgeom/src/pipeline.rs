//! End-to-end detection: camera cloud in, grasp plan out.

use thiserror::Error;

use crate::cloudio::{apply_rigid_transform, crop_workspace, CloudError};
use crate::config::PipelineConfig;
use crate::eval::baseline_plan;
use crate::grasp_gen::{plan_grasp, GraspError, GraspPlan};
use crate::object_model::{estimate_object, principal_axes, ObjectModelError};
use crate::plane_seg::{fit_dominant_plane, split_by_plane, PlaneSegError, Segmentation};
use crate::{Frame, PointCloud};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Segmentation(#[from] PlaneSegError),
    #[error(transparent)]
    Object(#[from] ObjectModelError),
    #[error(transparent)]
    Grasp(#[from] GraspError),
}

/// Camera cloud → world frame → workspace crop → dominant plane →
/// plane/object split.
pub fn extract_object(
    cloud: &PointCloud,
    cfg: &PipelineConfig,
) -> Result<Segmentation, PipelineError> {
    let world = apply_rigid_transform(cloud, &cfg.camera, Frame::World)?;
    let cropped = crop_workspace(&world, &cfg.workspace);
    let plane = fit_dominant_plane(&cropped, &cfg.ransac)?;
    Ok(split_by_plane(&cropped, &plane, cfg.ransac.inlier_threshold)?)
}

/// Full primary pipeline on a camera-frame cloud.
pub fn detect_grasp(cloud: &PointCloud, cfg: &PipelineConfig) -> Result<GraspPlan, PipelineError> {
    let seg = extract_object(cloud, cfg)?;
    let est = estimate_object(&seg.object, seg.plane_height)?;
    Ok(plan_grasp(&est, &seg.object, &cfg.gripper, &cfg.grasp)?)
}

/// Comparison pipeline: same extraction, raw-mean centroid, top-only.
pub fn detect_grasp_baseline(
    cloud: &PointCloud,
    cfg: &PipelineConfig,
) -> Result<GraspPlan, PipelineError> {
    let seg = extract_object(cloud, cfg)?;
    let axes = principal_axes(&seg.object)?;
    Ok(baseline_plan(&seg.object, &axes, &cfg.gripper, &cfg.grasp)?)
}
