//! RANSAC dominant-plane detection and plane/object splitting.
//!
//! RNG contract: sampling uses ChaCha8 seeded from `RansacParams::seed`,
//! with iteration `i` drawing from stream `i`. Results therefore do not
//! depend on evaluation order, and equal parameters give bit-identical
//! planes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{sorted_symmetric_eigen, UNIT_Z};
use crate::{Mat3, Point3, PointCloud, Vec3};

#[derive(Debug, Error)]
pub enum PlaneSegError {
    #[error("plane fit needs at least 3 points, got {0}")]
    InsufficientPoints(usize),
    #[error("every RANSAC sample was collinear")]
    DegenerateSample,
    #[error("best inlier fraction {best:.3} below required {required:.3}")]
    TooFewInliers { best: f64, required: f64 },
    #[error("dominant plane tilted {angle_deg:.1}° from horizontal (limit {limit_deg:.0}°)")]
    NonHorizontalPlane { angle_deg: f64, limit_deg: f64 },
    #[error("no points above the support plane; nothing to grasp")]
    NoObjectFound,
}

/// Support plane `{p : normal·p + offset = 0}` with unit normal and
/// `normal.z ≥ 0` (pointing away from gravity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneModel {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl PlaneModel {
    pub fn normal_vec(&self) -> Vec3 {
        Vec3::new(self.normal[0], self.normal[1], self.normal[2])
    }

    /// Signed distance, positive on the normal (up) side.
    pub fn signed_distance(&self, p: &Point3) -> f64 {
        self.normal_vec().dot(&p.to_vec()) + self.offset
    }

    /// Height z where the plane crosses a vertical line; meaningful for
    /// near-horizontal planes only.
    pub fn height(&self) -> f64 {
        -self.offset / self.normal[2]
    }

    fn canonicalized(normal: Vec3, offset: f64) -> Self {
        let (normal, offset) = if normal.z < 0.0 {
            (-normal, -offset)
        } else {
            (normal, offset)
        };
        Self {
            normal: [normal.x, normal.y, normal.z],
            offset,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RansacParams {
    /// Point-to-plane distance below which a point counts as support (m).
    pub inlier_threshold: f64,
    pub max_iterations: u32,
    /// Minimum fraction of the cloud the winning plane must explain.
    pub min_inlier_fraction: f64,
    pub seed: u64,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self {
            inlier_threshold: 0.008,
            max_iterations: 500,
            min_inlier_fraction: 0.30,
            seed: 0,
        }
    }
}

impl RansacParams {
    pub fn validate(&self) -> Result<(), String> {
        if !self.inlier_threshold.is_finite() || self.inlier_threshold <= 0.0 {
            return Err("inlier_threshold must be > 0".into());
        }
        if self.max_iterations < 1 {
            return Err("max_iterations must be ≥ 1".into());
        }
        if !(self.min_inlier_fraction > 0.0 && self.min_inlier_fraction <= 1.0) {
            return Err("min_inlier_fraction must be in (0, 1]".into());
        }
        Ok(())
    }
}

/// Result of splitting a cloud against the support plane.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub plane: PlaneModel,
    /// z at which the support plane sits (for near-horizontal planes).
    pub plane_height: f64,
    /// Points with signed distance > threshold: the object of interest.
    pub object: PointCloud,
    /// Everything else: plane inliers plus below-plane returns.
    pub support_inliers: PointCloud,
}

const MAX_PLANE_TILT_DEG: f64 = 15.0;
/// Cross products below this norm mark a collinear minimal sample.
const COLLINEAR_EPS: f64 = 1e-12;

/// Fits the dominant plane by RANSAC over `max_iterations` minimal samples,
/// then refines it by least squares over the winning consensus set.
///
/// Ties on inlier count go to the lowest iteration index. The refined
/// normal is canonicalized to `normal.z ≥ 0` and must lie within 15° of
/// vertical, otherwise the support surface was not found.
pub fn fit_dominant_plane(
    cloud: &PointCloud,
    params: &RansacParams,
) -> Result<PlaneModel, PlaneSegError> {
    let n = cloud.len();
    if n < 3 {
        return Err(PlaneSegError::InsufficientPoints(n));
    }

    let mut best: Option<(usize, Vec3, f64)> = None; // (inlier count, normal, offset)
    for iteration in 0..params.max_iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(iteration as u64);
        let idx = rand::seq::index::sample(&mut rng, n, 3);
        let a = cloud.points[idx.index(0)].to_vec();
        let b = cloud.points[idx.index(1)].to_vec();
        let c = cloud.points[idx.index(2)].to_vec();

        let cross = (b - a).cross(&(c - a));
        if cross.norm() < COLLINEAR_EPS {
            continue;
        }
        let normal = cross.normalize();
        let offset = -normal.dot(&a);

        let inliers = cloud
            .points
            .iter()
            .filter(|p| (normal.dot(&p.to_vec()) + offset).abs() <= params.inlier_threshold)
            .count();
        let better = match &best {
            Some((count, _, _)) => inliers > *count,
            None => true,
        };
        if better {
            best = Some((inliers, normal, offset));
        }
    }

    let (count, normal, offset) = best.ok_or(PlaneSegError::DegenerateSample)?;
    let fraction = count as f64 / n as f64;
    if fraction < params.min_inlier_fraction {
        return Err(PlaneSegError::TooFewInliers {
            best: fraction,
            required: params.min_inlier_fraction,
        });
    }

    let refined = refit_least_squares(cloud, normal, offset, params.inlier_threshold);
    let plane = PlaneModel::canonicalized(refined.0, refined.1);

    let angle_deg = plane.normal_vec().dot(&UNIT_Z).clamp(-1.0, 1.0).acos().to_degrees();
    if angle_deg > MAX_PLANE_TILT_DEG {
        return Err(PlaneSegError::NonHorizontalPlane {
            angle_deg,
            limit_deg: MAX_PLANE_TILT_DEG,
        });
    }
    Ok(plane)
}

/// Least-squares plane over the inliers of the candidate: centroid plus
/// the smallest-eigenvalue direction of the inlier covariance. This never
/// increases the summed squared inlier distance.
fn refit_least_squares(
    cloud: &PointCloud,
    normal: Vec3,
    offset: f64,
    threshold: f64,
) -> (Vec3, f64) {
    let inliers: Vec<Vec3> = cloud
        .points
        .iter()
        .map(|p| p.to_vec())
        .filter(|v| (normal.dot(v) + offset).abs() <= threshold)
        .collect();
    if inliers.len() < 3 {
        return (normal, offset);
    }
    let centroid = inliers.iter().sum::<Vec3>() / inliers.len() as f64;
    let mut cov = Mat3::zeros();
    for v in &inliers {
        let d = v - centroid;
        cov += d * d.transpose();
    }
    cov /= inliers.len() as f64;
    let (_, axes) = sorted_symmetric_eigen(&cov);
    let fitted = axes[2].normalize();
    // Keep the candidate's orientation so canonicalization is stable.
    let fitted = if fitted.dot(&normal) < 0.0 { -fitted } else { fitted };
    (fitted, -fitted.dot(&centroid))
}

/// Splits `cloud` against `plane`: object points lie strictly more than
/// `threshold` above it; inliers and below-plane returns are support.
pub fn split_by_plane(
    cloud: &PointCloud,
    plane: &PlaneModel,
    threshold: f64,
) -> Result<Segmentation, PlaneSegError> {
    let mut object = Vec::new();
    let mut support = Vec::new();
    for p in &cloud.points {
        if plane.signed_distance(p) > threshold {
            object.push(*p);
        } else {
            support.push(*p);
        }
    }
    if object.is_empty() {
        return Err(PlaneSegError::NoObjectFound);
    }
    Ok(Segmentation {
        plane: *plane,
        plane_height: plane.height(),
        object: PointCloud::new(object, cloud.frame),
        support_inliers: PointCloud::new(support, cloud.frame),
    })
}
