//! Plane-corrected centroid estimation and PCA-based pose classification.
//!
//! A single overhead view samples mostly the top of an object, so the raw
//! mean of its cloud floats toward the top surface. The corrected centroid
//! replaces the z coordinate with the midpoint of the support-plane height
//! and a robust top estimate (95th-percentile z), which is exact for convex
//! solids of constant cross-section.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{canonicalize_sign, percentile, sorted_symmetric_eigen, UNIT_Z};
use crate::{Mat3, Point3, PointCloud, Vec3};

#[derive(Debug, Error)]
pub enum ObjectModelError {
    #[error("object cloud is empty")]
    EmptyObject,
    #[error("object cloud is degenerate: {0}")]
    DegenerateCloud(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseClass {
    /// Principal axis within 45° of vertical.
    Upright,
    /// Principal axis closer to the support plane.
    Lying,
}

/// Principal axes `u1, u2, u3` (orthonormal, right-handed, deterministic
/// signs) with eigenvalues sorted `λ1 ≥ λ2 ≥ λ3` of the cloud covariance.
#[derive(Debug, Clone, Copy)]
pub struct PrincipalAxes {
    pub axes: [Vec3; 3],
    pub eigenvalues: [f64; 3],
}

/// Object summary the grasp generator consumes.
#[derive(Debug, Clone, Copy)]
pub struct ObjectEstimate {
    /// Corrected centroid; x, y are the raw means, z the plane-corrected value.
    pub centroid: Point3,
    pub axes: [Vec3; 3],
    pub eigenvalues: [f64; 3],
    pub pose_class: PoseClass,
    /// Robust top-of-object height (95th-percentile z).
    pub z_top: f64,
    /// Support-plane height.
    pub z_plane: f64,
}

/// Relative gap below which the top eigenvalues count as tied; tied axes
/// prefer the most vertical candidate as `u1` so sphere-like objects
/// classify stably as Upright.
const ISOTROPY_TIE_REL: f64 = 1e-3;
const TOP_PERCENTILE: f64 = 95.0;

/// Centroid with plane-corrected z: `x, y` are the raw means and
/// `z = (plane_height + z_top) / 2`, `z_top` the 95th-percentile height.
///
/// Expects all object points above `plane_height` (the segmentation
/// guarantees this), so the result lies strictly between the plane and the
/// highest point.
pub fn corrected_centroid(
    object: &PointCloud,
    plane_height: f64,
) -> Result<Point3, ObjectModelError> {
    if object.is_empty() {
        return Err(ObjectModelError::EmptyObject);
    }
    let n = object.len() as f64;
    let mean_x = object.points.iter().map(|p| p.x).sum::<f64>() / n;
    let mean_y = object.points.iter().map(|p| p.y).sum::<f64>() / n;
    let zs: Vec<f64> = object.points.iter().map(|p| p.z).collect();
    let z_top = percentile(&zs, TOP_PERCENTILE);
    Ok(Point3::new(mean_x, mean_y, (plane_height + z_top) / 2.0))
}

/// Sample covariance (about the raw mean, 1/n normalization).
fn covariance(object: &PointCloud) -> (Vec3, Mat3) {
    let n = object.len() as f64;
    let mean = object.points.iter().map(|p| p.to_vec()).sum::<Vec3>() / n;
    let mut cov = Mat3::zeros();
    for p in &object.points {
        let d = p.to_vec() - mean;
        cov += d * d.transpose();
    }
    (mean, cov / n)
}

/// PCA of the object cloud: eigen-decomposition of its 3×3 covariance.
///
/// Eigenvalues come out descending with eigenvectors paired; near-ties at
/// the top are re-ordered to put the most vertical axis first (pairing
/// preserved). Signs of `u1`, `u2` are canonicalized and `u3 = u1 × u2`.
pub fn principal_axes(object: &PointCloud) -> Result<PrincipalAxes, ObjectModelError> {
    if object.len() < 3 {
        return Err(ObjectModelError::DegenerateCloud(format!(
            "{} points (need ≥ 3)",
            object.len()
        )));
    }
    let (_, cov) = covariance(object);
    let (mut lambdas, mut vectors) = sorted_symmetric_eigen(&cov);
    if lambdas[0] <= 1e-18 {
        return Err(ObjectModelError::DegenerateCloud(
            "covariance numerically rank-0 (all points coincident)".into(),
        ));
    }

    // Near-isotropic tie-break among eigenvalues within ISOTROPY_TIE_REL
    // of the largest: promote the most vertical candidate to u1.
    let tied = (0..3)
        .filter(|&i| lambdas[0] - lambdas[i] < ISOTROPY_TIE_REL * lambdas[0])
        .count();
    if tied > 1 {
        let pick = (0..tied)
            .max_by(|&a, &b| {
                let va = vectors[a].dot(&UNIT_Z).abs();
                let vb = vectors[b].dot(&UNIT_Z).abs();
                va.partial_cmp(&vb).unwrap()
            })
            .unwrap();
        if pick != 0 {
            lambdas.swap(0, pick);
            vectors.swap(0, pick);
            // Keep the remaining pair in descending eigenvalue order.
            if lambdas[1] < lambdas[2] {
                lambdas.swap(1, 2);
                vectors.swap(1, 2);
            }
        }
    }

    let u1 = canonicalize_sign(vectors[0].normalize());
    let u2 = canonicalize_sign(vectors[1].normalize());
    let u3 = u1.cross(&u2);
    Ok(PrincipalAxes {
        axes: [u1, u2, u3],
        eigenvalues: lambdas,
    })
}

/// Upright iff the principal axis is within 45° of vertical; the boundary
/// itself classifies Upright.
pub fn classify_pose(axes: &PrincipalAxes) -> PoseClass {
    let cos45 = std::f64::consts::FRAC_1_SQRT_2;
    if axes.axes[0].dot(&UNIT_Z).abs() >= cos45 {
        PoseClass::Upright
    } else {
        PoseClass::Lying
    }
}

/// Full object summary: corrected centroid, principal axes, pose class.
pub fn estimate_object(
    object: &PointCloud,
    plane_height: f64,
) -> Result<ObjectEstimate, ObjectModelError> {
    let centroid = corrected_centroid(object, plane_height)?;
    let pca = principal_axes(object)?;
    let pose_class = classify_pose(&pca);
    let zs: Vec<f64> = object.points.iter().map(|p| p.z).collect();
    let z_top = percentile(&zs, TOP_PERCENTILE);
    Ok(ObjectEstimate {
        centroid,
        axes: pca.axes,
        eigenvalues: pca.eigenvalues,
        pose_class,
        z_top,
        z_plane: plane_height,
    })
}
