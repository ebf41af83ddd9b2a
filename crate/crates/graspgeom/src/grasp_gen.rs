//! Pregrasp/grasp 6-DoF pose synthesis from an object estimate.
//!
//! Positions follow `centroid + h·u` along a selected offset axis `u`:
//! `h` is the finger length for the grasp pose (fingertips straddle the
//! centroid) and a configured standoff for the pregrasp pose. Orientation
//! is built in the tool frame — columns `(x_t, y_t, z_t)` with `x_t` the
//! finger closing axis and `z_t` the approach direction, palm toward the
//! object.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloudio::point_as_array;
use crate::math::{horizontal_projection, UNIT_Z};
use crate::object_model::{ObjectEstimate, PoseClass};
use crate::{Mat3, Point3, PointCloud, Vec3};

#[derive(Debug, Error)]
pub enum GraspError {
    #[error("no usable horizontal axis for a side grasp")]
    DegenerateAxes,
    #[error("object width {width:.3} m exceeds usable opening {usable:.3} m")]
    InfeasibleWidth { width: f64, usable: f64 },
    #[error("object points behind the palm plane inside the gripper footprint")]
    PalmCollision,
    #[error("side grasp at z = {palm_z:.3} m would hit the table (minimum {min_z:.3} m)")]
    TableCollision { palm_z: f64, min_z: f64 },
}

/// Parallel-jaw gripper dimensions, meters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GripperSpec {
    pub finger_length: f64,
    pub max_opening: f64,
    /// Clearance kept between the palm plane and the highest object point
    /// in a top grasp.
    pub palm_clearance: f64,
}

impl Default for GripperSpec {
    fn default() -> Self {
        Self {
            finger_length: 0.06,
            max_opening: 0.10,
            palm_clearance: 0.01,
        }
    }
}

impl GripperSpec {
    /// Tallest `z_top − centroid.z` a top grasp can reach on an upright
    /// object before the palm would rest on it.
    pub fn upright_top_max_reach(&self) -> f64 {
        self.finger_length - self.palm_clearance
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.finger_length > 0.0 && self.max_opening > 0.0 && self.palm_clearance > 0.0) {
            return Err("gripper dimensions must be strictly positive".into());
        }
        if self.max_opening <= 2.0 * self.palm_clearance {
            return Err("max_opening must exceed twice the palm clearance".into());
        }
        Ok(())
    }
}

/// Grasp synthesis knobs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraspConfig {
    /// Pregrasp standoff along the offset axis (m); must exceed the finger length.
    pub h_pre: f64,
    /// Preferred approach half-plane for side grasps (horizontal unit 2-vector).
    pub side_preference: [f64; 2],
    /// Lowest palm height above the support plane for side grasps (m).
    pub table_clearance_min: f64,
}

impl Default for GraspConfig {
    fn default() -> Self {
        Self {
            h_pre: 0.15,
            side_preference: [1.0, 0.0],
            table_clearance_min: 0.02,
        }
    }
}

impl GraspConfig {
    pub fn validate(&self, gripper: &GripperSpec) -> Result<(), String> {
        if self.h_pre <= gripper.finger_length {
            return Err("h_pre must exceed the finger length".into());
        }
        let norm = (self.side_preference[0].powi(2) + self.side_preference[1].powi(2)).sqrt();
        if !(norm > 1e-9 && norm.is_finite()) {
            return Err("side_preference must be a nonzero 2-vector".into());
        }
        if self.table_clearance_min < 0.0 {
            return Err("table_clearance_min must be ≥ 0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraspMode {
    /// Approach straight down (`z_t = −ẑ`).
    Top,
    /// Approach horizontally toward the centroid.
    Side,
}

/// A complete grasp: both poses, authoritative rotation matrix, derived
/// fixed-axis Euler angles, and the estimated closing width.
///
/// Serializes to the canonical plan JSON: positions as `[x, y, z]`,
/// rotation as 9 row-major values, angles in radians.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraspPlan {
    pub mode: GraspMode,
    #[serde(with = "point_as_array")]
    pub grasp_position: Point3,
    #[serde(with = "point_as_array")]
    pub pregrasp_position: Point3,
    /// Row-major tool-frame rotation; columns are (x_t, y_t, z_t).
    pub rotation: [f64; 9],
    /// (θx, θy, θz) with R = Rz(θz)·Ry(θy)·Rx(θx).
    pub euler_xyz: [f64; 3],
    /// Offset axis u used for both positions.
    pub offset_axis: [f64; 3],
    /// Extent of the object along the closing axis within finger reach (m).
    pub est_width: f64,
}

impl GraspPlan {
    pub fn rotation_matrix(&self) -> Mat3 {
        let r = &self.rotation;
        Mat3::new(r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8])
    }

    pub fn offset_axis_vec(&self) -> Vec3 {
        Vec3::new(self.offset_axis[0], self.offset_axis[1], self.offset_axis[2])
    }

    /// Approach direction z_t (palm toward object).
    pub fn approach(&self) -> Vec3 {
        self.rotation_matrix().column(2).into_owned()
    }

    /// Closing axis x_t.
    pub fn closing_axis(&self) -> Vec3 {
        self.rotation_matrix().column(0).into_owned()
    }
}

const HORIZONTAL_EPS: f64 = 1e-6;
/// Safety margin subtracted from the opening in the width check (m).
const WIDTH_MARGIN: f64 = 0.002;
/// |u2·ẑ| at or above this (cos 60°) makes the lying second axis count as
/// vertical, producing a top grasp.
const LYING_TOP_COS: f64 = 0.5;

fn horizontal_unit(v: &Vec3) -> Option<Vec3> {
    let h = horizontal_projection(v);
    if h.norm() < HORIZONTAL_EPS {
        None
    } else {
        Some(h.normalize())
    }
}

fn toward_preference(u: Vec3, preference: [f64; 2]) -> Vec3 {
    if u.x * preference[0] + u.y * preference[1] < 0.0 {
        -u
    } else {
        u
    }
}

/// Picks the position offset axis and grasp mode from the object estimate.
///
/// Upright objects short enough for the palm to clear their top get a top
/// grasp; taller ones a side grasp along the horizontal part of the second
/// axis. Lying objects get a top grasp when their second axis is mostly
/// vertical, otherwise a side grasp — unless that would put the palm under
/// the table clearance, which forces a top grasp.
///
/// Top grasps always emit `u = +ẑ`: the approach is pinned vertical, and a
/// tilted offset axis would displace the fingertip line by `h·u_xy` from
/// the centroid, missing narrow objects. The estimated axes still decide
/// which branch fires. Side grasps emit the (horizontal) axis itself, so
/// position offset and approach stay collinear in both modes and the
/// fingers close around the centroid.
pub fn select_offset_axis(
    est: &ObjectEstimate,
    gripper: &GripperSpec,
    cfg: &GraspConfig,
) -> Result<(Vec3, GraspMode), GraspError> {
    let [_, u2, u3] = est.axes;
    match est.pose_class {
        PoseClass::Upright => {
            if est.z_top - est.centroid.z <= gripper.upright_top_max_reach() {
                Ok((UNIT_Z, GraspMode::Top))
            } else {
                let u = horizontal_unit(&u2)
                    .or_else(|| horizontal_unit(&u3))
                    .ok_or(GraspError::DegenerateAxes)?;
                Ok((toward_preference(u, cfg.side_preference), GraspMode::Side))
            }
        }
        PoseClass::Lying => {
            let side_unsafe = est.centroid.z < est.z_plane + cfg.table_clearance_min;
            if u2.dot(&UNIT_Z).abs() >= LYING_TOP_COS || side_unsafe {
                Ok((UNIT_Z, GraspMode::Top))
            } else {
                let u = horizontal_unit(&u2).ok_or(GraspError::DegenerateAxes)?;
                Ok((toward_preference(u, cfg.side_preference), GraspMode::Side))
            }
        }
    }
}

/// Tool-frame rotation with columns `(x_t, y_t, z_t)`, built from the
/// offset axis and the object's principal axes.
///
/// Top grasps approach straight down and close across the object's narrow
/// width: `x_t` is the horizontal unit perpendicular to the horizontal
/// projection of `u1` (falling back to `u2`'s projection, then world x̂).
/// Side grasps approach along `−u` with a horizontal closing axis.
pub fn build_orientation(
    u: &Vec3,
    mode: GraspMode,
    axes: &[Vec3; 3],
) -> Result<Mat3, GraspError> {
    let (x_t, z_t) = match mode {
        GraspMode::Top => {
            let z_t = -UNIT_Z;
            let x_t = horizontal_unit(&axes[0])
                .or_else(|| horizontal_unit(&axes[1]))
                .map(|h| UNIT_Z.cross(&h).normalize())
                .unwrap_or_else(Vec3::x);
            (x_t, z_t)
        }
        GraspMode::Side => {
            let z_t = -u;
            let cross = UNIT_Z.cross(&z_t);
            if cross.norm() < HORIZONTAL_EPS {
                return Err(GraspError::DegenerateAxes);
            }
            (cross.normalize(), z_t)
        }
    };
    let y_t = z_t.cross(&x_t);
    Ok(Mat3::from_columns(&[x_t, y_t, z_t]))
}

/// Fixed-axis XYZ Euler angles: `R = Rz(θz)·Ry(θy)·Rx(θx)`, `θy ∈ [−π/2, π/2]`.
///
/// At gimbal lock (|cos θy| < 1e-9) only `θx + θz` (resp. the difference)
/// is determined; the convention here sets `θx = 0`.
pub fn euler_from_rotation(r: &Mat3) -> [f64; 3] {
    let sy = (-r[(2, 0)]).clamp(-1.0, 1.0);
    let theta_y = sy.asin();
    if theta_y.cos().abs() < 1e-9 {
        let theta_z = (-r[(0, 1)]).atan2(r[(1, 1)]);
        [0.0, theta_y, theta_z]
    } else {
        let theta_x = r[(2, 1)].atan2(r[(2, 2)]);
        let theta_z = r[(1, 0)].atan2(r[(0, 0)]);
        [theta_x, theta_y, theta_z]
    }
}

/// Recomposes `Rz(θz)·Ry(θy)·Rx(θx)`.
pub fn rotation_from_euler(euler: &[f64; 3]) -> Mat3 {
    let (sx, cx) = euler[0].sin_cos();
    let (sy, cy) = euler[1].sin_cos();
    let (sz, cz) = euler[2].sin_cos();
    let rx = Mat3::new(1.0, 0.0, 0.0, 0.0, cx, -sx, 0.0, sx, cx);
    let ry = Mat3::new(cy, 0.0, sy, 0.0, 1.0, 0.0, -sy, 0.0, cy);
    let rz = Mat3::new(cz, -sz, 0.0, sz, cz, 0.0, 0.0, 0.0, 1.0);
    rz * ry * rx
}

/// Extent of the object along the closing axis, restricted to points
/// within finger reach of the palm plane.
pub(crate) fn closing_width(
    object: &PointCloud,
    grasp: &Vec3,
    x_t: &Vec3,
    z_t: &Vec3,
    finger_length: f64,
) -> f64 {
    let mut min_proj = f64::INFINITY;
    let mut max_proj = f64::NEG_INFINITY;
    for p in &object.points {
        let v = p.to_vec() - grasp;
        if v.dot(z_t).abs() <= finger_length {
            let proj = v.dot(x_t);
            min_proj = min_proj.min(proj);
            max_proj = max_proj.max(proj);
        }
    }
    if max_proj >= min_proj {
        max_proj - min_proj
    } else {
        0.0
    }
}

pub(crate) fn rotation_to_row_major(r: &Mat3) -> [f64; 9] {
    [
        r[(0, 0)],
        r[(0, 1)],
        r[(0, 2)],
        r[(1, 0)],
        r[(1, 1)],
        r[(1, 2)],
        r[(2, 0)],
        r[(2, 1)],
        r[(2, 2)],
    ]
}

/// Builds the full grasp plan and runs the geometric feasibility checks:
/// closing width against the opening, side-grasp table clearance, and
/// object points behind the palm plane inside the gripper footprint.
///
/// The width is measured over object points within finger reach of the
/// palm plane (`|(p − grasp)·z_t| ≤ finger_length`), i.e. what the fingers
/// actually straddle.
pub fn plan_grasp(
    est: &ObjectEstimate,
    object: &PointCloud,
    gripper: &GripperSpec,
    cfg: &GraspConfig,
) -> Result<GraspPlan, GraspError> {
    let (u, mode) = select_offset_axis(est, gripper, cfg)?;
    let rotation = build_orientation(&u, mode, &est.axes)?;
    let euler = euler_from_rotation(&rotation);

    let centroid = est.centroid.to_vec();
    let grasp = centroid + gripper.finger_length * u;
    // Built from the grasp position so `pregrasp − grasp = (h_pre − h_f)·u`
    // holds as an arithmetic identity.
    let pregrasp = grasp + (cfg.h_pre - gripper.finger_length) * u;

    let x_t: Vec3 = rotation.column(0).into_owned();
    let y_t: Vec3 = rotation.column(1).into_owned();
    let z_t: Vec3 = rotation.column(2).into_owned();

    let est_width = closing_width(object, &grasp, &x_t, &z_t, gripper.finger_length);

    let usable = gripper.max_opening - WIDTH_MARGIN;
    if est_width > usable {
        return Err(GraspError::InfeasibleWidth {
            width: est_width,
            usable,
        });
    }

    if mode == GraspMode::Side {
        let min_z = est.z_plane + cfg.table_clearance_min;
        if grasp.z < min_z {
            return Err(GraspError::TableCollision {
                palm_z: grasp.z,
                min_z,
            });
        }
    }

    let half = gripper.max_opening / 2.0;
    for p in &object.points {
        let v = p.to_vec() - grasp;
        if v.dot(&z_t) < 0.0 && v.dot(&x_t).abs() <= half && v.dot(&y_t).abs() <= half {
            return Err(GraspError::PalmCollision);
        }
    }

    Ok(GraspPlan {
        mode,
        grasp_position: Point3::from_vec(grasp),
        pregrasp_position: Point3::from_vec(pregrasp),
        rotation: rotation_to_row_major(&rotation),
        euler_xyz: euler,
        offset_axis: [u.x, u.y, u.z],
        est_width,
    })
}
