//! Point-cloud representation, ASCII PCD/PLY I/O, rigid transforms and
//! workspace cropping.
//!
//! Only the geometric channels are kept: color or intensity attributes in
//! input files are parsed past and discarded. Binary encodings are not
//! supported.

mod pcd;
mod ply;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::orthonormality_error;
use crate::{Mat3, Vec3};

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid rigid transform: {0}")]
    InvalidTransform(String),
    #[error("invalid aabb: {0}")]
    InvalidAabb(String),
}

impl CloudError {
    fn parse(line: usize, msg: impl Into<String>) -> Self {
        CloudError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

/// A 3-D point in meters. Finite by construction everywhere past parsing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn from_vec(v: Vec3) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Serde adapter rendering a [`Point3`] as a `[x, y, z]` array.
pub mod point_as_array {
    use super::Point3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &Point3, s: S) -> Result<S::Ok, S::Error> {
        [p.x, p.y, p.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Point3, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        Ok(Point3::new(x, y, z))
    }
}

/// Reference frame a cloud lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Camera,
    World,
}

/// Unordered point set tagged with its reference frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point3>,
    pub frame: Frame,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>, frame: Frame) -> Self {
        Self { points, frame }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Axis-aligned box, closed on all faces.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Aabb {
    #[serde(with = "point_as_array")]
    pub min: Point3,
    #[serde(with = "point_as_array")]
    pub max: Point3,
}

impl Aabb {
    /// Builds a box, checking `min ≤ max` componentwise.
    pub fn new(min: Point3, max: Point3) -> Result<Self, CloudError> {
        if min.x > max.x || min.y > max.y || min.z > max.z {
            return Err(CloudError::InvalidAabb(format!(
                "min {min} exceeds max {max}"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn contains(&self, p: &Point3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }
}

/// Proper rigid transform: row-major rotation + translation, meters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RigidTransform {
    /// Row-major 3×3 rotation.
    pub rotation: [f64; 9],
    /// Translation in meters.
    pub translation: [f64; 3],
}

/// Tolerance on ‖RᵀR − I‖∞ and |det R − 1|.
const TRANSFORM_TOL: f64 = 1e-9;

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            translation: [0.0, 0.0, 0.0],
        }
    }

    pub fn from_parts(rotation: Mat3, translation: Vec3) -> Self {
        let mut r = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                r[3 * i + j] = rotation[(i, j)];
            }
        }
        Self {
            rotation: r,
            translation: [translation.x, translation.y, translation.z],
        }
    }

    pub fn rotation_matrix(&self) -> Mat3 {
        Mat3::new(
            self.rotation[0],
            self.rotation[1],
            self.rotation[2],
            self.rotation[3],
            self.rotation[4],
            self.rotation[5],
            self.rotation[6],
            self.rotation[7],
            self.rotation[8],
        )
    }

    pub fn translation_vec(&self) -> Vec3 {
        Vec3::new(self.translation[0], self.translation[1], self.translation[2])
    }

    /// Checks orthonormality and det = +1 within 1e-9.
    pub fn validate(&self) -> Result<(), CloudError> {
        let r = self.rotation_matrix();
        let ortho = orthonormality_error(&r);
        if ortho > TRANSFORM_TOL {
            return Err(CloudError::InvalidTransform(format!(
                "rotation not orthonormal (deviation {ortho:.3e})"
            )));
        }
        let det = r.determinant();
        if (det - 1.0).abs() > TRANSFORM_TOL {
            return Err(CloudError::InvalidTransform(format!(
                "rotation determinant {det} is not +1"
            )));
        }
        for v in self.translation {
            if !v.is_finite() {
                return Err(CloudError::InvalidTransform("non-finite translation".into()));
            }
        }
        Ok(())
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        let v = self.rotation_matrix() * p.to_vec() + self.translation_vec();
        Point3::from_vec(v)
    }

    /// Inverse transform (Rᵀ, −Rᵀt).
    pub fn inverse(&self) -> Self {
        let rt = self.rotation_matrix().transpose();
        let t = -(rt * self.translation_vec());
        Self::from_parts(rt, t)
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &RigidTransform) -> Self {
        let r = self.rotation_matrix() * other.rotation_matrix();
        let t = self.rotation_matrix() * other.translation_vec() + self.translation_vec();
        Self::from_parts(r, t)
    }
}

/// On-disk cloud encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    PcdAscii,
    PlyAscii,
}

impl CloudFormat {
    /// Guesses the format from the file extension, defaulting to PCD.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("ply") => CloudFormat::PlyAscii,
            _ => CloudFormat::PcdAscii,
        }
    }
}

/// Loads a cloud from `path`. `format = None` selects by extension.
/// The loaded cloud is labeled `Frame::Camera`; files carry no frame tag.
pub fn load_cloud(path: &Path, format: Option<CloudFormat>) -> Result<PointCloud, CloudError> {
    let text = std::fs::read_to_string(path)?;
    let format = format.unwrap_or_else(|| CloudFormat::from_path(path));
    let points = match format {
        CloudFormat::PcdAscii => pcd::parse(&text)?,
        CloudFormat::PlyAscii => ply::parse(&text)?,
    };
    Ok(PointCloud::new(points, Frame::Camera))
}

/// Writes `cloud` to `path`. Coordinates are printed with shortest
/// round-trip formatting, so a reload reproduces them exactly.
pub fn save_cloud(cloud: &PointCloud, path: &Path, format: CloudFormat) -> Result<(), CloudError> {
    let text = match format {
        CloudFormat::PcdAscii => pcd::render(&cloud.points),
        CloudFormat::PlyAscii => ply::render(&cloud.points),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Maps every point through `t` and relabels the frame.
pub fn apply_rigid_transform(
    cloud: &PointCloud,
    t: &RigidTransform,
    new_frame: Frame,
) -> Result<PointCloud, CloudError> {
    t.validate()?;
    let points = cloud.points.iter().map(|p| t.apply(p)).collect();
    Ok(PointCloud::new(points, new_frame))
}

/// Retains exactly the points inside the closed box, preserving order.
/// Expects a world-frame cloud; an empty result is legal.
pub fn crop_workspace(cloud: &PointCloud, workspace: &Aabb) -> PointCloud {
    let points = cloud
        .points
        .iter()
        .filter(|p| workspace.contains(p))
        .copied()
        .collect();
    PointCloud::new(points, cloud.frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn rot_z(angle: f64) -> Mat3 {
        Mat3::new(
            angle.cos(),
            -angle.sin(),
            0.0,
            angle.sin(),
            angle.cos(),
            0.0,
            0.0,
            0.0,
            1.0,
        )
    }

    #[test]
    fn identity_transform_relabels_frame_only() {
        let cloud = PointCloud::new(vec![Point3::new(0.1, -0.2, 0.3)], Frame::Camera);
        let out =
            apply_rigid_transform(&cloud, &RigidTransform::identity(), Frame::World).unwrap();
        assert_eq!(out.points, cloud.points);
        assert_eq!(out.frame, Frame::World);
    }

    #[test]
    fn camera_height_translation() {
        let t = RigidTransform::from_parts(Mat3::identity(), Vec3::new(0.0, 0.0, 1.72));
        let p = t.apply(&Point3::new(0.0, 0.0, 0.0));
        assert_eq!(p, Point3::new(0.0, 0.0, 1.72));
    }

    #[test]
    fn quarter_turn_about_z() {
        let t = RigidTransform::from_parts(rot_z(FRAC_PI_2), Vec3::zeros());
        let p = t.apply(&Point3::new(1.0, 0.0, 0.0));
        assert_relative_eq!(p.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(p.y, 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn non_orthonormal_rotation_rejected() {
        let t = RigidTransform {
            rotation: [1.0, 0.0, 0.0, 0.0, 1.0, 0.1, 0.0, 0.0, 1.0],
            translation: [0.0; 3],
        };
        let cloud = PointCloud::new(vec![], Frame::Camera);
        assert!(matches!(
            apply_rigid_transform(&cloud, &t, Frame::World),
            Err(CloudError::InvalidTransform(_))
        ));
    }

    #[test]
    fn crop_is_closed_on_faces() {
        let box_ = Aabb::new(Point3::new(-0.3, -0.3, -0.3), Point3::new(0.3, 0.3, 0.3)).unwrap();
        let cloud = PointCloud::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 1.0),
                Point3::new(0.3, 0.0, 0.0),
            ],
            Frame::World,
        );
        let out = crop_workspace(&cloud, &box_);
        assert_eq!(
            out.points,
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(0.3, 0.0, 0.0)]
        );
    }

    #[test]
    fn crop_is_idempotent() {
        let box_ = Aabb::new(Point3::new(-0.1, -0.1, -0.1), Point3::new(0.2, 0.2, 0.2)).unwrap();
        let cloud = PointCloud::new(
            (0..50)
                .map(|i| {
                    let f = i as f64 * 0.01 - 0.2;
                    Point3::new(f, -f, f * 0.5)
                })
                .collect(),
            Frame::World,
        );
        let once = crop_workspace(&cloud, &box_);
        let twice = crop_workspace(&once, &box_);
        assert_eq!(once, twice);
    }

    #[test]
    fn saving_to_directory_path_is_io_error() {
        let dir = std::env::temp_dir();
        let cloud = PointCloud::new(vec![Point3::new(0.0, 0.0, 0.0)], Frame::Camera);
        assert!(matches!(
            save_cloud(&cloud, &dir, CloudFormat::PcdAscii),
            Err(CloudError::Io(_))
        ));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let t1 = RigidTransform::from_parts(rot_z(0.3), Vec3::new(0.1, 0.0, 0.2));
        let t2 = RigidTransform::from_parts(rot_z(-1.1), Vec3::new(0.0, -0.4, 0.0));
        let p = Point3::new(0.2, 0.5, -0.1);
        let seq = t2.apply(&t1.apply(&p));
        let comp = t2.compose(&t1).apply(&p);
        assert_relative_eq!(seq.x, comp.x, epsilon = 1e-9);
        assert_relative_eq!(seq.y, comp.y, epsilon = 1e-9);
        assert_relative_eq!(seq.z, comp.z, epsilon = 1e-9);
    }
}
