//! Synthetic single-view scenes: a primitive resting on a 0.6×0.6 m table
//! at z = 0, observed by an overhead depth camera.
//!
//! Surfaces are sampled uniformly at a configured density; only points
//! whose outward normal faces the camera survive (exact visibility for
//! convex bodies), with an extra ray-cast occlusion test for the
//! non-convex shapes. Table points under the object's vertical footprint
//! are excluded. Depth noise is Gaussian along the camera ray. Every
//! cloud comes with per-point ground-truth labels and analytic solid
//! centroid/axes for evaluation.

mod primitives;

pub use primitives::{Hit, PrimitiveShape, SurfaceSample};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{canonical_axes, sorted_symmetric_eigen};
use crate::{Frame, Mat3, Point3, PointCloud, Vec3};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid scene: {0}")]
    InvalidScene(String),
}

/// Table half-extent in x and y (0.6×0.6 m top centered at the origin).
pub const TABLE_HALF: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Object frame upright.
    Standing,
    /// Rolled 90° about world x before yawing.
    LyingX,
    /// Rolled 90° about world y before yawing.
    LyingY,
}

/// Where and how the object rests on the table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScenePose {
    pub placement: Placement,
    /// Rotation about world z, radians.
    pub yaw: f64,
    /// Lateral offset of the object frame origin, meters.
    pub xy_offset: [f64; 2],
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorModel {
    #[serde(with = "crate::cloudio::point_as_array")]
    pub camera_position: Point3,
    /// Surface sampling density, points/m².
    pub surface_sample_density: f64,
    /// Depth noise σ along the camera ray, meters.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            camera_position: Point3::new(0.0, 0.0, 1.72),
            surface_sample_density: 40_000.0,
            noise_sigma: 0.0015,
            seed: 0,
        }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<(), String> {
        if !self.surface_sample_density.is_finite() || self.surface_sample_density <= 0.0 {
            return Err("surface_sample_density must be > 0".into());
        }
        if self.noise_sigma < 0.0 {
            return Err("noise_sigma must be ≥ 0".into());
        }
        Ok(())
    }
}

/// Ground truth accompanying a generated scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneTruth {
    pub shape: PrimitiveShape,
    /// Object-to-world rotation, row-major.
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
    pub true_centroid: Point3,
    /// Principal axes of the uniform solid, world frame, variance-descending.
    pub true_axes: [[f64; 3]; 3],
    /// Indices of object points in the emitted cloud (table points follow).
    pub object_point_indices: Vec<usize>,
    pub plane_height: f64,
}

impl SceneTruth {
    pub fn rotation_matrix(&self) -> Mat3 {
        let r = &self.rotation;
        Mat3::new(r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8])
    }

    pub fn translation_vec(&self) -> Vec3 {
        Vec3::new(self.translation[0], self.translation[1], self.translation[2])
    }

    pub fn true_axis(&self, i: usize) -> Vec3 {
        Vec3::new(self.true_axes[i][0], self.true_axes[i][1], self.true_axes[i][2])
    }

    /// First ray-surface hit in world coordinates.
    pub fn ray_intersect_world(
        &self,
        origin: &Vec3,
        dir: &Vec3,
        t_min: f64,
        t_max: f64,
    ) -> Option<Hit> {
        let r = self.rotation_matrix();
        let rt = r.transpose();
        let o = rt * (origin - self.translation_vec());
        let d = rt * dir;
        self.shape.ray_intersect(&o, &d, t_min, t_max).map(|h| Hit {
            t: h.t,
            point: r * h.point + self.translation_vec(),
            normal: r * h.normal,
        })
    }

    /// Interior test in world coordinates.
    pub fn contains_world(&self, p: &Vec3) -> bool {
        let local = self.rotation_matrix().transpose() * (p - self.translation_vec());
        self.shape.contains(&local)
    }

    /// Deterministic dense world-frame surface samples (fixed inner seed),
    /// for sampled collision queries.
    pub fn surface_points_world(&self, density: f64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51CE_5A3B);
        let r = self.rotation_matrix();
        let t = self.translation_vec();
        self.shape
            .sample_surface(density, &mut rng)
            .into_iter()
            .map(|s| r * s.point + t)
            .collect()
    }
}

/// Ground-plane footprint region.
#[derive(Debug, Clone)]
enum Region {
    Disc { center: [f64; 2], radius: f64 },
    /// Convex polygon, counter-clockwise.
    Polygon(Vec<[f64; 2]>),
}

impl Region {
    fn contains_strict(&self, x: f64, y: f64) -> bool {
        match self {
            Region::Disc { center, radius } => {
                let dx = x - center[0];
                let dy = y - center[1];
                dx * dx + dy * dy < radius * radius
            }
            Region::Polygon(verts) => {
                let n = verts.len();
                for i in 0..n {
                    let a = verts[i];
                    let b = verts[(i + 1) % n];
                    let cross = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
                    if cross <= 0.0 {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn fits_on_table(&self) -> bool {
        match self {
            Region::Disc { center, radius } => {
                center[0].abs() + radius <= TABLE_HALF && center[1].abs() + radius <= TABLE_HALF
            }
            Region::Polygon(verts) => verts
                .iter()
                .all(|v| v[0].abs() <= TABLE_HALF && v[1].abs() <= TABLE_HALF),
        }
    }
}

/// Andrew's monotone chain; returns the hull counter-clockwise.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross =
        |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

fn box_corner_hull(w: [f64; 3], center: Vec3, r: &Mat3, t: &Vec3) -> Region {
    let mut pts = Vec::with_capacity(8);
    for sx in [-0.5, 0.5] {
        for sy in [-0.5, 0.5] {
            for sz in [-0.5, 0.5] {
                let corner = center + Vec3::new(sx * w[0], sy * w[1], sz * w[2]);
                let world = r * corner + t;
                pts.push([world.x, world.y]);
            }
        }
    }
    Region::Polygon(convex_hull(pts))
}

/// Vertical footprint of the placed shape. Exact for the axis-aligned
/// placements used here; tilted cylinders fall back to a conservative disc.
fn footprint(shape: &PrimitiveShape, r: &Mat3, t: &Vec3) -> Vec<Region> {
    match *shape {
        PrimitiveShape::Box { wx, wy, wz } => vec![box_corner_hull([wx, wy, wz], Vec3::zeros(), r, t)],
        PrimitiveShape::BoxPair {
            base,
            top,
            top_offset,
        } => {
            let c2 = Vec3::new(top_offset[0], top_offset[1], base[2] / 2.0 + top[2] / 2.0);
            vec![
                box_corner_hull(base, Vec3::zeros(), r, t),
                box_corner_hull(top, c2, r, t),
            ]
        }
        PrimitiveShape::Sphere { radius } => vec![Region::Disc {
            center: [t.x, t.y],
            radius,
        }],
        PrimitiveShape::Cylinder { radius, height }
        | PrimitiveShape::Tube {
            outer_radius: radius,
            height,
            ..
        } => {
            let axis = r * Vec3::z();
            if axis.z.abs() > 0.999 {
                vec![Region::Disc {
                    center: [t.x, t.y],
                    radius,
                }]
            } else if axis.z.abs() < 0.001 {
                let along = axis.xy().normalize();
                let perp = [-along.y, along.x];
                let h = height / 2.0;
                let c = [t.x, t.y];
                let corners = vec![
                    [c[0] + along.x * h + perp[0] * radius, c[1] + along.y * h + perp[1] * radius],
                    [c[0] - along.x * h + perp[0] * radius, c[1] - along.y * h + perp[1] * radius],
                    [c[0] - along.x * h - perp[0] * radius, c[1] - along.y * h - perp[1] * radius],
                    [c[0] + along.x * h - perp[0] * radius, c[1] + along.y * h - perp[1] * radius],
                ];
                vec![Region::Polygon(convex_hull(corners))]
            } else {
                let horizontal = axis.xy().norm();
                vec![Region::Disc {
                    center: [t.x, t.y],
                    radius: height / 2.0 * horizontal + radius,
                }]
            }
        }
    }
}

fn placement_rotation(pose: &ScenePose) -> Mat3 {
    let yaw = nalgebra::Rotation3::from_axis_angle(&Vec3::z_axis(), pose.yaw).into_inner();
    let roll = match pose.placement {
        Placement::Standing => Mat3::identity(),
        Placement::LyingX => nalgebra::Rotation3::from_axis_angle(
            &Vec3::x_axis(),
            std::f64::consts::FRAC_PI_2,
        )
        .into_inner(),
        Placement::LyingY => nalgebra::Rotation3::from_axis_angle(
            &Vec3::y_axis(),
            std::f64::consts::FRAC_PI_2,
        )
        .into_inner(),
    };
    yaw * roll
}

/// Generates a single-view cloud (world frame) with ground truth.
///
/// The object rests on the table plane z = 0: the placement rotation is
/// applied, then the shape is dropped so its lowest point touches the
/// plane. Object points come first in the cloud, table points after.
pub fn generate_scene(
    shape: &PrimitiveShape,
    pose: &ScenePose,
    sensor: &SensorModel,
) -> Result<(PointCloud, SceneTruth), SceneError> {
    shape.validate().map_err(SceneError::InvalidScene)?;
    sensor.validate().map_err(SceneError::InvalidScene)?;

    let r = placement_rotation(pose);
    let rest_height = shape.support(&(r.transpose() * -Vec3::z()));
    let t = Vec3::new(pose.xy_offset[0], pose.xy_offset[1], rest_height);

    let regions = footprint(shape, &r, &t);
    if !regions.iter().all(|reg| reg.fits_on_table()) {
        return Err(SceneError::InvalidScene("object footprint leaves the table".into()));
    }

    let camera = sensor.camera_position.to_vec();
    let z_top = shape.support(&(r.transpose() * Vec3::z())) + t.z;
    if camera.z <= z_top {
        return Err(SceneError::InvalidScene(format!(
            "camera at z = {} is not above the object top {z_top}",
            camera.z
        )));
    }

    let needs_ray_occlusion = matches!(
        shape,
        PrimitiveShape::Tube { .. } | PrimitiveShape::BoxPair { .. }
    );

    let mut rng = ChaCha8Rng::seed_from_u64(sensor.seed);
    let mut points: Vec<Point3> = Vec::new();

    for sample in shape.sample_surface(sensor.surface_sample_density, &mut rng) {
        let p_world = r * sample.point + t;
        let n_world = r * sample.normal;
        let to_cam = camera - p_world;
        if n_world.dot(&to_cam) <= 0.0 {
            continue;
        }
        if needs_ray_occlusion {
            let dist = to_cam.norm();
            let dir_obj = r.transpose() * (to_cam / dist);
            if shape
                .ray_intersect(&sample.point, &dir_obj, 1e-6, dist)
                .is_some()
            {
                continue;
            }
        }
        points.push(Point3::from_vec(p_world));
    }
    let n_object = points.len();

    let table_area = (2.0 * TABLE_HALF) * (2.0 * TABLE_HALF);
    let n_table = (table_area * sensor.surface_sample_density).round() as usize;
    for _ in 0..n_table {
        let x: f64 = rng.random_range(-TABLE_HALF..TABLE_HALF);
        let y: f64 = rng.random_range(-TABLE_HALF..TABLE_HALF);
        if regions.iter().any(|reg| reg.contains_strict(x, y)) {
            continue;
        }
        points.push(Point3::new(x, y, 0.0));
    }

    if sensor.noise_sigma > 0.0 {
        let normal = rand_distr::Normal::new(0.0, sensor.noise_sigma)
            .map_err(|e| SceneError::InvalidScene(e.to_string()))?;
        for p in &mut points {
            let ray = (p.to_vec() - camera).normalize();
            let eps: f64 = rng.sample(normal);
            *p = Point3::from_vec(p.to_vec() + ray * eps);
        }
    }

    let c_world = r * shape.solid_centroid() + t;
    let cov_world = r * shape.solid_covariance() * r.transpose();
    let (_, vectors) = sorted_symmetric_eigen(&cov_world);
    let axes = canonical_axes(vectors);

    let truth = SceneTruth {
        shape: *shape,
        rotation: [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
        ],
        translation: [t.x, t.y, t.z],
        true_centroid: Point3::from_vec(c_world),
        true_axes: [
            [axes[0].x, axes[0].y, axes[0].z],
            [axes[1].x, axes[1].y, axes[1].z],
            [axes[2].x, axes[2].y, axes[2].z],
        ],
        object_point_indices: (0..n_object).collect(),
        plane_height: 0.0,
    };

    Ok((PointCloud::new(points, Frame::World), truth))
}

/// One benchmark trial: a shape in a pose with a derived sensor seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialDescriptor {
    pub index: usize,
    pub shape_label: String,
    pub pose_label: String,
    pub shape: PrimitiveShape,
    pub pose: ScenePose,
    pub sensor: SensorModel,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-index seed derivation (splitmix64 mixing).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// The five benchmark stand-in shapes with their labels.
pub fn suite_shapes() -> Vec<(&'static str, PrimitiveShape)> {
    vec![
        (
            "tall_cylinder",
            PrimitiveShape::Cylinder {
                radius: 0.018,
                height: 0.25,
            },
        ),
        (
            "thin_box",
            PrimitiveShape::Box {
                wx: 0.20,
                wy: 0.03,
                wz: 0.03,
            },
        ),
        (
            "flat_box",
            PrimitiveShape::Box {
                wx: 0.16,
                wy: 0.09,
                wz: 0.012,
            },
        ),
        (
            "short_tube",
            PrimitiveShape::Tube {
                outer_radius: 0.045,
                inner_radius: 0.030,
                height: 0.05,
            },
        ),
        (
            "box_pair",
            PrimitiveShape::BoxPair {
                base: [0.07, 0.05, 0.035],
                top: [0.05, 0.035, 0.04],
                top_offset: [0.018, 0.012],
            },
        ),
    ]
}

const SUITE_PLACEMENTS: [(Placement, &str); 3] = [
    (Placement::Standing, "standing"),
    (Placement::LyingX, "lying_x"),
    (Placement::LyingY, "lying_y"),
];
const SUITE_REPS: usize = 5;

/// The standard 75-trial grid: 5 shapes × 3 poses × 5 repetitions.
///
/// The shape/pose grid is fixed; the suite seed only drives per-repetition
/// yaw, lateral offset and sensor noise seeds.
pub fn standard_suite(seed: u64) -> Vec<TrialDescriptor> {
    let mut trials = Vec::with_capacity(75);
    let mut index = 0;
    for (shape_label, shape) in suite_shapes() {
        for (placement, pose_label) in SUITE_PLACEMENTS {
            for _rep in 0..SUITE_REPS {
                let trial_seed = derive_seed(seed, index as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                let yaw: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let off = [
                    rng.random_range(-0.05..0.05),
                    rng.random_range(-0.05..0.05),
                ];
                trials.push(TrialDescriptor {
                    index,
                    shape_label: shape_label.to_string(),
                    pose_label: pose_label.to_string(),
                    shape,
                    pose: ScenePose {
                        placement,
                        yaw,
                        xy_offset: off,
                    },
                    sensor: SensorModel {
                        seed: derive_seed(trial_seed, 1),
                        ..SensorModel::default()
                    },
                });
                index += 1;
            }
        }
    }
    trials
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn noiseless(seed: u64) -> SensorModel {
        SensorModel {
            noise_sigma: 0.0,
            seed,
            ..SensorModel::default()
        }
    }

    #[test]
    fn sphere_visibility_is_front_facing_only() {
        let shape = PrimitiveShape::Sphere { radius: 0.05 };
        let pose = ScenePose {
            placement: Placement::Standing,
            yaw: 0.0,
            xy_offset: [0.0, 0.0],
        };
        let (cloud, truth) = generate_scene(&shape, &pose, &noiseless(1)).unwrap();
        let camera = Vec3::new(0.0, 0.0, 1.72);
        let center = truth.true_centroid.to_vec();
        for &i in &truth.object_point_indices {
            let p = cloud.points[i].to_vec();
            let n = (p - center).normalize();
            assert!(
                n.dot(&(camera - p)) > 0.0,
                "back-facing point emitted at {p:?}"
            );
        }
    }

    #[test]
    fn standing_cylinder_truth_and_visible_set() {
        let shape = PrimitiveShape::Cylinder {
            radius: 0.03,
            height: 0.25,
        };
        let pose = ScenePose {
            placement: Placement::Standing,
            yaw: 0.0,
            xy_offset: [0.05, 0.02],
        };
        let (cloud, truth) = generate_scene(&shape, &pose, &noiseless(2)).unwrap();
        assert_relative_eq!(truth.true_centroid.z, 0.125, epsilon = 1e-12);
        assert_relative_eq!(truth.true_centroid.x, 0.05, epsilon = 1e-12);
        // The elongation axis is vertical.
        assert_relative_eq!(truth.true_axis(0).z.abs(), 1.0, epsilon = 1e-12);
        // Visible set: top disc plus a lateral band facing the camera.
        let mut top = 0;
        let mut lateral = 0;
        for &i in &truth.object_point_indices {
            let p = cloud.points[i];
            if (p.z - 0.25).abs() < 1e-9 {
                top += 1;
            } else {
                lateral += 1;
                let radial = Vec3::new(p.x - 0.05, p.y - 0.02, 0.0);
                // Lateral normals must face the camera side: the radial
                // direction opposes the offset from the camera axis.
                assert!(
                    radial.dot(&Vec3::new(0.05, 0.02, 0.0)) < 0.0,
                    "lateral point on the hidden side"
                );
            }
        }
        assert!(top > 50, "top disc sparsely sampled: {top}");
        assert!(lateral > 100, "lateral band sparsely sampled: {lateral}");
    }

    #[test]
    fn determinism_bytewise() {
        let shape = PrimitiveShape::Tube {
            outer_radius: 0.045,
            inner_radius: 0.03,
            height: 0.05,
        };
        let pose = ScenePose {
            placement: Placement::LyingX,
            yaw: 0.7,
            xy_offset: [0.02, -0.03],
        };
        let sensor = SensorModel {
            seed: 9,
            ..SensorModel::default()
        };
        let (a, ta) = generate_scene(&shape, &pose, &sensor).unwrap();
        let (b, tb) = generate_scene(&shape, &pose, &sensor).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(ta.object_point_indices, tb.object_point_indices);
    }

    #[test]
    fn table_points_avoid_footprint() {
        let shape = PrimitiveShape::Box {
            wx: 0.16,
            wy: 0.09,
            wz: 0.012,
        };
        let pose = ScenePose {
            placement: Placement::Standing,
            yaw: 0.5,
            xy_offset: [0.03, -0.02],
        };
        let (cloud, truth) = generate_scene(&shape, &pose, &noiseless(3)).unwrap();
        let r = truth.rotation_matrix();
        let t = truth.translation_vec();
        let n_obj = truth.object_point_indices.len();
        for p in &cloud.points[n_obj..] {
            // Table point strictly inside the box's xy-extent would be a
            // footprint violation.
            let local = r.transpose() * (p.to_vec() - t);
            let inside_xy = local.x.abs() < 0.08 - 1e-9 && local.y.abs() < 0.045 - 1e-9;
            assert!(!inside_xy, "table point inside footprint: {p:?}");
        }
    }

    #[test]
    fn point_budget_tracks_visible_area() {
        // Sphere: visible cap area from a camera at distance d is
        // 2πr²·(1 − r/d) for d ≥ r (cap above the visibility horizon).
        let radius = 0.05;
        let shape = PrimitiveShape::Sphere { radius };
        let pose = ScenePose {
            placement: Placement::Standing,
            yaw: 0.0,
            xy_offset: [0.0, 0.0],
        };
        let sensor = noiseless(4);
        let (_, truth) = generate_scene(&shape, &pose, &sensor).unwrap();
        let d = 1.72 - radius; // camera to sphere center
        let visible_area = std::f64::consts::TAU * radius * radius * (1.0 - radius / d);
        let expected = visible_area * sensor.surface_sample_density;
        let n = truth.object_point_indices.len() as f64;
        assert!(
            n > 0.5 * expected && n < 1.5 * expected,
            "emitted {n}, expected ≈ {expected}"
        );
    }

    #[test]
    fn camera_below_object_top_rejected() {
        let shape = PrimitiveShape::Cylinder {
            radius: 0.03,
            height: 0.25,
        };
        let pose = ScenePose {
            placement: Placement::Standing,
            yaw: 0.0,
            xy_offset: [0.0, 0.0],
        };
        let sensor = SensorModel {
            camera_position: Point3::new(0.0, 0.0, 0.2),
            ..SensorModel::default()
        };
        assert!(matches!(
            generate_scene(&shape, &pose, &sensor),
            Err(SceneError::InvalidScene(_))
        ));
    }

    #[test]
    fn off_table_object_rejected() {
        let shape = PrimitiveShape::Box {
            wx: 0.2,
            wy: 0.2,
            wz: 0.1,
        };
        let pose = ScenePose {
            placement: Placement::Standing,
            yaw: 0.0,
            xy_offset: [0.25, 0.0],
        };
        assert!(matches!(
            generate_scene(&shape, &pose, &noiseless(5)),
            Err(SceneError::InvalidScene(_))
        ));
    }

    #[test]
    fn lying_cylinder_rests_on_table() {
        let shape = PrimitiveShape::Cylinder {
            radius: 0.018,
            height: 0.25,
        };
        let pose = ScenePose {
            placement: Placement::LyingX,
            yaw: 0.3,
            xy_offset: [0.0, 0.0],
        };
        let (cloud, truth) = generate_scene(&shape, &pose, &noiseless(6)).unwrap();
        assert_relative_eq!(truth.true_centroid.z, 0.018, epsilon = 1e-12);
        // Axis is horizontal.
        assert_relative_eq!(truth.true_axis(0).z, 0.0, epsilon = 1e-9);
        // No object point below the table.
        for &i in &truth.object_point_indices {
            assert!(cloud.points[i].z >= -1e-9);
        }
    }

    #[test]
    fn suite_is_75_trials_fixed_grid() {
        let a = standard_suite(7);
        let b = standard_suite(7);
        let c = standard_suite(8);
        assert_eq!(a.len(), 75);
        assert_eq!(
            a.iter().map(|t| t.index).collect::<Vec<_>>(),
            b.iter().map(|t| t.index).collect::<Vec<_>>()
        );
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.pose.yaw, y.pose.yaw);
            assert_eq!(x.sensor.seed, y.sensor.seed);
        }
        for (x, y) in a.iter().zip(&c) {
            assert_eq!(x.shape_label, y.shape_label);
            assert_eq!(x.pose_label, y.pose_label);
        }
        assert!(a.iter().zip(&c).any(|(x, y)| x.sensor.seed != y.sensor.seed));
    }

    #[test]
    fn tube_inner_wall_visible_through_hole() {
        // A standing tube directly under the camera shows its top annulus
        // and part of the inner wall through the hole.
        let shape = PrimitiveShape::Tube {
            outer_radius: 0.045,
            inner_radius: 0.03,
            height: 0.05,
        };
        let pose = ScenePose {
            placement: Placement::Standing,
            yaw: 0.0,
            xy_offset: [0.0, 0.0],
        };
        let (cloud, truth) = generate_scene(&shape, &pose, &noiseless(8)).unwrap();
        let inner = truth
            .object_point_indices
            .iter()
            .filter(|&&i| {
                let p = cloud.points[i];
                let rho = (p.x * p.x + p.y * p.y).sqrt();
                (rho - 0.03).abs() < 1e-6 && p.z < 0.05 - 1e-6
            })
            .count();
        assert!(inner > 0, "no inner-wall points visible through the hole");
        // And nothing on the outer wall below the horizon that faces away.
        let camera = Vec3::new(0.0, 0.0, 1.72);
        for &i in &truth.object_point_indices {
            let p = cloud.points[i].to_vec();
            if ((p.xy().norm()) - 0.045).abs() < 1e-6 {
                let n = Vec3::new(p.x, p.y, 0.0).normalize();
                assert!(n.dot(&(camera - p)) > 0.0);
            }
        }
    }
}
