//! Property tests for cloud I/O and the geometric primitives of cloudio.

use proptest::prelude::*;

use graspgeom::cloudio::{
    apply_rigid_transform, crop_workspace, load_cloud, save_cloud, Aabb, CloudFormat,
};
use graspgeom::{Frame, Point3, PointCloud, RigidTransform, Vec3};

fn arb_point() -> impl Strategy<Value = Point3> {
    (
        -10.0..10.0f64,
        -10.0..10.0f64,
        -10.0..10.0f64,
    )
        .prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn arb_cloud() -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(arb_point(), 0..60)
        .prop_map(|points| PointCloud::new(points, Frame::Camera))
}

fn arb_rotation() -> impl Strategy<Value = RigidTransform> {
    (
        -3.0..3.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        -0.5..0.5f64,
        -0.5..0.5f64,
        -0.5..0.5f64,
    )
        .prop_map(|(angle, ax, ay, az, tx, ty, tz)| {
            let axis = Vec3::new(ax, ay, az + 1.5); // never the zero vector
            let rot = nalgebra::Rotation3::from_axis_angle(
                &nalgebra::Unit::new_normalize(axis),
                angle,
            );
            RigidTransform::from_parts(rot.into_inner(), Vec3::new(tx, ty, tz))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_load_round_trips_both_formats(cloud in arb_cloud()) {
        let dir = tempfile::tempdir().unwrap();
        for (format, name) in [(CloudFormat::PcdAscii, "c.pcd"), (CloudFormat::PlyAscii, "c.ply")] {
            let path = dir.path().join(name);
            save_cloud(&cloud, &path, format).unwrap();
            let back = load_cloud(&path, None).unwrap();
            prop_assert_eq!(&back.points, &cloud.points);
            prop_assert_eq!(back.frame, Frame::Camera);
        }
    }

    #[test]
    fn crop_is_idempotent_and_sound(cloud in arb_cloud()) {
        let world = PointCloud::new(cloud.points.clone(), Frame::World);
        let aabb = Aabb::new(Point3::new(-1.0, -2.0, -0.5), Point3::new(2.0, 1.0, 3.0)).unwrap();
        let once = crop_workspace(&world, &aabb);
        let twice = crop_workspace(&once, &aabb);
        prop_assert_eq!(&once.points, &twice.points);
        for p in &once.points {
            prop_assert!(aabb.contains(p));
        }
    }

    #[test]
    fn rigid_transform_preserves_pairwise_distances(
        cloud in arb_cloud(),
        t in arb_rotation()
    ) {
        let out = apply_rigid_transform(&cloud, &t, Frame::World).unwrap();
        for pair in cloud.points.windows(2).zip(out.points.windows(2)) {
            let (before, after) = pair;
            let d0 = (before[0].to_vec() - before[1].to_vec()).norm();
            let d1 = (after[0].to_vec() - after[1].to_vec()).norm();
            prop_assert!((d0 - d1).abs() <= 1e-9 * d0.max(1.0));
        }
    }

    #[test]
    fn transform_composition_associates(
        p in arb_point(),
        t1 in arb_rotation(),
        t2 in arb_rotation()
    ) {
        let seq = t2.apply(&t1.apply(&p));
        let comp = t2.compose(&t1).apply(&p);
        prop_assert!((seq.to_vec() - comp.to_vec()).norm() <= 1e-9);
    }
}
