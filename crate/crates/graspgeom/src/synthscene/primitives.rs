//! Analytic geometry for the scene primitives: uniform surface sampling,
//! first-hit ray intersection, support functions, ground footprints and
//! solid (uniform-density) moments.
//!
//! Object-frame conventions: boxes and spheres are centered at the origin;
//! cylinders and tubes have their symmetry axis along z, centered. The
//! box pair stacks its top box onto the base box with a lateral offset.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Mat3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimitiveShape {
    Box {
        wx: f64,
        wy: f64,
        wz: f64,
    },
    Cylinder {
        radius: f64,
        height: f64,
    },
    Sphere {
        radius: f64,
    },
    Tube {
        outer_radius: f64,
        inner_radius: f64,
        height: f64,
    },
    /// Two stacked boxes, the top one laterally off-center: a stand-in for
    /// irregular objects whose centroid is away from the visible top.
    BoxPair {
        base: [f64; 3],
        top: [f64; 3],
        top_offset: [f64; 2],
    },
}

/// First intersection of a ray with the solid's surface.
#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub t: f64,
    pub point: Vec3,
    /// Outward surface normal at the hit.
    pub normal: Vec3,
}

/// A sampled surface point with its outward normal.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    pub point: Vec3,
    pub normal: Vec3,
}

const EPS: f64 = 1e-12;

impl PrimitiveShape {
    pub fn validate(&self) -> Result<(), String> {
        let ok = |d: f64| d > 0.0 && d.is_finite();
        match *self {
            PrimitiveShape::Box { wx, wy, wz } => {
                if ok(wx) && ok(wy) && ok(wz) {
                    Ok(())
                } else {
                    Err("box dimensions must be positive".into())
                }
            }
            PrimitiveShape::Cylinder { radius, height } => {
                if ok(radius) && ok(height) {
                    Ok(())
                } else {
                    Err("cylinder dimensions must be positive".into())
                }
            }
            PrimitiveShape::Sphere { radius } => {
                if ok(radius) {
                    Ok(())
                } else {
                    Err("sphere radius must be positive".into())
                }
            }
            PrimitiveShape::Tube {
                outer_radius,
                inner_radius,
                height,
            } => {
                if ok(outer_radius) && ok(inner_radius) && ok(height) && inner_radius < outer_radius
                {
                    Ok(())
                } else {
                    Err("tube needs 0 < inner_radius < outer_radius and height > 0".into())
                }
            }
            PrimitiveShape::BoxPair { base, top, .. } => {
                if base.iter().chain(top.iter()).all(|&d| ok(d)) {
                    Ok(())
                } else {
                    Err("box pair dimensions must be positive".into())
                }
            }
        }
    }

    /// Centers of the two boxes of a pair, object frame.
    fn pair_centers(base: [f64; 3], top: [f64; 3], off: [f64; 2]) -> (Vec3, Vec3) {
        (
            Vec3::zeros(),
            Vec3::new(off[0], off[1], base[2] / 2.0 + top[2] / 2.0),
        )
    }

    pub fn surface_area(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            PrimitiveShape::Box { wx, wy, wz } => 2.0 * (wx * wy + wy * wz + wx * wz),
            PrimitiveShape::Cylinder { radius, height } => {
                2.0 * PI * radius * height + 2.0 * PI * radius * radius
            }
            PrimitiveShape::Sphere { radius } => 4.0 * PI * radius * radius,
            PrimitiveShape::Tube {
                outer_radius,
                inner_radius,
                height,
            } => {
                2.0 * PI * (outer_radius + inner_radius) * height
                    + 2.0 * PI * (outer_radius * outer_radius - inner_radius * inner_radius)
            }
            PrimitiveShape::BoxPair { base, top, .. } => {
                let a = |w: [f64; 3]| 2.0 * (w[0] * w[1] + w[1] * w[2] + w[0] * w[2]);
                a(base) + a(top)
            }
        }
    }

    pub fn volume(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            PrimitiveShape::Box { wx, wy, wz } => wx * wy * wz,
            PrimitiveShape::Cylinder { radius, height } => PI * radius * radius * height,
            PrimitiveShape::Sphere { radius } => 4.0 / 3.0 * PI * radius.powi(3),
            PrimitiveShape::Tube {
                outer_radius,
                inner_radius,
                height,
            } => PI * (outer_radius * outer_radius - inner_radius * inner_radius) * height,
            PrimitiveShape::BoxPair { base, top, .. } => {
                base[0] * base[1] * base[2] + top[0] * top[1] * top[2]
            }
        }
    }

    /// Centroid of the uniform solid, object frame.
    pub fn solid_centroid(&self) -> Vec3 {
        match *self {
            PrimitiveShape::BoxPair {
                base,
                top,
                top_offset,
            } => {
                let (c1, c2) = Self::pair_centers(base, top, top_offset);
                let v1 = base[0] * base[1] * base[2];
                let v2 = top[0] * top[1] * top[2];
                (c1 * v1 + c2 * v2) / (v1 + v2)
            }
            _ => Vec3::zeros(),
        }
    }

    /// Covariance of the uniform solid about its centroid, object frame.
    pub fn solid_covariance(&self) -> Mat3 {
        match *self {
            PrimitiveShape::Box { wx, wy, wz } => {
                Mat3::from_diagonal(&Vec3::new(wx * wx / 12.0, wy * wy / 12.0, wz * wz / 12.0))
            }
            PrimitiveShape::Cylinder { radius, height } => Mat3::from_diagonal(&Vec3::new(
                radius * radius / 4.0,
                radius * radius / 4.0,
                height * height / 12.0,
            )),
            PrimitiveShape::Sphere { radius } => {
                Mat3::from_diagonal(&Vec3::from_element(radius * radius / 5.0))
            }
            PrimitiveShape::Tube {
                outer_radius,
                inner_radius,
                height,
            } => {
                let r2 = (outer_radius * outer_radius + inner_radius * inner_radius) / 4.0;
                Mat3::from_diagonal(&Vec3::new(r2, r2, height * height / 12.0))
            }
            PrimitiveShape::BoxPair {
                base,
                top,
                top_offset,
            } => {
                let (c1, c2) = Self::pair_centers(base, top, top_offset);
                let v1 = base[0] * base[1] * base[2];
                let v2 = top[0] * top[1] * top[2];
                let cbar = self.solid_centroid();
                let cov = |w: [f64; 3]| {
                    Mat3::from_diagonal(&Vec3::new(
                        w[0] * w[0] / 12.0,
                        w[1] * w[1] / 12.0,
                        w[2] * w[2] / 12.0,
                    ))
                };
                let d1 = c1 - cbar;
                let d2 = c2 - cbar;
                let part1 = v1 * (cov(base) + d1 * d1.transpose());
                let part2 = v2 * (cov(top) + d2 * d2.transpose());
                (part1 + part2) / (v1 + v2)
            }
        }
    }

    /// Support function of the solid: max of p·dir over the shape.
    pub fn support(&self, dir: &Vec3) -> f64 {
        match *self {
            PrimitiveShape::Box { wx, wy, wz } => {
                wx / 2.0 * dir.x.abs() + wy / 2.0 * dir.y.abs() + wz / 2.0 * dir.z.abs()
            }
            PrimitiveShape::Cylinder { radius, height }
            | PrimitiveShape::Tube {
                outer_radius: radius,
                height,
                ..
            } => height / 2.0 * dir.z.abs() + radius * dir.xy().norm(),
            PrimitiveShape::Sphere { radius } => radius * dir.norm(),
            PrimitiveShape::BoxPair {
                base,
                top,
                top_offset,
            } => {
                let (c1, c2) = Self::pair_centers(base, top, top_offset);
                let s = |w: [f64; 3], c: Vec3| {
                    c.dot(dir)
                        + w[0] / 2.0 * dir.x.abs()
                        + w[1] / 2.0 * dir.y.abs()
                        + w[2] / 2.0 * dir.z.abs()
                };
                s(base, c1).max(s(top, c2))
            }
        }
    }

    /// Strict interior test with a small tolerance pulled inward.
    pub fn contains(&self, p: &Vec3) -> bool {
        match *self {
            PrimitiveShape::Box { wx, wy, wz } => {
                p.x.abs() < wx / 2.0 - EPS && p.y.abs() < wy / 2.0 - EPS && p.z.abs() < wz / 2.0 - EPS
            }
            PrimitiveShape::Cylinder { radius, height } => {
                p.z.abs() < height / 2.0 - EPS && p.xy().norm() < radius - EPS
            }
            PrimitiveShape::Sphere { radius } => p.norm() < radius - EPS,
            PrimitiveShape::Tube {
                outer_radius,
                inner_radius,
                height,
            } => {
                let rho = p.xy().norm();
                p.z.abs() < height / 2.0 - EPS
                    && rho < outer_radius - EPS
                    && rho > inner_radius + EPS
            }
            PrimitiveShape::BoxPair {
                base,
                top,
                top_offset,
            } => {
                let (c1, c2) = Self::pair_centers(base, top, top_offset);
                let inside = |w: [f64; 3], c: Vec3| {
                    (p.x - c.x).abs() < w[0] / 2.0 - EPS
                        && (p.y - c.y).abs() < w[1] / 2.0 - EPS
                        && (p.z - c.z).abs() < w[2] / 2.0 - EPS
                };
                inside(base, c1) || inside(top, c2)
            }
        }
    }

    /// Uniform surface samples at `density` points/m², object frame.
    /// Per-face counts are `round(area · density)`; box-pair samples
    /// falling strictly inside the partner box are dropped.
    pub fn sample_surface<R: Rng>(&self, density: f64, rng: &mut R) -> Vec<SurfaceSample> {
        let mut out = Vec::new();
        match *self {
            PrimitiveShape::Box { wx, wy, wz } => {
                sample_box_faces([wx, wy, wz], Vec3::zeros(), density, rng, &mut out);
            }
            PrimitiveShape::Cylinder { radius, height } => {
                sample_lateral(radius, height, 1.0, density, rng, &mut out);
                sample_annulus(0.0, radius, height / 2.0, 1.0, density, rng, &mut out);
                sample_annulus(0.0, radius, -height / 2.0, -1.0, density, rng, &mut out);
            }
            PrimitiveShape::Sphere { radius } => {
                let n = (self.surface_area() * density).round() as usize;
                for _ in 0..n {
                    let z: f64 = rng.random_range(-1.0..1.0);
                    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    let rho = (1.0 - z * z).max(0.0).sqrt();
                    let n_vec = Vec3::new(rho * phi.cos(), rho * phi.sin(), z);
                    out.push(SurfaceSample {
                        point: n_vec * radius,
                        normal: n_vec,
                    });
                }
            }
            PrimitiveShape::Tube {
                outer_radius,
                inner_radius,
                height,
            } => {
                sample_lateral(outer_radius, height, 1.0, density, rng, &mut out);
                sample_lateral(inner_radius, height, -1.0, density, rng, &mut out);
                sample_annulus(inner_radius, outer_radius, height / 2.0, 1.0, density, rng, &mut out);
                sample_annulus(inner_radius, outer_radius, -height / 2.0, -1.0, density, rng, &mut out);
            }
            PrimitiveShape::BoxPair {
                base,
                top,
                top_offset,
            } => {
                let (c1, c2) = Self::pair_centers(base, top, top_offset);
                let mut raw = Vec::new();
                sample_box_faces(base, c1, density, rng, &mut raw);
                let split = raw.len();
                sample_box_faces(top, c2, density, rng, &mut raw);
                let other = |i: usize| if i < split { (top, c2) } else { (base, c1) };
                for (i, s) in raw.into_iter().enumerate() {
                    let (w, c) = other(i);
                    let q = s.point - c;
                    let inside = q.x.abs() < w[0] / 2.0 - EPS
                        && q.y.abs() < w[1] / 2.0 - EPS
                        && q.z.abs() < w[2] / 2.0 - EPS;
                    if !inside {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    /// First surface hit of the ray `origin + t·dir` with `t ∈ [t_min, t_max]`.
    /// `dir` need not be unit length; `t` is in units of `dir`.
    pub fn ray_intersect(&self, origin: &Vec3, dir: &Vec3, t_min: f64, t_max: f64) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        let mut consider = |t: f64, normal: Vec3| {
            if t >= t_min && t <= t_max && best.is_none_or(|b| t < b.t) {
                best = Some(Hit {
                    t,
                    point: origin + dir * t,
                    normal,
                });
            }
        };
        match *self {
            PrimitiveShape::Box { wx, wy, wz } => {
                for (t, n) in box_intersections([wx, wy, wz], Vec3::zeros(), origin, dir) {
                    consider(t, n);
                }
            }
            PrimitiveShape::Cylinder { radius, height } => {
                cylinder_candidates(radius, height, origin, dir, &mut consider);
                cap_candidates(0.0, radius, height, origin, dir, &mut consider);
            }
            PrimitiveShape::Sphere { radius } => {
                let a = dir.norm_squared();
                let b = 2.0 * origin.dot(dir);
                let c = origin.norm_squared() - radius * radius;
                for t in solve_quadratic(a, b, c) {
                    let p = origin + dir * t;
                    consider(t, p / radius);
                }
            }
            PrimitiveShape::Tube {
                outer_radius,
                inner_radius,
                height,
            } => {
                cylinder_candidates(outer_radius, height, origin, dir, &mut consider);
                // Inner wall: outward normal of the solid points toward the axis.
                let mut inner = |t: f64, n: Vec3| consider(t, -n);
                cylinder_candidates(inner_radius, height, origin, dir, &mut inner);
                cap_candidates(inner_radius, outer_radius, height, origin, dir, &mut consider);
            }
            PrimitiveShape::BoxPair {
                base,
                top,
                top_offset,
            } => {
                let (c1, c2) = Self::pair_centers(base, top, top_offset);
                // A boundary hit of one box only counts when it lies on the
                // union surface, i.e. not strictly inside the other box.
                let strictly_inside = |p: &Vec3, w: [f64; 3], c: Vec3| {
                    (p.x - c.x).abs() < w[0] / 2.0 - EPS
                        && (p.y - c.y).abs() < w[1] / 2.0 - EPS
                        && (p.z - c.z).abs() < w[2] / 2.0 - EPS
                };
                for (t, n) in box_intersections(base, c1, origin, dir) {
                    let p = origin + dir * t;
                    if !strictly_inside(&p, top, c2) {
                        consider(t, n);
                    }
                }
                for (t, n) in box_intersections(top, c2, origin, dir) {
                    let p = origin + dir * t;
                    if !strictly_inside(&p, base, c1) {
                        consider(t, n);
                    }
                }
            }
        }
        best
    }
}

/// Entry and exit crossings of an axis-aligned box centered at `center`,
/// each with the outward face normal. Unordered, up to two.
fn box_intersections(w: [f64; 3], center: Vec3, origin: &Vec3, dir: &Vec3) -> Vec<(f64, Vec3)> {
    let o = origin - center;
    let half = [w[0] / 2.0, w[1] / 2.0, w[2] / 2.0];
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    let mut near_axis = usize::MAX;
    let mut far_axis = usize::MAX;
    for axis in 0..3 {
        if dir[axis].abs() < EPS {
            if o[axis].abs() > half[axis] {
                return Vec::new();
            }
            continue;
        }
        let inv = 1.0 / dir[axis];
        let mut t1 = (-half[axis] - o[axis]) * inv;
        let mut t2 = (half[axis] - o[axis]) * inv;
        if t1 > t2 {
            std::mem::swap(&mut t1, &mut t2);
        }
        if t1 > t_near {
            t_near = t1;
            near_axis = axis;
        }
        if t2 < t_far {
            t_far = t2;
            far_axis = axis;
        }
        if t_near > t_far {
            return Vec::new();
        }
    }
    let face_normal = |axis: usize, t: f64| {
        let mut n = Vec3::zeros();
        let p = o[axis] + t * dir[axis];
        n[axis] = if p >= 0.0 { 1.0 } else { -1.0 };
        n
    };
    let mut hits = Vec::with_capacity(2);
    if near_axis != usize::MAX {
        hits.push((t_near, face_normal(near_axis, t_near)));
    }
    if far_axis != usize::MAX && t_far > t_near {
        hits.push((t_far, face_normal(far_axis, t_far)));
    }
    hits
}

/// Lateral-wall crossings of a z-axis cylinder shell of `radius`.
/// `normal_sign = −1` is used for tube inner walls via the caller.
fn cylinder_candidates(
    radius: f64,
    height: f64,
    origin: &Vec3,
    dir: &Vec3,
    consider: &mut impl FnMut(f64, Vec3),
) {
    let a = dir.x * dir.x + dir.y * dir.y;
    let b = 2.0 * (origin.x * dir.x + origin.y * dir.y);
    let c = origin.x * origin.x + origin.y * origin.y - radius * radius;
    for t in solve_quadratic(a, b, c) {
        let p = origin + dir * t;
        if p.z.abs() <= height / 2.0 {
            consider(t, Vec3::new(p.x / radius, p.y / radius, 0.0));
        }
    }
}

/// Flat cap (annulus) crossings at z = ±height/2.
fn cap_candidates(
    inner: f64,
    outer: f64,
    height: f64,
    origin: &Vec3,
    dir: &Vec3,
    consider: &mut impl FnMut(f64, Vec3),
) {
    if dir.z.abs() < EPS {
        return;
    }
    for sign in [1.0, -1.0] {
        let t = (sign * height / 2.0 - origin.z) / dir.z;
        let p = origin + dir * t;
        let rho = p.xy().norm();
        if rho >= inner && rho <= outer {
            consider(t, Vec3::new(0.0, 0.0, sign));
        }
    }
}

fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() < EPS {
        if b.abs() < EPS {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    vec![(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]
}

fn sample_box_faces<R: Rng>(
    w: [f64; 3],
    center: Vec3,
    density: f64,
    rng: &mut R,
    out: &mut Vec<SurfaceSample>,
) {
    let half = [w[0] / 2.0, w[1] / 2.0, w[2] / 2.0];
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        let area = w[u] * w[v];
        let n = (area * density).round() as usize;
        for sign in [1.0f64, -1.0] {
            for _ in 0..n {
                let mut p = Vec3::zeros();
                p[axis] = sign * half[axis];
                p[u] = rng.random_range(-half[u]..half[u]);
                p[v] = rng.random_range(-half[v]..half[v]);
                let mut normal = Vec3::zeros();
                normal[axis] = sign;
                out.push(SurfaceSample {
                    point: p + center,
                    normal,
                });
            }
        }
    }
}

fn sample_lateral<R: Rng>(
    radius: f64,
    height: f64,
    normal_sign: f64,
    density: f64,
    rng: &mut R,
    out: &mut Vec<SurfaceSample>,
) {
    let n = (std::f64::consts::TAU * radius * height * density).round() as usize;
    for _ in 0..n {
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let z: f64 = rng.random_range(-height / 2.0..height / 2.0);
        let radial = Vec3::new(phi.cos(), phi.sin(), 0.0);
        out.push(SurfaceSample {
            point: radial * radius + Vec3::new(0.0, 0.0, z),
            normal: radial * normal_sign,
        });
    }
}

fn sample_annulus<R: Rng>(
    inner: f64,
    outer: f64,
    z: f64,
    normal_z: f64,
    density: f64,
    rng: &mut R,
    out: &mut Vec<SurfaceSample>,
) {
    let area = std::f64::consts::PI * (outer * outer - inner * inner);
    let n = (area * density).round() as usize;
    for _ in 0..n {
        let u: f64 = rng.random_range(0.0..1.0);
        let rho = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        out.push(SurfaceSample {
            point: Vec3::new(rho * phi.cos(), rho * phi.sin(), z),
            normal: Vec3::new(0.0, 0.0, normal_z),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_ray_hits_front_surface() {
        let s = PrimitiveShape::Sphere { radius: 0.05 };
        let hit = s
            .ray_intersect(&Vec3::new(-1.0, 0.0, 0.0), &Vec3::x(), 0.0, 10.0)
            .unwrap();
        assert_relative_eq!(hit.t, 0.95, epsilon = 1e-12);
        assert_relative_eq!((hit.normal - Vec3::new(-1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn box_ray_normal_is_entry_face() {
        let b = PrimitiveShape::Box {
            wx: 0.1,
            wy: 0.2,
            wz: 0.3,
        };
        let hit = b
            .ray_intersect(&Vec3::new(0.0, -1.0, 0.0), &Vec3::y(), 0.0, 10.0)
            .unwrap();
        assert_relative_eq!(hit.t, 0.9, epsilon = 1e-12);
        assert_relative_eq!((hit.normal - Vec3::new(0.0, -1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cylinder_diametral_ray_contacts_wall() {
        let c = PrimitiveShape::Cylinder {
            radius: 0.03,
            height: 0.25,
        };
        let hit = c
            .ray_intersect(&Vec3::new(0.05, 0.0, 0.0), &Vec3::new(-1.0, 0.0, 0.0), 0.0, 0.1)
            .unwrap();
        assert_relative_eq!(hit.t, 0.02, epsilon = 1e-12);
        assert_relative_eq!((hit.normal - Vec3::x()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cylinder_ray_above_top_misses() {
        let c = PrimitiveShape::Cylinder {
            radius: 0.03,
            height: 0.25,
        };
        assert!(c
            .ray_intersect(&Vec3::new(0.05, 0.0, 0.2), &Vec3::new(-1.0, 0.0, 0.0), 0.0, 0.1)
            .is_none());
    }

    #[test]
    fn tube_ray_through_hole_hits_inner_wall() {
        let t = PrimitiveShape::Tube {
            outer_radius: 0.045,
            inner_radius: 0.03,
            height: 0.05,
        };
        // Ray down the axis region, radially outward from inside the hole.
        let hit = t
            .ray_intersect(&Vec3::new(0.0, 0.0, 0.0), &Vec3::x(), 0.0, 1.0)
            .unwrap();
        assert_relative_eq!(hit.t, 0.03, epsilon = 1e-12);
        // Solid's outward normal on the inner wall points toward the axis.
        assert_relative_eq!((hit.normal - Vec3::new(-1.0, 0.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn box_pair_interface_is_not_surface() {
        let bp = PrimitiveShape::BoxPair {
            base: [0.06, 0.06, 0.04],
            top: [0.04, 0.04, 0.04],
            top_offset: [0.0, 0.0],
        };
        // Vertical ray through the middle: first surface from above is the
        // top box's top face at z = 0.06, not the interface at z = 0.02.
        let hit = bp
            .ray_intersect(&Vec3::new(0.0, 0.0, 1.0), &Vec3::new(0.0, 0.0, -1.0), 0.0, 2.0)
            .unwrap();
        assert_relative_eq!(hit.point.z, 0.06, epsilon = 1e-12);
        // From the side at interface height: base box wall at x = 0.03.
        let side = bp
            .ray_intersect(&Vec3::new(1.0, 0.0, 0.01), &Vec3::new(-1.0, 0.0, 0.0), 0.0, 2.0)
            .unwrap();
        assert_relative_eq!(side.point.x, 0.03, epsilon = 1e-12);
    }

    #[test]
    fn support_gives_resting_height() {
        let c = PrimitiveShape::Cylinder {
            radius: 0.03,
            height: 0.25,
        };
        assert_relative_eq!(c.support(&Vec3::z()), 0.125);
        assert_relative_eq!(c.support(&Vec3::x()), 0.03);
        let b = PrimitiveShape::Box {
            wx: 0.2,
            wy: 0.1,
            wz: 0.05,
        };
        assert_relative_eq!(b.support(&Vec3::new(0.0, 0.0, -1.0)), 0.025);
    }

    #[test]
    fn sample_counts_track_area() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = PrimitiveShape::Cylinder {
            radius: 0.03,
            height: 0.25,
        };
        let density = 40_000.0;
        let samples = c.sample_surface(density, &mut rng);
        let expected = c.surface_area() * density;
        let n = samples.len() as f64;
        assert!(n > 0.9 * expected && n < 1.1 * expected);
        for s in samples.iter().step_by(97) {
            assert_relative_eq!(s.normal.norm(), 1.0, epsilon = 1e-9);
        }
    }

    /// Independent first-hit oracle: march the ray at `step` until the
    /// containment predicate flips, then bisect the crossing.
    pub(crate) fn sweep_first_hit(
        shape: &PrimitiveShape,
        origin: &Vec3,
        dir: &Vec3,
        t_max: f64,
        step: f64,
    ) -> Option<f64> {
        let mut prev_t = 0.0;
        let mut prev_inside = shape.contains(origin);
        let mut t = step;
        while t <= t_max {
            let inside = shape.contains(&(origin + dir * t));
            if inside != prev_inside {
                let (mut lo, mut hi) = (prev_t, t);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if shape.contains(&(origin + dir * mid)) == prev_inside {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            prev_t = t;
            prev_inside = inside;
            t += step;
        }
        None
    }

    #[test]
    fn analytic_hits_agree_with_containment_sweep() {
        // Analytic first-hit vs a dense sweep along the ray (independent
        // containment predicate), for every shape kind.
        let shapes = [
            PrimitiveShape::Box {
                wx: 0.12,
                wy: 0.07,
                wz: 0.05,
            },
            PrimitiveShape::Cylinder {
                radius: 0.03,
                height: 0.2,
            },
            PrimitiveShape::Sphere { radius: 0.05 },
            PrimitiveShape::Tube {
                outer_radius: 0.05,
                inner_radius: 0.03,
                height: 0.06,
            },
            PrimitiveShape::BoxPair {
                base: [0.08, 0.06, 0.04],
                top: [0.05, 0.04, 0.04],
                top_offset: [0.015, 0.01],
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for shape in shapes {
            let mut checked = 0;
            while checked < 25 {
                let target = Vec3::new(
                    rng.random_range(-0.01..0.01),
                    rng.random_range(-0.01..0.01),
                    rng.random_range(-0.01..0.01),
                ) + shape.solid_centroid();
                let origin = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
                .normalize()
                    * 0.5
                    + target;
                let dir = (target - origin).normalize();
                let Some(hit) = shape.ray_intersect(&origin, &dir, 0.0, 2.0) else {
                    continue;
                };
                // Skip grazing hits where the crossing is ill-conditioned.
                if hit.normal.dot(&dir).abs() < 0.1 {
                    continue;
                }
                let brute = sweep_first_hit(&shape, &origin, &dir, 2.0, 1e-4)
                    .expect("sweep missed an analytic hit");
                assert!(
                    (brute - hit.t).abs() < 1e-3,
                    "{shape:?}: analytic {} vs sweep {}",
                    hit.t,
                    brute
                );
                checked += 1;
            }
        }
    }
}
