//! Small numeric helpers shared across the pipeline modules.

use crate::{Mat3, Vec3};

pub const UNIT_Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

/// Linear-interpolation percentile of an unsorted slice, `q` in [0, 100].
///
/// Uses the `(n-1)`-rank convention: `rank = q/100 * (n-1)`, interpolating
/// between the neighbouring order statistics. A single value is its own
/// percentile for every `q`.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value"));
    let rank = (q / 100.0) * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = rank - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// Flips `v` so its largest-magnitude component is positive.
///
/// Ties pick the lowest index, so the result is deterministic for every
/// input. Eigenvector signs are arbitrary; this pins them.
pub fn canonicalize_sign(v: Vec3) -> Vec3 {
    let mut idx = 0;
    for i in 1..3 {
        if v[i].abs() > v[idx].abs() {
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        -v
    } else {
        v
    }
}

/// Eigen-decomposition of a symmetric 3×3 matrix with eigenvalues sorted
/// descending and eigenvectors paired accordingly.
pub fn sorted_symmetric_eigen(m: &Mat3) -> ([f64; 3], [Vec3; 3]) {
    let eig = nalgebra::SymmetricEigen::new(*m);
    let mut pairs: Vec<(f64, Vec3)> = (0..3)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("non-finite eigenvalue"));
    (
        [pairs[0].0, pairs[1].0, pairs[2].0],
        [pairs[0].1, pairs[1].1, pairs[2].1],
    )
}

/// Canonical right-handed orthonormal triple from paired eigenvectors:
/// the first two axes get deterministic signs, the third is their cross
/// product (flipping it when the eigen solver returned the mirror).
pub fn canonical_axes(vectors: [Vec3; 3]) -> [Vec3; 3] {
    let u1 = canonicalize_sign(vectors[0].normalize());
    let u2 = canonicalize_sign(vectors[1].normalize());
    let u3 = u1.cross(&u2);
    [u1, u2, u3]
}

/// Horizontal (xy-plane) projection of a vector, not normalized.
pub fn horizontal_projection(v: &Vec3) -> Vec3 {
    Vec3::new(v.x, v.y, 0.0)
}

/// Max-norm deviation of `r`ᵀ`r` from the identity.
pub fn orthonormality_error(r: &Mat3) -> f64 {
    let e = r.transpose() * r - Mat3::identity();
    e.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
