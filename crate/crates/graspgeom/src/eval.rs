//! Geometric grasp-outcome simulation, the raw-centroid top-only baseline,
//! the 75-trial benchmark, and an exact Fisher significance test.
//!
//! The physical stability protocol maps onto staged geometric proxies:
//! an empty gripper at check start is fewer than two finger contacts, the
//! static hold is an antipodal friction-cone test, and the arm shake is a
//! torque-margin threshold (distance from the contact line to the true
//! center of mass).

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloudio::{apply_rigid_transform, point_as_array};
use crate::config::PipelineConfig;
use crate::grasp_gen::{
    build_orientation, closing_width, euler_from_rotation, rotation_to_row_major, GraspError,
    GraspMode, GraspPlan, GraspConfig, GripperSpec,
};
use crate::math::{point_segment_distance, UNIT_Z};
use crate::object_model::PrincipalAxes;
use crate::pipeline::{detect_grasp, detect_grasp_baseline};
use crate::synthscene::{generate_scene, SceneTruth, TrialDescriptor};
use crate::{Frame, Point3, PointCloud, Vec3};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("benchmark suite is empty")]
    EmptySuite,
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("scene generation failed: {0}")]
    Scene(String),
}

/// Outcome taxonomy of one grasp trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    /// Gripper empty before the stability check (or no executable plan).
    FailedAttempt,
    /// Lost during the static hold (friction-cone violation).
    Unstable,
    /// Lost during the shake (torque margin exceeded).
    Dropped,
    Success,
}

/// A finger-object contact.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Contact {
    #[serde(with = "point_as_array")]
    pub point: Point3,
    /// Outward surface normal at the contact.
    pub normal: [f64; 3],
}

/// Simulation verdict with diagnostics.
#[derive(Debug, Clone)]
pub struct GraspOutcome {
    pub kind: OutcomeKind,
    pub contacts: Vec<Contact>,
    /// Distance from the contact line to the true centroid, when two
    /// contacts were made.
    pub torque_margin: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityParams {
    /// Contact friction coefficient for the cone test.
    pub friction_mu: f64,
    /// Largest tolerated contact-line-to-centroid distance (m).
    pub torque_margin_max: f64,
}

impl Default for StabilityParams {
    fn default() -> Self {
        Self {
            friction_mu: 0.5,
            torque_margin_max: 0.02,
        }
    }
}

impl StabilityParams {
    pub fn validate(&self) -> Result<(), String> {
        if !self.friction_mu.is_finite() || self.friction_mu <= 0.0 {
            return Err("friction_mu must be > 0".into());
        }
        if !self.torque_margin_max.is_finite() || self.torque_margin_max <= 0.0 {
            return Err("torque_margin_max must be > 0".into());
        }
        Ok(())
    }
}

/// Benchmark method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ours,
    /// The comparison method as characterized in this pipeline: raw mean
    /// centroid, top grasps only.
    Baseline,
}

impl Method {
    pub fn report_name(&self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::Baseline => "baseline-as-described",
        }
    }
}

/// One row of an evaluation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub shape: String,
    pub pose: String,
    pub outcome: OutcomeKind,
    pub torque_margin: Option<f64>,
}

/// Failure rates in percent, one decimal.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateSummary {
    pub failed_pct: f64,
    pub unstable_pct: f64,
    pub dropped_pct: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub seed: u64,
    pub trial_count: usize,
    pub trials: Vec<TrialRecord>,
    pub rates: RateSummary,
}

impl EvalReport {
    pub fn count(&self, kind: OutcomeKind) -> usize {
        self.trials.iter().filter(|t| t.outcome == kind).count()
    }
}

/// Raw-centroid baseline: the grasp point is the plain 3-D mean of the
/// extracted object cloud (no plane correction) and the mode is always a
/// top grasp. Orientation matches the primary top branch so the two
/// methods differ only in what the comparison isolates.
pub fn baseline_plan(
    object: &PointCloud,
    axes: &PrincipalAxes,
    gripper: &GripperSpec,
    cfg: &GraspConfig,
) -> Result<GraspPlan, GraspError> {
    if object.is_empty() {
        // Mirrors the primary path's empty-object contract.
        return Err(GraspError::DegenerateAxes);
    }
    let mean = object.points.iter().map(|p| p.to_vec()).sum::<Vec3>() / object.len() as f64;
    let u = UNIT_Z;
    let rotation = build_orientation(&u, GraspMode::Top, &axes.axes)?;
    let grasp = mean + gripper.finger_length * u;
    let pregrasp = grasp + (cfg.h_pre - gripper.finger_length) * u;
    let x_t: Vec3 = rotation.column(0).into_owned();
    let z_t: Vec3 = rotation.column(2).into_owned();
    let est_width = closing_width(object, &grasp, &x_t, &z_t, gripper.finger_length);
    Ok(GraspPlan {
        mode: GraspMode::Top,
        grasp_position: Point3::from_vec(grasp),
        pregrasp_position: Point3::from_vec(pregrasp),
        rotation: rotation_to_row_major(&rotation),
        euler_xyz: euler_from_rotation(&rotation),
        offset_axis: [u.x, u.y, u.z],
        est_width,
    })
}

/// Sampling density for the palm collision test, points/m².
const PALM_TEST_DENSITY: f64 = 200_000.0;

/// Staged geometric outcome simulation against the analytic truth shape.
///
/// 1. Palm/approach collision: object material behind the palm plane
///    inside the gripper footprint fails the attempt.
/// 2. Finger closing: rays cast toward each other along ∓x_t through the
///    fingertip line; fewer than two entering contacts is an empty gripper.
/// 3. Static hold: each contact normal must oppose its closing direction
///    within the friction cone atan(μ), else the grasp is unstable.
/// 4. Shake: contact-line distance to the true centroid beyond the torque
///    margin drops the object.
pub fn simulate_outcome(
    plan: &GraspPlan,
    truth: &SceneTruth,
    gripper: &GripperSpec,
    params: &StabilityParams,
) -> GraspOutcome {
    let rotation = plan.rotation_matrix();
    let x_t: Vec3 = rotation.column(0).into_owned();
    let y_t: Vec3 = rotation.column(1).into_owned();
    let z_t: Vec3 = rotation.column(2).into_owned();
    let grasp = plan.grasp_position.to_vec();
    let half = gripper.max_opening / 2.0;

    // Stage 1: palm region test (sampled surface + embedded-center probe).
    let palm_probe = grasp - 1e-3 * z_t;
    let mut collision = truth.contains_world(&palm_probe);
    if !collision {
        for s in truth.surface_points_world(PALM_TEST_DENSITY) {
            let v = s - grasp;
            if v.dot(&z_t) < 0.0 && v.dot(&x_t).abs() <= half && v.dot(&y_t).abs() <= half {
                collision = true;
                break;
            }
        }
    }
    if collision {
        return GraspOutcome {
            kind: OutcomeKind::FailedAttempt,
            contacts: Vec::new(),
            torque_margin: None,
        };
    }

    // Stage 2: finger closing along the fingertip line.
    let tip_center = grasp + gripper.finger_length * z_t;
    let mut contacts = Vec::new();
    let mut closing_dirs = Vec::new();
    for side in [1.0, -1.0] {
        let origin = tip_center + side * half * x_t;
        let dir = -side * x_t;
        if let Some(hit) = truth.ray_intersect_world(&origin, &dir, 0.0, gripper.max_opening) {
            if hit.normal.dot(&dir) < 0.0 {
                contacts.push(Contact {
                    point: Point3::from_vec(hit.point),
                    normal: [hit.normal.x, hit.normal.y, hit.normal.z],
                });
                closing_dirs.push(dir);
            }
        }
    }
    if contacts.len() < 2 {
        return GraspOutcome {
            kind: OutcomeKind::FailedAttempt,
            contacts,
            torque_margin: None,
        };
    }

    // Stage 3: friction-cone antipodality.
    let cos_limit = 1.0 / (1.0 + params.friction_mu * params.friction_mu).sqrt();
    for (c, d) in contacts.iter().zip(&closing_dirs) {
        let n = Vec3::new(c.normal[0], c.normal[1], c.normal[2]);
        if n.dot(&(-d)) < cos_limit {
            return GraspOutcome {
                kind: OutcomeKind::Unstable,
                contacts,
                torque_margin: None,
            };
        }
    }

    // Stage 4: shake proxy via torque margin.
    let a = contacts[0].point.to_vec();
    let b = contacts[1].point.to_vec();
    let margin = point_segment_distance(&truth.true_centroid.to_vec(), &a, &b);
    let kind = if margin > params.torque_margin_max {
        OutcomeKind::Dropped
    } else {
        OutcomeKind::Success
    };
    GraspOutcome {
        kind,
        contacts,
        torque_margin: Some(margin),
    }
}

fn round_1dp(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Runs the full pipeline of `method` on every trial and aggregates the
/// failure taxonomy. Pipeline errors (no object found, infeasible width,
/// palm or table collision, degenerate axes) count as failed attempts: a
/// grasp that could not be executed.
pub fn run_benchmark(
    suite: &[TrialDescriptor],
    method: Method,
    seed: u64,
    cfg: &PipelineConfig,
) -> Result<EvalReport, EvalError> {
    if suite.is_empty() {
        return Err(EvalError::EmptySuite);
    }
    let world_to_camera = cfg.camera.inverse();
    let mut trials = Vec::with_capacity(suite.len());
    for trial in suite {
        let (world_cloud, truth) = generate_scene(&trial.shape, &trial.pose, &trial.sensor)
            .map_err(|e| EvalError::Scene(e.to_string()))?;
        let camera_cloud = apply_rigid_transform(&world_cloud, &world_to_camera, Frame::Camera)
            .map_err(|e| EvalError::Scene(e.to_string()))?;
        let plan = match method {
            Method::Ours => detect_grasp(&camera_cloud, cfg),
            Method::Baseline => detect_grasp_baseline(&camera_cloud, cfg),
        };
        let (outcome, torque_margin) = match plan {
            Ok(plan) => {
                let sim = simulate_outcome(&plan, &truth, &cfg.gripper, &cfg.stability);
                (sim.kind, sim.torque_margin)
            }
            Err(_) => (OutcomeKind::FailedAttempt, None),
        };
        trials.push(TrialRecord {
            trial: trial.index,
            shape: trial.shape_label.clone(),
            pose: trial.pose_label.clone(),
            outcome,
            torque_margin,
        });
    }
    trials.sort_by_key(|t| t.trial);

    let n = trials.len();
    let count =
        |kind: OutcomeKind| trials.iter().filter(|t| t.outcome == kind).count() as f64;
    let rates = RateSummary {
        failed_pct: round_1dp(100.0 * count(OutcomeKind::FailedAttempt) / n as f64),
        unstable_pct: round_1dp(100.0 * count(OutcomeKind::Unstable) / n as f64),
        dropped_pct: round_1dp(100.0 * count(OutcomeKind::Dropped) / n as f64),
    };
    Ok(EvalReport {
        method: method.report_name().to_string(),
        seed,
        trial_count: n,
        trials,
        rates,
    })
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut result = BigUint::one();
    for i in 0..k {
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    result
}

/// Two-sided Fisher exact test on the 2×2 table
/// `[[failures_a, n_a − failures_a], [failures_b, n_b − failures_b]]`.
///
/// The hypergeometric distribution is enumerated exactly in big-integer
/// arithmetic; the p-value sums every table whose probability does not
/// exceed the observed one, and is converted to f64 only at the end.
pub fn significance_test(
    failures_a: u64,
    n_a: u64,
    failures_b: u64,
    n_b: u64,
) -> Result<f64, EvalError> {
    if failures_a > n_a || failures_b > n_b {
        return Err(EvalError::InvalidCounts(format!(
            "failures exceed trials: {failures_a}/{n_a}, {failures_b}/{n_b}"
        )));
    }
    if n_a == 0 || n_b == 0 {
        return Err(EvalError::InvalidCounts("empty group".into()));
    }
    let total_failures = failures_a + failures_b;
    let k_min = total_failures.saturating_sub(n_b);
    let k_max = total_failures.min(n_a);

    // weight(k) = C(n_a, k)·C(n_b, K−k); the probability denominator is
    // the weight sum (Vandermonde: C(n_a+n_b, K)).
    let weights: Vec<BigUint> = (k_min..=k_max)
        .map(|k| binomial(n_a, k) * binomial(n_b, total_failures - k))
        .collect();
    let observed = &weights[(failures_a - k_min) as usize];
    let denom: BigUint = weights.iter().sum();
    let numer: BigUint = weights.iter().filter(|w| *w <= observed).sum();

    let p = BigRational::new(numer.into(), denom.into())
        .to_f64()
        .unwrap_or(0.0);
    Ok(p.min(1.0))
}
