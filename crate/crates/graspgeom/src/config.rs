//! Whole-pipeline configuration: one JSON document, unknown keys rejected,
//! every field optional with the documented defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloudio::{Aabb, Point3, RigidTransform};
use crate::eval::StabilityParams;
use crate::grasp_gen::{GraspConfig, GripperSpec};
use crate::plane_seg::RansacParams;
use crate::synthscene::SensorModel;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// World-frame crop box retaining the reachable workspace.
    pub workspace: Aabb,
    pub ransac: RansacParams,
    pub gripper: GripperSpec,
    pub grasp: GraspConfig,
    pub stability: StabilityParams,
    pub sensor: SensorModel,
    /// Camera-to-world extrinsics applied to loaded clouds.
    pub camera: RigidTransform,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            workspace: Aabb {
                min: Point3::new(-0.35, -0.35, -0.05),
                max: Point3::new(0.35, 0.35, 0.50),
            },
            ransac: RansacParams::default(),
            gripper: GripperSpec::default(),
            grasp: GraspConfig::default(),
            stability: StabilityParams::default(),
            sensor: SensorModel::default(),
            camera: default_camera(),
        }
    }
}

/// Overhead camera 1.72 m above the table looking straight down:
/// camera x maps to world x, camera y to world −y, camera z (optical
/// axis) to world −z.
pub fn default_camera() -> RigidTransform {
    RigidTransform {
        rotation: [1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0],
        translation: [0.0, 0.0, 1.72],
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: PipelineConfig = serde_json::from_str(&text)?;
        cfg.validate().map_err(ConfigError::Invalid)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        let ws = &self.workspace;
        if ws.min.x > ws.max.x || ws.min.y > ws.max.y || ws.min.z > ws.max.z {
            return Err("workspace min exceeds max".into());
        }
        self.ransac.validate()?;
        self.gripper.validate()?;
        self.grasp.validate(&self.gripper)?;
        self.stability.validate()?;
        self.sensor.validate()?;
        self.camera.validate().map_err(|e| e.to_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn default_camera_maps_origin_to_table_center() {
        let cam = default_camera();
        cam.validate().unwrap();
        let p = cam.apply(&Point3::new(0.0, 0.0, 1.72));
        assert!((p.x.abs() + p.y.abs() + p.z.abs()) < 1e-12);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"graper": {}}"#;
        assert!(serde_json::from_str::<PipelineConfig>(text).is_err());
    }

    #[test]
    fn partial_config_fills_defaults() {
        let text = r#"{"ransac": {"seed": 99}}"#;
        let cfg: PipelineConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.ransac.seed, 99);
        assert_eq!(cfg.ransac.max_iterations, 500);
        assert_eq!(cfg.gripper.finger_length, 0.06);
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = PipelineConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: PipelineConfig = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back.gripper.max_opening, cfg.gripper.max_opening);
    }
}
