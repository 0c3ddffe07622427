//! Per-node tilt tuning.
//!
//! Each node is assigned to the region face its azimuth points at, and its
//! tilt is chosen so the far edge midpoint lands exactly on that face:
//! `gamma = atan(dist / z) - beta`, clamped to `[beta, K]`.

use std::f64::consts::FRAC_PI_4;

use crate::geometry::{ModelParams, SensorPose};
use crate::grid::Region;

/// Region face a node is aimed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryClass {
    /// `x = width`
    Set1,
    /// `y = height`
    Set2,
    /// `x = 0`
    Set3,
    /// `y = 0`
    Set4,
}

/// Azimuth quadrant: `[-45°, 45°)` → Set1, `[45°, 135°)` → Set2,
/// `[135°, 225°)` → Set3, `[225°, 315°)` → Set4.
pub fn classify(pose: &SensorPose, _region: &Region) -> BoundaryClass {
    let t = pose.theta;
    if !(FRAC_PI_4..7.0 * FRAC_PI_4).contains(&t) {
        BoundaryClass::Set1
    } else if t < 3.0 * FRAC_PI_4 {
        BoundaryClass::Set2
    } else if t < 5.0 * FRAC_PI_4 {
        BoundaryClass::Set3
    } else {
        BoundaryClass::Set4
    }
}

/// Ground distance from the node to the face it is aimed at.
pub fn faced_distance(pose: &SensorPose, region: &Region) -> f64 {
    match classify(pose, region) {
        BoundaryClass::Set1 => region.width - pose.x,
        BoundaryClass::Set2 => region.height - pose.y,
        BoundaryClass::Set3 => pose.x,
        BoundaryClass::Set4 => pose.y,
    }
}

/// Tilt that puts the far edge on the faced boundary, before clamping.
pub fn raw_tilt(pose: &SensorPose, params: &ModelParams, region: &Region) -> f64 {
    (faced_distance(pose, region) / pose.z).atan() - params.beta
}

pub fn optimal_tilt(pose: &SensorPose, params: &ModelParams, region: &Region) -> f64 {
    raw_tilt(pose, params, region).clamp(params.beta, params.k_max)
}

pub fn apply_optimal_tilt(pose: &SensorPose, params: &ModelParams, region: &Region) -> SensorPose {
    pose.with_gamma(optimal_tilt(pose, params, region))
}

pub fn optimize_all(poses: &[SensorPose], params: &ModelParams, region: &Region) -> Vec<SensorPose> {
    poses
        .iter()
        .map(|p| apply_optimal_tilt(p, params, region))
        .collect()
}
