use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ConfigError, ExperimentConfig, TargetEta};
use crate::cover::{greedy_set_cover, CoverSolution};
use crate::geometry::{footprint, ModelParams, PredicateMode, SensorPose};
use crate::grid::{analytic_min_nodes, coverage_ratio, rasterize, CellSet, CoverageState, Region};
use crate::relocate::{relocate_all, RelocationPlan};
use crate::tilt::optimize_all;

/// Random initial deployment.
///
/// Uses ChaCha8 seeded with `seed_from_u64(config.seed)`. Per node, in order:
/// `x ~ U[0, width)`, `y ~ U[0, height)`, `z ~ U[zmin, zmax)`,
/// `theta ~ U[0, 2π)`, `gamma ~ U[beta, K]`.
pub fn deploy_random(config: &ExperimentConfig, params: &ModelParams) -> Vec<SensorPose> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut uniform = |lo: f64, hi: f64| if hi > lo { rng.gen_range(lo..hi) } else { lo };
    (0..config.nodes)
        .map(|_| {
            let x = uniform(0.0, config.width);
            let y = uniform(0.0, config.height);
            let z = uniform(config.z_min, config.z_max);
            let theta = uniform(0.0, TAU);
            let gamma = uniform(params.beta, params.k_max);
            SensorPose::new(x, y, z, theta, gamma)
        })
        .collect()
}

pub fn rasterize_all(
    poses: &[SensorPose],
    params: &ModelParams,
    region: &Region,
    mode: PredicateMode,
) -> Vec<CellSet> {
    poses
        .par_iter()
        .map(|pose| {
            // poses produced by the pipeline always satisfy the model
            let fp = footprint(pose, params).expect("pose within the trapezoid regime");
            rasterize(&fp, pose, params, region, mode)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub deploy: Duration,
    pub tilt: Duration,
    pub cover: Duration,
    pub relocate: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub seed: u64,
    pub nodes: usize,
    pub total_cells: usize,
    pub covered_initial: usize,
    pub covered_tilted: usize,
    pub covered_final: usize,
    pub eta_initial: f64,
    pub eta_tilted: f64,
    pub eta_final: f64,
    pub target_eta: f64,
    pub m_prime: usize,
    pub redundant: usize,
    pub shortfall: bool,
    /// Mean untruncated footprint area after tilt tuning.
    pub mean_footprint_area: f64,
    /// Node count from the independent-placement bound, before rounding.
    pub analytic_m: Option<f64>,
    pub moves_accepted: usize,
    pub moves_rejected: usize,
    pub timings: PhaseTimings,
}

impl RunReport {
    pub fn analytic_m_ceil(&self) -> Option<u64> {
        self.analytic_m.map(|m| m.ceil().max(0.0) as u64)
    }

    /// Tilt tuning lowered total coverage for this seed.
    pub fn tilt_regressed(&self) -> bool {
        self.covered_tilted < self.covered_initial
    }
}

/// Snapshot of the network after one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSnapshot {
    pub poses: Vec<SensorPose>,
    pub covered: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub region: Region,
    pub report: RunReport,
    pub initial: PhaseSnapshot,
    pub tilted: PhaseSnapshot,
    pub final_: PhaseSnapshot,
    pub cover: CoverSolution,
    pub plan: RelocationPlan,
    pub state: CoverageState,
}

/// Deploy, tune tilts, pick redundant nodes and relocate them.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<RunOutcome, ConfigError> {
    let (params, region) = config.validate()?;
    let mode = config.predicate;
    let total = region.cell_count();

    let t0 = Instant::now();
    let initial_poses = deploy_random(config, &params);
    let mut state = CoverageState::from_sets(total, rasterize_all(&initial_poses, &params, &region, mode));
    let covered_initial = state.covered_len();
    let eta_initial = coverage_ratio(&state);
    let initial = PhaseSnapshot {
        poses: initial_poses.clone(),
        covered: state.covered_mask(),
    };
    let deploy_time = t0.elapsed();

    let t1 = Instant::now();
    let tilted_poses = optimize_all(&initial_poses, &params, &region);
    let changed: Vec<usize> = (0..tilted_poses.len())
        .filter(|&i| tilted_poses[i] != initial_poses[i])
        .collect();
    let fresh = rasterize_all(
        &changed.iter().map(|&i| tilted_poses[i]).collect::<Vec<_>>(),
        &params,
        &region,
        mode,
    );
    for (&i, cells) in changed.iter().zip(fresh) {
        state.replace_node(i, cells);
    }
    let covered_tilted = state.covered_len();
    let eta_tilted = coverage_ratio(&state);
    let tilted = PhaseSnapshot {
        poses: tilted_poses.clone(),
        covered: state.covered_mask(),
    };
    let tilt_time = t1.elapsed();

    let t2 = Instant::now();
    let target_eta = match config.target_eta {
        TargetEta::PostTilt => eta_tilted,
        TargetEta::Explicit(t) => t,
    };
    let cover = greedy_set_cover(state.family(), &CellSet::full(total), target_eta);
    let mean_footprint_area = if tilted_poses.is_empty() {
        0.0
    } else {
        tilted_poses
            .iter()
            .map(|p| footprint(p, &params).map(|f| f.area).unwrap_or(0.0))
            .sum::<f64>()
            / tilted_poses.len() as f64
    };
    let analytic_m = analytic_min_nodes(target_eta, mean_footprint_area, region.area()).ok();
    let cover_time = t2.elapsed();

    let t3 = Instant::now();
    let mut final_poses = tilted_poses;
    let plan = relocate_all(&cover, &mut final_poses, &mut state, &params, &region, mode);
    let covered_final = state.covered_len();
    let eta_final = coverage_ratio(&state);
    let final_ = PhaseSnapshot {
        poses: final_poses,
        covered: state.covered_mask(),
    };
    let relocate_time = t3.elapsed();

    let report = RunReport {
        seed: config.seed,
        nodes: config.nodes,
        total_cells: total,
        covered_initial,
        covered_tilted,
        covered_final,
        eta_initial,
        eta_tilted,
        eta_final,
        target_eta,
        m_prime: cover.m_prime(),
        redundant: cover.redundant.len(),
        shortfall: cover.shortfall,
        mean_footprint_area,
        analytic_m,
        moves_accepted: plan.moves.len(),
        moves_rejected: plan.rejected.len(),
        timings: PhaseTimings {
            deploy: deploy_time,
            tilt: tilt_time,
            cover: cover_time,
            relocate: relocate_time,
        },
    };
    Ok(RunOutcome {
        config: config.clone(),
        region,
        report,
        initial,
        tilted,
        final_,
        cover,
        plan,
        state,
    })
}
