//! Moves redundant nodes into uncovered territory.
//!
//! Redundant nodes are visited largest footprint first. Each one is sent to
//! the uncovered cell with the most uncovered neighbours inside a disc of the
//! node's footprint area, re-aimed over a fixed set of azimuths, and kept only
//! if the move strictly increases total coverage.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::geometry::{footprint, footprint_covers, ModelParams, Point2, PredicateMode, SensorPose};
use crate::grid::{rasterize, CellSet, CoverageState, Region};
use crate::tilt::optimal_tilt;
use crate::cover::CoverSolution;

/// Candidate azimuths tried per move.
pub const AZIMUTH_CANDIDATES: usize = 16;

const PLACEMENT_ITERS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelocateError {
    #[error("no uncovered cells remain")]
    EmptyUncovered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Move {
    pub node: usize,
    pub old_pose: SensorPose,
    pub new_pose: SensorPose,
    pub target_cell: usize,
    /// Net change in covered cells.
    pub cells_gained: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RelocationOutcome {
    Accepted(Move),
    /// No candidate pose increased total coverage; the node stays put.
    Rejected,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RelocationPlan {
    pub moves: Vec<Move>,
    pub rejected: Vec<usize>,
    pub covered_before: usize,
    pub covered_after: usize,
}

/// Redundant ids by descending in-region footprint cell count, then id.
pub fn rank_redundant(redundant: &[usize], family: &[CellSet]) -> Vec<usize> {
    let mut order = redundant.to_vec();
    order.sort_by(|&a, &b| family[b].len().cmp(&family[a].len()).then(a.cmp(&b)));
    order
}

/// Radius of the disc with the same area as a footprint.
pub fn equivalent_radius(area: f64) -> f64 {
    (area / PI).sqrt()
}

/// Uncovered cell whose disc of `radius` holds the most uncovered cell
/// centers; ties go to the lowest index.
pub fn best_target_cell(
    uncovered: &CellSet,
    radius: f64,
    region: &Region,
) -> Result<usize, RelocateError> {
    if uncovered.is_empty() {
        return Err(RelocateError::EmptyUncovered);
    }
    let (rows, cols) = (region.rows(), region.cols());
    // per-row prefix sums of the uncovered mask
    let stride = cols + 1;
    let mut prefix = vec![0u32; rows * stride];
    {
        let mut mask = vec![false; rows * cols];
        for c in uncovered.iter() {
            mask[c] = true;
        }
        for r in 0..rows {
            let base = r * stride;
            for c in 0..cols {
                prefix[base + c + 1] = prefix[base + c] + mask[r * cols + c] as u32;
            }
        }
    }
    let r_cells = (radius / region.cell_size).max(0.0);
    let r2 = r_cells * r_cells;
    let reach = r_cells.floor() as i64;
    let half_widths: Vec<(i64, i64)> = (-reach..=reach)
        .map(|dy| {
            let rem = r2 - (dy * dy) as f64;
            let mut w = rem.max(0.0).sqrt().floor() as i64;
            while ((w + 1) * (w + 1)) as f64 <= rem {
                w += 1;
            }
            while w > 0 && (w * w) as f64 > rem {
                w -= 1;
            }
            (dy, w)
        })
        .collect();

    let mut best = (0u32, usize::MAX);
    for cell in uncovered.iter() {
        let (row, col) = region.row_col(cell);
        let mut score = 0u32;
        for &(dy, w) in &half_widths {
            let rr = row as i64 + dy;
            if rr < 0 || rr >= rows as i64 {
                continue;
            }
            let lo = (col as i64 - w).max(0) as usize;
            let hi = (col as i64 + w).min(cols as i64 - 1) as usize;
            let base = rr as usize * stride;
            score += prefix[base + hi + 1] - prefix[base + lo];
        }
        if best.1 == usize::MAX || score > best.0 {
            best = (score, cell);
        }
    }
    Ok(best.1)
}

/// Pose with azimuth `theta` whose footprint centroid sits on `target`,
/// with the tilt re-tuned for the new foot point. `None` when the foot point
/// would leave the region.
pub fn place_centroid(
    pose: &SensorPose,
    theta: f64,
    target: Point2,
    params: &ModelParams,
    region: &Region,
) -> Option<SensorPose> {
    let mut gamma = pose.gamma;
    let mut placed = None;
    for _ in 0..PLACEMENT_ITERS {
        let probe = SensorPose::new(0.0, 0.0, pose.z, theta, gamma);
        let c = footprint(&probe, params).ok()?.centroid();
        let ground = Point2::new(target.x - c.x, target.y - c.y);
        if !region.contains(ground) {
            return None;
        }
        let candidate = SensorPose::new(ground.x, ground.y, pose.z, theta, gamma);
        let tuned = optimal_tilt(&candidate, params, region);
        placed = Some(candidate.with_gamma(tuned));
        if (tuned - gamma).abs() <= 1e-12 {
            break;
        }
        gamma = tuned;
    }
    placed
}

/// Tries every candidate azimuth for `node` around `target_cell` and applies
/// the best one to `state` if it gains coverage.
#[allow(clippy::too_many_arguments)]
pub fn relocate_node(
    node: usize,
    pose: &SensorPose,
    target_cell: usize,
    params: &ModelParams,
    region: &Region,
    mode: PredicateMode,
    state: &mut CoverageState,
) -> RelocationOutcome {
    let target = region.cell_center(target_cell);
    let mut best: Option<(i64, SensorPose, CellSet)> = None;
    for k in 0..AZIMUTH_CANDIDATES {
        let theta = TAU * k as f64 / AZIMUTH_CANDIDATES as f64;
        let Some(candidate) = place_centroid(pose, theta, target, params, region) else {
            continue;
        };
        let Ok(fp) = footprint(&candidate, params) else {
            continue;
        };
        if !footprint_covers(&fp, candidate.theta, params.alpha, mode, target) {
            continue;
        }
        let cells = rasterize(&fp, &candidate, params, region, mode);
        let net = state.net_gain_if_replaced(node, &cells);
        if best.as_ref().is_none_or(|(b, _, _)| net > *b) {
            best = Some((net, candidate, cells));
        }
    }
    match best {
        Some((net, new_pose, cells)) if net > 0 => {
            let before = state.covered_len();
            state.replace_node(node, cells);
            debug_assert_eq!(state.covered_len() as i64 - before as i64, net);
            RelocationOutcome::Accepted(Move {
                node,
                old_pose: *pose,
                new_pose,
                target_cell,
                cells_gained: net as usize,
            })
        }
        _ => RelocationOutcome::Rejected,
    }
}

/// Relocates every redundant node at most once, in rank order, updating
/// `poses` and `state` as moves are accepted.
pub fn relocate_all(
    solution: &CoverSolution,
    poses: &mut [SensorPose],
    state: &mut CoverageState,
    params: &ModelParams,
    region: &Region,
    mode: PredicateMode,
) -> RelocationPlan {
    let mut plan = RelocationPlan {
        covered_before: state.covered_len(),
        ..Default::default()
    };
    for node in rank_redundant(&solution.redundant, state.family()) {
        let uncovered = state.uncovered();
        let radius = match footprint(&poses[node], params) {
            Ok(fp) => equivalent_radius(fp.area),
            Err(_) => 0.0,
        };
        let Ok(target) = best_target_cell(&uncovered, radius, region) else {
            break;
        };
        let before = state.covered_len();
        match relocate_node(node, &poses[node], target, params, region, mode, state) {
            RelocationOutcome::Accepted(mv) => {
                debug_assert!(state.covered_len() > before);
                poses[node] = mv.new_pose;
                plan.moves.push(mv);
            }
            RelocationOutcome::Rejected => {
                debug_assert_eq!(state.covered_len(), before);
                plan.rejected.push(node);
            }
        }
    }
    plan.covered_after = state.covered_len();
    plan
}
