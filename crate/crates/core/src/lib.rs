//! Coverage optimization for camera sensor networks whose nodes project a
//! trapezoidal footprint onto the ground plane.
//!
//! The pipeline deploys nodes at random, tunes each node's tilt to maximize
//! its footprint, finds redundant nodes with a greedy set cover and moves
//! them into uncovered territory.

pub mod cover;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod relocate;
pub mod tilt;

pub use cover::{greedy_set_cover, CoverSolution};
pub use geometry::{footprint, Footprint, ModelParams, Point2, PredicateMode, SensorPose};
pub use grid::{coverage_ratio, rasterize, CellSet, CoverageState, Region};
pub use harness::{run_pipeline, ExperimentConfig, RunReport};
