//! Experiment harness: configuration, seeded deployment, the three-phase
//! pipeline, artifact output and multi-seed sweeps.

mod config;
pub mod output;
mod pipeline;

use std::path::Path;

use rayon::prelude::*;

pub use config::{ConfigError, ExperimentConfig, TargetEta, LITERAL_ALPHA_DEG, LITERAL_BETA_DEG};
pub use pipeline::{
    deploy_random, rasterize_all, run_pipeline, PhaseSnapshot, PhaseTimings, RunOutcome, RunReport,
};

/// Runs the pipeline for every `(nodes, seed)` pair, node counts outermost.
/// Runs execute in parallel; results come back in input order. When `out` is
/// given each run's artifacts go to `out/n{nodes}_seed{seed}/`.
pub fn sweep(
    base: &ExperimentConfig,
    node_counts: &[usize],
    seeds: &[u64],
    out: Option<&Path>,
) -> Result<Vec<RunReport>, ConfigError> {
    base.validate()?;
    let jobs: Vec<ExperimentConfig> = node_counts
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| base.clone().with_nodes(n).with_seed(s)))
        .collect();
    jobs.par_iter()
        .map(|cfg| {
            let outcome = run_pipeline(cfg)?;
            if let Some(dir) = out {
                let run_dir = dir.join(format!("n{}_seed{}", cfg.nodes, cfg.seed));
                output::write_run_artifacts(&outcome, &run_dir).map_err(|source| ConfigError::Io {
                    path: run_dir.display().to_string(),
                    source,
                })?;
            }
            Ok(outcome.report)
        })
        .collect()
}
