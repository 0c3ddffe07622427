use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wmsn_core::geometry::PredicateMode;
use wmsn_core::harness::{self, output, ConfigError, ExperimentConfig, TargetEta};

#[derive(Parser)]
#[command(name = "wmsn", version, about = "Coverage optimization for 3D camera sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline once and write per-run artifacts.
    Run {
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the pipeline for every node count and seed; writes sweep.csv.
    Sweep {
        /// Comma-separated node counts.
        #[arg(long, value_delimiter = ',')]
        nodes: Vec<usize>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// key=value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long)]
    cell_size: Option<f64>,
    #[arg(long)]
    alpha_deg: Option<f64>,
    #[arg(long)]
    beta_deg: Option<f64>,
    #[arg(long)]
    kmax_deg: Option<f64>,
    #[arg(long)]
    zmin: Option<f64>,
    #[arg(long)]
    zmax: Option<f64>,
    /// `post-tilt` or an explicit ratio in [0, 1].
    #[arg(long)]
    target_eta: Option<TargetEta>,
    #[arg(long, value_parser = ["quad", "annular"])]
    predicate: Option<String>,
    /// Read the listed 45/60 degree angles as half-angles (fails validation).
    #[arg(long)]
    literal_table1: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! apply {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        apply!(
            width => width,
            height => height,
            cell_size => cell_size,
            alpha_deg => alpha_deg,
            beta_deg => beta_deg,
            kmax_deg => kmax_deg,
            zmin => z_min,
            zmax => z_max,
            target_eta => target_eta,
        );
        if let Some(p) = &self.predicate {
            cfg.predicate = p.parse::<PredicateMode>().map_err(ConfigError::Invalid)?;
        }
        if self.literal_table1 {
            cfg.literal_table1 = true;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ConfigError + '_ {
    move |source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn run(cli: Cli) -> Result<(), ConfigError> {
    match cli.command {
        Command::Run { nodes, seed, common } => {
            let mut cfg = common.resolve()?;
            if let Some(n) = nodes {
                cfg.nodes = n;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let outcome = harness::run_pipeline(&cfg)?;
            let r = &outcome.report;
            println!(
                "seed {}  nodes {}  eta initial {:.4}  tilted {:.4}  final {:.4}",
                r.seed, r.nodes, r.eta_initial, r.eta_tilted, r.eta_final
            );
            println!(
                "working {}  redundant {}  analytic m {}  moves accepted {}  rejected {}{}",
                r.m_prime,
                r.redundant,
                r.analytic_m_ceil().map_or("-".to_string(), |m| m.to_string()),
                r.moves_accepted,
                r.moves_rejected,
                if r.shortfall { "  (target not reached)" } else { "" }
            );
            let t = &r.timings;
            println!(
                "time deploy {:?}  tilt {:?}  cover {:?}  relocate {:?}",
                t.deploy, t.tilt, t.cover, t.relocate
            );
            if let Some(dir) = &cfg.out {
                output::write_run_artifacts(&outcome, dir).map_err(io_err(dir))?;
                println!("artifacts written to {}", dir.display());
            }
        }
        Command::Sweep { nodes, seeds, common } => {
            let cfg = common.resolve()?;
            let nodes = if nodes.is_empty() { vec![cfg.nodes] } else { nodes };
            let reports = harness::sweep(&cfg, &nodes, &seeds, cfg.out.as_deref())?;
            let table = output::sweep_csv(&reports);
            print!("{table}");
            if let Some(dir) = &cfg.out {
                std::fs::create_dir_all(dir).map_err(io_err(dir))?;
                let path = dir.join("sweep.csv");
                output::write_atomic(&path, table.as_bytes()).map_err(io_err(&path))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
