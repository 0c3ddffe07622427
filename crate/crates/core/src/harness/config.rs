use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::{DomainError, ModelParams, PredicateMode};
use crate::grid::{GridError, Region};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Model(#[from] DomainError),
    #[error(transparent)]
    Region(#[from] GridError),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Coverage target used to split working from redundant nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TargetEta {
    /// Whatever the network reaches after tilt tuning.
    #[default]
    PostTilt,
    Explicit(f64),
}

impl std::str::FromStr for TargetEta {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("post-tilt") {
            return Ok(Self::PostTilt);
        }
        s.parse::<f64>()
            .map(Self::Explicit)
            .map_err(|_| format!("expected `post-tilt` or a ratio, got `{s}`"))
    }
}

impl std::fmt::Display for TargetEta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PostTilt => f.write_str("post-tilt"),
            Self::Explicit(v) => write!(f, "{v}"),
        }
    }
}

/// Horizontal and vertical full fields of view listed for the reference
/// experiment, read as half-angles.
pub const LITERAL_ALPHA_DEG: f64 = 45.0;
pub const LITERAL_BETA_DEG: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub nodes: usize,
    pub width: f64,
    pub height: f64,
    pub cell_size: f64,
    /// Horizontal half field of view, degrees.
    pub alpha_deg: f64,
    /// Vertical half field of view, degrees.
    pub beta_deg: f64,
    pub kmax_deg: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub seed: u64,
    pub target_eta: TargetEta,
    pub predicate: PredicateMode,
    /// Use the listed 45°/60° angles as half-angles. This leaves the
    /// trapezoid regime and fails validation.
    pub literal_table1: bool,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nodes: 100,
            width: 500.0,
            height: 500.0,
            cell_size: 1.0,
            alpha_deg: LITERAL_ALPHA_DEG / 2.0,
            beta_deg: LITERAL_BETA_DEG / 2.0,
            kmax_deg: 50.0,
            z_min: 5.0,
            z_max: 13.0,
            seed: 1,
            target_eta: TargetEta::PostTilt,
            predicate: PredicateMode::Quad,
            literal_table1: false,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn angles_deg(&self) -> (f64, f64, f64) {
        if self.literal_table1 {
            (LITERAL_ALPHA_DEG, LITERAL_BETA_DEG, self.kmax_deg)
        } else {
            (self.alpha_deg, self.beta_deg, self.kmax_deg)
        }
    }

    pub fn model_params(&self) -> Result<ModelParams, ConfigError> {
        let (a, b, k) = self.angles_deg();
        Ok(ModelParams::from_degrees(a, b, k)?)
    }

    pub fn region(&self) -> Result<Region, ConfigError> {
        Ok(Region::new(self.width, self.height, self.cell_size)?)
    }

    pub fn validate(&self) -> Result<(ModelParams, Region), ConfigError> {
        let params = self.model_params()?;
        let region = self.region()?;
        if !(self.z_min > 0.0 && self.z_min <= self.z_max && self.z_max.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "need 0 < zmin <= zmax, got zmin={} zmax={}",
                self.z_min, self.z_max
            )));
        }
        if let TargetEta::Explicit(t) = self.target_eta {
            if !(0.0..=1.0).contains(&t) {
                return Err(ConfigError::Invalid(format!("target eta {t} is outside [0, 1]")));
            }
        }
        Ok((params, region))
    }

    /// Applies one `key=value` setting; keys match the CLI flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad value `{v}` for `{key}`"))
        }
        let key_norm = key.trim().replace('_', "-");
        let v = value.trim();
        match key_norm.as_str() {
            "nodes" => self.nodes = num(key, v)?,
            "width" => self.width = num(key, v)?,
            "height" => self.height = num(key, v)?,
            "cell-size" => self.cell_size = num(key, v)?,
            "alpha-deg" => self.alpha_deg = num(key, v)?,
            "beta-deg" => self.beta_deg = num(key, v)?,
            "kmax-deg" => self.kmax_deg = num(key, v)?,
            "zmin" => self.z_min = num(key, v)?,
            "zmax" => self.z_max = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "target-eta" => self.target_eta = v.parse()?,
            "predicate" => self.predicate = v.parse()?,
            "literal-table1" => self.literal_table1 = num(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Parses flat `key=value` text. Blank lines and `#` comments are skipped.
    pub fn parse_str(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| ConfigError::Parse {
                path: origin.to_string(),
                line: i + 1,
                msg,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err("expected key=value".into()))?;
            self.set(k, v).map_err(parse_err)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::default();
        cfg.parse_str(&text, &path.display().to_string())?;
        Ok(cfg)
    }

    /// `key=value` lines in the config-file format.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "nodes={}", self.nodes);
        let _ = writeln!(s, "width={}", self.width);
        let _ = writeln!(s, "height={}", self.height);
        let _ = writeln!(s, "cell-size={}", self.cell_size);
        let _ = writeln!(s, "alpha-deg={}", self.alpha_deg);
        let _ = writeln!(s, "beta-deg={}", self.beta_deg);
        let _ = writeln!(s, "kmax-deg={}", self.kmax_deg);
        let _ = writeln!(s, "zmin={}", self.z_min);
        let _ = writeln!(s, "zmax={}", self.z_max);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "target-eta={}", self.target_eta);
        let _ = writeln!(s, "predicate={}", self.predicate);
        let _ = writeln!(s, "literal-table1={}", self.literal_table1);
        s
    }
}
