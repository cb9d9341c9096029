//! Run configuration: an optional JSON file whose fields are overridden by
//! command-line flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;
use serde_json::Value;

use xfpt::harness::RunSettings;
use xfpt::rng::DEFAULT_SEED;
use xfpt::{AsymptoticLaw, PdmpModel};

/// Default number of conditioned draws for simulation campaigns.
pub const DEFAULT_DRAWS: u64 = 1_000_000;

/// A configuration problem attributed to one field.
#[derive(Debug)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for FieldError {}

pub fn field_error(field: &str, message: impl Into<String>) -> anyhow::Error {
    FieldError {
        field: field.to_string(),
        message: message.into(),
    }
    .into()
}

/// Extracts `x` from serde's "missing field `x`" and "unknown field `x`".
pub fn serde_field(message: &str) -> Option<String> {
    let rest = message
        .strip_prefix("missing field `")
        .or_else(|| message.strip_prefix("unknown field `"))?;
    rest.split('`').next().map(str::to_string)
}

/// Fields accepted in a `--config` file. Every command reads the subset it
/// needs; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Inline model or law object, or a path relative to the config file.
    pub model: Option<Value>,
    #[serde(rename = "N")]
    pub n: Option<Vec<u64>>,
    #[serde(rename = "M")]
    pub m: Option<u64>,
    pub k: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub exact_an: Option<bool>,
    pub dim: Option<Vec<u8>>,
    pub rho: Option<Vec<f64>>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub v: Option<f64>,
    pub lambda_lo: Option<f64>,
    pub lambda_hi: Option<f64>,
    pub steps: Option<usize>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| field_error("config", format!("{}: {e}", path.display())))?;
        let mut cfg: ConfigFile = serde_json::from_str(&text).map_err(|e| {
            let message = e.to_string();
            let field = serde_field(&message).unwrap_or_else(|| "config".to_string());
            field_error(&field, format!("{}: {message}", path.display()))
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }
}

/// What a model descriptor turned out to be.
#[derive(Debug, Clone, Copy)]
pub enum Subject {
    Model(PdmpModel),
    /// A bare law; enough for predictions but not for simulation.
    Law(AsymptoticLaw),
}

impl Subject {
    fn from_value(value: Value) -> Result<Self> {
        if value.get("model").is_some() {
            Ok(Subject::Model(PdmpModel::from_value(value)?))
        } else {
            Ok(Subject::Law(AsymptoticLaw::from_value(value)?))
        }
    }

    pub fn law(&self) -> Result<AsymptoticLaw> {
        match self {
            Subject::Model(m) => Ok(m.law()?),
            Subject::Law(l) => Ok(*l),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Subject::Model(m) => m.name(),
            Subject::Law(_) => "law",
        }
    }

    pub fn model(&self) -> Result<&PdmpModel> {
        match self {
            Subject::Model(m) => Ok(m),
            Subject::Law(_) => Err(field_error(
                "model",
                "simulation needs a model descriptor with a `model` tag, not a bare law",
            )),
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| field_error("model", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| field_error("model", format!("{}: {e}", path.display())))
}

/// Flags shared by `predict`, `simulate` and `compare`.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON config file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model descriptor (or bare law) JSON file
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Comma-separated numbers of searchers
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    /// Total conditioned draws per campaign
    #[arg(long = "M")]
    pub m: Option<u64>,
    /// Order statistic (1 = fastest)
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use the Lambert-W scaling constant for log-corrected laws
    #[arg(long)]
    pub exact_an: bool,
}

/// Fully resolved settings for a simulation-type command.
#[derive(Debug)]
pub struct RunConfig {
    pub subject: Subject,
    pub n_list: Vec<u64>,
    pub m: u64,
    pub k: u64,
    pub settings: RunSettings,
    pub out: PathBuf,
    pub exact_an: bool,
}

impl RunArgs {
    pub fn resolve(self) -> Result<RunConfig> {
        let cfg = ConfigFile::load(self.config.as_deref())?;
        let value = match (self.model, cfg.model) {
            (Some(path), _) => read_json(&path)?,
            (None, Some(Value::String(rel))) => read_json(&cfg.base_dir.join(rel))?,
            (None, Some(v @ Value::Object(_))) => v,
            (None, Some(_)) => {
                return Err(field_error("model", "must be an object or a file path"))
            }
            (None, None) => return Err(field_error("model", "no model given")),
        };
        let subject = Subject::from_value(value).context("reading model descriptor")?;
        let n_list = self.n.or(cfg.n).unwrap_or_default();
        if n_list.contains(&0) {
            return Err(field_error("N", "searcher counts must be at least 1"));
        }
        let k = self.k.or(cfg.k).unwrap_or(1);
        if k == 0 {
            return Err(field_error("k", "must be at least 1"));
        }
        let m = self.m.or(cfg.m).unwrap_or(DEFAULT_DRAWS);
        if m == 0 {
            return Err(field_error("M", "must be at least 1"));
        }
        let settings = RunSettings::new(
            self.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            self.workers.or(cfg.workers).unwrap_or(1),
        )?;
        Ok(RunConfig {
            subject,
            n_list,
            m,
            k,
            settings,
            out: self.out.or(cfg.out).unwrap_or_else(|| PathBuf::from(".")),
            exact_an: self.exact_an || cfg.exact_an.unwrap_or(false),
        })
    }
}

impl RunConfig {
    pub fn require_n(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(field_error("N", "list must be nonempty"));
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
pub struct SummaryArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated dimensions (1, 2, 3)
    #[arg(long, value_delimiter = ',')]
    pub dim: Option<Vec<u8>>,
    /// Comma-separated dimensionless tumbling rates λL/v
    #[arg(long, value_delimiter = ',')]
    pub rho: Option<Vec<f64>>,
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    /// Target distance
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Speed
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub struct SummaryConfig {
    pub dims: Vec<u8>,
    pub rhos: Vec<f64>,
    pub ns: Vec<u64>,
    pub l: f64,
    pub v: f64,
    pub out: PathBuf,
}

impl SummaryArgs {
    pub fn resolve(self) -> Result<SummaryConfig> {
        let cfg = ConfigFile::load(self.config.as_deref())?;
        Ok(SummaryConfig {
            dims: self.dim.or(cfg.dim).unwrap_or_else(|| vec![1, 2, 3]),
            rhos: self
                .rho
                .or(cfg.rho)
                .unwrap_or_else(|| vec![0.5, 1.0, 3.0, 10.0]),
            ns: self
                .n
                .or(cfg.n)
                .unwrap_or_else(|| vec![100, 10_000, 1_000_000]),
            l: self.l.or(cfg.l).unwrap_or(1.0),
            v: self.v.or(cfg.v).unwrap_or(1.0),
            out: self.out.or(cfg.out).unwrap_or_else(|| PathBuf::from(".")),
        })
    }
}

#[derive(Debug, Args)]
pub struct CaseStudyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lower end of the tumbling-rate sweep (1/s)
    #[arg(long)]
    pub lambda_lo: Option<f64>,
    /// Upper end of the tumbling-rate sweep (1/s)
    #[arg(long)]
    pub lambda_hi: Option<f64>,
    /// Grid points in the sweep
    #[arg(long)]
    pub steps: Option<usize>,
    /// Comma-separated numbers of searchers
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub struct CaseStudyConfig {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub steps: usize,
    pub ns: Vec<u64>,
    pub out: PathBuf,
}

impl CaseStudyArgs {
    pub fn resolve(self) -> Result<CaseStudyConfig> {
        let cfg = ConfigFile::load(self.config.as_deref())?;
        Ok(CaseStudyConfig {
            lambda_lo: self.lambda_lo.or(cfg.lambda_lo).unwrap_or(0.015),
            lambda_hi: self.lambda_hi.or(cfg.lambda_hi).unwrap_or(0.01875),
            steps: self.steps.or(cfg.steps).unwrap_or(31),
            ns: self
                .n
                .or(cfg.n)
                .unwrap_or_else(|| vec![300_000_000, 75_000_000]),
            out: self.out.or(cfg.out).unwrap_or_else(|| PathBuf::from(".")),
        })
    }
}
