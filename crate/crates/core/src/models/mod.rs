//! Concrete PDMPs: parameter sets, short-time laws, and exact FPT samplers.

mod geometry;
mod linear;
mod run_tumble_1d;
mod run_tumble_iso;
mod sampling;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evt::AsymptoticLaw;

pub use geometry::{exit_fraction_2d, exit_fraction_3d, short_window_prob};
pub use linear::LinearPdmpParams;
pub use run_tumble_1d::{RunTumble1dParams, Target1d, SINGLE_TARGET_HORIZON};
pub use run_tumble_iso::{ray_exit_time, RunTumbleIsoParams};
pub use sampling::{truncated_exponential_sample, UNDERFLOW_EXPONENT};

/// One realization of a first passage time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FptSample {
    pub value: f64,
    /// Set when the walker left on its first leg in an atom-compatible state,
    /// in which case `value == t0` exactly.
    pub hit_atom: bool,
    pub n_switches: u64,
}

impl FptSample {
    pub(crate) fn atom(t0: f64) -> Self {
        Self {
            value: t0,
            hit_atom: true,
            n_switches: 0,
        }
    }

    /// A run abandoned past its horizon.
    pub(crate) fn censored(n_switches: u64) -> Self {
        Self {
            value: f64::INFINITY,
            hit_atom: false,
            n_switches,
        }
    }
}

/// Non-atom exits happen strictly after `t0`; rounding in the accumulated
/// clock can land on or below it, so nudge such values up by one ulp.
#[inline]
pub(crate) fn after_t0(t0: f64, value: f64) -> f64 {
    if value > t0 {
        value
    } else {
        t0.next_up()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PdmpModel {
    RunTumble1d(RunTumble1dParams),
    RunTumbleIso(RunTumbleIsoParams),
    Linear(LinearPdmpParams),
}

impl PdmpModel {
    /// Parses a tagged model descriptor. Constraint violations surface as
    /// [`Error::InvalidParameter`] naming the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text)?)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let tag = value
            .get("model")
            .and_then(serde_json::Value::as_str)
            .ok_or_else(|| invalid("model", "missing string tag `model`"))?;
        match tag {
            "run_tumble_1d" => {
                let raw: run_tumble_1d::RawRunTumble1d = serde_json::from_value(value)?;
                Ok(Self::RunTumble1d(raw.try_into()?))
            }
            "run_tumble_iso" => {
                let raw: run_tumble_iso::RawIso = serde_json::from_value(value)?;
                Ok(Self::RunTumbleIso(raw.try_into()?))
            }
            "linear" => {
                let raw: linear::RawLinear = serde_json::from_value(value)?;
                Ok(Self::Linear(raw.try_into()?))
            }
            other => Err(invalid(
                "model",
                format!(
                    "unknown model `{other}`; expected run_tumble_1d, run_tumble_iso or linear"
                ),
            )),
        }
    }

    /// Short label used in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            PdmpModel::RunTumble1d(_) => "run_tumble_1d",
            PdmpModel::RunTumbleIso(p) if p.dim == 2 => "run_tumble_2d",
            PdmpModel::RunTumbleIso(_) => "run_tumble_3d",
            PdmpModel::Linear(_) => "linear",
        }
    }

    pub fn t0(&self) -> f64 {
        match self {
            PdmpModel::RunTumble1d(p) => p.t0(),
            PdmpModel::RunTumbleIso(p) => p.t0(),
            PdmpModel::Linear(p) => p.t0(),
        }
    }

    pub fn law(&self) -> Result<AsymptoticLaw> {
        match self {
            PdmpModel::RunTumble1d(p) => p.law(),
            PdmpModel::RunTumbleIso(p) => p.law(),
            PdmpModel::Linear(p) => p.law(),
        }
    }

    pub fn sample_fpt<R: Rng + ?Sized>(&self, rng: &mut R) -> FptSample {
        match self {
            PdmpModel::RunTumble1d(p) => p.sample_fpt(rng),
            PdmpModel::RunTumbleIso(p) => p.sample_fpt(rng),
            PdmpModel::Linear(p) => p.sample_fpt(rng),
        }
    }

    /// Like [`sample_fpt`](Self::sample_fpt), but abandons the run with
    /// `value = ∞` once its clock passes `horizon`. Cheap for short-window
    /// counts on models with heavy-tailed FPTs.
    pub fn sample_fpt_until<R: Rng + ?Sized>(&self, rng: &mut R, horizon: f64) -> FptSample {
        match self {
            PdmpModel::RunTumble1d(p) => p.sample_fpt_until(rng, horizon),
            PdmpModel::RunTumbleIso(p) => p.sample_fpt_until(rng, horizon),
            PdmpModel::Linear(p) => p.sample_fpt_until(rng, horizon),
        }
    }

    /// Draw of the FPT conditioned on exceeding `t0`.
    pub fn sample_conditioned_fpt<R: Rng + ?Sized>(&self, rng: &mut R) -> FptSample {
        match self {
            PdmpModel::RunTumble1d(p) => p.sample_conditioned_fpt(rng),
            PdmpModel::RunTumbleIso(p) => p.sample_conditioned_fpt(rng),
            PdmpModel::Linear(p) => p.sample_conditioned_fpt(rng),
        }
    }
}
