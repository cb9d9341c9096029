//! Run and tumble on the line: velocity `-v0` in state 0, `+v1` in state 1,
//! switching out of state `j` at rate `λj`, started at the origin.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{exponential, exponential_below, UNDERFLOW_EXPONENT};
use super::{after_t0, FptSample};
use crate::error::{invalid, Error, Result};
use crate::evt::AsymptoticLaw;

/// Censoring horizon for the single-target problem, in units of `t0`.
/// The FPT to a one-sided target can be infinite or have infinite mean.
pub const SINGLE_TARGET_HORIZON: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target1d {
    /// First hit of `x = L`.
    Single {
        #[serde(rename = "L")]
        l: f64,
    },
    /// First exit from `(-L0, L1)`.
    Interval {
        #[serde(rename = "L0")]
        l0: f64,
        #[serde(rename = "L1")]
        l1: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRunTumble1d")]
pub struct RunTumble1dParams {
    pub v0: f64,
    pub v1: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub p1: f64,
    pub target: Target1d,
}

#[derive(Deserialize)]
pub(super) struct RawRunTumble1d {
    v0: f64,
    v1: f64,
    lambda0: f64,
    lambda1: f64,
    p1: f64,
    target: Target1d,
}

impl TryFrom<RawRunTumble1d> for RunTumble1dParams {
    type Error = Error;

    fn try_from(r: RawRunTumble1d) -> Result<Self> {
        RunTumble1dParams::new(r.v0, r.v1, r.lambda0, r.lambda1, r.p1, r.target)
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

impl RunTumble1dParams {
    pub fn new(
        v0: f64,
        v1: f64,
        lambda0: f64,
        lambda1: f64,
        p1: f64,
        target: Target1d,
    ) -> Result<Self> {
        positive("v0", v0)?;
        positive("v1", v1)?;
        positive("lambda0", lambda0)?;
        positive("lambda1", lambda1)?;
        if !(0.0..=1.0).contains(&p1) {
            return Err(invalid("p1", format!("must lie in [0, 1], got {p1}")));
        }
        match target {
            Target1d::Single { l } => positive("L", l)?,
            Target1d::Interval { l0, l1 } => {
                positive("L0", l0)?;
                positive("L1", l1)?;
            }
        }
        Ok(Self {
            v0,
            v1,
            lambda0,
            lambda1,
            p1,
            target,
        })
    }

    /// Symmetric interval `(-L, L)` with common speed and rate and `p0 = p1 = 1/2`.
    pub fn symmetric_interval(l: f64, v: f64, lambda: f64) -> Result<Self> {
        Self::new(
            v,
            v,
            lambda,
            lambda,
            0.5,
            Target1d::Interval { l0: l, l1: l },
        )
    }

    pub fn p0(&self) -> f64 {
        1.0 - self.p1
    }

    /// Earliest possible exit through each boundary, indexed by state.
    fn ballistic_times(&self) -> [f64; 2] {
        match self.target {
            Target1d::Single { l } => [f64::INFINITY, l / self.v1],
            Target1d::Interval { l0, l1 } => [l0 / self.v0, l1 / self.v1],
        }
    }

    pub fn t0(&self) -> f64 {
        let [left, right] = self.ballistic_times();
        left.min(right)
    }

    /// States from which running without a switch exits exactly at `t0`.
    fn atom_states(&self) -> [bool; 2] {
        let t = self.ballistic_times();
        let t0 = t[0].min(t[1]);
        [t[0] == t0, t[1] == t0]
    }

    fn rates(&self) -> [f64; 2] {
        [self.lambda0, self.lambda1]
    }

    /// Short-time law for the one-sided target `x = L`.
    pub fn law_target(&self) -> Result<AsymptoticLaw> {
        let l = match self.target {
            Target1d::Single { l } => l,
            Target1d::Interval { .. } => {
                return Err(invalid("target", "law_target requires a single target"))
            }
        };
        target_law(l, self.v0, self.v1, self.lambda0, self.lambda1, self.p1)
    }

    /// Short-time law for escape from `(-L0, L1)`.
    pub fn law_interval(&self) -> Result<AsymptoticLaw> {
        let (l0, l1) = match self.target {
            Target1d::Interval { l0, l1 } => (l0, l1),
            Target1d::Single { .. } => {
                return Err(invalid(
                    "target",
                    "law_interval requires an interval target",
                ))
            }
        };
        let right = l1 / self.v1;
        let left = l0 / self.v0;
        if right < left {
            target_law(l1, self.v0, self.v1, self.lambda0, self.lambda1, self.p1)
        } else if left < right {
            // mirror the line so that state 0 becomes the fast direction
            target_law(l0, self.v1, self.v0, self.lambda1, self.lambda0, self.p0())
        } else if l0 == l1 && self.v0 == self.v1 {
            symmetric_interval_law(l1, self.v1, self.lambda0, self.lambda1, self.p0(), self.p1)
        } else {
            Err(invalid(
                "target",
                "tied ballistic times L0/v0 = L1/v1 with L0 != L1 or v0 != v1 are not supported",
            ))
        }
    }

    pub fn law(&self) -> Result<AsymptoticLaw> {
        match self.target {
            Target1d::Single { .. } => self.law_target(),
            Target1d::Interval { .. } => self.law_interval(),
        }
    }

    /// `P(J(0) = 1 | τ > t0)`.
    fn conditioned_p1(&self) -> f64 {
        let atom = self.atom_states();
        let t0 = self.t0();
        let weight = |j: usize, p: f64| {
            if atom[j] {
                p * -(-self.rates()[j] * t0).exp_m1()
            } else {
                p
            }
        };
        let w1 = weight(1, self.p1);
        let w0 = weight(0, self.p0());
        w1 / (w0 + w1)
    }

    fn horizon(&self) -> f64 {
        match self.target {
            Target1d::Single { .. } => SINGLE_TARGET_HORIZON * self.t0(),
            Target1d::Interval { .. } => f64::INFINITY,
        }
    }

    pub fn sample_fpt<R: Rng + ?Sized>(&self, rng: &mut R) -> FptSample {
        let start = usize::from(rng.random::<f64>() < self.p1);
        self.run(rng, start, false, self.horizon())
    }

    pub fn sample_conditioned_fpt<R: Rng + ?Sized>(&self, rng: &mut R) -> FptSample {
        let start = usize::from(rng.random::<f64>() < self.conditioned_p1());
        self.run(rng, start, true, self.horizon())
    }

    /// Unconditioned draw that gives up once the clock passes `horizon`,
    /// reporting `value = ∞`.
    pub fn sample_fpt_until<R: Rng + ?Sized>(&self, rng: &mut R, horizon: f64) -> FptSample {
        let start = usize::from(rng.random::<f64>() < self.p1);
        self.run(rng, start, false, horizon.min(self.horizon()))
    }

    fn run<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        mut state: usize,
        conditioned: bool,
        horizon: f64,
    ) -> FptSample {
        let t0 = self.t0();
        let atom = self.atom_states();
        let rates = self.rates();
        let (lower, upper) = match self.target {
            Target1d::Single { l } => (f64::NEG_INFINITY, l),
            Target1d::Interval { l0, l1 } => (-l0, l1),
        };
        let mut x = 0.0;
        let mut t = 0.0;
        let mut switches = 0u64;
        loop {
            let first = switches == 0;
            let hold = if first && conditioned && atom[state] {
                exponential_below(rng, rates[state], t0)
            } else {
                exponential(rng, rates[state])
            };
            let to_exit = if state == 1 {
                (upper - x) / self.v1
            } else {
                (x - lower) / self.v0
            };
            if hold >= to_exit {
                if first && atom[state] {
                    return FptSample::atom(t0);
                }
                return FptSample::after(t0, t + to_exit, switches);
            }
            t += hold;
            if t > horizon {
                return FptSample::censored(switches);
            }
            x += if state == 1 {
                self.v1 * hold
            } else {
                -self.v0 * hold
            };
            state ^= 1;
            switches += 1;
        }
    }
}

fn target_law(
    l: f64,
    v0: f64,
    v1: f64,
    lambda0: f64,
    lambda1: f64,
    p1: f64,
) -> Result<AsymptoticLaw> {
    let t0 = l / v1;
    let q = if lambda1 * t0 > UNDERFLOW_EXPONENT {
        0.0
    } else {
        p1 * (-lambda1 * t0).exp()
    };
    let alpha = lambda0 * l * (lambda1 * l * p1 - p1 * v1 + v1)
        / (v1 * (v0 + v1) * ((lambda1 * l / v1).exp() - p1));
    AsymptoticLaw::new(t0, q, alpha, 1.0, false)
}

fn symmetric_interval_law(
    l: f64,
    v: f64,
    lambda0: f64,
    lambda1: f64,
    p0: f64,
    p1: f64,
) -> Result<AsymptoticLaw> {
    let t0 = l / v;
    let e0 = (-lambda0 * t0).exp();
    let e1 = (-lambda1 * t0).exp();
    let q = p0 * e0 + p1 * e1;
    let num = l
        * (lambda1 * e0 * (lambda0 * l * p0 + p1 * v) + lambda0 * e1 * (lambda1 * l * p1 + p0 * v));
    let alpha = num / (2.0 * v * v * (1.0 - q));
    AsymptoticLaw::new(t0, q, alpha, 1.0, false)
}

impl FptSample {
    fn after(t0: f64, value: f64, n_switches: u64) -> Self {
        Self {
            value: after_t0(t0, value),
            hit_atom: false,
            n_switches,
        }
    }
}
