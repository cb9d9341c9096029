//! Isotropic run and tumble in the unit disk (2d) or unit ball (3d), in
//! units where speed and radius are 1, so `t0 = 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{
    direction_2d, direction_3d, exponential, exponential_below, UNDERFLOW_EXPONENT,
};
use super::{after_t0, FptSample};
use crate::error::{invalid, Error, Result};
use crate::evt::AsymptoticLaw;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIso")]
pub struct RunTumbleIsoParams {
    pub dim: u8,
    pub lambda: f64,
}

#[derive(Deserialize)]
pub(super) struct RawIso {
    dim: u8,
    lambda: f64,
}

impl TryFrom<RawIso> for RunTumbleIsoParams {
    type Error = Error;

    fn try_from(r: RawIso) -> Result<Self> {
        RunTumbleIsoParams::new(r.dim, r.lambda)
    }
}

impl RunTumbleIsoParams {
    pub fn new(dim: u8, lambda: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(invalid("dim", format!("must be 2 or 3, got {dim}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(
                "lambda",
                format!("must be positive and finite, got {lambda}"),
            ));
        }
        Ok(Self { dim, lambda })
    }

    pub fn t0(&self) -> f64 {
        1.0
    }

    fn atom_probability(&self) -> f64 {
        if self.lambda > UNDERFLOW_EXPONENT {
            0.0
        } else {
            (-self.lambda).exp()
        }
    }

    /// 2d law: `p = 1/2`, `α = λ e^{-λ} √2 / (1 - q)`.
    pub fn law_2d(&self) -> Result<AsymptoticLaw> {
        if self.dim != 2 {
            return Err(invalid("dim", "law_2d requires dim = 2"));
        }
        let q = self.atom_probability();
        let alpha = self.lambda * (-self.lambda).exp() * std::f64::consts::SQRT_2 / (1.0 - q);
        AsymptoticLaw::new(1.0, q, alpha, 0.5, false)
    }

    /// 3d law: log-corrected with `p = 1`, `α = λ e^{-λ} / (1 - q)`.
    pub fn law_3d(&self) -> Result<AsymptoticLaw> {
        if self.dim != 3 {
            return Err(invalid("dim", "law_3d requires dim = 3"));
        }
        let q = self.atom_probability();
        let alpha = self.lambda * (-self.lambda).exp() / (1.0 - q);
        AsymptoticLaw::new(1.0, q, alpha, 1.0, true)
    }

    pub fn law(&self) -> Result<AsymptoticLaw> {
        match self.dim {
            2 => self.law_2d(),
            _ => self.law_3d(),
        }
    }

    pub fn sample_fpt<R: Rng + ?Sized>(&self, rng: &mut R) -> FptSample {
        self.sample_fpt_until(rng, f64::INFINITY)
    }

    /// Unconditioned draw that gives up once the clock passes `horizon`,
    /// reporting `value = ∞`.
    pub fn sample_fpt_until<R: Rng + ?Sized>(&self, rng: &mut R, horizon: f64) -> FptSample {
        let first = exponential(rng, self.lambda);
        if first >= 1.0 {
            return FptSample::atom(1.0);
        }
        self.continue_from(rng, first, horizon)
    }

    pub fn sample_conditioned_fpt<R: Rng + ?Sized>(&self, rng: &mut R) -> FptSample {
        let first = exponential_below(rng, self.lambda, 1.0);
        self.continue_from(rng, first, f64::INFINITY)
    }

    /// Runs the walk after a first straight run of length `first < 1` from the
    /// origin. The initial heading is fixed along the first axis, which loses
    /// nothing by rotational symmetry.
    fn continue_from<R: Rng + ?Sized>(&self, rng: &mut R, first: f64, horizon: f64) -> FptSample {
        let mut x = [first, 0.0, 0.0];
        let mut t = first;
        let mut switches = 1u64;
        loop {
            let d = if self.dim == 2 {
                direction_2d(rng)
            } else {
                direction_3d(rng)
            };
            let hold = exponential(rng, self.lambda);
            let to_exit = ray_exit_time(&x, &d);
            if hold >= to_exit {
                return FptSample {
                    value: after_t0(1.0, t + to_exit),
                    hit_atom: false,
                    n_switches: switches,
                };
            }
            t += hold;
            if t > horizon {
                return FptSample::censored(switches);
            }
            for (xi, di) in x.iter_mut().zip(d) {
                *xi += hold * di;
            }
            switches += 1;
        }
    }
}

/// Positive root of `|x + t d| = 1` for `|x| <= 1`, `|d| = 1`.
///
/// With `b = x·d` and `c = |x|² - 1 <= 0` the root is `-b + √(b² - c)`; for
/// `b > 0` the algebraically equal `-c / (b + √(b² - c))` avoids cancellation.
#[inline]
pub fn ray_exit_time(x: &[f64; 3], d: &[f64; 3]) -> f64 {
    let b = x[0] * d[0] + x[1] * d[1] + x[2] * d[2];
    let c = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0).min(0.0);
    let disc = (b * b - c).sqrt();
    if b > 0.0 {
        -c / (b + disc)
    } else {
        disc - b
    }
}
