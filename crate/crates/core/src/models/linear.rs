//! Switching linear flow `dX/dt = -X` (state 0) or `1 - X` (state 1) with
//! symmetric jump rate λ, started at `X(0) = 1`; the FPT is the first time
//! `X` falls to the threshold θ.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{exponential, exponential_below, UNDERFLOW_EXPONENT};
use super::{after_t0, FptSample};
use crate::error::{invalid, Error, Result};
use crate::evt::AsymptoticLaw;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinear")]
pub struct LinearPdmpParams {
    pub lambda: f64,
    pub theta: f64,
    pub p0: f64,
}

#[derive(Deserialize)]
pub(super) struct RawLinear {
    lambda: f64,
    theta: f64,
    p0: f64,
}

impl TryFrom<RawLinear> for LinearPdmpParams {
    type Error = Error;

    fn try_from(r: RawLinear) -> Result<Self> {
        LinearPdmpParams::new(r.lambda, r.theta, r.p0)
    }
}

impl LinearPdmpParams {
    pub fn new(lambda: f64, theta: f64, p0: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(
                "lambda",
                format!("must be positive and finite, got {lambda}"),
            ));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(invalid("theta", format!("must lie in (0, 1), got {theta}")));
        }
        if !(0.0..=1.0).contains(&p0) {
            return Err(invalid("p0", format!("must lie in [0, 1], got {p0}")));
        }
        Ok(Self { lambda, theta, p0 })
    }

    pub fn p1(&self) -> f64 {
        1.0 - self.p0
    }

    /// `ln(1/θ)`, the decay time from 1 to θ without a switch.
    pub fn t0(&self) -> f64 {
        (1.0 / self.theta).ln()
    }

    pub fn law(&self) -> Result<AsymptoticLaw> {
        let t0 = self.t0();
        let lt0 = self.lambda * t0;
        let theta_l = if lt0 > UNDERFLOW_EXPONENT {
            0.0
        } else {
            self.theta.powf(self.lambda)
        };
        let q = self.p0 * theta_l;
        let lam = self.lambda;
        let alpha = (self.p0 * lam * lam * theta_l * (1.0 - self.theta) * t0
            + self.p1() * lam * theta_l * t0)
            / (1.0 - q);
        AsymptoticLaw::new(t0, q, alpha, 1.0, false)
    }

    /// `P(J(0) = 1 | τ > t0) = p1 / (p1 + p0 (1 - e^{-λ t0}))`.
    pub fn conditioned_p1(&self) -> f64 {
        let p1 = self.p1();
        p1 / (p1 + self.p0 * -(-self.lambda * self.t0()).exp_m1())
    }

    pub fn sample_fpt<R: Rng + ?Sized>(&self, rng: &mut R) -> FptSample {
        self.sample_fpt_until(rng, f64::INFINITY)
    }

    /// Unconditioned draw that gives up once the clock passes `horizon`,
    /// reporting `value = ∞`.
    pub fn sample_fpt_until<R: Rng + ?Sized>(&self, rng: &mut R, horizon: f64) -> FptSample {
        let state = usize::from(rng.random::<f64>() < self.p1());
        self.run(rng, state, false, horizon)
    }

    pub fn sample_conditioned_fpt<R: Rng + ?Sized>(&self, rng: &mut R) -> FptSample {
        let state = usize::from(rng.random::<f64>() < self.conditioned_p1());
        self.run(rng, state, true, f64::INFINITY)
    }

    fn run<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        mut state: usize,
        conditioned: bool,
        horizon: f64,
    ) -> FptSample {
        let t0 = self.t0();
        let mut x = 1.0f64;
        let mut t = 0.0;
        let mut switches = 0u64;
        loop {
            let first = switches == 0;
            let hold = if first && conditioned && state == 0 {
                exponential_below(rng, self.lambda, t0)
            } else {
                exponential(rng, self.lambda)
            };
            if state == 0 {
                let to_hit = (x / self.theta).ln();
                if hold >= to_hit {
                    if first {
                        return FptSample::atom(t0);
                    }
                    return FptSample {
                        value: after_t0(t0, t + to_hit),
                        hit_atom: false,
                        n_switches: switches,
                    };
                }
                x *= (-hold).exp();
            } else {
                // relaxes toward 1, away from θ
                x = 1.0 - (1.0 - x) * (-hold).exp();
            }
            t += hold;
            if t > horizon {
                return FptSample::censored(switches);
            }
            state ^= 1;
            switches += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn law_example() {
        let p = LinearPdmpParams::new(3.0, 0.2, 0.5).unwrap();
        let law = p.law().unwrap();
        assert!((law.t0 - 1.609_437_912_434_100_4).abs() < 1e-15);
        assert!((law.q - 0.004).abs() < 1e-15);
        assert!((law.alpha - 0.065_928_781_955_131_82).abs() < 1e-14);
        assert_eq!(law.p, 1.0);
    }

    #[test]
    fn law_without_down_start() {
        let p = LinearPdmpParams::new(3.0, 0.2, 0.0).unwrap();
        let law = p.law().unwrap();
        assert_eq!(law.q, 0.0);
        let expected = 3.0 * 0.2f64.powi(3) * 5f64.ln();
        assert!((law.alpha - expected).abs() < 1e-15);
    }

    #[test]
    fn conditioned_start_probability() {
        let p = LinearPdmpParams::new(3.0, 0.2, 0.5).unwrap();
        assert!((p.conditioned_p1() - 0.502_008_032_128_514_1).abs() < 1e-14);
    }

    #[test]
    fn invalid_params() {
        assert!(LinearPdmpParams::new(3.0, 1.5, 0.5).is_err());
        assert!(LinearPdmpParams::new(3.0, 0.0, 0.5).is_err());
        assert!(LinearPdmpParams::new(0.0, 0.2, 0.5).is_err());
        assert!(LinearPdmpParams::new(3.0, 0.2, -0.1).is_err());
        match LinearPdmpParams::new(3.0, 1.5, 0.5) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "theta"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn samples_respect_support() {
        let p = LinearPdmpParams::new(3.0, 0.2, 0.5).unwrap();
        let t0 = p.t0();
        let mut rng = stream(4, 0);
        for _ in 0..20_000 {
            let s = p.sample_fpt(&mut rng);
            assert!(s.value >= t0);
            if s.hit_atom {
                assert_eq!(s.value, t0);
            }
            let c = p.sample_conditioned_fpt(&mut rng);
            assert!(c.value > t0 && !c.hit_atom);
        }
    }
}
