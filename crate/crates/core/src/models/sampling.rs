//! Random-variate helpers shared by the samplers.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{domain, Result};

/// Beyond this `λ t0` the factor `e^{-λ t0}` underflows and the truncated
/// draw degrades to rejection from a plain exponential.
pub const UNDERFLOW_EXPONENT: f64 = 700.0;

/// Inverse-CDF draw from an exponential of rate `lambda` conditioned on
/// being below `t0`: `-ln(u(1 - e^{-λ t0}) + e^{-λ t0}) / λ`.
///
/// `u = 1` maps to 0 and `u = 0` maps to `t0`.
pub fn truncated_exponential_sample(lambda: f64, t0: f64, u: f64) -> Result<f64> {
    if !(lambda > 0.0 && t0 > 0.0) {
        return Err(domain(
            "truncated_exponential_sample",
            format!("lambda and t0 must be positive, got lambda={lambda}, t0={t0}"),
        ));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(domain(
            "truncated_exponential_sample",
            format!("u must lie in [0, 1], got {u}"),
        ));
    }
    if u == 0.0 {
        return Ok(t0);
    }
    let tail = (-lambda * t0).exp();
    let span = -(-lambda * t0).exp_m1();
    Ok((-(u * span + tail).ln() / lambda).clamp(0.0, t0))
}

/// Exponential holding time with rate `lambda`.
#[inline]
pub fn exponential<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / lambda
}

/// Exponential holding time conditioned to end strictly before `t0`.
pub fn exponential_below<R: Rng + ?Sized>(rng: &mut R, lambda: f64, t0: f64) -> f64 {
    if lambda * t0 > UNDERFLOW_EXPONENT {
        loop {
            let s = exponential(rng, lambda);
            if s < t0 {
                return s;
            }
        }
    }
    // u in (0, 1] keeps the draw away from t0 itself
    let u = 1.0 - rng.random::<f64>();
    let s = truncated_exponential_sample(lambda, t0, u).expect("validated parameters");
    s.min(t0.next_down())
}

/// Uniform direction on the unit circle.
#[inline]
pub fn direction_2d<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let phi = 2.0 * PI * rng.random::<f64>();
    let (s, c) = phi.sin_cos();
    [c, s, 0.0]
}

/// Uniform direction on the unit sphere.
#[inline]
pub fn direction_3d<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    [r * c, r * s, z]
}
