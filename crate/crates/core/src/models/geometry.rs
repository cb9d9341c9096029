//! Exit-direction fractions for a single tumble inside the unit disk/ball
//! and the one-switch short-window probability built from them.
//!
//! A searcher that runs straight from the origin for time `s < 1`, tumbles
//! once and keeps running is at time `1 + eps` somewhere on a circle (sphere)
//! of radius `1 + eps - s` centred at distance `s` from the origin. The
//! fraction of that circle (sphere) outside the unit disk (ball) is the
//! chance a uniform new direction exits before `1 + eps`.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::quadrature::integrate;

fn check_window(function: &'static str, s: f64, eps: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(domain(function, format!("s must lie in (0, 1), got {s}")));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(domain(
            function,
            format!("eps must be nonnegative, got {eps}"),
        ));
    }
    Ok(())
}

/// Fraction of exit directions in 2d after a tumble at time `s`.
pub fn exit_fraction_2d(s: f64, eps: f64) -> Result<f64> {
    check_window("exit_fraction_2d", s, eps)?;
    Ok(fraction_2d(s, eps))
}

fn fraction_2d(s: f64, eps: f64) -> f64 {
    if s <= 0.5 * eps {
        return 1.0;
    }
    let r = 1.0 + eps - s;
    let x = (s * s - r * r + 1.0) / (2.0 * s);
    ((x - s) / r).clamp(-1.0, 1.0).acos() / PI
}

/// Fraction of exit directions (surface area) in 3d after a tumble at time `s`.
pub fn exit_fraction_3d(s: f64, eps: f64) -> Result<f64> {
    check_window("exit_fraction_3d", s, eps)?;
    Ok(fraction_3d(s, eps))
}

fn fraction_3d(s: f64, eps: f64) -> f64 {
    if s <= 0.5 * eps {
        return 1.0;
    }
    eps * (2.0 + eps) / (4.0 * s * (1.0 - s + eps))
}

const SHORT_WINDOW_TOL: f64 = 1e-10;

/// One-switch contribution to `P(1 < τ < 1 + eps)` for the isotropic run and
/// tumble in dimension `dim` with dimensionless rate `lambda`:
/// `λ e^{-λ} [eps/2 + ∫_{eps/2}^1 fraction(s, eps) ds]`.
pub fn short_window_prob(dim: u8, lambda: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(
            "short_window_prob",
            format!("eps must lie in (0, 1), got {eps}"),
        ));
    }
    if !(lambda > 0.0) {
        return Err(domain(
            "short_window_prob",
            format!("lambda must be positive, got {lambda}"),
        ));
    }
    let lo = 0.5 * eps;
    // split where the integrand changes fastest so the adaptive rule starts well
    let knots = [lo, (2.0 * eps).min(0.5), (20.0 * eps).min(0.75), 1.0];
    let mut integral = 0.0;
    for w in knots.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        integral += match dim {
            2 => integrate(|s| fraction_2d(s, eps), w[0], w[1], SHORT_WINDOW_TOL / 3.0)?,
            3 => integrate(|s| fraction_3d(s, eps), w[0], w[1], SHORT_WINDOW_TOL / 3.0)?,
            _ => {
                return Err(domain(
                    "short_window_prob",
                    format!("dimension must be 2 or 3, got {dim}"),
                ))
            }
        };
    }
    Ok(lambda * (-lambda).exp() * (lo + integral))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_examples() {
        assert_eq!(exit_fraction_2d(0.3, 0.0).unwrap(), 0.0);
        assert_eq!(exit_fraction_3d(0.3, 0.0).unwrap(), 0.0);
        assert_eq!(exit_fraction_2d(0.04, 0.1).unwrap(), 1.0);
        assert_eq!(exit_fraction_3d(0.04, 0.1).unwrap(), 1.0);
        // arccos(0.65) / π
        let f = exit_fraction_2d(0.5, 0.1).unwrap();
        assert!((f - 0.274_768_878_480_530_4).abs() < 1e-14, "{f}");
        let f = exit_fraction_3d(0.5, 0.1).unwrap();
        assert!((f - 0.175).abs() < 1e-15);
    }

    #[test]
    fn fractions_continuous_at_half_eps() {
        for &eps in &[0.05, 0.1, 0.2] {
            let s = 0.5 * eps * (1.0 + 1e-9);
            assert!((exit_fraction_2d(s, eps).unwrap() - 1.0).abs() < 1e-3);
            assert!((exit_fraction_3d(s, eps).unwrap() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn fraction_domain() {
        assert!(exit_fraction_2d(0.0, 0.1).is_err());
        assert!(exit_fraction_2d(1.0, 0.1).is_err());
        assert!(exit_fraction_3d(0.5, -0.1).is_err());
        assert!(short_window_prob(4, 3.0, 0.01).is_err());
        assert!(short_window_prob(2, 3.0, 0.0).is_err());
    }

    #[test]
    fn short_window_2d_leading_order() {
        let lam = 3.0f64;
        let v = short_window_prob(2, lam, 1e-4).unwrap();
        let lead = lam * (-lam).exp() * 2f64.sqrt() * 1e-2;
        assert!((v / lead - 1.0).abs() < 0.02, "{v} vs {lead}");
    }

    #[test]
    fn short_window_3d_refined_asymptotic() {
        let lam = 3.0f64;
        let eps = 1e-3f64;
        let v = short_window_prob(3, lam, eps).unwrap();
        let refined = lam * (-lam).exp() * eps * (-2.0 * eps.ln() + 1.0 + 2f64.ln()) / 2.0;
        assert!((v / refined - 1.0).abs() < 1e-3, "{}", v / refined);
    }

    #[test]
    fn short_window_vanishes() {
        let a = short_window_prob(3, 3.0, 1e-6).unwrap();
        let b = short_window_prob(3, 3.0, 1e-8).unwrap();
        assert!(b < a && b < 1e-6);
    }
}
