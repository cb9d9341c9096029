//! Closed-form mean search times for run-and-tumble searchers, the
//! diffusion-validity ratio, and the fertilization sweep built on them.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Distance to the egg, in micrometres.
pub const FERTILIZATION_DISTANCE: f64 = 1e5;
/// Sperm swimming speed, in micrometres per second.
pub const FERTILIZATION_SPEED: f64 = 75.0;

/// Mean fastest search time `E[T_N]` of `N` run-and-tumble searchers
/// escaping a ball of radius `l` at speed `v` with dimensionless tumbling
/// rate `rho = λL/v`.
///
/// The power `(1 - e^{-ρ})^{N+c}` is taken in log space so that `N` in the
/// hundreds of millions does not underflow.
pub fn summary_mean(dim: u8, rho: f64, n: u64, l: f64, v: f64) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(invalid(
            "rho",
            format!("must be positive and finite, got {rho}"),
        ));
    }
    if n < 2 {
        return Err(invalid("N", format!("must be at least 2, got {n}")));
    }
    if !(l > 0.0 && v > 0.0) {
        return Err(invalid("L", "length and speed must be positive"));
    }
    let nf = n as f64;
    let ln_keep = (-(-rho).exp()).ln_1p();
    // ln(ρ e^{-ρ}) = ln ρ - ρ
    let ln_rate = rho.ln() - rho;
    let ln_correction = match dim {
        1 => std::f64::consts::LN_2 + (nf + 1.0) * ln_keep - ln_rate - (rho + 1.0).ln() - nf.ln(),
        2 => (nf + 2.0) * ln_keep - 2.0 * ln_rate - 2.0 * nf.ln(),
        3 => (nf + 1.0) * ln_keep - ln_rate - nf.ln() - nf.ln().ln(),
        _ => return Err(invalid("dim", format!("must be 1, 2 or 3, got {dim}"))),
    };
    Ok(l / v * (1.0 + ln_correction.exp()))
}

/// `v ln N / (λ L)`; values well below 1 mean the diffusion approximation of
/// the extreme FPTs is trustworthy.
pub fn diffusion_validity(v: f64, lambda: f64, l: f64, n: u64) -> Result<f64> {
    for (field, x) in [("v", v), ("lambda", lambda), ("L", l)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(invalid(
                field,
                format!("must be positive and finite, got {x}"),
            ));
        }
    }
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    Ok(v * (n as f64).ln() / (lambda * l))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dim: u8,
    pub rho: f64,
    pub n: u64,
    pub mean_time: f64,
    pub ballistic_time: f64,
    /// `v ln N / (λ L)` at `λ = ρ v / L`.
    pub validity: f64,
}

/// Closed-form means and validity ratios over the grid `dims × rhos × ns`.
pub fn summary_table(
    dims: &[u8],
    rhos: &[f64],
    ns: &[u64],
    l: f64,
    v: f64,
) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::with_capacity(dims.len() * rhos.len() * ns.len());
    for &dim in dims {
        for &rho in rhos {
            for &n in ns {
                rows.push(SummaryRow {
                    dim,
                    rho,
                    n,
                    mean_time: summary_mean(dim, rho, n, l, v)?,
                    ballistic_time: l / v,
                    validity: diffusion_validity(v, rho * v / l, l, n)?,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseStudyRow {
    pub lambda: f64,
    pub n: u64,
    pub mean_time: f64,
    pub ballistic_time: f64,
}

/// Mean search time of the fastest of `N` sperm cells in 3d for `steps`
/// evenly spaced tumbling rates in `[lambda_lo, lambda_hi]`, for each `N`.
pub fn case_study_fertilization(
    lambda_lo: f64,
    lambda_hi: f64,
    n_values: &[u64],
    steps: usize,
) -> Result<Vec<CaseStudyRow>> {
    if !(lambda_lo > 0.0 && lambda_lo <= lambda_hi && lambda_hi.is_finite()) {
        return Err(invalid(
            "lambda",
            format!("need 0 < lambda_lo <= lambda_hi, got [{lambda_lo}, {lambda_hi}]"),
        ));
    }
    if steps == 0 || (steps == 1 && lambda_lo != lambda_hi) {
        return Err(invalid(
            "steps",
            "need at least two grid points for a range",
        ));
    }
    let (l, v) = (FERTILIZATION_DISTANCE, FERTILIZATION_SPEED);
    let mut rows = Vec::with_capacity(steps * n_values.len());
    for &n in n_values {
        for i in 0..steps {
            let lambda = if steps == 1 {
                lambda_lo
            } else {
                lambda_lo + (lambda_hi - lambda_lo) * i as f64 / (steps - 1) as f64
            };
            rows.push(CaseStudyRow {
                lambda,
                n,
                mean_time: summary_mean(3, lambda * l / v, n, l, v)?,
                ballistic_time: l / v,
            });
        }
    }
    Ok(rows)
}
