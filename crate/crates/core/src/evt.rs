//! Extreme-value limit laws for the fastest and k-th fastest first passage
//! time among `N` iid searchers.
//!
//! A single FPT `τ` is summarized by an [`AsymptoticLaw`]: it never beats
//! `t0`, equals `t0` with probability `q`, and otherwise satisfies
//!
//! ```text
//! P(t0 < τ < t0(1+ε)) ≈ (1-q) α ε^p            (plain)
//! P(t0 < τ < t0(1+ε)) ≈ (1-q) α ln(1/ε) ε^p    (log-corrected)
//! ```
//!
//! as `ε → 0`. From these four numbers the fastest FPT `T_N` is an atom at
//! `t0` with probability `1-(1-q)^N`, and otherwise `t0(1 + a_N Σ_N)` where
//! `Σ_N` is approximately `Weibull(1, p)`. The k-th fastest mixes generalized
//! Gamma laws with binomial weights.

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::special::{gamma, lambert_w_m1, ln_gamma, upper_incomplete_gamma_regularized};

/// Short-time law of a single first passage time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLaw")]
pub struct AsymptoticLaw {
    pub t0: f64,
    pub q: f64,
    pub alpha: f64,
    pub p: f64,
    pub log_corrected: bool,
}

#[derive(Deserialize)]
struct RawLaw {
    t0: f64,
    q: f64,
    alpha: f64,
    p: f64,
    #[serde(default)]
    log_corrected: bool,
}

impl TryFrom<RawLaw> for AsymptoticLaw {
    type Error = Error;

    fn try_from(raw: RawLaw) -> Result<Self> {
        AsymptoticLaw::new(raw.t0, raw.q, raw.alpha, raw.p, raw.log_corrected)
    }
}

/// Leading-order mean and variance of `T_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanVariance {
    pub mean: f64,
    pub variance: f64,
}

impl AsymptoticLaw {
    /// Parses the `{t0, q, alpha, p, log_corrected}` object, reporting
    /// constraint violations as [`Error::InvalidParameter`].
    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let raw: RawLaw = serde_json::from_value(value)?;
        raw.try_into()
    }

    pub fn new(t0: f64, q: f64, alpha: f64, p: f64, log_corrected: bool) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(invalid(
                "t0",
                format!("must be positive and finite, got {t0}"),
            ));
        }
        if !(0.0..1.0).contains(&q) {
            return Err(invalid("q", format!("must lie in [0, 1), got {q}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(
                "alpha",
                format!("must be positive and finite, got {alpha}"),
            ));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(invalid(
                "p",
                format!("must be positive and finite, got {p}"),
            ));
        }
        Ok(Self {
            t0,
            q,
            alpha,
            p,
            log_corrected,
        })
    }

    /// The same law with time measured in units `factor` times smaller, i.e.
    /// `t0 → factor·t0`. The relative quantities `q`, `α`, `p` are unchanged.
    pub fn rescale_time(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.t0 * factor,
            self.q,
            self.alpha,
            self.p,
            self.log_corrected,
        )
    }

    /// The scaling constant `a_N`.
    ///
    /// Plain laws use `(αN)^{-1/p}`. Log-corrected laws use
    /// `(αN ln N / p)^{-1/p}`, or with `exact` the Lambert-W inversion
    /// `(-αN W₋₁(-p/(Nα)) / p)^{-1/p}`.
    pub fn scaling_constant(&self, n: u64, exact: bool) -> Result<f64> {
        if n < 2 {
            return Err(domain(
                "scaling_constant",
                format!("N must be at least 2, got {n}"),
            ));
        }
        let nf = n as f64;
        let base = if !self.log_corrected {
            self.alpha * nf
        } else if exact {
            let w = lambert_w_m1(-self.p / (nf * self.alpha)).map_err(|_| {
                domain(
                    "scaling_constant",
                    format!(
                        "p/(N alpha) = {} must be below 1/e for the Lambert-W scaling",
                        self.p / (nf * self.alpha)
                    ),
                )
            })?;
            -self.alpha * nf * w / self.p
        } else {
            self.alpha * nf * nf.ln() / self.p
        };
        Ok(base.powf(-1.0 / self.p))
    }

    /// `(1-q)^N`, the probability that none of `N` searchers hits the atom.
    pub fn non_atom_probability(&self, n: u64) -> f64 {
        (n as f64 * (-self.q).ln_1p()).exp()
    }

    /// `P(T_N = t0) = 1 - (1-q)^N`.
    pub fn atom_probability(&self, n: u64) -> f64 {
        1.0 - self.non_atom_probability(n)
    }

    /// Large-N approximation of `P(T_N > t)`.
    pub fn fastest_survival(&self, n: u64, t: f64) -> Result<f64> {
        let a_n = self.scaling_constant(n, false)?;
        if t < self.t0 {
            return Ok(1.0);
        }
        let x = (t - self.t0) / (self.t0 * a_n);
        Ok(self.non_atom_probability(n) * (-x.powf(self.p)).exp())
    }

    /// Leading-order mean and variance of `T_N`.
    pub fn mean_variance(&self, n: u64) -> Result<MeanVariance> {
        let a_n = self.scaling_constant(n, false)?;
        let w = self.non_atom_probability(n);
        let scale = self.t0 * a_n;
        let g1 = gamma(1.0 + 1.0 / self.p);
        let g2 = gamma(1.0 + 2.0 / self.p);
        Ok(MeanVariance {
            mean: self.t0 + w * scale * g1,
            variance: scale * scale * w * (g2 - w * g1 * g1),
        })
    }

    /// Predicted mean of the fastest *conditioned* FPT, `t0(1 + a_N Γ(1+1/p))`.
    pub fn conditioned_mean(&self, n: u64) -> Result<f64> {
        let a_n = self.scaling_constant(n, false)?;
        Ok(self.t0 * (1.0 + a_n * gamma(1.0 + 1.0 / self.p)))
    }

    /// Predicted variance of the fastest conditioned FPT,
    /// `(t0 a_N)^2 [Γ(1+2/p) - Γ(1+1/p)^2]`.
    pub fn conditioned_variance(&self, n: u64) -> Result<f64> {
        let scale = self.t0 * self.scaling_constant(n, false)?;
        let g1 = gamma(1.0 + 1.0 / self.p);
        Ok(scale * scale * (gamma(1.0 + 2.0 / self.p) - g1 * g1))
    }
}

/// Generalized Gamma distribution `genΓ(t, p, k)` with survival
/// `Γ(k, (x/t)^p) / Γ(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenGammaDist {
    pub scale: f64,
    pub shape: f64,
    pub order: f64,
}

impl GenGammaDist {
    pub fn new(scale: f64, shape: f64, order: f64) -> Result<Self> {
        for (field, v) in [("scale", scale), ("shape", shape), ("order", order)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(
                    field,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(Self {
            scale,
            shape,
            order,
        })
    }

    pub fn weibull(scale: f64, shape: f64) -> Result<Self> {
        Self::new(scale, shape, 1.0)
    }

    pub fn erlang(scale: f64, k: u32) -> Result<Self> {
        Self::new(scale, 1.0, k as f64)
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let z = (x / self.scale).powf(self.shape);
        if self.order == 1.0 {
            return (-z).exp();
        }
        upper_incomplete_gamma_regularized(self.order, z).expect("parameters validated")
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let r = x / self.scale;
        let ln_pdf = self.shape.ln() + self.order * self.shape * r.ln()
            - r.powf(self.shape)
            - x.ln()
            - ln_gamma(self.order);
        ln_pdf.exp()
    }

    /// `E[X^m] = t^m Γ(k + m/p) / Γ(k)`.
    pub fn moment(&self, m: f64) -> Result<f64> {
        if !(m >= 0.0) {
            return Err(domain(
                "gengamma_moment",
                format!("m must be nonnegative, got {m}"),
            ));
        }
        if m == 0.0 {
            return Ok(1.0);
        }
        let ratio = (ln_gamma(self.order + m / self.shape) - ln_gamma(self.order)).exp();
        Ok(self.scale.powf(m) * ratio)
    }

    pub fn mean(&self) -> f64 {
        self.moment(1.0).expect("m = 1")
    }
}

/// The k-th fastest FPT among `n_searchers` iid copies of a law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremeOrderQuery {
    pub law: AsymptoticLaw,
    pub n_searchers: u64,
    pub order: u64,
}

impl ExtremeOrderQuery {
    pub fn new(law: AsymptoticLaw, n_searchers: u64, order: u64) -> Result<Self> {
        if n_searchers < 1 {
            return Err(invalid("n_searchers", "must be at least 1"));
        }
        if order < 1 || order > n_searchers {
            return Err(domain(
                "extreme_order_query",
                format!("order k = {order} must satisfy 1 <= k <= N = {n_searchers}"),
            ));
        }
        Ok(Self {
            law,
            n_searchers,
            order,
        })
    }

    /// Binomial weights `C(N,j) q^j (1-q)^{N-j}` for `j = 0..k`, evaluated in
    /// log space so that `N` in the hundreds of millions does not overflow.
    pub fn mixture_weights(&self) -> Vec<f64> {
        let n = self.n_searchers as f64;
        let q = self.law.q;
        let ln_miss = (-q).ln_1p();
        let mut weights = Vec::with_capacity(self.order as usize);
        let mut ln_choose = 0.0;
        for j in 0..self.order {
            if j > 0 {
                if q == 0.0 {
                    weights.push(0.0);
                    continue;
                }
                ln_choose += (n - j as f64 + 1.0).ln() - (j as f64).ln();
            }
            let jf = j as f64;
            let ln_hit = if j == 0 { 0.0 } else { jf * q.ln() };
            weights.push((ln_choose + ln_hit + (n - jf) * ln_miss).exp());
        }
        weights
    }

    /// Large-N approximation of `P(T_{k,N} > t)`.
    pub fn kth_survival(&self, t: f64) -> Result<f64> {
        let a_n = self.law.scaling_constant(self.n_searchers, false)?;
        if t < self.law.t0 {
            return Ok(1.0);
        }
        let x = (t - self.law.t0) / (self.law.t0 * a_n);
        let k = self.order;
        let mut total = 0.0;
        for (j, w) in self.mixture_weights().into_iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let d = GenGammaDist::new(1.0, self.law.p, (k - j as u64) as f64)?;
            total += w * d.survival(x);
        }
        Ok(total)
    }

    /// Leading term of `E[(T_{k,N} - t0)^m]`.
    pub fn extreme_moment(&self, m: f64) -> Result<f64> {
        if !(m >= 0.0) {
            return Err(domain(
                "extreme_moment",
                format!("m must be nonnegative, got {m}"),
            ));
        }
        let a_n = self.law.scaling_constant(self.n_searchers, false)?;
        let k = self.order;
        let mut total = 0.0;
        for (j, w) in self.mixture_weights().into_iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let order = (k - j as u64) as f64;
            total += w * (ln_gamma(order + m / self.law.p) - ln_gamma(order)).exp();
        }
        Ok((self.law.t0 * a_n).powf(m) * total)
    }
}
