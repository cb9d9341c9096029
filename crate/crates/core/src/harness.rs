//! Batched Monte Carlo estimation of extreme FPT statistics.
//!
//! Draws are generated in fixed chunks of [`CHUNK_DRAWS`]; chunk `c` always
//! uses random stream `c` of the campaign seed, and chunk results are
//! concatenated in chunk order. The output therefore depends only on the
//! seed and the draw count, not on how many workers ran the chunks.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::evt::AsymptoticLaw;
use crate::models::{FptSample, PdmpModel};
use crate::rng::{stream, StreamRng};
use crate::special::gamma;

pub const CHUNK_DRAWS: u64 = 1 << 16;

// Unconditioned draws live in the upper half of the stream index space so
// they never share a stream with conditioned draws under the same seed.
const UNCONDITIONED_STREAMS: u64 = 1 << 63;

/// Where the random numbers come from and how many threads consume them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSettings {
    pub seed: u64,
    pub workers: usize,
}

impl RunSettings {
    pub fn new(seed: u64, workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(invalid("workers", "must be at least 1"));
        }
        Ok(Self { seed, workers })
    }
}

/// `K = ⌊M/N⌋` block order statistics of conditioned draws.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub model: PdmpModel,
    pub n_searchers: u64,
    /// Which order statistic each block contributes (1 = minimum).
    pub order: u64,
    pub total_draws: u64,
    pub seed: u64,
    pub minima: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalSummary {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub ecdf: Vec<f64>,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorPoint {
    pub n: u64,
    pub abs_error: f64,
    pub predicted_mean: f64,
    pub empirical_mean: f64,
    pub std_error: f64,
}

fn run_chunks<T, F>(draws: u64, settings: RunSettings, stream_base: u64, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut StreamRng, u64) -> T + Sync,
{
    let n_chunks = draws.div_ceil(CHUNK_DRAWS);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.workers)
        .build()
        .map_err(|e| invalid("workers", e.to_string()))?;
    Ok(pool.install(|| {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK_DRAWS.min(draws - c * CHUNK_DRAWS);
                let mut rng = stream(settings.seed, stream_base + c);
                work(&mut rng, len)
            })
            .collect()
    }))
}

/// `m` conditioned FPT values in reproducible order.
pub fn conditioned_pool(model: &PdmpModel, m: u64, settings: RunSettings) -> Result<Vec<f64>> {
    let chunks = run_chunks(m, settings, 0, |rng, len| {
        (0..len)
            .map(|_| model.sample_conditioned_fpt(rng).value)
            .collect::<Vec<_>>()
    })?;
    Ok(chunks.concat())
}

/// Number of `m` unconditioned draws accepted by `count`. Nothing is
/// stored, so `m` may be large. Runs still going at `horizon` are cut short
/// and reach `count` with `value = ∞`; pass `f64::INFINITY` for full runs.
pub fn count_unconditioned<F>(
    model: &PdmpModel,
    m: u64,
    horizon: f64,
    settings: RunSettings,
    count: F,
) -> Result<u64>
where
    F: Fn(&FptSample) -> bool + Sync,
{
    let chunks = run_chunks(m, settings, UNCONDITIONED_STREAMS, |rng, len| {
        (0..len)
            .filter(|_| count(&model.sample_fpt_until(rng, horizon)))
            .count() as u64
    })?;
    Ok(chunks.iter().sum())
}

/// `m` unconditioned draws, stored.
pub fn unconditioned_pool(
    model: &PdmpModel,
    m: u64,
    settings: RunSettings,
) -> Result<Vec<FptSample>> {
    let chunks = run_chunks(m, settings, UNCONDITIONED_STREAMS, |rng, len| {
        (0..len).map(|_| model.sample_fpt(rng)).collect::<Vec<_>>()
    })?;
    Ok(chunks.concat())
}

/// k-th smallest value of each contiguous block of `n` in `pool`; a trailing
/// partial block is dropped.
pub fn block_order_statistics(pool: &[f64], n: u64, k: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    if k == 0 || k > n {
        return Err(invalid("k", format!("must lie in [1, N = {n}], got {k}")));
    }
    let n = usize::try_from(n).map_err(|_| invalid("N", "too large"))?;
    if pool.len() < n {
        return Err(invalid(
            "M",
            format!("must be at least N = {n}, got {}", pool.len()),
        ));
    }
    let mut scratch = vec![0.0; n];
    Ok(pool
        .chunks_exact(n)
        .map(|block| {
            if k == 1 {
                return block.iter().copied().fold(f64::INFINITY, f64::min);
            }
            scratch.copy_from_slice(block);
            let (_, kth, _) = scratch.select_nth_unstable_by(k as usize - 1, f64::total_cmp);
            *kth
        })
        .collect())
}

/// Order statistics of `⌊M/N⌋` blocks drawn fresh from the model.
pub fn batch_order_statistics(
    model: &PdmpModel,
    n: u64,
    m: u64,
    k: u64,
    settings: RunSettings,
) -> Result<SampleBatch> {
    if m < n {
        return Err(invalid("M", format!("must be at least N = {n}, got {m}")));
    }
    let pool = conditioned_pool(model, m, settings)?;
    Ok(SampleBatch {
        model: *model,
        n_searchers: n,
        order: k,
        total_draws: m,
        seed: settings.seed,
        minima: block_order_statistics(&pool, n, k)?,
    })
}

pub fn batch_minima(
    model: &PdmpModel,
    n: u64,
    m: u64,
    settings: RunSettings,
) -> Result<SampleBatch> {
    batch_order_statistics(model, n, m, 1, settings)
}

/// `(T - t0) / (t0 a_N)` for each value.
pub fn rescale_sigma(values: &[f64], law: &AsymptoticLaw, n: u64, exact: bool) -> Result<Vec<f64>> {
    let scale = law.t0 * law.scaling_constant(n, exact)?;
    Ok(values.iter().map(|t| (t - law.t0) / scale).collect())
}

/// `t0 (1 + a_N Γ(1 + 1/p))`, the mean of the fastest conditioned FPT.
pub fn predicted_conditioned_mean(law: &AsymptoticLaw, n: u64, exact: bool) -> Result<f64> {
    Ok(law.t0 * (1.0 + law.scaling_constant(n, exact)? * gamma(1.0 + 1.0 / law.p)))
}

pub fn summarize(values: &[f64]) -> Result<EmpiricalSummary> {
    if values.is_empty() {
        return Err(invalid("values", "cannot summarize an empty sample"));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(invalid("values", format!("non-finite sample {bad}")));
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let variance = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let mut ecdf = values.to_vec();
    ecdf.sort_by(f64::total_cmp);
    let histogram = freedman_diaconis(&ecdf);
    Ok(EmpiricalSummary {
        mean,
        variance,
        std_error: (variance / k).sqrt(),
        ecdf,
        histogram,
    })
}

const MAX_BINS: usize = 10_000;

fn quantile(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn freedman_diaconis(sorted: &[f64]) -> Histogram {
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    let iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    let bins = if width > 0.0 && hi > lo {
        (((hi - lo) / width).ceil() as usize).clamp(1, MAX_BINS)
    } else {
        1
    };
    let step = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|i| lo + step * i as f64).collect();
    edges.push(hi);
    let mut counts = vec![0u64; bins];
    for &v in sorted {
        let idx = if step > 0.0 {
            (((v - lo) / step) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    Histogram { edges, counts }
}

/// Two-sided Kolmogorov–Smirnov distance between the empirical CDF of
/// `sorted` and `1 - survival`, checked on both sides of every sample.
pub fn ks_distance<S: Fn(f64) -> f64>(sorted: &[f64], survival: S) -> Result<f64> {
    if sorted.is_empty() {
        return Err(invalid("ecdf", "empty sample"));
    }
    if sorted.iter().any(|v| v.is_nan()) || sorted.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid(
            "ecdf",
            "samples must be sorted in nondecreasing order",
        ));
    }
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let cdf = 1.0 - survival(x);
        let above = (i + 1) as f64 / n - cdf;
        let below = cdf - i as f64 / n;
        d.max(above).max(below)
    }))
}

/// Absolute error of the batch mean against `t0 (1 + a_N Γ(1+1/p))` for each
/// `N`. One pool of `m` conditioned draws is shared by every `N`.
pub fn error_curve(
    model: &PdmpModel,
    law: &AsymptoticLaw,
    n_list: &[u64],
    m: u64,
    exact: bool,
    settings: RunSettings,
) -> Result<Vec<ErrorPoint>> {
    if n_list.is_empty() {
        return Err(invalid("N", "list must be nonempty"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("N", "list must be strictly increasing"));
    }
    let n_max = *n_list.last().expect("nonempty");
    if m < n_max {
        return Err(invalid(
            "M",
            format!("must be at least max N = {n_max}, got {m}"),
        ));
    }
    let pool = conditioned_pool(model, m, settings)?;
    n_list
        .iter()
        .map(|&n| {
            let minima = block_order_statistics(&pool, n, 1)?;
            let s = summarize(&minima)?;
            let predicted = predicted_conditioned_mean(law, n, exact)?;
            Ok(ErrorPoint {
                n,
                abs_error: (s.mean - predicted).abs(),
                predicted_mean: predicted,
                empirical_mean: s.mean,
                std_error: s.std_error,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{LinearPdmpParams, RunTumble1dParams};

    fn settings(workers: usize) -> RunSettings {
        RunSettings::new(11, workers).unwrap()
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&[2.5; 4]).unwrap();
        assert_eq!((s.mean, s.variance), (2.5, 0.0));
        assert_eq!(s.histogram.counts, vec![4]);
        let s = summarize(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.variance), (2.0, 1.0));
        assert_eq!(s.ecdf, vec![1.0, 2.0, 3.0]);
        assert!(summarize(&[]).is_err());
        assert!(summarize(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn histogram_counts_everything() {
        let v: Vec<f64> = (0..1000).map(|i| ((i * 37) % 1000) as f64 / 7.0).collect();
        let s = summarize(&v).unwrap();
        assert_eq!(s.histogram.counts.iter().sum::<u64>(), 1000);
        assert_eq!(s.histogram.edges.len(), s.histogram.counts.len() + 1);
        assert!(s.histogram.edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ks_examples() {
        let exp_surv = |x: f64| (-x).exp();
        let median = std::f64::consts::LN_2;
        assert!((ks_distance(&[median], exp_surv).unwrap() - 0.5).abs() < 1e-15);
        // reference law is a step at 1, every sample lies above it
        let step = |x: f64| if x < 1.0 { 1.0 } else { 0.0 };
        let d = ks_distance(&[1.5, 2.0, 3.0, 4.0], step).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!(ks_distance(&[2.0, 1.0], exp_surv).is_err());
        assert!(ks_distance(&[], exp_surv).is_err());
    }

    #[test]
    fn block_statistics() {
        let pool = [5.0, 3.0, 4.0, 1.0, 9.0, 2.0, 7.0];
        assert_eq!(block_order_statistics(&pool, 3, 1).unwrap(), vec![3.0, 1.0]);
        assert_eq!(block_order_statistics(&pool, 3, 2).unwrap(), vec![4.0, 2.0]);
        assert_eq!(block_order_statistics(&pool, 1, 1).unwrap(), pool.to_vec());
        assert!(block_order_statistics(&pool, 3, 4).is_err());
        assert!(block_order_statistics(&pool, 8, 1).is_err());
    }

    #[test]
    fn batch_layout_and_support() {
        let model =
            PdmpModel::RunTumble1d(RunTumble1dParams::symmetric_interval(1.0, 1.0, 3.0).unwrap());
        let b = batch_minima(&model, 1000, 1_000_000 / 10, settings(1)).unwrap();
        assert_eq!(b.minima.len(), 100);
        assert!(b.minima.iter().all(|&t| t > 1.0));
        let raw = batch_minima(&model, 1, 500, settings(1)).unwrap();
        let pool = conditioned_pool(&model, 500, settings(1)).unwrap();
        assert_eq!(raw.minima, pool);
        assert!(batch_minima(&model, 10, 9, settings(1)).is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let model = PdmpModel::Linear(LinearPdmpParams::new(3.0, 0.2, 0.5).unwrap());
        let m = 3 * CHUNK_DRAWS + 17;
        let a = conditioned_pool(&model, m, settings(1)).unwrap();
        let b = conditioned_pool(&model, m, settings(3)).unwrap();
        assert_eq!(a.len() as u64, m);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn zero_workers_rejected() {
        assert!(RunSettings::new(1, 0).is_err());
    }
}
