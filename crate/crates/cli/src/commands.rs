//! The five subcommands. Each writes its artifacts under the output
//! directory and returns a JSON report for stdout.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use xfpt::closed_forms::{case_study_fertilization, summary_table};
use xfpt::harness::{
    block_order_statistics, conditioned_pool, error_curve, ks_distance, predicted_conditioned_mean,
    rescale_sigma, summarize,
};
use xfpt::output::{write_case_study, write_error_curve, write_summary, MinimaCsv, SigmaCsv};
use xfpt::{ExtremeOrderQuery, GenGammaDist};

use crate::config::{field_error, CaseStudyConfig, RunConfig, SummaryConfig};

/// Grid of rescaled times `x` at which survival functions are tabulated.
const SURVIVAL_GRID_STEP: f64 = 0.25;
const SURVIVAL_GRID_POINTS: usize = 25;

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Serialize)]
struct SurvivalPoint {
    t: f64,
    survival: f64,
}

#[derive(Serialize)]
struct Prediction {
    #[serde(rename = "N")]
    n: u64,
    k: u64,
    scaling_constant: f64,
    atom_probability: f64,
    mean: f64,
    variance: f64,
    conditioned_mean: f64,
    conditioned_variance: f64,
    kth_mean: f64,
    kth_variance: f64,
    survival: Vec<SurvivalPoint>,
}

pub fn predict(cfg: &RunConfig) -> Result<Value> {
    let law = cfg.subject.law()?;
    let mut predictions = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        if cfg.k > n {
            return Err(field_error("k", format!("order {} exceeds N = {n}", cfg.k)));
        }
        let query = ExtremeOrderQuery::new(law, n, cfg.k)?;
        let mv = law.mean_variance(n)?;
        let a_n = law.scaling_constant(n, false)?;
        let m1 = query.extreme_moment(1.0)?;
        let m2 = query.extreme_moment(2.0)?;
        let survival = (0..SURVIVAL_GRID_POINTS)
            .map(|i| {
                let t = law.t0 * (1.0 + a_n * SURVIVAL_GRID_STEP * i as f64);
                Ok(SurvivalPoint {
                    t,
                    survival: query.kth_survival(t)?,
                })
            })
            .collect::<xfpt::Result<Vec<_>>>()?;
        predictions.push(Prediction {
            n,
            k: cfg.k,
            scaling_constant: law.scaling_constant(n, cfg.exact_an)?,
            atom_probability: law.atom_probability(n),
            mean: mv.mean,
            variance: mv.variance,
            conditioned_mean: predicted_conditioned_mean(&law, n, cfg.exact_an)?,
            conditioned_variance: law.conditioned_variance(n)?,
            kth_mean: law.t0 + m1,
            kth_variance: m2 - m1 * m1,
            survival,
        });
    }
    let report = json!({
        "model": cfg.subject.name(),
        "law": law,
        "predictions": predictions,
    });
    write_json(&cfg.out, "prediction.json", &report)?;
    Ok(report)
}

pub fn simulate(cfg: &RunConfig) -> Result<Value> {
    cfg.require_n()?;
    let model = cfg.subject.model()?;
    let law = model.law()?;
    for &n in &cfg.n_list {
        if n > cfg.m {
            return Err(field_error("M", format!("must be at least N = {n}")));
        }
        if cfg.k > n {
            return Err(field_error("k", format!("order {} exceeds N = {n}", cfg.k)));
        }
    }
    let pool = conditioned_pool(model, cfg.m, cfg.settings)?;
    let limit = GenGammaDist::new(1.0, law.p, cfg.k as f64)?;
    let mut minima_csv = MinimaCsv::new(create(&cfg.out, "minima.csv")?)?;
    let mut sigma_csv = SigmaCsv::new(create(&cfg.out, "sigma_ecdf.csv")?)?;
    let mut batches = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let stats = block_order_statistics(&pool, n, cfg.k)?;
        minima_csv.append(model.name(), n, cfg.k, &stats)?;
        let mut sigma = rescale_sigma(&stats, &law, n, cfg.exact_an)?;
        sigma.sort_by(f64::total_cmp);
        sigma_csv.append(model.name(), n, &sigma)?;
        let s = summarize(&stats)?;
        batches.push(json!({
            "N": n,
            "blocks": stats.len(),
            "mean": s.mean,
            "std_error": s.std_error,
            "variance": s.variance,
            "ks_sigma": ks_distance(&sigma, |x| limit.survival(x))?,
        }));
    }
    minima_csv.finish()?;
    sigma_csv.finish()?;
    let report = json!({
        "model": model.name(),
        "law": law,
        "M": cfg.m,
        "k": cfg.k,
        "seed": cfg.settings.seed,
        "workers": cfg.settings.workers,
        "batches": batches,
    });
    write_json(&cfg.out, "simulate_report.json", &report)?;
    Ok(report)
}

/// Writes the error curve and checks that the error, measured in units of
/// the leading scale `t0 a_N`, shrinks as `N` grows.
pub fn compare(cfg: &RunConfig) -> Result<Value> {
    cfg.require_n()?;
    if cfg.k != 1 {
        return Err(field_error("k", "compare checks the fastest searcher only"));
    }
    let model = cfg.subject.model()?;
    let law = model.law()?;
    let points = error_curve(model, &law, &cfg.n_list, cfg.m, cfg.exact_an, cfg.settings)?;
    write_error_curve(create(&cfg.out, "error_curve.csv")?, model.name(), &points)?;
    let mut rows = Vec::with_capacity(points.len());
    let mut scaled = Vec::with_capacity(points.len());
    for p in &points {
        let leading = law.t0 * law.scaling_constant(p.n, cfg.exact_an)?;
        scaled.push(p.abs_error / leading);
        rows.push(json!({
            "N": p.n,
            "abs_error": p.abs_error,
            "scaled_error": p.abs_error / leading,
            "std_errors": p.abs_error / p.std_error,
        }));
    }
    let pass = scaled.windows(2).all(|w| w[1] < w[0]);
    let report = json!({
        "model": model.name(),
        "law": law,
        "M": cfg.m,
        "seed": cfg.settings.seed,
        "workers": cfg.settings.workers,
        "points": rows,
        "pass": pass,
    });
    write_json(&cfg.out, "compare_report.json", &report)?;
    Ok(report)
}

pub fn summary(cfg: &SummaryConfig) -> Result<Value> {
    let rows = summary_table(&cfg.dims, &cfg.rhos, &cfg.ns, cfg.l, cfg.v)?;
    write_summary(create(&cfg.out, "summary.csv")?, &rows)?;
    Ok(json!({ "rows": rows }))
}

pub fn case_study(cfg: &CaseStudyConfig) -> Result<Value> {
    let rows = case_study_fertilization(cfg.lambda_lo, cfg.lambda_hi, &cfg.ns, cfg.steps)?;
    write_case_study(create(&cfg.out, "case_study.csv")?, &rows)?;
    let curves: Vec<Value> = cfg
        .ns
        .iter()
        .map(|&n| {
            let times: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.mean_time)
                .collect();
            json!({
                "N": n,
                "first": times.first(),
                "last": times.last(),
            })
        })
        .collect();
    Ok(json!({
        "rows": rows.len(),
        "ballistic_time": rows.first().map(|r| r.ballistic_time),
        "curves": curves,
    }))
}
