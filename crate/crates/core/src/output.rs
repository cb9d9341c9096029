//! CSV artifacts. Floats are written with 17 significant digits so they
//! round-trip exactly.

use std::io::Write;

use crate::closed_forms::{CaseStudyRow, SummaryRow};
use crate::error::Result;
use crate::harness::ErrorPoint;

/// Formats `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(sink: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    Ok(w)
}

/// A `minima.csv` table; add one block of values per (N, k) pair.
pub struct MinimaCsv<W: Write>(csv::Writer<W>);

impl<W: Write> MinimaCsv<W> {
    pub fn new(sink: W) -> Result<Self> {
        Ok(Self(writer(sink, &["model", "N", "k_index", "value"])?))
    }

    pub fn append(&mut self, model: &str, n: u64, k: u64, values: &[f64]) -> Result<()> {
        let (n, k) = (n.to_string(), k.to_string());
        for &v in values {
            self.0.write_record([model, &n, &k, &fmt_f64(v)])?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        Ok(self.0.flush()?)
    }
}

/// A `sigma_ecdf.csv` table of sorted rescaled values.
pub struct SigmaCsv<W: Write>(csv::Writer<W>);

impl<W: Write> SigmaCsv<W> {
    pub fn new(sink: W) -> Result<Self> {
        Ok(Self(writer(sink, &["model", "N", "sigma"])?))
    }

    pub fn append(&mut self, model: &str, n: u64, sorted_sigma: &[f64]) -> Result<()> {
        let n = n.to_string();
        for &s in sorted_sigma {
            self.0.write_record([model, &n, &fmt_f64(s)])?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        Ok(self.0.flush()?)
    }
}

pub fn write_error_curve<W: Write>(sink: W, model: &str, points: &[ErrorPoint]) -> Result<()> {
    let mut w = writer(
        sink,
        &[
            "model",
            "N",
            "abs_error",
            "predicted_mean",
            "empirical_mean",
            "std_error",
        ],
    )?;
    for p in points {
        w.write_record([
            model.to_string(),
            p.n.to_string(),
            fmt_f64(p.abs_error),
            fmt_f64(p.predicted_mean),
            fmt_f64(p.empirical_mean),
            fmt_f64(p.std_error),
        ])?;
    }
    Ok(w.flush()?)
}

pub fn write_summary<W: Write>(sink: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = writer(
        sink,
        &["dim", "rho", "N", "mean_time", "ballistic_time", "validity"],
    )?;
    for r in rows {
        w.write_record([
            r.dim.to_string(),
            fmt_f64(r.rho),
            r.n.to_string(),
            fmt_f64(r.mean_time),
            fmt_f64(r.ballistic_time),
            fmt_f64(r.validity),
        ])?;
    }
    Ok(w.flush()?)
}

pub fn write_case_study<W: Write>(sink: W, rows: &[CaseStudyRow]) -> Result<()> {
    let mut w = writer(sink, &["lambda", "N", "mean_time", "ballistic_time"])?;
    for r in rows {
        w.write_record([
            fmt_f64(r.lambda),
            r.n.to_string(),
            fmt_f64(r.mean_time),
            fmt_f64(r.ballistic_time),
        ])?;
    }
    Ok(w.flush()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1_336.309_578_792_390_7, 5e-324, -2.5e300] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }

    #[test]
    fn minima_layout() {
        let mut buf = Vec::new();
        let mut w = MinimaCsv::new(&mut buf).unwrap();
        w.append("linear", 10, 2, &[1.5, 2.0]).unwrap();
        w.finish().unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "model,N,k_index,value");
        assert_eq!(lines[1], "linear,10,2,1.5000000000000000e0");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn error_curve_layout() {
        let mut buf = Vec::new();
        let p = ErrorPoint {
            n: 10,
            abs_error: 0.25,
            predicted_mean: 1.0,
            empirical_mean: 1.25,
            std_error: 0.5,
        };
        write_error_curve(&mut buf, "run_tumble_1d", &[p]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("model,N,abs_error,predicted_mean,empirical_mean,std_error\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
