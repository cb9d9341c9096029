//! `xfpt`: predictions and simulations of extreme first passage times.
//!
//! Every command prints a JSON report on stdout. Failures print
//! `{"error": {"field": ..., "message": ...}}` on stderr and exit nonzero.

mod commands;
mod config;

use std::process::ExitCode;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Parser, Subcommand};
use serde_json::json;

use config::{serde_field, CaseStudyArgs, FieldError, RunArgs, SummaryArgs};

#[derive(Debug, Parser)]
#[command(name = "xfpt", version, about = "Extreme first passage times of PDMPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Asymptotic law, atom probability, moments and survival grid
    Predict(RunArgs),
    /// Monte Carlo order statistics: minima.csv and sigma_ecdf.csv
    Simulate(RunArgs),
    /// Monte Carlo mean against prediction: error_curve.csv
    Compare(RunArgs),
    /// Closed-form run-and-tumble means and diffusion validity
    Summary(SummaryArgs),
    /// Fertilization sweep over the tumbling rate
    CaseStudy(CaseStudyArgs),
}

fn run(command: Command) -> anyhow::Result<serde_json::Value> {
    match command {
        Command::Predict(args) => commands::predict(&args.resolve()?),
        Command::Simulate(args) => commands::simulate(&args.resolve()?),
        Command::Compare(args) => commands::compare(&args.resolve()?),
        Command::Summary(args) => commands::summary(&args.resolve()?),
        Command::CaseStudy(args) => commands::case_study(&args.resolve()?),
    }
}

/// The field responsible for a failure, if any layer of the error names one.
fn blamed_field(err: &anyhow::Error) -> Option<String> {
    err.chain().find_map(|cause| {
        if let Some(e) = cause.downcast_ref::<FieldError>() {
            return Some(e.field.clone());
        }
        match cause.downcast_ref::<xfpt::Error>() {
            Some(xfpt::Error::InvalidParameter { field, .. }) => Some(field.to_string()),
            Some(xfpt::Error::Json(e)) => serde_field(&e.to_string()),
            _ => None,
        }
    })
}

/// `{:#}` of an error chain, skipping causes already quoted by their parent.
fn chain_message(err: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if parts.last().is_none_or(|prev| !prev.ends_with(&text)) {
            parts.push(text);
        }
    }
    parts.join(": ")
}

fn report_error(field: Option<String>, message: String) {
    let body = json!({ "error": { "field": field, "message": message } });
    eprintln!("{body}");
}

fn usage_field(err: &clap::Error) -> Option<String> {
    match err.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(arg)) => arg
            .trim_start_matches('-')
            .split([' ', '=', '<'])
            .next()
            .map(str::to_string),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            report_error(
                usage_field(&err),
                err.render().to_string().trim().to_string(),
            );
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            report_error(blamed_field(&err), chain_message(&err));
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serde_messages_name_fields() {
        assert_eq!(
            serde_field("missing field `p1` at line 1").as_deref(),
            Some("p1")
        );
        assert_eq!(
            serde_field("unknown field `sede`, expected one of").as_deref(),
            Some("sede")
        );
        assert_eq!(serde_field("invalid type: string"), None);
    }

    #[test]
    fn chain_skips_repeated_sources() {
        let inner: serde_json::Error = serde_json::from_str::<u8>("x").unwrap_err();
        let err = anyhow::Error::from(xfpt::Error::from(inner)).context("reading model");
        let text = chain_message(&err);
        assert_eq!(text.matches("expected value").count(), 1, "{text}");
    }
}
