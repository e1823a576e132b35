//! `opfimb`: resample a CSV dataset or compare resampling methods on it.

mod evaluate;
mod output;
mod resample;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opf_imbalance::dataset::{CsvOptions, LabelColumn};
use opf_imbalance::evaluation::Method;

#[derive(Debug, Parser)]
#[command(name = "opfimb", version, about = "Optimum-path forest resampling for imbalanced binary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resample a dataset and write the result as CSV.
    Resample(resample::ResampleArgs),
    /// Compare methods over repeated stratified holdout runs.
    Evaluate(evaluate::EvaluateArgs),
}

#[derive(Debug, Clone, Args)]
struct InputArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Label column: a header name, a 0-based index, or `last`.
    #[arg(long, default_value = "last")]
    label_column: LabelColumn,
    /// Raw label value of the positive class (default: the larger value).
    #[arg(long)]
    positive_label: Option<String>,
}

impl InputArgs {
    fn csv_options(&self) -> CsvOptions {
        CsvOptions { label_column: self.label_column.clone(), positive_label: self.positive_label.clone() }
    }

    fn label_column_text(&self) -> String {
        match &self.label_column {
            LabelColumn::Last => "last".into(),
            LabelColumn::Index(i) => i.to_string(),
            LabelColumn::Name(n) => n.clone(),
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
        format!("unknown method '{s}', expected one of: {}", names.join(", "))
    })
}

/// Errors that should exit with the usage status.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Resample(args) => resample::run(&args),
        Command::Evaluate(args) => evaluate::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(1)
        }
    }
}

/// Joins the error chain, skipping causes already spelled out by their
/// parent's message.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}
