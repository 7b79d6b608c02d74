use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use vqf_cli::{
    analyze, canonical_json, exit_code, preimage_report, read_document, render_text,
    veronese_report, AnalyzeOptions, FormDocument, FormMetadata, ReportDocument,
};
use vqf_core::{random_form, Ensemble};

#[derive(Parser)]
#[command(
    name = "vqf",
    version,
    about = "Analyze vector-valued quadratic forms: definiteness, surjectivity, preimages, and the rank-one reduction identity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a form and decide surjectivity, with certificates.
    Analyze {
        /// Form document to read.
        input: PathBuf,
        /// Emit the structured report instead of text.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ascent and solver restarts (module defaults when omitted).
        #[arg(long)]
        restarts: Option<usize>,
        /// Witness sample budget.
        #[arg(long, default_value_t = 128)]
        samples: usize,
        /// Definiteness margin override.
        #[arg(long)]
        tol: Option<f64>,
        /// Require the exact m = 2 index sweep; fail if it cannot run.
        #[arg(long)]
        exact: bool,
    },
    /// Solve Q(u) = v for a given target v.
    Preimage {
        input: PathBuf,
        /// Target vector, comma-separated (example: --target 0,1).
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        restarts: Option<usize>,
        /// Residual tolerance (scaled by 1 + the target norm).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Write a random form document.
    Generate {
        n: usize,
        m: usize,
        /// gaussian | traceless-gaussian | definite-planted | indefinite-planted
        ensemble: String,
        seed: u64,
        /// Output path; standard output when omitted.
        output: Option<PathBuf>,
    },
    /// Check the rank-one reduction identity on sphere samples.
    VeroneseCheck {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_target(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| format!("target component {part:?} is not a number"))
        })
        .collect()
}

fn emit(report: &ReportDocument, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(report).expect("report serializes")
        );
    } else {
        print!("{}", render_text(report));
    }
}

fn run() -> Result<i32, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            input,
            json,
            seed,
            restarts,
            samples,
            tol,
            exact,
        } => {
            let doc = read_document(&input).map_err(|e| e.to_string())?;
            let opts = AnalyzeOptions {
                seed,
                restarts,
                samples,
                definite_tol: tol,
                exact,
            };
            let report = analyze(&doc, &opts).map_err(|e| e.to_string())?;
            emit(&report, json);
            Ok(exit_code(&report))
        }
        Command::Preimage {
            input,
            target,
            json,
            seed,
            restarts,
            tol,
        } => {
            let doc = read_document(&input).map_err(|e| e.to_string())?;
            let v = parse_target(&target)?;
            let report =
                preimage_report(&doc, &v, seed, restarts, tol).map_err(|e| e.to_string())?;
            emit(&report, json);
            Ok(exit_code(&report))
        }
        Command::Generate {
            n,
            m,
            ensemble,
            seed,
            output,
        } => {
            let kind = Ensemble::from_str(&ensemble).map_err(|e| e.to_string())?;
            let f = random_form(n, m, kind, seed).map_err(|e| e.to_string())?;
            let doc = FormDocument::from_form(
                &f,
                Some(FormMetadata {
                    name: Some(format!("{ensemble}-n{n}-m{m}-seed{seed}")),
                    notes: None,
                }),
            );
            let text = canonical_json(&doc);
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::VeroneseCheck {
            input,
            json,
            samples,
            seed,
        } => {
            let doc = read_document(&input).map_err(|e| e.to_string())?;
            let report = veronese_report(&doc, samples, seed).map_err(|e| e.to_string())?;
            emit(&report, json);
            Ok(exit_code(&report))
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
    }
}
