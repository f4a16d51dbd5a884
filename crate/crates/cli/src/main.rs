//! Command-line front end: one JSON document on stdin, one on stdout.

mod commands;
mod json;

use std::io::Read;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use rayon::prelude::*;
use serde_json::Value;

use commands::{run, Ctx, Outcome, Verb};
use hyperkos::Tolerance;
use json::{error_doc, invalid, CliError};

#[derive(Parser, Debug)]
#[command(name = "hyperkos", version, about = "Congruence invariants and assembly gates for point sets in complex hyperbolic space")]
struct Cli {
    /// Equality tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_eq: f64,
    /// Positive-semidefiniteness tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_psd: f64,
    /// Seed for randomized verbs.
    #[arg(long, global = true, default_value_t = 20240501)]
    seed: u64,
    /// Input is a JSON array of documents; output is an array of results.
    #[arg(long, global = true)]
    batch: bool,
    /// Report signed areas (orientation of the vertices) instead of unsigned.
    #[arg(long, global = true)]
    signed_area: bool,
    /// Read the input document from a file instead of stdin.
    #[arg(long, global = true)]
    input: Option<std::path::PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

fn read_input(path: Option<&std::path::Path>) -> anyhow::Result<Value> {
    let mut text = String::new();
    match path {
        Some(p) => text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        }
    }
    serde_json::from_str(&text).context("parsing JSON input")
}

fn one(verb: &Verb, input: &Value, ctx: &Ctx) -> Outcome {
    match run(verb, input, ctx) {
        Ok(o) => o,
        Err(e) => Outcome {
            doc: error_doc(&e),
            code: e.exit_code(),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match Tolerance::new(cli.tol_eq, cli.tol_psd) {
        Ok(t) => t,
        Err(e) => return emit(Outcome { doc: error_doc(&CliError::Core(e)), code: 2 }),
    };
    let ctx = Ctx {
        tol,
        seed: cli.seed,
        signed_area: cli.signed_area,
    };
    let input = if cli.batch || cli.verb.needs_input() {
        match read_input(cli.input.as_deref()) {
            Ok(v) => v,
            Err(e) => {
                return emit(Outcome {
                    doc: error_doc(&invalid(format!("{e:#}"))),
                    code: 2,
                })
            }
        }
    } else {
        Value::Null
    };
    if cli.batch {
        let Some(items) = input.as_array() else {
            return emit(Outcome {
                doc: error_doc(&invalid("--batch expects a JSON array")),
                code: 2,
            });
        };
        let results: Vec<Outcome> = items.par_iter().map(|item| one(&cli.verb, item, &ctx)).collect();
        let code = results.iter().map(|o| o.code).max().unwrap_or(0);
        return emit(Outcome {
            doc: Value::Array(results.into_iter().map(|o| o.doc).collect()),
            code,
        });
    }
    emit(one(&cli.verb, &input, &ctx))
}

fn emit(o: Outcome) -> ExitCode {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    // a closed pipe downstream is not our failure
    let _ = writeln!(out, "{}", o.doc);
    ExitCode::from(o.code)
}
