use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::Parser;
use polyheight_cli::{run_command, Options, COMMANDS};
use polyheight_core::minima::Convention;
use serde_json::{json, Value};

/// Exact heights, minima and BKK integrals of toric bundles, JSON in and out.
#[derive(Debug, Parser)]
#[command(name = "polyheight", version)]
struct Args {
    /// One of describe, integrate, bkk, height, minima, okounkov, verify.
    command: String,
    /// Payload or full request file; `-` for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Response file; `-` for stdout.
    #[arg(long, default_value = "-")]
    output: String,
    /// Seed for `verify` (default 7).
    #[arg(long)]
    seed: Option<u64>,
    /// Successive minima index convention.
    #[arg(long, value_parser = ["default", "printed"])]
    convention: Option<String>,
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn write_output(path: &str, text: &str) -> io::Result<()> {
    if path == "-" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()
    } else {
        fs::write(path, text)
    }
}

fn schema_failure(message: String) -> Value {
    json!({ "status": "error", "error": { "kind": "SchemaError", "pointer": "", "message": message }, "provenance": [] })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (response, code) = if !COMMANDS.contains(&args.command.as_str()) {
        (schema_failure(format!("unknown command {}; expected one of {}", args.command, COMMANDS.join(", "))), 2)
    } else {
        match read_input(&args.input) {
            Err(e) => {
                eprintln!("polyheight: cannot read {}: {e}", args.input);
                return ExitCode::from(2);
            }
            Ok(text) => match serde_json::from_str::<Value>(&text) {
                Err(e) => (schema_failure(format!("invalid JSON: {e}")), 2),
                Ok(input) => {
                    let opts = Options {
                        seed: args.seed,
                        convention: args.convention.as_deref().map(|c| c.parse::<Convention>().expect("validated by clap")),
                    };
                    let r = run_command(&args.command, &input, &opts);
                    (r.to_json(), r.exit_code())
                }
            },
        }
    };
    let mut text = serde_json::to_string_pretty(&response).expect("serializable");
    text.push('\n');
    if let Err(e) = write_output(&args.output, &text) {
        eprintln!("polyheight: cannot write {}: {e}", args.output);
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
