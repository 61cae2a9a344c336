//! The `nctest` command line: argument parsing, input loading, exit codes.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::input::{parse_documents, Arithmetic, NoiseKind, NumLit};
use crate::pipeline::{analyze_batch, Command, Overrides, Report, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONCLASSICAL: i32 = 3;

/// Environment variable holding the default tolerance.
pub const TOLERANCE_ENV: &str = "NCTEST_TOLERANCE";

#[derive(Parser, Debug)]
#[command(name = "nctest", version, about = "Test prepare-measure scenarios for a noncontextual explanation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Decide classicality; exits 3 when the scenario is nonclassical.
    Check(RunArgs),
    /// Compute the minimal noise robustness and the model at that noise level.
    Robustness(RunArgs),
    /// Full report: splittings, facet matrices, certificate, embedding and model.
    Report(RunArgs),
    /// List the built-in example inputs, or print one as JSON.
    Fixtures {
        name: Option<String>,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ArithmeticArg {
    Exact,
    Float,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum NoiseArg {
    Depolarizing,
    Custom,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Input JSON file (`-` for stdin); a top-level array is a batch.
    #[arg(required_unless_present = "fixture", conflicts_with = "fixture")]
    pub input: Option<PathBuf>,
    /// Use a built-in example instead of a file.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long, value_enum)]
    pub arithmetic: Option<ArithmeticArg>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    /// JSON file holding the ambient noise channel (rows of numbers or "p/q").
    #[arg(long)]
    pub noise_matrix: Option<PathBuf>,
    /// Maximally mixed state override, e.g. `1/2,0,0` or `["1/2",0,0]`.
    #[arg(long, allow_hyphen_values = true)]
    pub max_mixed: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Emit only the verdict and robustness.
    #[arg(long)]
    pub quiet: bool,
    /// Skip positivity and normalisation checks on the input.
    #[arg(long)]
    pub skip_validation: bool,
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main_with_args<I, S>(args: I, env_tolerance: Option<String>) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli, env_tolerance) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_INTERNAL
            }
        }
    }
}

fn execute(cli: Cli, env_tolerance: Option<String>) -> Result<i32> {
    let (cmd, args) = match cli.command {
        CliCommand::Check(a) => (Command::Check, a),
        CliCommand::Robustness(a) => (Command::Robustness, a),
        CliCommand::Report(a) => (Command::Report, a),
        CliCommand::Fixtures { name } => return print_fixtures(name.as_deref()),
    };
    let overrides = overrides(&args, env_tolerance)?;
    let text = match (&args.fixture, &args.input) {
        (Some(name), _) => fixtures::fixture_json(name)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown fixture {name:?}; available: {}",
                    fixtures::NAMES.join(", ")
                ))
            })?
            .to_string(),
        (None, Some(path)) => read_input(path)?,
        (None, None) => unreachable!("clap requires an input or a fixture"),
    };
    let (docs, batch) = parse_documents(&text)?;
    let results = analyze_batch(&docs, cmd, &overrides);
    let mut reports = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) if batch => {
                return Err(match e {
                    Error::InvalidInput(m) => Error::InvalidInput(format!("document {i}: {m}")),
                    Error::Internal(m) => Error::Internal(format!("document {i}: {m}")),
                    other => other,
                })
            }
            Err(e) => return Err(e),
        }
    }
    let render = |r: &Report| if args.quiet { r.quiet_json() } else { r.json.clone() };
    let value = if batch {
        Value::Array(reports.iter().map(render).collect())
    } else {
        render(&reports[0])
    };
    write_output(&value, args.output.as_deref())?;
    let nonclassical = reports.iter().any(|r| r.verdict == Verdict::Nonclassical);
    Ok(if cmd == Command::Check && nonclassical {
        EXIT_NONCLASSICAL
    } else {
        EXIT_OK
    })
}

fn overrides(args: &RunArgs, env_tolerance: Option<String>) -> Result<Overrides> {
    let fallback_tolerance = match env_tolerance {
        Some(s) => Some(s.trim().parse::<f64>().map_err(|_| {
            Error::InvalidInput(format!("{TOLERANCE_ENV} is not a number: {s:?}"))
        })?),
        None => None,
    };
    let noise_matrix = match &args.noise_matrix {
        Some(p) => {
            let text = read_input(p)?;
            let rows: Vec<Vec<NumLit>> = serde_json::from_str(&text).map_err(|e| {
                Error::InvalidInput(format!("noise matrix {}: {e}", p.display()))
            })?;
            Some(rows)
        }
        None => None,
    };
    let noise = args.noise.map(|n| match n {
        NoiseArg::Depolarizing => NoiseKind::Depolarizing,
        NoiseArg::Custom => NoiseKind::Custom,
    });
    if noise == Some(NoiseKind::Custom) && noise_matrix.is_none() {
        return Err(Error::InvalidInput("--noise custom requires --noise-matrix".into()));
    }
    Ok(Overrides {
        arithmetic: args.arithmetic.map(|a| match a {
            ArithmeticArg::Exact => Arithmetic::Exact,
            ArithmeticArg::Float => Arithmetic::Float,
        }),
        tolerance: args.tolerance,
        fallback_tolerance,
        noise,
        noise_matrix,
        max_mixed: args.max_mixed.as_deref().map(parse_inline_row).transpose()?,
        skip_validation: args.skip_validation,
    })
}

/// `1/2,0,0` or a JSON array.
fn parse_inline_row(s: &str) -> Result<Vec<NumLit>> {
    let s = s.trim();
    if s.starts_with('[') {
        return serde_json::from_str(s)
            .map_err(|e| Error::InvalidInput(format!("--max-mixed: {e}")));
    }
    let row: Vec<NumLit> = s
        .split(',')
        .map(|t| NumLit::Text(t.trim().to_string()))
        .collect();
    if row.iter().any(|v| matches!(v, NumLit::Text(t) if t.is_empty())) {
        return Err(Error::InvalidInput(format!("--max-mixed: empty entry in {s:?}")));
    }
    Ok(row)
}

fn read_input(path: &Path) -> Result<String> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::InvalidInput(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("reading {}: {e}", path.display())))?;
    }
    Ok(text)
}

fn write_output(value: &Value, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Internal(format!("serialising report: {e}")))?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::Internal(format!("writing {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Internal(format!("writing stdout: {e}"))),
    }
}

fn print_fixtures(name: Option<&str>) -> Result<i32> {
    match name {
        None => {
            for n in fixtures::NAMES {
                println!("{n}");
            }
        }
        Some(n) => {
            let v = fixtures::fixture_json(n).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown fixture {n:?}; available: {}",
                    fixtures::NAMES.join(", ")
                ))
            })?;
            write_output(&v, None)?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_rows() {
        assert_eq!(
            parse_inline_row("1/2, 0,-1").unwrap(),
            vec![NumLit::from("1/2"), NumLit::from("0"), NumLit::from("-1")]
        );
        assert_eq!(parse_inline_row("[1, \"1/2\"]").unwrap(), vec![NumLit::from(1), NumLit::from("1/2")]);
        assert!(parse_inline_row("1,,2").is_err());
    }

    #[test]
    fn bad_env_tolerance_is_input_error() {
        let code = main_with_args(["nctest", "check", "--fixture", "boxworld"], Some("abc".into()));
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn custom_noise_flag_needs_matrix() {
        let code = main_with_args(
            ["nctest", "robustness", "--fixture", "boxworld", "--noise", "custom", "--quiet"],
            None,
        );
        assert_eq!(code, EXIT_INPUT);
    }
}
