use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use g2gauge_cli::commands::{self, CliError, Output};
use g2gauge_cli::verify::VerifyOptions;

#[derive(Parser)]
#[command(name = "g2gauge", version, about = "Exact checks for abelian gauge theory on the standard G2 structure")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the verification suite.
    Verify {
        #[arg(long)]
        json: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// Test mode: perturb entry ROW,COL (1-based) of Gamma_1.
        #[arg(long, hide = true, value_parser = parse_pair)]
        corrupt_gamma: Option<(usize, usize)>,
    },
    /// Classify a connection 1-form read from FILE.
    Classify {
        #[arg(long, value_name = "FILE")]
        form: String,
        /// Declare a parameter, optionally with a value: `a` or `a=1/2`.
        #[arg(long = "param", value_name = "NAME[=VALUE]")]
        params: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Split a 2-, 3- or 4-form into its irreducible pieces.
    Decompose {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        degree: u8,
        #[arg(long, value_name = "FILE")]
        form: String,
        #[arg(long = "param", value_name = "NAME")]
        params: Vec<String>,
    },
    /// The two-parameter example connection.
    Example {
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Invariant spinor and the 3-form it induces.
    Spinor,
    /// Normalize a determinant expression.
    ZetaDet {
        expr: String,
        #[arg(long, default_value_t = 1)]
        b0: u32,
        #[arg(long, default_value_t = 0)]
        b1: u32,
    },
    /// Derive the one-loop partition function.
    AssembleZsc {
        #[arg(long)]
        b0: u32,
        #[arg(long)]
        b1: u32,
    },
    /// Check Deligne-Beilinson data on a simplicial complex.
    DbVerify {
        complex: String,
        cocycles: String,
        #[arg(long, value_name = "FILE")]
        gauge: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s.split_once(',').ok_or("expected ROW,COL")?;
    Ok((r.trim().parse().map_err(|_| "bad row")?, c.trim().parse().map_err(|_| "bad column")?))
}

fn run(cmd: Cmd) -> Result<Output, CliError> {
    match cmd {
        Cmd::Verify { json, seed, corrupt_gamma } => {
            Ok(commands::verify(&VerifyOptions { seed, corrupt_gamma }, json))
        }
        Cmd::Classify { form, params, json } => commands::classify_cmd(&form, &params, json),
        Cmd::Decompose { degree, form, params } => commands::decompose(degree, &form, &params),
        Cmd::Example { a, b } => commands::example(a.as_deref(), b.as_deref()),
        Cmd::Spinor => Ok(commands::spinor()),
        Cmd::ZetaDet { expr, b0, b1 } => commands::zeta_det(&expr, b0, b1),
        Cmd::AssembleZsc { b0, b1 } => commands::assemble(b0, b1),
        Cmd::DbVerify { complex, cocycles, gauge, json } => {
            commands::db_verify(&complex, &cocycles, gauge.as_deref(), json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            // a closed pipe (e.g. `| head`) is not an error of the tool
            let _ = writeln!(std::io::stdout(), "{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
