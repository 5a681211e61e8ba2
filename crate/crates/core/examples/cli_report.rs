//! Drives the command-line layer in process: a verify run rendered as JSON lines, and an operator dump.

use clap::Parser;
use qmbmw::cli::{self, Cli, Command, RunConfig, Which};

fn main() -> qmbmw::Result<()> {
    let cli = Cli::parse_from([
        "qmbmw",
        "verify",
        "--suite",
        "rmatrix,twist",
        "--family",
        "so",
        "--dim",
        "3",
        "--f-matrix",
        "R",
    ]);
    if let Command::Verify(args) = &cli.command {
        let out = cli::run_verify(&RunConfig::from_verify(args)?)?;
        let text = out.to_jsonl_without_timings();
        println!("{}", text.lines().next().unwrap_or_default());
        println!("{}", text.lines().last().unwrap_or_default());
        println!("exit code {}", out.exit_code());
    }

    let cli = Cli::parse_from([
        "qmbmw", "dump", "--family", "sp", "--dim", "2", "--which", "K",
    ]);
    if let Command::Dump(args) = &cli.command {
        let cfg = RunConfig::from_instance(&args.instance)?;
        println!("{}", cli::dump_operator(&cfg, Which::K, None)?);
    }
    Ok(())
}
