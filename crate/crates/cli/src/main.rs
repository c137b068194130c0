mod args;
mod commands;
mod output;

use args::{Cli, Command};
use clap::Parser;
use fracmin_core::{FracError, Result};
use output::{unix_now, write_all, Report, RunManifest, Timestamps, TOOL_VERSION};
use std::io::Write;
use std::process::ExitCode;

fn dispatch(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Curvature(a) => commands::curvature(a, g),
        Command::Barrier(a) => commands::barrier(a, g),
        Command::Beta(a) => commands::beta(a, g),
        Command::Slide(a) => commands::slide(a, g),
        Command::Density(a) => commands::density(a, g),
        Command::Perimeter(a) => commands::perimeter(a, g),
        Command::Check(a) => commands::check(a, g),
    }
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Curvature(_) => "curvature",
        Command::Barrier(_) => "barrier",
        Command::Beta(_) => "beta",
        Command::Slide(_) => "slide",
        Command::Density(_) => "density",
        Command::Perimeter(_) => "perimeter",
        Command::Check(_) => "check",
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| FracError::Input(format!("thread pool: {e}")))?;
    }
    let started = unix_now();
    let report = dispatch(cli)?;
    if let Some(dir) = &cli.global.out {
        let manifest = RunManifest {
            subcommand: name(&cli.command),
            config: &cli.command,
            global: &cli.global,
            seed: cli.global.seed,
            tool_version: TOOL_VERSION,
            files: report.files.iter().map(|f| f.0.clone()).collect(),
            timestamps: Timestamps { started_unix: started, finished_unix: unix_now() },
        };
        write_all(dir, &report, &manifest)?;
    }
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(report.stdout.as_bytes());
    let _ = out.flush();
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracmin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
