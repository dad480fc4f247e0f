mod args;
mod commands;
mod grid;
mod output;
mod presets;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::FromArgMatches;

use args::{Cli, Command};
use output::CliError;

fn run(argv: Vec<OsString>) -> Result<(), CliError> {
    let argv = args::expand_config(argv)?;
    let matches = match args::command().try_get_matches_from(argv) {
        Ok(m) => m,
        // Help, version and usage errors all exit through clap.
        Err(e) => e.exit(),
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;

    let work = || match &cli.command {
        Command::Spectrum(a) => commands::run_spectrum(a),
        Command::Ser(a) => commands::run_ser(a),
        Command::Figures(a) => presets::run_figures(a),
    };
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?
            .install(work),
        None => work(),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fas-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
