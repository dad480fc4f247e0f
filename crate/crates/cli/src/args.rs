//! Command-line surface and `--config` file merging.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand};
use fas_core::modulation::ModulationScheme;
use fas_core::ser_sim::Method;

use crate::grid::SnrGrid;
use crate::output::CliError;
use crate::presets::PRESETS;

#[derive(Debug, Parser)]
#[command(name = "fas-lab", version, about = "Error-probability laboratory for fluid antenna systems")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, env = "FAS_LAB_THREADS")]
    pub threads: Option<usize>,

    /// key=value file supplying defaults for any flag; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue spectrum of the port correlation matrix, plus a rank sidecar.
    Spectrum(SpectrumArgs),
    /// Monte Carlo error-rate curve, optionally with its asymptote.
    Ser(SerArgs),
    /// Regenerate the data behind one of the built-in figure presets.
    Figures(FiguresArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub ports: usize,
    /// Aperture width in wavelengths.
    #[arg(long)]
    pub width: f64,
    /// Spectrum CSV; the rank summary goes next to it as `<stem>.rank.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a gnuplot script next to the output.
    #[arg(long)]
    pub gnuplot_stub: bool,
}

#[derive(Debug, Args)]
pub struct SerArgs {
    /// bpsk, qpsk, psk<M>, pam<M> or qam<M>.
    #[arg(long = "mod", value_name = "SCHEME", default_value = "bpsk")]
    pub scheme: ModulationScheme,
    #[arg(long)]
    pub ports: usize,
    #[arg(long)]
    pub width: f64,
    /// Average SNR grid in dB, `A:STEP:B` or a single value.
    #[arg(long, value_name = "A:STEP:B", default_value = "0:2.5:30", allow_hyphen_values = true)]
    pub snr_db: SnrGrid,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Synthesize channels from the leading K eigenmodes only.
    #[arg(long, value_name = "K")]
    pub truncate: Option<usize>,
    /// Also write the asymptotic curve as `<stem>.asymptotic.csv`.
    #[arg(long)]
    pub asymptotic: bool,
    /// semi_analytic or symbol_level (BPSK only).
    #[arg(long, default_value = "semi_analytic")]
    pub method: Method,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub gnuplot_stub: bool,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(long, value_parser = PRESETS.iter().map(|p| p.name).collect::<Vec<_>>())]
    pub preset: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Override the preset's per-point trial budget.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub gnuplot_stub: bool,
}

pub fn presets_help() -> String {
    let mut s = String::from("Presets:\n");
    for p in PRESETS {
        s.push_str(&format!("  {:<6} {}\n", p.name, p.description));
    }
    s
}

pub fn command() -> clap::Command {
    let help = presets_help();
    Cli::command()
        .after_help(help.clone())
        .mut_subcommand("figures", |c| c.after_help(help))
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        pairs.push((key, v.trim().to_string()));
    }
    Ok(pairs)
}

/// Splices `--config` file entries into `args` right after the subcommand
/// name, so that any flag given explicitly (which comes later) overrides them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let p = it.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            path = Some(PathBuf::from(p));
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let pairs = parse_config(&text).map_err(CliError::Usage)?;

    let cmd = command();
    let Some(pos) = rest
        .iter()
        .position(|a| cmd.get_subcommands().any(|c| a.to_str() == Some(c.get_name())))
    else {
        // Let clap report the missing subcommand.
        return Ok(rest);
    };
    let sub = cmd.find_subcommand(rest[pos].to_str().unwrap()).unwrap();
    let mut injected = Vec::new();
    for (key, value) in pairs {
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| CliError::Usage(format!("unknown config key '{key}'")))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "" => injected.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" => {}
                other => return Err(CliError::Usage(format!("config key '{key}': expected a boolean, got '{other}'"))),
            }
        } else {
            injected.push(OsString::from(format!("--{key}={value}")));
        }
    }
    rest.splice(pos + 1..pos + 1, injected);
    Ok(rest)
}
