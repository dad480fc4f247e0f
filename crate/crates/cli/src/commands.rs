//! `spectrum` and `ser` subcommands, plus helpers shared with the presets.

use std::path::Path;

use fas_core::correlation::{build_correlation, ApertureGeometry, CorrelationSpectrum};
use fas_core::export::{write_asymptotic_csv, write_rank_csv, write_ser_csv, write_spectrum_csv, RankRow};
use fas_core::modulation::ModulationScheme;
use fas_core::rank::effective_ranks;
use fas_core::ser_analysis::{AsymptoticModel, FULL_RANK_FLOOR};
use fas_core::ser_sim::{simulate_ser_with_spectrum, SerCurve, SimConfig};

use crate::args::{SerArgs, SpectrumArgs};
use crate::output::{file_name, sidecar, write_file, write_gnuplot_stub, CliError, PlotSeries, PlotSpec};

pub fn banner(command: &str) -> String {
    format!("fas-lab {} {command}", env!("CARGO_PKG_VERSION"))
}

pub fn run_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let geometry = ApertureGeometry::new(args.ports, args.width)?;
    let spec = build_correlation(&geometry)?;
    let report = effective_ranks(&spec);
    let mut comments = vec![
        banner("spectrum"),
        format!("ports={} width={}", args.ports, args.width),
    ];
    if spec.clamped_count() > 0 {
        comments.push(format!("{} eigenvalue(s) below zero by solver noise were set to 0", spec.clamped_count()));
    }
    write_file(&args.out, |out| write_spectrum_csv(out, &spec, &comments))?;

    let mut rank_comments = comments.clone();
    rank_comments.extend(report.diagnostics.iter().cloned());
    let rank_path = sidecar(&args.out, ".rank.csv");
    write_file(&rank_path, |out| write_rank_csv(out, &[RankRow::from(&report)], &rank_comments))?;

    if args.gnuplot_stub {
        write_gnuplot_stub(
            &sidecar(&args.out, ".gp"),
            &PlotSpec {
                xlabel: "index",
                ylabel: "eigenvalue",
                log_y: true,
                series: vec![PlotSeries { file: file_name(&args.out), columns: "1:2".into(), title: "eigenvalue".into() }],
            },
        )?;
    }
    Ok(())
}

/// Asymptotic curve matching a simulated channel, with a note on which form
/// was used. Truncated channels get the order of their truncation; otherwise
/// the full order is used when the spectrum allows it and the effective rank
/// from knee detection when it does not.
pub fn asymptote_for(
    spec: &CorrelationSpectrum,
    scheme: &ModulationScheme,
    truncate: Option<usize>,
) -> Result<(AsymptoticModel, String), CliError> {
    if let Some(k) = truncate {
        let model = AsymptoticModel::effective(spec, scheme, k)?;
        return Ok((model, format!("asymptotic form: effective, order {k} (truncated channel)")));
    }
    if let Ok(model) = AsymptoticModel::full(spec, scheme) {
        let order = model.diversity_order;
        return Ok((model, format!("asymptotic form: full, order {order}")));
    }
    let report = effective_ranks(spec);
    let (n_eff, source) = match report.n_eff1 {
        Some(k) => (k, "knee detection"),
        None => (report.theoretical_rounded.clamp(1, spec.positive_count()), "2W+1"),
    };
    let model = AsymptoticModel::effective(spec, scheme, n_eff)?;
    let smallest = spec.eigenvalues()[spec.ports() - 1];
    Ok((
        model,
        format!(
            "asymptotic form: effective, order {n_eff} from {source} (smallest eigenvalue {smallest:e} <= {FULL_RANK_FLOOR:e})"
        ),
    ))
}

pub fn config_echo(config: &SimConfig, grid: &str) -> String {
    format!(
        "mod={} ports={} width={} snr_db={grid} trials={} seed={} method={} truncate={} chunk_size={}",
        config.scheme,
        config.geometry.ports(),
        config.geometry.width(),
        config.trials,
        config.seed,
        config.method,
        config.truncation_k.map(|k| k.to_string()).unwrap_or_else(|| "none".into()),
        config.chunk_size
    )
}

/// Writes `curve` (and its asymptote if asked) and returns the files written.
pub fn emit_curve(
    path: &Path,
    curve: &SerCurve,
    spec: &CorrelationSpectrum,
    asymptotic: bool,
    comments: &[String],
) -> Result<Vec<PlotSeries>, CliError> {
    write_file(path, |out| write_ser_csv(out, &curve.points, comments))?;
    let mut series = vec![PlotSeries {
        file: file_name(path),
        columns: "1:2".into(),
        title: format!("{} simulated", curve.config.scheme),
    }];
    if asymptotic {
        let (model, note) = asymptote_for(spec, &curve.config.scheme, curve.config.truncation_k)?;
        let rows: Vec<(f64, f64)> = curve.config.snr_grid_db.iter().map(|&d| (d, model.ser_db(d))).collect();
        let mut asym_comments = comments.to_vec();
        asym_comments.push(note);
        asym_comments.push(format!("coding gain {:e}, diversity order {}", model.coding_gain(), model.diversity_order));
        let asym_path = sidecar(path, ".asymptotic.csv");
        write_file(&asym_path, |out| write_asymptotic_csv(out, &rows, &asym_comments))?;
        series.push(PlotSeries {
            file: file_name(&asym_path),
            columns: "1:2".into(),
            title: format!("{} asymptotic", curve.config.scheme),
        });
    }
    Ok(series)
}

pub fn run_ser(args: &SerArgs) -> Result<(), CliError> {
    let geometry = ApertureGeometry::new(args.ports, args.width)?;
    let config = SimConfig::new(geometry, args.scheme, args.snr_db.points())
        .with_trials(args.trials)
        .with_seed(args.seed)
        .with_truncation(args.truncate)
        .with_method(args.method);
    config.validate()?;
    let spec = build_correlation(&geometry)?;
    let curve = simulate_ser_with_spectrum(&config, &spec)?;
    let comments = vec![banner("ser"), config_echo(&config, &args.snr_db.to_string())];
    let series = emit_curve(&args.out, &curve, &spec, args.asymptotic, &comments)?;
    if args.gnuplot_stub {
        write_gnuplot_stub(
            &sidecar(&args.out, ".gp"),
            &PlotSpec { xlabel: "average SNR (dB)", ylabel: "SER", log_y: true, series },
        )?;
    }
    Ok(())
}
