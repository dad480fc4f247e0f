//! Built-in experiment presets. Each writes a deterministic set of CSVs
//! (given the seed) into the output directory, named `<preset>_*.csv`.

use std::path::{Path, PathBuf};

use fas_core::correlation::{build_correlation, ApertureGeometry, CorrelationSpectrum};
use fas_core::export::{write_asymptotic_csv, write_rank_csv, write_spectrum_csv, RankRow};
use fas_core::modulation::ModulationScheme;
use fas_core::rank::{effective_ranks, theoretical_rank, theoretical_rank_rounded};
use fas_core::ser_analysis::{fit_loglog_slope_points, AsymptoticModel};
use fas_core::ser_sim::{simulate_ser_with_spectrum, SerCurve, SimConfig};

use crate::args::FiguresArgs;
use crate::commands::{banner, config_echo, emit_curve};
use crate::output::{write_file, write_gnuplot_stub, write_table, CliError, PlotSeries, PlotSpec};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    run: fn(&Ctx) -> Result<(), CliError>,
}

pub static PRESETS: &[Preset] = &[
    Preset { name: "fig2", description: "eigenvalue spectra and turning points, N=100, W in {0.5, 1, 2, 4}", run: fig2 },
    Preset { name: "fig3", description: "BPSK error rate vs truncation rank K, N=100, W in {1, 2}", run: fig3 },
    Preset { name: "fig4", description: "geometric vs theoretical (2W+1) rank, N=40, W = 0.5..8", run: fig4 },
    Preset { name: "fig5", description: "BPSK error rate vs SNR with asymptotes, W=1, N = 1..5", run: fig5 },
    Preset { name: "fig6", description: "PSK/PAM/QAM error rates with asymptotes, N=3, W=1", run: fig6 },
    Preset { name: "fig7", description: "BPSK error rate for N in {3, 6, 11} at W=1 (spacing 0.5, 0.2, 0.1 wavelengths)", run: fig7 },
    Preset { name: "fig8", description: "BPSK error rate vs aperture width at 10 dB, N in {2, 4, 8}", run: fig8 },
    Preset { name: "fig9", description: "simulated vs effective-rank asymptotic BPSK error rate, N=100, W in {1, 4}", run: fig9 },
    Preset { name: "fig10", description: "BPSK error rate with K = n_eff1, n_eff1+1, n_eff2, n_eff3 modes, N=100, W=1", run: fig10 },
    Preset { name: "fig11", description: "rank surface over N x W: geometric vs theoretical", run: fig11 },
];

struct Ctx {
    name: &'static str,
    description: &'static str,
    seed: u64,
    dir: PathBuf,
    trials: Option<u64>,
    gnuplot: bool,
}

impl Ctx {
    fn trials(&self, default: u64) -> u64 {
        self.trials.unwrap_or(default)
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}_{suffix}", self.name))
    }

    fn comments(&self) -> Vec<String> {
        vec![
            banner("figures"),
            format!("preset={} seed={}", self.name, self.seed),
            self.description.to_string(),
        ]
    }

    fn plot(&self, plot: PlotSpec) -> Result<(), CliError> {
        if self.gnuplot {
            write_gnuplot_stub(&self.dir.join(format!("{}.gp", self.name)), &plot)?;
        }
        Ok(())
    }

    fn simulate(
        &self,
        spec: &CorrelationSpectrum,
        scheme: ModulationScheme,
        grid: &[f64],
        trials: u64,
        truncation: Option<usize>,
    ) -> Result<SerCurve, CliError> {
        let config = SimConfig::new(*spec.geometry(), scheme, grid.to_vec())
            .with_trials(self.trials(trials))
            .with_seed(self.seed)
            .with_truncation(truncation);
        Ok(simulate_ser_with_spectrum(&config, spec)?)
    }

    /// Simulated curve plus asymptote, with the config echoed in both files.
    fn curve_files(
        &self,
        file: &str,
        spec: &CorrelationSpectrum,
        scheme: ModulationScheme,
        grid: &[f64],
        trials: u64,
    ) -> Result<Vec<PlotSeries>, CliError> {
        let curve = self.simulate(spec, scheme, grid, trials, None)?;
        let mut comments = self.comments();
        comments.push(config_echo(&curve.config, &grid_label(grid)));
        if let Some(slope) = high_snr_slope(&curve) {
            comments.push(format!("fitted slope over the three highest well-resolved points: {slope:.3}"));
        }
        emit_curve(&self.path(file), &curve, spec, true, &comments)
    }
}

fn spectrum(n: usize, w: f64) -> Result<CorrelationSpectrum, CliError> {
    Ok(build_correlation(&ApertureGeometry::new(n, w)?)?)
}

fn grid(start: f64, step: f64, end: f64) -> Vec<f64> {
    let count = ((end - start) / step).round() as usize;
    (0..=count).map(|i| start + step * i as f64).collect()
}

fn grid_label(points: &[f64]) -> String {
    match points {
        [] => String::new(),
        [one] => one.to_string(),
        [a, b, ..] => format!("{}:{}:{}", a, b - a, points[points.len() - 1]),
    }
}

/// Negative log-log slope over the top three points whose 95% interval is
/// within 20% of the estimate.
fn high_snr_slope(curve: &SerCurve) -> Option<f64> {
    let good: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.ser > 0.0 && p.ci_half_width / p.ser < 0.2)
        .map(|p| (p.snr_db, p.ser))
        .collect();
    if good.len() < 3 {
        return None;
    }
    fit_loglog_slope_points(&good[good.len() - 3..]).ok()
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn ser_plot(series: Vec<PlotSeries>) -> PlotSpec {
    PlotSpec { xlabel: "average SNR (dB)", ylabel: "SER", log_y: true, series }
}

fn fig2(ctx: &Ctx) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for w in [0.5, 1.0, 2.0, 4.0] {
        let spec = spectrum(100, w)?;
        let report = effective_ranks(&spec);
        let mut comments = ctx.comments();
        comments.push(format!(
            "ports=100 width={w} n_eff1={} n_eff2={} n_eff3={}",
            opt(report.n_eff1),
            opt(report.n_eff2),
            opt(report.n_eff3)
        ));
        let path = ctx.path(&format!("w{w}.csv"));
        write_file(&path, |out| write_spectrum_csv(out, &spec, &comments))?;
        series.push(PlotSeries { file: file(&path), columns: "1:2".into(), title: format!("W = {w}") });
        rows.push(RankRow::from(&report));
    }
    write_file(&ctx.path("ranks.csv"), |out| write_rank_csv(out, &rows, &ctx.comments()))?;
    ctx.plot(PlotSpec { xlabel: "index", ylabel: "eigenvalue", log_y: true, series })
}

fn fig3(ctx: &Ctx) -> Result<(), CliError> {
    let snrs = [10.0, 20.0, 30.0];
    let ks: Vec<usize> = (1..=20).chain([100]).collect();
    let mut series = Vec::new();
    for w in [1.0, 2.0] {
        let spec = spectrum(100, w)?;
        let report = effective_ranks(&spec);
        let mut rows = Vec::new();
        let mut trials = 0;
        for &k in &ks {
            let curve = ctx.simulate(&spec, ModulationScheme::bpsk(), &snrs, 100_000, Some(k))?;
            trials = curve.config.trials;
            for p in &curve.points {
                rows.push(vec![k.to_string(), p.snr_db.to_string(), sci(p.ser), sci(p.ci_half_width), p.trials.to_string()]);
            }
        }
        let mut comments = ctx.comments();
        comments.push(format!(
            "mod=bpsk ports=100 width={w} trials={trials} seed={} n_eff1={} n_eff2={} n_eff3={}",
            ctx.seed,
            opt(report.n_eff1),
            opt(report.n_eff2),
            opt(report.n_eff3)
        ));
        let path = ctx.path(&format!("w{w}.csv"));
        write_file(&path, |out| write_table(out, "k,snr_db,ser,ci_half_width,trials", &rows, &comments))?;
        for s in snrs {
            series.push(PlotSeries {
                file: file(&path),
                columns: format!("1:($2=={s}?$3:1/0)"),
                title: format!("W = {w}, {s} dB"),
            });
        }
    }
    ctx.plot(PlotSpec { xlabel: "truncation rank K", ylabel: "BER", log_y: true, series })
}

fn fig4(ctx: &Ctx) -> Result<(), CliError> {
    let rows = (1..=16)
        .map(|i| Ok(RankRow::from(&effective_ranks(&spectrum(40, 0.5 * i as f64)?))))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mismatches = rows.iter().filter(|r| r.n_eff1 != Some(theoretical_rank_rounded(r.w))).count();
    let mut comments = ctx.comments();
    comments.push(format!("ports=40; widths where n_eff1 differs from round(2W+1): {mismatches}"));
    let path = ctx.path("ranks.csv");
    write_file(&path, |out| write_rank_csv(out, &rows, &comments))?;
    ctx.plot(PlotSpec {
        xlabel: "W",
        ylabel: "rank",
        log_y: false,
        series: vec![
            PlotSeries { file: file(&path), columns: "1:3".into(), title: "geometric".into() },
            PlotSeries { file: file(&path), columns: "1:6".into(), title: "2W+1".into() },
        ],
    })
}

fn fig5(ctx: &Ctx) -> Result<(), CliError> {
    let snr = grid(0.0, 2.5, 40.0);
    let mut series = Vec::new();
    for n in 1..=5 {
        series.extend(ctx.curve_files(&format!("n{n}.csv"), &spectrum(n, 1.0)?, ModulationScheme::bpsk(), &snr, 1_000_000)?);
    }
    ctx.plot(ser_plot(series))
}

fn fig6(ctx: &Ctx) -> Result<(), CliError> {
    let snr = grid(0.0, 2.5, 50.0);
    let spec = spectrum(3, 1.0)?;
    let names = ["bpsk", "psk4", "psk8", "psk16", "pam4", "pam8", "pam16", "qam4", "qam16", "qam64"];
    let mut series = Vec::new();
    for name in names {
        let scheme: ModulationScheme = name.parse()?;
        series.extend(ctx.curve_files(&format!("{name}.csv"), &spec, scheme, &snr, 1_000_000)?);
    }
    ctx.plot(ser_plot(series))
}

fn fig7(ctx: &Ctx) -> Result<(), CliError> {
    let snr = grid(0.0, 2.5, 40.0);
    let mut series = Vec::new();
    for n in [3, 6, 11] {
        series.extend(ctx.curve_files(&format!("n{n}.csv"), &spectrum(n, 1.0)?, ModulationScheme::bpsk(), &snr, 1_000_000)?);
    }
    ctx.plot(ser_plot(series))
}

fn fig8(ctx: &Ctx) -> Result<(), CliError> {
    let widths = grid(0.25, 0.25, 6.0);
    let mut series = Vec::new();
    for n in [2, 4, 8] {
        let mut rows = Vec::new();
        let mut trials = 0;
        for &w in &widths {
            let curve = ctx.simulate(&spectrum(n, w)?, ModulationScheme::bpsk(), &[10.0], 200_000, None)?;
            trials = curve.config.trials;
            let p = curve.points[0];
            rows.push(vec![w.to_string(), sci(p.ser), sci(p.ci_half_width), p.trials.to_string()]);
        }
        let mut comments = ctx.comments();
        comments.push(format!("mod=bpsk ports={n} snr_db=10 trials={trials} seed={}", ctx.seed));
        let path = ctx.path(&format!("n{n}.csv"));
        write_file(&path, |out| write_table(out, "w,ser,ci_half_width,trials", &rows, &comments))?;
        series.push(PlotSeries { file: file(&path), columns: "1:2".into(), title: format!("N = {n}") });
    }
    ctx.plot(PlotSpec { xlabel: "W (wavelengths)", ylabel: "BER", log_y: true, series })
}

fn fig9(ctx: &Ctx) -> Result<(), CliError> {
    let snr = grid(0.0, 2.5, 40.0);
    let mut series = Vec::new();
    for w in [1.0, 4.0] {
        let spec = spectrum(100, w)?;
        let curve = ctx.simulate(&spec, ModulationScheme::bpsk(), &snr, 200_000, None)?;
        let mut comments = ctx.comments();
        comments.push("benchmark reference curve is not generated".into());
        comments.push(config_echo(&curve.config, &grid_label(&snr)));
        let exact = ctx.path(&format!("w{w}_exact.csv"));
        emit_curve(&exact, &curve, &spec, false, &comments)?;

        let n_eff = theoretical_rank_rounded(w);
        let model = AsymptoticModel::effective(&spec, &ModulationScheme::bpsk(), n_eff)?;
        let rows: Vec<(f64, f64)> = snr.iter().map(|&d| (d, model.ser_db(d))).collect();
        comments.push(format!(
            "asymptotic form: effective, order {n_eff} = round(2W+1) with 2W+1 = {}",
            theoretical_rank(w)
        ));
        let proposed = ctx.path(&format!("w{w}_proposed.csv"));
        write_file(&proposed, |out| write_asymptotic_csv(out, &rows, &comments))?;
        series.push(PlotSeries { file: file(&exact), columns: "1:2".into(), title: format!("W = {w} simulated") });
        series.push(PlotSeries { file: file(&proposed), columns: "1:2".into(), title: format!("W = {w} effective rank") });
    }
    ctx.plot(ser_plot(series))
}

fn fig10(ctx: &Ctx) -> Result<(), CliError> {
    let snr = grid(0.0, 2.5, 40.0);
    let spec = spectrum(100, 1.0)?;
    let report = effective_ranks(&spec);
    let mut picks: Vec<(String, usize)> = Vec::new();
    let labelled = [
        ("n_eff1", report.n_eff1),
        ("n_eff1+1", report.n_eff1.map(|k| k + 1)),
        ("n_eff2", report.n_eff2),
        ("n_eff3", report.n_eff3),
    ];
    for (label, k) in labelled {
        if let Some(k) = k {
            if !picks.iter().any(|(_, existing)| *existing == k) {
                picks.push((label.to_string(), k));
            }
        }
    }
    let mut series = Vec::new();
    for (label, k) in picks {
        let curve = ctx.simulate(&spec, ModulationScheme::bpsk(), &snr, 200_000, Some(k))?;
        let mut comments = ctx.comments();
        comments.push(format!("k = {label} = {k}"));
        comments.push(config_echo(&curve.config, &grid_label(&snr)));
        comments.extend(report.diagnostics.iter().cloned());
        let path = ctx.path(&format!("k{k}.csv"));
        series.extend(emit_curve(&path, &curve, &spec, false, &comments)?);
    }
    ctx.plot(ser_plot(series))
}

fn fig11(ctx: &Ctx) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for n in (20..=200).step_by(20) {
        for i in 1..=16 {
            let w = 0.5 * i as f64;
            let report = effective_ranks(&spectrum(n, w)?);
            rows.push(vec![n.to_string(), w.to_string(), opt(report.n_eff1), theoretical_rank(w).to_string()]);
        }
    }
    let path = ctx.path("surface.csv");
    write_file(&path, |out| write_table(out, "n,w,geometric_rank,theoretical_rank", &rows, &ctx.comments()))?;
    ctx.plot(PlotSpec {
        xlabel: "W",
        ylabel: "rank",
        log_y: false,
        series: vec![
            PlotSeries { file: file(&path), columns: "2:($1==200?$3:1/0)".into(), title: "geometric, N = 200".into() },
            PlotSeries { file: file(&path), columns: "2:($1==200?$4:1/0)".into(), title: "2W+1".into() },
        ],
    })
}

fn file(path: &Path) -> String {
    crate::output::file_name(path)
}

pub fn run_figures(args: &FiguresArgs) -> Result<(), CliError> {
    let preset = PRESETS
        .iter()
        .find(|p| p.name == args.preset)
        .ok_or_else(|| CliError::Usage(format!("unknown preset '{}'", args.preset)))?;
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let ctx = Ctx {
        name: preset.name,
        description: preset.description,
        seed: args.seed,
        dir: args.out.clone(),
        trials: args.trials,
        gnuplot: args.gnuplot_stub,
    };
    (preset.run)(&ctx)
}
