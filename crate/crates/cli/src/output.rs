//! Errors, exit codes and file emission.

use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(fas_core::Error),
    Io(PathBuf, io::Error),
}

impl CliError {
    pub fn io(path: &Path, err: io::Error) -> Self {
        CliError::Io(path.to_path_buf(), err)
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(fas_core::Error::Parse(_)) => 2,
            CliError::Compute(_) => 3,
            CliError::Io(..) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<fas_core::Error> for CliError {
    fn from(e: fas_core::Error) -> Self {
        CliError::Compute(e)
    }
}

/// Writes a file through `body`, mapping failures to [`CliError::Io`].
pub fn write_file<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>,
{
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out).and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
}

/// `dir/stem.csv` → `dir/stem<suffix>`; other names just get the suffix.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.strip_suffix(".csv").unwrap_or(&name);
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Generic CSV table with `#` comments.
pub fn write_table<W: Write>(out: &mut W, header: &str, rows: &[Vec<String>], comments: &[String]) -> io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{header}")?;
    for r in rows {
        writeln!(out, "{}", r.join(","))?;
    }
    Ok(())
}

/// One curve of a gnuplot stub.
pub struct PlotSeries {
    pub file: String,
    pub columns: String,
    pub title: String,
}

pub struct PlotSpec {
    pub xlabel: &'static str,
    pub ylabel: &'static str,
    pub log_y: bool,
    pub series: Vec<PlotSeries>,
}

/// Writes a plain-text gnuplot script; nothing is rendered here.
pub fn write_gnuplot_stub(path: &Path, plot: &PlotSpec) -> Result<(), CliError> {
    write_file(path, |out| {
        writeln!(out, "# gnuplot script generated by fas-lab; run from this directory")?;
        writeln!(out, "set datafile separator ','")?;
        writeln!(out, "set key autotitle columnhead")?;
        writeln!(out, "set grid")?;
        if plot.log_y {
            writeln!(out, "set logscale y")?;
            writeln!(out, "set format y '10^{{%L}}'")?;
        }
        writeln!(out, "set xlabel '{}'", plot.xlabel)?;
        writeln!(out, "set ylabel '{}'", plot.ylabel)?;
        let parts: Vec<String> = plot
            .series
            .iter()
            .map(|s| format!("'{}' using {} with linespoints title '{}'", s.file, s.columns, s.title))
            .collect();
        writeln!(out, "plot {}", parts.join(", \\\n     "))?;
        Ok(())
    })
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}
