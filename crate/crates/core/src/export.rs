//! CSV formats shared by the library and the command-line tool.
//!
//! Every file is UTF-8 with LF line endings: optional `#`-prefixed comment
//! lines, one header line, then data rows. Reals are written with Rust's
//! shortest round-trip formatting (`{:e}` for magnitudes that span many
//! decades, `{}` for grid coordinates), so reading a file and writing it back
//! reproduces it byte for byte. Absent values are empty fields.

use std::io::{self, Write};
use std::str::FromStr;

use crate::correlation::CorrelationSpectrum;
use crate::error::{Error, Result};
use crate::rank::RankReport;
use crate::ser_sim::SerPoint;

pub const SPECTRUM_HEADER: &str = "index,eigenvalue";
pub const SER_HEADER: &str = "snr_db,ser,ci_half_width,trials";
pub const ASYMPTOTIC_HEADER: &str = "snr_db,asymptotic_ser";
pub const RANK_HEADER: &str = "w,n,n_eff1,n_eff2,n_eff3,theoretical,entropy_rank,energy_at_n_eff1";

fn write_comments<W: Write>(out: &mut W, comments: &[String]) -> io::Result<()> {
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    Ok(())
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// `index,eigenvalue` with 1-based indices.
pub fn write_spectrum_csv<W: Write>(out: &mut W, spec: &CorrelationSpectrum, comments: &[String]) -> io::Result<()> {
    write_eigenvalues_csv(out, spec.eigenvalues(), comments)
}

pub fn write_eigenvalues_csv<W: Write>(out: &mut W, eigenvalues: &[f64], comments: &[String]) -> io::Result<()> {
    write_comments(out, comments)?;
    writeln!(out, "{SPECTRUM_HEADER}")?;
    for (i, l) in eigenvalues.iter().enumerate() {
        writeln!(out, "{},{l:e}", i + 1)?;
    }
    Ok(())
}

/// `snr_db,ser,ci_half_width,trials`, one row per grid point.
pub fn write_ser_csv<W: Write>(out: &mut W, points: &[SerPoint], comments: &[String]) -> io::Result<()> {
    write_comments(out, comments)?;
    writeln!(out, "{SER_HEADER}")?;
    for p in points {
        writeln!(out, "{},{:e},{:e},{}", p.snr_db, p.ser, p.ci_half_width, p.trials)?;
    }
    Ok(())
}

/// `snr_db,asymptotic_ser` rows, aligned with a simulation grid.
pub fn write_asymptotic_csv<W: Write>(out: &mut W, rows: &[(f64, f64)], comments: &[String]) -> io::Result<()> {
    write_comments(out, comments)?;
    writeln!(out, "{ASYMPTOTIC_HEADER}")?;
    for (snr_db, ser) in rows {
        writeln!(out, "{snr_db},{ser:e}")?;
    }
    Ok(())
}

/// One line per report.
pub fn write_rank_csv<W: Write>(out: &mut W, reports: &[RankRow], comments: &[String]) -> io::Result<()> {
    write_comments(out, comments)?;
    writeln!(out, "{RANK_HEADER}")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{:e},{}",
            r.w,
            r.n,
            opt(r.n_eff1),
            opt(r.n_eff2),
            opt(r.n_eff3),
            r.theoretical,
            r.entropy_rank,
            opt_sci(r.energy_at_n_eff1)
        )?;
    }
    Ok(())
}

/// The persisted columns of a [`RankReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub w: f64,
    pub n: usize,
    pub n_eff1: Option<usize>,
    pub n_eff2: Option<usize>,
    pub n_eff3: Option<usize>,
    pub theoretical: f64,
    pub entropy_rank: f64,
    pub energy_at_n_eff1: Option<f64>,
}

impl From<&RankReport> for RankRow {
    fn from(r: &RankReport) -> Self {
        Self {
            w: r.width,
            n: r.ports,
            n_eff1: r.n_eff1,
            n_eff2: r.n_eff2,
            n_eff3: r.n_eff3,
            theoretical: r.theoretical,
            entropy_rank: r.entropy_rank,
            energy_at_n_eff1: r.energy_at_n_eff1,
        }
    }
}

/// A parsed file: comment text (without the `# ` prefix) and raw rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Splits `text` into comments and rows, checking the header.
pub fn parse_table(text: &str, header: &str) -> Result<CsvTable> {
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    let mut seen_header = false;
    let width = header.split(',').count();
    for (lineno, line) in text.lines().enumerate() {
        if let Some(c) = line.strip_prefix('#') {
            if seen_header {
                return Err(Error::Parse(format!("line {}: comment after header", lineno + 1)));
            }
            comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            continue;
        }
        if !seen_header {
            if line != header {
                return Err(Error::Parse(format!("expected header '{header}', found '{line}'")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if fields.len() != width {
            return Err(Error::Parse(format!(
                "line {}: expected {width} fields, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        rows.push(fields);
    }
    if !seen_header {
        return Err(Error::Parse(format!("missing header '{header}'")));
    }
    Ok(CsvTable { comments, rows })
}

fn field<T: FromStr>(s: &str, name: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad {name} value '{s}'")))
}

fn opt_field<T: FromStr>(s: &str, name: &str) -> Result<Option<T>> {
    if s.is_empty() {
        Ok(None)
    } else {
        field(s, name).map(Some)
    }
}

pub fn read_spectrum_csv(text: &str) -> Result<(Vec<String>, Vec<f64>)> {
    let t = parse_table(text, SPECTRUM_HEADER)?;
    let mut values = Vec::with_capacity(t.rows.len());
    for (i, row) in t.rows.iter().enumerate() {
        let idx: usize = field(&row[0], "index")?;
        if idx != i + 1 {
            return Err(Error::Parse(format!("eigenvalue index {idx} out of sequence")));
        }
        values.push(field(&row[1], "eigenvalue")?);
    }
    Ok((t.comments, values))
}

pub fn read_ser_csv(text: &str) -> Result<(Vec<String>, Vec<SerPoint>)> {
    let t = parse_table(text, SER_HEADER)?;
    let points = t
        .rows
        .iter()
        .map(|r| {
            Ok(SerPoint {
                snr_db: field(&r[0], "snr_db")?,
                ser: field(&r[1], "ser")?,
                ci_half_width: field(&r[2], "ci_half_width")?,
                trials: field(&r[3], "trials")?,
            })
        })
        .collect::<Result<_>>()?;
    Ok((t.comments, points))
}

pub fn read_asymptotic_csv(text: &str) -> Result<(Vec<String>, Vec<(f64, f64)>)> {
    let t = parse_table(text, ASYMPTOTIC_HEADER)?;
    let rows = t
        .rows
        .iter()
        .map(|r| Ok((field(&r[0], "snr_db")?, field(&r[1], "asymptotic_ser")?)))
        .collect::<Result<_>>()?;
    Ok((t.comments, rows))
}

pub fn read_rank_csv(text: &str) -> Result<(Vec<String>, Vec<RankRow>)> {
    let t = parse_table(text, RANK_HEADER)?;
    let rows = t
        .rows
        .iter()
        .map(|r| {
            Ok(RankRow {
                w: field(&r[0], "w")?,
                n: field(&r[1], "n")?,
                n_eff1: opt_field(&r[2], "n_eff1")?,
                n_eff2: opt_field(&r[3], "n_eff2")?,
                n_eff3: opt_field(&r[4], "n_eff3")?,
                theoretical: field(&r[5], "theoretical")?,
                entropy_rank: field(&r[6], "entropy_rank")?,
                energy_at_n_eff1: opt_field(&r[7], "energy_at_n_eff1")?,
            })
        })
        .collect::<Result<_>>()?;
    Ok((t.comments, rows))
}
