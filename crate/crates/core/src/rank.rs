//! Effective rank of a correlation spectrum.
//!
//! The geometric estimate splits the descending eigenvalues into three
//! magnitude bands (signal above `1e-10`, transition down to `1e-15`, and the
//! numerical floor below) and finds the sharpest corner of the log-scale
//! curve inside each band. The three corners are `N_eff1 <= N_eff2 <= N_eff3`;
//! `N_eff1` tracks the `2W + 1` limit and `N_eff2` marks where adding modes
//! stops changing the error rate.
//!
//! Corner detection: points `(index, log10 lambda)` are min-max scaled to
//! `[0, 1]` per axis and every interior point gets the cosine of the angle
//! between the vectors to its two neighbours. The largest cosine (the most
//! acute turn) wins; ties go to the earliest point.

use std::ops::Range;

use crate::correlation::{energy_ratio, CorrelationSpectrum};
use crate::error::{domain, Result};

/// Lower edge of the signal band.
pub const SIGNAL_THRESHOLD: f64 = 1e-10;
/// Lower edge of the transition band.
pub const FLOOR_THRESHOLD: f64 = 1e-15;
/// Zero eigenvalues are lifted to this before taking `log10`.
pub const LOG_FLOOR: f64 = 1e-30;

/// 0-based index ranges of the three bands. Contiguous because the input
/// is sorted; any of them may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumPartition {
    pub signal: Range<usize>,
    pub transition: Range<usize>,
    pub floor: Range<usize>,
}

impl SpectrumPartition {
    pub fn regions(&self) -> [Range<usize>; 3] {
        [self.signal.clone(), self.transition.clone(), self.floor.clone()]
    }
}

/// Splits a descending spectrum at `1e-10` and `1e-15`.
pub fn partition_spectrum(lambda: &[f64]) -> Result<SpectrumPartition> {
    if lambda.iter().any(|l| l.is_nan()) {
        return domain("spectrum contains NaN");
    }
    if lambda.windows(2).any(|w| w[1] > w[0]) {
        return domain("spectrum must be sorted in descending order");
    }
    let signal_end = lambda.iter().take_while(|&&l| l > SIGNAL_THRESHOLD).count();
    let transition_end = signal_end + lambda[signal_end..].iter().take_while(|&&l| l > FLOOR_THRESHOLD).count();
    Ok(SpectrumPartition {
        signal: 0..signal_end,
        transition: signal_end..transition_end,
        floor: transition_end..lambda.len(),
    })
}

fn min_max_scale(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if range > 0.0 {
        values.iter().map(|v| (v - lo) / range).collect()
    } else {
        vec![0.5; values.len()]
    }
}

/// Cosine of the turn at every interior point of a scaled polyline.
/// Entry `i` belongs to point `i + 1`.
pub fn turn_cosines(points: &[(f64, f64)]) -> Vec<f64> {
    let xs = min_max_scale(&points.iter().map(|p| p.0).collect::<Vec<_>>());
    let ys = min_max_scale(&points.iter().map(|p| p.1).collect::<Vec<_>>());
    (1..points.len().saturating_sub(1))
        .map(|i| {
            let v1 = (xs[i - 1] - xs[i], ys[i - 1] - ys[i]);
            let v2 = (xs[i + 1] - xs[i], ys[i + 1] - ys[i]);
            let dot = v1.0 * v2.0 + v1.1 * v2.1;
            let norm = v1.0.hypot(v1.1) * v2.0.hypot(v2.1);
            if norm > 0.0 {
                dot / norm
            } else {
                // Coincident neighbours carry no turn information.
                -1.0
            }
        })
        .collect()
}

/// Local index of the sharpest turn in `points`, ordered as
/// `(index, log10 eigenvalue)`. Needs at least three points.
pub fn knee_of_segment(points: &[(f64, f64)]) -> Result<usize> {
    if points.len() < 3 {
        return domain(format!("knee detection needs at least 3 points, got {}", points.len()));
    }
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return domain("knee detection needs finite coordinates");
    }
    let cosines = turn_cosines(points);
    let mut best = 0;
    for (i, &c) in cosines.iter().enumerate() {
        if c > cosines[best] {
            best = i;
        }
    }
    Ok(best + 1)
}

/// Geometric and theoretical effective-rank summary of one spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub ports: usize,
    pub width: f64,
    /// 1-based positions in the sorted spectrum; `None` when the band holds
    /// fewer than three eigenvalues.
    pub n_eff1: Option<usize>,
    pub n_eff2: Option<usize>,
    pub n_eff3: Option<usize>,
    /// `2W + 1`.
    pub theoretical: f64,
    pub theoretical_rounded: usize,
    pub entropy_rank: f64,
    /// Share of the eigenvalue mass in the leading `n_eff1` modes.
    pub energy_at_n_eff1: Option<f64>,
    pub diagnostics: Vec<String>,
}

/// Runs the three-band corner search and fills in the theoretical, entropy
/// and energy figures.
pub fn effective_ranks(spec: &CorrelationSpectrum) -> RankReport {
    let lambda = spec.eigenvalues();
    let w = spec.geometry().width();
    let mut diagnostics = Vec::new();
    let mut knees = [None; 3];

    // Clamped spectra are always sorted and finite, so partitioning cannot fail.
    let partition = partition_spectrum(lambda).expect("correlation spectra are sorted");
    for (band, range) in partition.regions().into_iter().enumerate() {
        let points: Vec<(f64, f64)> = range
            .clone()
            .map(|i| ((i + 1) as f64, lambda[i].max(LOG_FLOOR).log10()))
            .collect();
        match knee_of_segment(&points) {
            Ok(local) => knees[band] = Some(range.start + local + 1),
            Err(_) => diagnostics.push(format!(
                "band {} holds {} eigenvalue(s); N_eff{} undefined",
                band + 1,
                points.len(),
                band + 1
            )),
        }
    }

    let energy_at_n_eff1 = knees[0].map(|k| energy_ratio(spec, k).expect("knee index is within the spectrum"));
    RankReport {
        ports: spec.ports(),
        width: w,
        n_eff1: knees[0],
        n_eff2: knees[1],
        n_eff3: knees[2],
        theoretical: theoretical_rank(w),
        theoretical_rounded: theoretical_rank_rounded(w),
        entropy_rank: entropy_rank(lambda).expect("correlation spectra have positive trace"),
        energy_at_n_eff1,
        diagnostics,
    }
}

/// `2W + 1`.
pub fn theoretical_rank(w: f64) -> f64 {
    2.0 * w + 1.0
}

/// `2W + 1` rounded to the nearest integer, halves rounding up.
pub fn theoretical_rank_rounded(w: f64) -> usize {
    (theoretical_rank(w) + 0.5).floor().max(0.0) as usize
}

/// `exp(H)` of the normalized eigenvalue distribution `p_i = lambda_i / sum`.
pub fn entropy_rank(lambda: &[f64]) -> Result<f64> {
    if lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return domain("entropy rank needs finite, nonnegative eigenvalues");
    }
    let total: f64 = lambda.iter().sum();
    if total <= 0.0 {
        return domain("entropy rank of an all-zero spectrum is undefined");
    }
    let entropy: f64 = lambda
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| {
            let p = l / total;
            -p * p.ln()
        })
        .sum();
    Ok(entropy.exp())
}
