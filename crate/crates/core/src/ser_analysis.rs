//! High-SNR behaviour of the average SER.
//!
//! With per-port average SNRs normalized to one, the selected-port gain `x`
//! of an `N`-port aperture has density `N x^(N-1) / det J` as `x -> 0`.
//! Averaging `p Q(sqrt(k x snr))` against it gives
//!
//! ```text
//! P_E ~ p (2N-1)!! / (2 det J) * (k snr)^-N
//! ```
//!
//! When `J` is (numerically) rank-deficient the order `N` is replaced by an
//! effective rank `n` and `det J` by the product of the leading `n`
//! eigenvalues. Every formula is evaluated in natural-log space with a single
//! final `exp`; `(2N-1)!!` and `(k snr)^-N` overflow separately well before
//! `N = 20`.

use std::f64::consts::LN_2;
use std::ops::Range;

use crate::correlation::{build_correlation, ApertureGeometry, CorrelationSpectrum};
use crate::error::{domain, Result};
use crate::modulation::ModulationScheme;
use crate::ser_sim::{db_to_linear, SerCurve};
use crate::specfun::ldf;

/// The full-order form is only used when every eigenvalue exceeds this.
pub const FULL_RANK_FLOOR: f64 = 1e-12;

/// `P_E ~ C snr^-order`, stored as `ln C`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticModel {
    pub diversity_order: usize,
    pub log_coefficient: f64,
    pub scheme: ModulationScheme,
    /// Geometry of the spectrum the model was built from.
    pub geometry: ApertureGeometry,
}

impl AsymptoticModel {
    /// Full-order model. Refused when some eigenvalue is at or below
    /// [`FULL_RANK_FLOOR`]; use [`effective`](Self::effective) there.
    pub fn full(spec: &CorrelationSpectrum, scheme: &ModulationScheme) -> Result<Self> {
        let n = spec.ports();
        let min = spec.eigenvalues()[n - 1];
        if min <= FULL_RANK_FLOOR {
            return domain(format!(
                "correlation matrix is rank-deficient (smallest eigenvalue {min:e}); use the effective-rank form"
            ));
        }
        Self::from_leading(spec, scheme, n)
    }

    /// Model of order `n_eff` built from the leading `n_eff` eigenvalues.
    pub fn effective(spec: &CorrelationSpectrum, scheme: &ModulationScheme, n_eff: usize) -> Result<Self> {
        let positive = spec.positive_count();
        if n_eff == 0 || n_eff > positive {
            return domain(format!(
                "effective rank {n_eff} outside 1..={positive} (count of positive eigenvalues)"
            ));
        }
        Self::from_leading(spec, scheme, n_eff)
    }

    fn from_leading(spec: &CorrelationSpectrum, scheme: &ModulationScheme, n: usize) -> Result<Self> {
        let log_prod: f64 = spec.eigenvalues()[..n].iter().map(|l| l.ln()).sum();
        let log_coefficient = scheme.p.ln() + ldf(n as u64) - LN_2 - log_prod - n as f64 * scheme.k.ln();
        if !log_coefficient.is_finite() {
            return domain("asymptotic coefficient is not finite");
        }
        Ok(Self {
            diversity_order: n,
            log_coefficient,
            scheme: *scheme,
            geometry: *spec.geometry(),
        })
    }

    /// Predicted SER at linear average SNR, capped at one.
    pub fn ser(&self, snr: f64) -> f64 {
        (self.log_coefficient - self.diversity_order as f64 * snr.ln()).exp().min(1.0)
    }

    pub fn ser_db(&self, snr_db: f64) -> f64 {
        self.ser(db_to_linear(snr_db))
    }

    /// `G_c` with `P_E ~ (G_c snr)^-order`.
    pub fn coding_gain(&self) -> f64 {
        (-self.log_coefficient / self.diversity_order as f64).exp()
    }
}

/// Small-gain density `n x^(n-1) / prod_{i<=n} lambda_i` of the selected-port
/// gain. With `n = N` this needs a numerically full-rank spectrum.
pub fn asymptotic_pdf(x: f64, n: usize, spec: &CorrelationSpectrum) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return domain(format!("x must be positive, got {x}"));
    }
    let ports = spec.ports();
    if n == 0 || n > ports {
        return domain(format!("order {n} outside 1..={ports}"));
    }
    let lambda = spec.eigenvalues();
    if n == ports && lambda[ports - 1] <= FULL_RANK_FLOOR {
        return domain("det J vanishes numerically; the full-order density is undefined, use an effective rank");
    }
    if lambda[n - 1] <= 0.0 {
        return domain(format!("eigenvalue {n} is zero"));
    }
    let log_prod: f64 = lambda[..n].iter().map(|l| l.ln()).sum();
    Ok(((n as f64).ln() + (n as f64 - 1.0) * x.ln() - log_prod).exp())
}

/// Full-order asymptotic SER at `snr_db`.
pub fn asymptotic_ser_full(geometry: &ApertureGeometry, scheme: &ModulationScheme, snr_db: f64) -> Result<f64> {
    let spec = build_correlation(geometry)?;
    Ok(AsymptoticModel::full(&spec, scheme)?.ser_db(snr_db))
}

/// Effective-rank asymptotic SER at `snr_db`.
pub fn asymptotic_ser_effective(
    geometry: &ApertureGeometry,
    scheme: &ModulationScheme,
    n_eff: usize,
    snr_db: f64,
) -> Result<f64> {
    let spec = build_correlation(geometry)?;
    Ok(AsymptoticModel::effective(&spec, scheme, n_eff)?.ser_db(snr_db))
}

/// Diversity gain equals the effective rank.
pub fn diversity_gain(n_eff: usize) -> usize {
    n_eff
}

/// `G_c = (2 k^n / (p (2n-1)!!))^(1/n) (prod_{i<=n} lambda_i)^(1/n)`.
pub fn coding_gain(scheme: &ModulationScheme, spec: &CorrelationSpectrum, n_eff: usize) -> Result<f64> {
    let positive = spec.positive_count();
    if n_eff == 0 || n_eff > positive {
        return domain(format!("effective rank {n_eff} outside 1..={positive}"));
    }
    let n = n_eff as f64;
    let modulation_term = (LN_2 + n * scheme.k.ln() - scheme.p.ln() - ldf(n_eff as u64)) / n;
    let geometric_mean = spec.eigenvalues()[..n_eff].iter().map(|l| l.ln()).sum::<f64>() / n;
    Ok((modulation_term + geometric_mean).exp())
}

/// Negated least-squares slope of `log10(SER)` against `log10(snr)` over the
/// curve points in `window`.
pub fn fit_loglog_slope(curve: &SerCurve, window: Range<usize>) -> Result<f64> {
    if window.end > curve.points.len() {
        return domain(format!("window {window:?} exceeds {} points", curve.points.len()));
    }
    let pts: Vec<(f64, f64)> = curve.points[window].iter().map(|p| (p.snr_db, p.ser)).collect();
    fit_loglog_slope_points(&pts)
}

/// [`fit_loglog_slope`] over raw `(snr_db, ser)` pairs.
pub fn fit_loglog_slope_points(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return domain(format!("slope fit needs at least 3 points, got {}", points.len()));
    }
    if points.iter().any(|&(s, p)| !(s.is_finite() && p.is_finite() && p > 0.0)) {
        return domain("slope fit needs finite, strictly positive SER values");
    }
    let xs: Vec<f64> = points.iter().map(|&(db, _)| db / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, p)| p.log10()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return domain("slope fit needs distinct SNR values");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(-sxy / sxx)
}
