//! Jakes spatial correlation for a uniform linear aperture and its sorted
//! eigenstructure.
//!
//! Port `i` and port `j` of an `N`-port aperture spanning `W` wavelengths sit
//! `|i - j| W / (N - 1)` wavelengths apart, and their channel correlation is
//! `J0(2 pi` times that distance`)`. The resulting matrix is symmetric Toeplitz
//! with a unit diagonal and positive semidefinite; [`CorrelationSpectrum`]
//! keeps it together with eigenvalues sorted in descending order.
//!
//! Per-port average SNRs are fixed to one throughout, so the correlation and
//! covariance matrices coincide.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::specfun;

/// Eigenvalues in `[-CLAMP_TOLERANCE, 0)` are solver noise and are floored
/// to zero; anything more negative is reported as a numerical failure.
pub const CLAMP_TOLERANCE: f64 = 1e-10;

/// Port count and normalized aperture width of a linear fluid antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureGeometry {
    ports: usize,
    width: f64,
}

impl ApertureGeometry {
    /// `ports >= 1`, `width >= 0`, and `width > 0` whenever `ports >= 2`.
    pub fn new(ports: usize, width: f64) -> Result<Self> {
        if ports == 0 {
            return domain("aperture needs at least one port");
        }
        if !width.is_finite() || width < 0.0 {
            return domain(format!("aperture width must be a finite value >= 0, got {width}"));
        }
        if ports >= 2 && width == 0.0 {
            return domain("aperture width must be positive when there are two or more ports");
        }
        Ok(Self { ports, width })
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn width(&self) -> f64 {
        self.width
    }
}

/// Distance between ports `i` and `j` (1-based) in wavelengths.
pub fn port_spacing(i: usize, j: usize, geom: &ApertureGeometry) -> Result<f64> {
    let n = geom.ports;
    if n < 2 {
        return domain("port spacing is undefined for a single-port aperture");
    }
    if i == 0 || j == 0 || i > n || j > n {
        return domain(format!("port indices ({i}, {j}) outside 1..={n}"));
    }
    Ok(i.abs_diff(j) as f64 * geom.width / (n - 1) as f64)
}

/// Correlation matrix `J` with its eigendecomposition `J = U diag(lambda) U^T`.
#[derive(Debug, Clone)]
pub struct CorrelationSpectrum {
    geometry: ApertureGeometry,
    matrix: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    clamped_count: usize,
}

/// `ln det` of a spectrum (or of its leading block).
///
/// A rank-deficient matrix has no finite log-determinant. That regime is a
/// legitimate outcome, not an error, so it gets its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogDet {
    Finite(f64),
    Singular,
}

impl LogDet {
    /// The value, with `Singular` mapped to negative infinity.
    pub fn value(self) -> f64 {
        match self {
            LogDet::Finite(v) => v,
            LogDet::Singular => f64::NEG_INFINITY,
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, LogDet::Singular)
    }
}

/// Builds `J` for `geom` and decomposes it.
pub fn build_correlation(geom: &ApertureGeometry) -> Result<CorrelationSpectrum> {
    let n = geom.ports;
    if n == 1 {
        return Ok(CorrelationSpectrum {
            geometry: *geom,
            matrix: DMatrix::from_element(1, 1, 1.0),
            eigenvalues: vec![1.0],
            eigenvectors: DMatrix::from_element(1, 1, 1.0),
            clamped_count: 0,
        });
    }

    // One J0 evaluation per lag keeps the matrix exactly Toeplitz.
    let scale = 2.0 * PI * geom.width / (n - 1) as f64;
    let lags: Vec<f64> = (0..n)
        .map(|lag| if lag == 0 { 1.0 } else { specfun::j0(scale * lag as f64) })
        .collect();
    let matrix = DMatrix::from_fn(n, n, |i, j| lags[i.abs_diff(j)]);

    let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical(format!("symmetric eigensolver did not converge for N = {n}")))?;

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort: equal eigenvalues keep the solver's order.
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    let mut clamped_count = 0;
    for (dst, &src) in order.iter().enumerate() {
        let mut lambda = eig.eigenvalues[src];
        if lambda < 0.0 {
            if lambda < -CLAMP_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "eigenvalue {lambda:e} of a correlation matrix (N = {n}, W = {}) is below -{CLAMP_TOLERANCE:e}",
                    geom.width
                )));
            }
            lambda = 0.0;
            clamped_count += 1;
        }
        eigenvalues.push(lambda);
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    Ok(CorrelationSpectrum {
        geometry: *geom,
        matrix,
        eigenvalues,
        eigenvectors,
        clamped_count,
    })
}

impl CorrelationSpectrum {
    pub fn geometry(&self) -> &ApertureGeometry {
        &self.geometry
    }

    pub fn ports(&self) -> usize {
        self.geometry.ports
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Eigenvalues, descending, with solver noise floored at zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors; column `n` belongs to `eigenvalues()[n]`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Number of slightly negative eigenvalues that were floored to zero.
    pub fn clamped_count(&self) -> usize {
        self.clamped_count
    }

    /// Count of strictly positive eigenvalues.
    pub fn positive_count(&self) -> usize {
        self.eigenvalues.iter().take_while(|&&l| l > 0.0).count()
    }

    /// Whether every eigenvalue clears the numerical-rank tolerance
    /// `N * eps * lambda_max`.
    pub fn is_numerically_full_rank(&self) -> bool {
        let tol = self.ports() as f64 * f64::EPSILON * self.eigenvalues[0];
        self.eigenvalues.iter().all(|&l| l > tol)
    }

    /// `U diag(lambda) U^T`, for reconstruction checks.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let u = &self.eigenvectors;
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.eigenvalues));
        u * lambda * u.transpose()
    }
}

/// `sum ln lambda_n` over all eigenvalues, or over the leading `top_k`.
///
/// Without `top_k` the result is [`LogDet::Singular`] once the spectrum is
/// numerically rank-deficient (some eigenvalue at or below
/// `N * eps * lambda_max`). With `top_k` every one of the leading `K`
/// eigenvalues must be strictly positive.
pub fn log_det(spec: &CorrelationSpectrum, top_k: Option<usize>) -> Result<LogDet> {
    let lambda = spec.eigenvalues();
    match top_k {
        None => {
            if !spec.is_numerically_full_rank() {
                return Ok(LogDet::Singular);
            }
            Ok(LogDet::Finite(lambda.iter().map(|l| l.ln()).sum()))
        }
        Some(k) => {
            if k == 0 || k > lambda.len() {
                return domain(format!("top_k = {k} outside 1..={}", lambda.len()));
            }
            let positive = spec.positive_count();
            if k > positive {
                return domain(format!(
                    "top_k = {k} exceeds the {positive} strictly positive eigenvalues"
                ));
            }
            Ok(LogDet::Finite(lambda[..k].iter().map(|l| l.ln()).sum()))
        }
    }
}

/// Fraction of the total eigenvalue mass held by the leading `k` modes.
pub fn energy_ratio(spec: &CorrelationSpectrum, k: usize) -> Result<f64> {
    let lambda = spec.eigenvalues();
    if k == 0 || k > lambda.len() {
        return domain(format!("k = {k} outside 1..={}", lambda.len()));
    }
    if k == lambda.len() {
        return Ok(1.0);
    }
    let total: f64 = lambda.iter().sum();
    let head: f64 = lambda[..k].iter().sum();
    Ok((head / total).min(1.0))
}
