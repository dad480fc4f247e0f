//! Monte Carlo average SER of a fluid antenna with best-port selection.
//!
//! Two estimators are available:
//!
//! - [`Method::SemiAnalytic`] averages the conditional SER
//!   `p Q(sqrt(k snr |h_best|^2))` over channel draws. It is unbiased for the
//!   `(p, k)` model and reaches SER levels far below what error counting can.
//! - [`Method::SymbolLevel`] sends random BPSK symbols through
//!   `y = sqrt(snr) h_best s + w` with `w ~ CN(0, 1)`, detects coherently at the
//!   selected port and counts errors. It exists to cross-check the first.
//!
//! Each trial draws one channel that is reused at every grid SNR (common
//! random numbers), which keeps curves smooth but correlates their points.
//! Trials are split into chunks of `chunk_size`; chunk `c` draws from
//! `SeededStream::new(seed, c)` and the per-chunk sums are reduced in chunk
//! order, so results are bit-identical for any number of worker threads.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{ChannelSynthesizer, SeededStream, C64};
use crate::correlation::{build_correlation, log_det, ApertureGeometry, CorrelationSpectrum, LogDet};
use crate::error::{domain, Result};
use crate::modulation::{bpsk_symbol, Family, ModulationScheme};

/// Smallest trial budget accepted for a curve.
pub const MIN_TRIALS: u64 = 10_000;
pub const DEFAULT_CHUNK_SIZE: u64 = 10_000;
/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// Minimum expected number of hits for [`empirical_small_gamma_cdf`].
pub const MIN_EXPECTED_HITS: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SemiAnalytic,
    SymbolLevel,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::SemiAnalytic => "semi_analytic",
            Method::SymbolLevel => "symbol_level",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "semi_analytic" => Ok(Method::SemiAnalytic),
            "symbol_level" => Ok(Method::SymbolLevel),
            other => domain(format!("unknown method '{other}' (expected semi_analytic or symbol_level)")),
        }
    }
}

/// Full description of one simulated SER curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub geometry: ApertureGeometry,
    pub scheme: ModulationScheme,
    /// Average SNRs in dB, strictly ascending.
    pub snr_grid_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub chunk_size: u64,
    /// Synthesize channels from the leading `k` eigenpairs only.
    pub truncation_k: Option<usize>,
    pub method: Method,
}

impl SimConfig {
    /// Semi-analytic run with 10^6 trials, seed 0 and default chunking.
    pub fn new(geometry: ApertureGeometry, scheme: ModulationScheme, snr_grid_db: Vec<f64>) -> Self {
        Self {
            geometry,
            scheme,
            snr_grid_db,
            trials: 1_000_000,
            seed: 0,
            chunk_size: DEFAULT_CHUNK_SIZE,
            truncation_k: None,
            method: Method::SemiAnalytic,
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_truncation(mut self, k: Option<usize>) -> Self {
        self.truncation_k = k;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return domain(format!("trials = {} is below the minimum of {MIN_TRIALS}", self.trials));
        }
        if self.chunk_size == 0 {
            return domain("chunk_size must be positive");
        }
        if self.snr_grid_db.is_empty() {
            return domain("SNR grid is empty");
        }
        if self.snr_grid_db.iter().any(|v| !v.is_finite()) {
            return domain("SNR grid contains non-finite values");
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return domain("SNR grid must be strictly ascending");
        }
        if self.method == Method::SymbolLevel && self.scheme.family != Family::Bpsk {
            return domain(format!("symbol-level simulation supports only BPSK, got {}", self.scheme));
        }
        if let Some(k) = self.truncation_k {
            let n = self.geometry.ports();
            if k == 0 || k > n {
                return domain(format!("truncation rank {k} outside 1..={n}"));
            }
        }
        Ok(())
    }
}

/// One estimate on the SNR grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerPoint {
    pub snr_db: f64,
    pub ser: f64,
    /// Half-width of the 95% normal-approximation confidence interval.
    pub ci_half_width: f64,
    pub trials: u64,
}

impl SerPoint {
    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    /// Whether the two 95% intervals intersect.
    pub fn overlaps(&self, other: &SerPoint) -> bool {
        (self.ser - other.ser).abs() <= self.ci_half_width + other.ci_half_width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerCurve {
    pub config: SimConfig,
    pub points: Vec<SerPoint>,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Default)]
struct Moments {
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
}

fn chunk_bounds(trials: u64, chunk_size: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    let chunks = trials.div_ceil(chunk_size);
    (0..chunks).map(move |c| (c, chunk_size.min(trials - c * chunk_size)))
}

/// Runs the configured simulation.
pub fn simulate_ser(config: &SimConfig) -> Result<SerCurve> {
    config.validate()?;
    let spec = build_correlation(&config.geometry)?;
    simulate_ser_with_spectrum(config, &spec)
}

/// As [`simulate_ser`], reusing an already decomposed spectrum of
/// `config.geometry`.
pub fn simulate_ser_with_spectrum(config: &SimConfig, spec: &CorrelationSpectrum) -> Result<SerCurve> {
    config.validate()?;
    if spec.geometry() != &config.geometry {
        return domain("spectrum geometry does not match the simulation config");
    }
    let rank = config.truncation_k.unwrap_or(spec.ports());
    let synth = ChannelSynthesizer::new(spec, rank)?;
    let gammas: Vec<f64> = config.snr_grid_db.iter().map(|&d| db_to_linear(d)).collect();

    let chunks: Vec<(u64, u64)> = chunk_bounds(config.trials, config.chunk_size).collect();
    let partials: Vec<Vec<Moments>> = chunks
        .par_iter()
        .map(|&(index, len)| {
            let mut rng = SeededStream::new(config.seed, index).rng();
            let mut synth = synth.clone();
            match config.method {
                Method::SemiAnalytic => semi_analytic_chunk(&mut synth, &config.scheme, &gammas, len, &mut rng),
                Method::SymbolLevel => symbol_level_chunk(&mut synth, &gammas, len, &mut rng),
            }
        })
        .collect();

    let n = config.trials as f64;
    let points = gammas
        .iter()
        .enumerate()
        .map(|(g, _)| {
            let mut sum = CompensatedSum::default();
            let mut sum_sq = CompensatedSum::default();
            for part in &partials {
                sum.add(part[g].sum.value());
                sum_sq.add(part[g].sum_sq.value());
            }
            let mean = sum.value() / n;
            let var = ((sum_sq.value() - n * mean * mean) / (n - 1.0)).max(0.0);
            SerPoint {
                snr_db: config.snr_grid_db[g],
                ser: mean,
                ci_half_width: Z_95 * (var / n).sqrt(),
                trials: config.trials,
            }
        })
        .collect();

    Ok(SerCurve { config: config.clone(), points })
}

fn semi_analytic_chunk<R: Rng>(
    synth: &mut ChannelSynthesizer,
    scheme: &ModulationScheme,
    gammas: &[f64],
    len: u64,
    rng: &mut R,
) -> Vec<Moments> {
    let mut acc = vec![Moments::default(); gammas.len()];
    for _ in 0..len {
        let (_, gain) = synth.draw_best(rng);
        for (m, &g) in acc.iter_mut().zip(gammas) {
            let pe = scheme.ser_at(g * gain);
            m.sum.add(pe);
            m.sum_sq.add(pe * pe);
        }
    }
    acc
}

fn symbol_level_chunk<R: Rng>(
    synth: &mut ChannelSynthesizer,
    gammas: &[f64],
    len: u64,
    rng: &mut R,
) -> Vec<Moments> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut errors = vec![0u64; gammas.len()];
    for _ in 0..len {
        let draw = synth.draw(rng);
        let h = draw.h[draw.best_port - 1];
        for (e, &g) in errors.iter_mut().zip(gammas) {
            let bit: bool = rng.random();
            let symbol = bpsk_symbol(bit);
            let nr: f64 = rng.sample(StandardNormal);
            let ni: f64 = rng.sample(StandardNormal);
            let y = h * (g.sqrt() * symbol) + C64::new(nr * s, ni * s);
            let decision = (h.conj() * y).re;
            if (decision >= 0.0) != bit {
                *e += 1;
            }
        }
    }
    errors
        .into_iter()
        .map(|e| {
            let mut m = Moments::default();
            // Indicator samples: sum and sum of squares coincide.
            m.sum.add(e as f64);
            m.sum_sq.add(e as f64);
            m
        })
        .collect()
}

/// Fraction of `trials` channel draws whose selected-port gain
/// `|h_best|^2` is at most `x_threshold` (average SNR normalized to one).
///
/// Meant for the small-`x` regime where `P(gain <= x) ~ x^N / det J`. The
/// call is refused when that approximation predicts fewer than
/// [`MIN_EXPECTED_HITS`] hits, or when `J` is numerically singular.
pub fn empirical_small_gamma_cdf(geometry: &ApertureGeometry, x_threshold: f64, trials: u64, seed: u64) -> Result<f64> {
    if !(x_threshold.is_finite() && x_threshold > 0.0) {
        return domain(format!("threshold must be positive, got {x_threshold}"));
    }
    if trials == 0 {
        return domain("trials must be positive");
    }
    let spec = build_correlation(geometry)?;
    let ld = match log_det(&spec, None)? {
        LogDet::Finite(v) => v,
        LogDet::Singular => return domain("correlation matrix is numerically singular; the small-gain law does not apply"),
    };
    let n = geometry.ports() as f64;
    let expected = trials as f64 * (n * x_threshold.ln() - ld).exp();
    if expected < MIN_EXPECTED_HITS {
        return domain(format!(
            "expected about {expected:.1} hits below x = {x_threshold} in {trials} trials; need at least {MIN_EXPECTED_HITS}"
        ));
    }
    let synth = ChannelSynthesizer::full(&spec);
    let chunks: Vec<(u64, u64)> = chunk_bounds(trials, DEFAULT_CHUNK_SIZE).collect();
    let hits: u64 = chunks
        .par_iter()
        .map(|&(index, len)| {
            let mut rng = SeededStream::new(seed, index).rng();
            let mut synth = synth.clone();
            (0..len).filter(|_| synth.draw_best(&mut rng).1 <= x_threshold).count() as u64
        })
        .sum();
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(n: usize, w: f64) -> ApertureGeometry {
        ApertureGeometry::new(n, w).unwrap()
    }

    fn rayleigh_bpsk(snr: f64) -> f64 {
        0.5 * (1.0 - (snr / (1.0 + snr)).sqrt())
    }

    #[test]
    fn config_validation() {
        let base = SimConfig::new(geom(2, 0.5), ModulationScheme::bpsk(), vec![0.0, 10.0]);
        assert!(base.validate().is_ok());
        assert!(base.clone().with_trials(9_999).validate().is_err());
        assert!(base.clone().with_chunk_size(0).validate().is_err());
        assert!(base.clone().with_truncation(Some(3)).validate().is_err());
        assert!(base.clone().with_truncation(Some(0)).validate().is_err());
        let mut unsorted = base.clone();
        unsorted.snr_grid_db = vec![10.0, 0.0];
        assert!(unsorted.validate().is_err());
        let mut empty = base.clone();
        empty.snr_grid_db.clear();
        assert!(empty.validate().is_err());
        let mut qam = base.clone().with_method(Method::SymbolLevel);
        qam.scheme = "qam16".parse().unwrap();
        assert!(simulate_ser(&qam).is_err());
    }

    #[test]
    fn single_port_matches_rayleigh_closed_form() {
        let cfg = SimConfig::new(geom(1, 1.0), ModulationScheme::bpsk(), vec![10.0])
            .with_trials(1_000_000)
            .with_seed(7);
        let curve = simulate_ser(&cfg).unwrap();
        let p = curve.points[0];
        let exact = rayleigh_bpsk(10.0);
        assert!((exact - 2.3269e-2).abs() < 1e-6);
        assert!((p.ser - exact).abs() < 3.0 * p.ci_half_width, "{} vs {exact} (ci {})", p.ser, p.ci_half_width);
    }

    #[test]
    fn identical_configs_give_identical_curves() {
        let cfg = SimConfig::new(geom(3, 1.0), ModulationScheme::bpsk(), vec![0.0, 5.0, 10.0])
            .with_trials(20_000)
            .with_seed(99);
        assert_eq!(simulate_ser(&cfg).unwrap(), simulate_ser(&cfg).unwrap());
    }

    #[test]
    fn symbol_level_agrees_with_semi_analytic() {
        let cfg = SimConfig::new(geom(2, 0.5), ModulationScheme::bpsk(), vec![15.0])
            .with_trials(1_000_000)
            .with_seed(5);
        let semi = simulate_ser(&cfg).unwrap().points[0];
        let sym = simulate_ser(&cfg.clone().with_method(Method::SymbolLevel)).unwrap().points[0];
        assert!(semi.overlaps(&sym), "semi {semi:?} vs symbol {sym:?}");
    }

    #[test]
    fn small_gamma_cdf_single_port() {
        let p = empirical_small_gamma_cdf(&geom(1, 1.0), 0.01, 1_000_000, 3).unwrap();
        let exact = 1.0 - (-0.01f64).exp();
        let sd = (exact * (1.0 - exact) / 1e6).sqrt();
        assert!((p - exact).abs() < 4.0 * sd, "{p} vs {exact}");
    }

    #[test]
    fn small_gamma_cdf_refuses_thin_tails() {
        assert!(empirical_small_gamma_cdf(&geom(3, 1.0), 1e-3, 100_000, 1).is_err());
        assert!(empirical_small_gamma_cdf(&geom(100, 1.0), 0.1, 100_000, 1).is_err());
        assert!(empirical_small_gamma_cdf(&geom(1, 1.0), 0.0, 100_000, 1).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }
}
