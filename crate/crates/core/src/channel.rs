//! Seeded correlated channel synthesis and best-port selection.
//!
//! A channel vector is `h = U diag(sqrt(lambda)) z` with `z` i.i.d. unit
//! variance circular complex Gaussian (each real component has variance 1/2),
//! so every port has `E|h_n|^2 = 1` and `E[h h^H] = J`.
//!
//! Reproducibility comes from [`SeededStream`]: a master seed plus a stream
//! index selects an independent ChaCha8 stream. Monte Carlo drivers assign one
//! stream per fixed-size chunk of trials, which makes results independent of
//! how many workers process the chunks.

use nalgebra::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::correlation::CorrelationSpectrum;
use crate::error::{domain, Result};

pub type C64 = Complex<f64>;

/// The generator behind every [`SeededStream`].
pub type StreamRng = ChaCha8Rng;

/// Identifies one independent random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// One channel realization with its selected port.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub h: Vec<C64>,
    /// 1-based index of the strongest port.
    pub best_port: usize,
    /// `|h_best|^2`, the power gain at the selected port.
    pub best_gain_sq: f64,
}

impl ChannelDraw {
    pub fn from_coefficients(h: Vec<C64>) -> Self {
        let (best_port, best_gain_sq) = select_best_port(&h);
        Self { h, best_port, best_gain_sq }
    }
}

/// Strongest port (1-based) and its power gain. Exact ties go to the
/// smallest index. An empty vector yields `(0, 0.0)`.
pub fn select_best_port(h: &[C64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, c) in h.iter().enumerate() {
        let g = c.norm_sqr();
        if g > best.1 {
            best = (i + 1, g);
        }
    }
    if best.0 == 0 {
        (0, 0.0)
    } else {
        best
    }
}

/// Precomputed `U_{:,1..K} diag(sqrt(lambda_{1..K}))` with scratch buffers.
///
/// Every draw consumes `2N` standard normals (real and imaginary part per
/// mode, mode by mode) regardless of `K`, so a rank-`K` draw and a full draw
/// from the same generator state share the same `z`.
#[derive(Debug, Clone)]
pub struct ChannelSynthesizer {
    ports: usize,
    rank: usize,
    // row-major ports x rank
    factor: Vec<f64>,
    z_re: Vec<f64>,
    z_im: Vec<f64>,
}

impl ChannelSynthesizer {
    /// Synthesizer using the leading `rank` eigenpairs of `spec`.
    pub fn new(spec: &CorrelationSpectrum, rank: usize) -> Result<Self> {
        let n = spec.ports();
        if rank == 0 || rank > n {
            return domain(format!("truncation rank {rank} outside 1..={n}"));
        }
        let u = spec.eigenvectors();
        let lambda = spec.eigenvalues();
        let mut factor = Vec::with_capacity(n * rank);
        for i in 0..n {
            for j in 0..rank {
                factor.push(u[(i, j)] * lambda[j].sqrt());
            }
        }
        Ok(Self {
            ports: n,
            rank,
            factor,
            z_re: vec![0.0; n],
            z_im: vec![0.0; n],
        })
    }

    pub fn full(spec: &CorrelationSpectrum) -> Self {
        Self::new(spec, spec.ports()).expect("full rank is always in range")
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn draw_z<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..self.ports {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            self.z_re[j] = re * s;
            self.z_im[j] = im * s;
        }
    }

    #[inline]
    fn port(&self, i: usize) -> C64 {
        let row = &self.factor[i * self.rank..(i + 1) * self.rank];
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, &f) in row.iter().enumerate() {
            re += f * self.z_re[j];
            im += f * self.z_im[j];
        }
        C64::new(re, im)
    }

    /// Draws a full channel vector.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ChannelDraw {
        self.draw_z(rng);
        let h = (0..self.ports).map(|i| self.port(i)).collect();
        ChannelDraw::from_coefficients(h)
    }

    /// Draws a channel and returns only the selected port and its power
    /// gain. Consumes the generator exactly like [`draw`](Self::draw).
    #[inline]
    pub fn draw_best<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (usize, f64) {
        self.draw_z(rng);
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..self.ports {
            let g = self.port(i).norm_sqr();
            if g > best.1 {
                best = (i + 1, g);
            }
        }
        best
    }
}

/// One full-rank draw from `rng` (see [`SeededStream::rng`]).
pub fn draw_channel<R: Rng + ?Sized>(spec: &CorrelationSpectrum, rng: &mut R) -> ChannelDraw {
    ChannelSynthesizer::full(spec).draw(rng)
}

/// One draw synthesized from the leading `k` eigenpairs only.
pub fn draw_channel_truncated<R: Rng + ?Sized>(
    spec: &CorrelationSpectrum,
    k: usize,
    rng: &mut R,
) -> Result<ChannelDraw> {
    Ok(ChannelSynthesizer::new(spec, k)?.draw(rng))
}
