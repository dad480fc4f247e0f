//! Slow, independent reference implementations used only by the tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Fixed-point fractional bits for the J0 series.
const J0_SCALE_BITS: i64 = 640;

/// J0 by its power series `sum (-1)^m (x^2/4)^m / (m!)^2`, summed exactly in
/// big fixed-point arithmetic. The argument is taken bit-exactly from the
/// float, so the only error is the final rounding to `f64`.
pub fn j0_series_oracle(x: f64) -> f64 {
    assert!(x.is_finite());
    if x == 0.0 {
        return 1.0;
    }
    let (mantissa, exponent) = decompose(x.abs());
    // t = x^2 / 4 = mantissa^2 * 2^(2 exponent - 2), in fixed point.
    let t = shift(BigInt::from(mantissa) * BigInt::from(mantissa), J0_SCALE_BITS + 2 * exponent - 2);
    let one = BigInt::from(1) << J0_SCALE_BITS as usize;
    let cutoff = BigInt::from(1) << 8;

    let mut term = one.clone();
    let mut sum = one;
    let mut m: u64 = 1;
    loop {
        term = (&term * &t) >> J0_SCALE_BITS as usize;
        term /= BigInt::from(m) * BigInt::from(m);
        term = -term;
        sum += &term;
        if (m as f64) > x && term.abs() < cutoff {
            break;
        }
        m += 1;
    }
    fixed_to_f64(&sum, J0_SCALE_BITS)
}

fn decompose(x: f64) -> (u64, i64) {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    }
}

fn shift(v: BigInt, by: i64) -> BigInt {
    if by >= 0 {
        v << by as usize
    } else {
        v >> (-by) as usize
    }
}

fn fixed_to_f64(v: &BigInt, scale_bits: i64) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    // Keep 64 significant bits before converting.
    let excess = v.bits() as i64 - 64;
    if excess > 0 {
        (v >> excess as usize).to_f64().unwrap() * 2f64.powi((excess - scale_bits) as i32)
    } else {
        v.to_f64().unwrap() * 2f64.powi(-scale_bits as i32)
    }
}

/// First positive zero of J0, by bisection on the series oracle.
pub fn j0_first_zero_oracle() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if j0_series_oracle(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `Q(x)` by quadrature of the defining integral. For `x >= 0` it uses
/// `Q(x) = phi(x) int_0^inf exp(-x t - t^2 / 2) dt`, which keeps full
/// relative accuracy deep into the tail.
pub fn q_quadrature_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - q_quadrature_oracle(-x);
    }
    let phi = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let upper = 40.0 / x.max(1.0) + 10.0_f64.min(40.0 / x.max(0.25));
    phi * simpson(|t| (-x * t - 0.5 * t * t).exp(), 0.0, upper, 200_000)
}

/// `ln Gamma(z)` by shifting up and applying Stirling's series.
pub fn ln_gamma_oracle(z: f64) -> f64 {
    assert!(z > 0.0);
    let mut shift_log = 0.0;
    let mut z = z;
    while z < 30.0 {
        shift_log -= z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))));
    shift_log + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// `ln((2n - 1)!!)` from the exact big-integer product.
pub fn ln_double_factorial_oracle(n: u64) -> f64 {
    let mut prod = BigInt::from(1);
    for k in 1..=n {
        prod *= BigInt::from(2 * k - 1);
    }
    let excess = (prod.bits() as i64 - 64).max(0);
    let top = (&prod >> excess as usize).to_f64().unwrap();
    top.ln() + excess as f64 * std::f64::consts::LN_2
}

/// Exact Rayleigh-fading BPSK error rate at linear average SNR.
pub fn rayleigh_bpsk_oracle(snr: f64) -> f64 {
    0.5 * (1.0 - (snr / (1.0 + snr)).sqrt())
}

/// `P(max(|h1|^2, |h2|^2) <= x)` for two unit-power complex Gaussians with
/// correlation magnitude `rho`.
///
/// Conditioned on `u = |h1|^2`, `|h2|^2 / (1 - rho^2)` is a noncentral
/// squared-magnitude with parameter `m = rho^2 u / (1 - rho^2)`, whose CDF is
/// a Poisson mixture of Gamma CDFs. The outer integral over `u` is Simpson.
pub fn two_port_max_cdf_oracle(rho: f64, x: f64) -> f64 {
    let s = 1.0 - rho * rho;
    let y = x / s;
    // Gamma(j + 1, 1) CDFs at y, from the regularized series.
    let gamma_cdf = |j: usize| -> f64 {
        let mut term = 1.0;
        let mut tail = 1.0;
        for i in 1..=j {
            term *= y / i as f64;
            tail += term;
        }
        1.0 - (-y).exp() * tail
    };
    let cdfs: Vec<f64> = (0..80).map(gamma_cdf).collect();
    let conditional = |u: f64| -> f64 {
        let m = rho * rho * u / s;
        let mut weight = (-m).exp();
        let mut acc = 0.0;
        for (j, c) in cdfs.iter().enumerate() {
            acc += weight * c;
            weight *= m / (j + 1) as f64;
        }
        acc
    };
    simpson(|u| (-u).exp() * conditional(u), 0.0, x, 4000)
}

/// Sharpest-turn index of a polyline, computed from scratch.
pub fn brute_force_knee(points: &[(f64, f64)]) -> usize {
    let scale = |vals: Vec<f64>| -> Vec<f64> {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            vals.iter().map(|v| (v - lo) / (hi - lo)).collect()
        } else {
            vec![0.5; vals.len()]
        }
    };
    let xs = scale(points.iter().map(|p| p.0).collect());
    let ys = scale(points.iter().map(|p| p.1).collect());
    let mut best_index = 1;
    let mut best_cos = f64::NEG_INFINITY;
    for i in 1..points.len() - 1 {
        let (ax, ay) = (xs[i - 1] - xs[i], ys[i - 1] - ys[i]);
        let (bx, by) = (xs[i + 1] - xs[i], ys[i + 1] - ys[i]);
        let na = (ax * ax + ay * ay).sqrt();
        let nb = (bx * bx + by * by).sqrt();
        let c = if na > 0.0 && nb > 0.0 { (ax * bx + ay * by) / (na * nb) } else { -1.0 };
        if c > best_cos {
            best_cos = c;
            best_index = i;
        }
    }
    best_index
}

/// Least-squares slope of `log10 y` against `log10 x`, negated.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -num / den
}

/// Exact BPSK error rate of best-of-two selection at linear SNR `snr`:
/// `int F(x) d(-Q(sqrt(2 snr x)))`, substituting `x = t^2` to remove the
/// endpoint singularity.
pub fn two_port_bpsk_ser_oracle(rho: f64, snr: f64) -> f64 {
    let upper = (60.0 / snr).sqrt();
    let weight = (snr / std::f64::consts::PI).sqrt();
    simpson(
        |t| two_port_max_cdf_oracle(rho, t * t) * weight * (-snr * t * t).exp(),
        0.0,
        upper,
        600,
    )
}
