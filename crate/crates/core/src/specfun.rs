//! Scalar special functions: Bessel `J0`, the Gaussian tail `Q`, and the
//! log-space double factorial / half-integer Gamma pair.
//!
//! Factorial-like quantities are only ever returned as logarithms. The
//! closed-form SER coefficient multiplies `(2N-1)!!` by `(k*snr)^-N`, and both
//! factors leave the `f64` range long before `N = 20`.

use std::f64::consts::{FRAC_PI_4, LN_2, PI, SQRT_2};

use crate::error::{domain, Result};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 30.0;

/// Bessel function of the first kind, order zero.
///
/// Power series below `|x| = 8`, Miller backward recurrence up to `|x| = 30`,
/// and the Hankel asymptotic expansion beyond. Absolute error stays below
/// `1e-13` on `|x| <= 200`.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("bessel_j0: non-finite argument {x}"));
    }
    Ok(j0(x))
}

pub(crate) fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_LIMIT {
        j0_series(ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        j0_miller(ax)
    } else {
        j0_hankel(ax)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        let mf = m as f64;
        term *= q / (mf * mf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

// Backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised with
// J_0 + 2 * sum_k J_{2k} = 1.
fn j0_miller(x: f64) -> f64 {
    let start = 2 * (((1.5 * x + 40.0) / 2.0).ceil() as usize);
    let mut next = 0.0_f64; // J_{n+1}
    let mut cur = 1e-30_f64; // J_n
    let mut norm = 0.0_f64;
    for n in (1..=start).rev() {
        if n % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = (2.0 * n as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur;
    cur / norm
}

fn j0_hankel(x: f64) -> f64 {
    // P ~ sum (-1)^k a_{2k} / x^{2k}, Q ~ sum (-1)^k a_{2k+1} / x^{2k+1}
    // with a_j = (-1)^j (1^2 3^2 ... (2j-1)^2) / (j! 8^j).
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0_f64; // a_j / x^j, including its sign
    let mut prev_mag = f64::INFINITY;
    for j in 0..200usize {
        if j > 0 {
            let odd = (2 * j - 1) as f64;
            a *= -(odd * odd) / (j as f64 * 8.0 * x);
        }
        let mag = a.abs();
        if mag > prev_mag || mag < 1e-18 {
            break;
        }
        prev_mag = mag;
        let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if j % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Gaussian tail probability `Q(x) = P(Z > x)` for a standard normal `Z`.
///
/// Evaluated as `erfc(x / sqrt 2) / 2`, so the relative accuracy holds deep
/// into the upper tail (until the result leaves the normal `f64` range near
/// `x = 37.5`).
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("q_function: non-finite argument {x}"));
    }
    Ok(q(x))
}

#[inline]
pub(crate) fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// `ln((2n-1)!!)`, accumulated as a sum of logarithms.
pub fn log_double_factorial_odd(n: u64) -> Result<f64> {
    if n < 1 {
        return domain("log_double_factorial_odd: n must be >= 1");
    }
    Ok(ldf(n))
}

pub(crate) fn ldf(n: u64) -> f64 {
    (1..=n).map(|i| ((2 * i - 1) as f64).ln()).sum()
}

/// `ln Gamma(n + 1/2)` through `Gamma(n + 1/2) = (2n-1)!! sqrt(pi) / 2^n`.
pub fn gamma_half_integer(n: u64) -> Result<f64> {
    if n < 1 {
        return domain("gamma_half_integer: n must be >= 1");
    }
    Ok(ldf(n) - n as f64 * LN_2 + 0.5 * PI.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn j0_reference_points() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(bessel_j0(PI).unwrap(), -0.304_242_177_644_093_9, epsilon = 1e-12);
        assert!(bessel_j0(2.404_825_557_695_773).unwrap().abs() < 1e-10);
        assert_eq!(bessel_j0(-3.7).unwrap(), bessel_j0(3.7).unwrap());
    }

    #[test]
    fn j0_branches_agree_where_they_overlap() {
        for &x in &[6.0, 7.5, SERIES_LIMIT] {
            assert_abs_diff_eq!(j0_series(x), j0_miller(x), epsilon = 1e-13);
        }
        for &x in &[12.0, 18.5, 25.0, ASYMPTOTIC_LIMIT] {
            assert_abs_diff_eq!(j0_miller(x), j0_hankel(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j0(f64::INFINITY).is_err());
        assert!(q_function(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn q_reference_points() {
        assert_eq!(q_function(0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(q_function(1.959_963_985).unwrap(), 0.025, epsilon = 1e-9);
        let far_left = q_function(-10.0).unwrap();
        assert!((1.0 - far_left) < 1e-20 && far_left <= 1.0);
        assert_abs_diff_eq!(q_function(8.0_f64.sqrt()).unwrap(), 2.338_867_490_523_633e-3, epsilon = 1e-15);
    }

    #[test]
    fn double_factorial_small_values() {
        assert_eq!(log_double_factorial_odd(1).unwrap(), 0.0);
        assert_abs_diff_eq!(log_double_factorial_odd(3).unwrap(), 15f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(log_double_factorial_odd(10).unwrap(), 654_729_075f64.ln(), epsilon = 1e-12);
        assert!(log_double_factorial_odd(10_000).unwrap().is_finite());
        assert!(log_double_factorial_odd(0).is_err());
    }

    #[test]
    fn gamma_half_integer_small_values() {
        assert_abs_diff_eq!(gamma_half_integer(1).unwrap(), (PI.sqrt() / 2.0).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(gamma_half_integer(2).unwrap(), (3.0 * PI.sqrt() / 4.0).ln(), epsilon = 1e-14);
        assert!(gamma_half_integer(0).is_err());
    }
}
