//! Coherent modulation schemes in the `p * Q(sqrt(k * snr))` form.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Bpsk,
    Psk,
    Pam,
    Qam,
}

/// A modulation family and order with its conditional-SER constants.
///
/// `exact` is false for rows whose `p Q(sqrt(k snr))` form is an
/// approximation of the true symbol error rate (M-PSK, M-QAM).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationScheme {
    pub family: Family,
    pub order: u32,
    pub p: f64,
    pub k: f64,
    pub exact: bool,
}

/// Constants for `family` at constellation size `order`.
pub fn scheme_params(family: Family, order: u32) -> Result<ModulationScheme> {
    let m = order as f64;
    let (p, k, exact) = match family {
        Family::Bpsk => {
            if order != 2 {
                return domain(format!("BPSK has order 2, got {order}"));
            }
            (1.0, 2.0, true)
        }
        Family::Psk => {
            if order < 4 || !order.is_power_of_two() {
                return domain(format!("M-PSK needs a power of two M >= 4, got {order}"));
            }
            let s = (std::f64::consts::PI / m).sin();
            (2.0, 2.0 * s * s, false)
        }
        Family::Pam => {
            if order < 2 {
                return domain(format!("M-PAM needs M >= 2, got {order}"));
            }
            (2.0 * (1.0 - 1.0 / m), 6.0 / (m * m - 1.0), true)
        }
        Family::Qam => {
            let root = (order as f64).sqrt().round() as u32;
            if order < 4 || root * root != order {
                return domain(format!("M-QAM needs a perfect square M >= 4, got {order}"));
            }
            (4.0 * (1.0 - 1.0 / root as f64), 3.0 / (m - 1.0), false)
        }
    };
    Ok(ModulationScheme { family, order, p, k, exact })
}

impl ModulationScheme {
    pub fn bpsk() -> Self {
        scheme_params(Family::Bpsk, 2).expect("BPSK is always valid")
    }

    /// Conditional SER at instantaneous SNR `gamma`, without argument checks.
    #[inline]
    pub(crate) fn ser_at(&self, gamma: f64) -> f64 {
        (self.p * specfun::q((self.k * gamma).sqrt())).min(1.0)
    }
}

/// `min(1, p Q(sqrt(k gamma)))`. The cap matters for `p > 2` rows at very
/// low SNR, where the union-bound form exceeds one.
pub fn conditional_ser(scheme: &ModulationScheme, gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return domain(format!("instantaneous SNR must be >= 0, got {gamma}"));
    }
    Ok(scheme.ser_at(gamma))
}

/// Antipodal BPSK symbol for a bit.
#[inline]
pub fn bpsk_symbol(bit: bool) -> f64 {
    if bit {
        1.0
    } else {
        -1.0
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Bpsk => write!(f, "bpsk"),
            Family::Psk => write!(f, "psk{}", self.order),
            Family::Pam => write!(f, "pam{}", self.order),
            Family::Qam => write!(f, "qam{}", self.order),
        }
    }
}

/// Parses `bpsk`, `qpsk`, `psk<M>`, `pam<M>` and `qam<M>` (case-insensitive).
impl FromStr for ModulationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "bpsk" {
            return Ok(Self::bpsk());
        }
        if lower == "qpsk" {
            return scheme_params(Family::Psk, 4);
        }
        let (family, digits) = if let Some(d) = lower.strip_prefix("psk") {
            (Family::Psk, d)
        } else if let Some(d) = lower.strip_prefix("pam") {
            (Family::Pam, d)
        } else if let Some(d) = lower.strip_prefix("qam") {
            (Family::Qam, d)
        } else {
            return domain(format!("unknown modulation '{s}' (expected bpsk, qpsk, psk<M>, pam<M>, qam<M>)"));
        };
        let order: u32 = digits
            .parse()
            .map_err(|_| Error::Domain(format!("bad modulation order in '{s}'")))?;
        scheme_params(family, order)
    }
}
