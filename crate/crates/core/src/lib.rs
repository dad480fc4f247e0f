//! Numerical laboratory for fluid antenna systems (FAS) under spatially
//! correlated Rayleigh fading.
//!
//! A single-element receiver can occupy any of `N` uniformly spaced ports on
//! a linear aperture of `W` wavelengths and always uses the port with the
//! strongest channel. The crate covers:
//!
//! - [`correlation`]: the Jakes correlation matrix and its sorted eigenstructure.
//! - [`channel`]: seeded correlated channel synthesis and best-port selection.
//! - [`modulation`]: the `(p, k)` parameterization of coherent schemes.
//! - [`ser_sim`]: Monte Carlo SER curves with confidence intervals.
//! - [`ser_analysis`]: closed-form high-SNR SER, diversity and coding gain.
//! - [`rank`]: knee-based effective rank, the `2W + 1` limit and entropy rank.
//! - [`export`]: the CSV formats shared with the command-line tool.

pub mod channel;
pub mod correlation;
pub mod error;
pub mod export;
pub mod modulation;
pub mod rank;
pub mod ser_analysis;
pub mod ser_sim;
pub mod specfun;

pub use error::{Error, Result};
