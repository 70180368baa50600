//! Finite-duration wave packets and the quantities built on them.
//!
//! - [`pulse`]: the rectangular-envelope sinusoid and its closed-form spectrum.
//! - [`spectral`]: trapezoidal Fourier-integral spectra of sampled waveforms,
//!   width measures, time-bandwidth products and energy moments.
//! - [`adjustment`]: continuation of a real argument into the complex plane
//!   until the imaginary part of an observable vanishes, plus the closed forms
//!   for a complex energy `E + iΔE`.
//! - [`recoil`]: Monte Carlo recoil momentum for a photon whose direction is
//!   uniform over the forward hemisphere.
//! - [`cli`]: the `wavepacket` command-line front end.

pub mod adjustment;
pub mod cli;
mod error;
pub mod pulse;
pub mod recoil;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Reduced Planck constant in natural units.
pub const DEFAULT_HBAR: f64 = 1.0;
