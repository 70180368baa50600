//! Rectangular-envelope sinusoid and its exact spectral intensity.
//!
//! The pulse is `a0·cos(omega0·t)` switched on for `0 <= t <= tau` and off
//! everywhere else, observed at a fixed point (spatial phase zero). It is
//! handled in its analytic-signal form `a0·exp(i·omega0·t)`; the physical
//! cosine is the real part.
//!
//! The intensity is the exact squared modulus of the Fourier integral over
//! the support,
//!
//! ```text
//! I(ω) = |∫₀^τ a0·e^{i(ω0−ω)t} dt|² = 4·a0²·sin²((ω−ω0)τ/2) / (ω−ω0)²
//! ```
//!
//! Note that the frequently quoted form `a0²·sin²((ω−ω0)τ/2) / (ω−ω0)²` is a
//! quarter of the integral it is written for. This module returns the value
//! of the integral; divide by 4 to compare against the shorter form.

use num_complex::Complex64;

use crate::{Error, Result};

/// Below this value of `|ω−ω0|·τ` the intensity is taken from its Taylor
/// series instead of the sine ratio.
const SERIES_THRESHOLD: f64 = 1e-4;

/// A rectangular-envelope sinusoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    a0: f64,
    omega0: f64,
    tau: f64,
}

impl Pulse {
    /// `a0` must be finite and nonzero, `omega0` and `tau` finite and positive.
    pub fn new(a0: f64, omega0: f64, tau: f64) -> Result<Self> {
        if !a0.is_finite() || a0 == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "amplitude must be finite and nonzero, got {a0}"
            )));
        }
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "carrier frequency must be finite and positive, got {omega0}"
            )));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "duration must be finite and positive, got {tau}"
            )));
        }
        Ok(Self { a0, omega0, tau })
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Complex amplitude at a single instant; zero outside `[0, tau]`.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        if (0.0..=self.tau).contains(&t) {
            Complex64::from_polar(self.a0, self.omega0 * t)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Samples the analytic signal on `times`.
    pub fn sample_waveform(&self, times: &[f64]) -> Result<Vec<Complex64>> {
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("sample times"));
        }
        Ok(times.iter().map(|&t| self.amplitude(t)).collect())
    }

    /// Exact spectral intensity at angular frequency `omega`.
    pub fn analytic_intensity(&self, omega: f64) -> Result<f64> {
        if !omega.is_finite() {
            return Err(Error::NonFinite("angular frequency"));
        }
        Ok(self.intensity_at_offset(omega - self.omega0))
    }

    /// Intensity as a function of the detuning `delta = ω − ω0`.
    ///
    /// Even in `delta` bit for bit, which [`Pulse::analytic_intensity`]
    /// cannot promise because `ω0 + δ` and `ω0 − δ` round differently.
    pub fn intensity_at_offset(&self, delta: f64) -> f64 {
        let peak = self.peak_intensity();
        let x = delta.abs() * self.tau;
        if x < SERIES_THRESHOLD {
            let x2 = x * x;
            peak * (1.0 - x2 / 12.0 + x2 * x2 / 360.0)
        } else {
            let s = (0.5 * x).sin();
            let d = delta.abs();
            4.0 * self.a0 * self.a0 * s * s / (d * d)
        }
    }

    /// `a0²·τ²`, the intensity at resonance.
    pub fn peak_intensity(&self) -> f64 {
        self.a0 * self.a0 * self.tau * self.tau
    }
}
