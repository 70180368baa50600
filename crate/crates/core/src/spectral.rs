//! Numerical spectra of sampled waveforms and the width and moment measures
//! derived from them.
//!
//! Spectra are computed by direct trapezoidal quadrature of the Fourier
//! integral on the caller's own time grid. There is no resampling and no FFT,
//! so non-uniform grids work and identical inputs give identical outputs.
//!
//! Two width conventions are reported. The primary one is the distance from
//! the peak to the first null of the main lobe, which for the rectangular
//! envelope is `2π/τ` and makes `Δω·τ = 2π`. FWHM is reported alongside it.
//! The sinc² distribution has a divergent second moment, so no variance-based
//! width is offered, and the energy spread in [`MomentReport`] is the
//! convention `2πħ/τ` rather than a moment.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::pulse::Pulse;
use crate::{Error, Result};

/// Relative level (against the peak) below which a local minimum counts as a
/// spectral null.
pub const ZERO_LEVEL: f64 = 1e-6;

/// A waveform sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveform {
    t: Vec<f64>,
    amp: Vec<Complex64>,
}

impl SampledWaveform {
    pub fn new(t: Vec<f64>, amp: Vec<Complex64>) -> Result<Self> {
        if t.len() != amp.len() {
            return Err(Error::LengthMismatch {
                left: t.len(),
                right: amp.len(),
            });
        }
        check_grid(&t, "time grid", 2)?;
        if amp.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite("amplitudes"));
        }
        Ok(Self { t, amp })
    }

    /// `n` uniform samples of `pulse` spanning exactly `[0, tau]`.
    pub fn from_pulse(pulse: &Pulse, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooShort {
                what: "time grid",
                min: 2,
                len: n,
            });
        }
        let step = pulse.tau() / (n - 1) as f64;
        let mut t: Vec<f64> = (0..n).map(|j| j as f64 * step).collect();
        t[n - 1] = pulse.tau();
        let amp = pulse.sample_waveform(&t)?;
        Self::new(t, amp)
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Same amplitudes on the grid `t + offset`.
    pub fn time_shifted(&self, offset: f64) -> Result<Self> {
        Self::new(
            self.t.iter().map(|t| t + offset).collect(),
            self.amp.clone(),
        )
    }

    /// Span between the first and last nonzero samples, or 0 for an
    /// all-zero waveform. Zero padding around a pulse does not count.
    pub fn duration(&self) -> f64 {
        let nonzero = |a: &Complex64| a.re != 0.0 || a.im != 0.0;
        match (
            self.amp.iter().position(nonzero),
            self.amp.iter().rposition(nonzero),
        ) {
            (Some(first), Some(last)) => self.t[last] - self.t[first],
            _ => 0.0,
        }
    }

    /// Reads a CSV table with header `t,re,im`, or `t,amp` for a real signal.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Input(e.to_string()))?
            .iter()
            .map(|h| h.to_ascii_lowercase())
            .collect();
        let complex = match headers
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .as_slice()
        {
            ["t", "re", "im"] => true,
            ["t", "amp"] => false,
            other => {
                return Err(Error::Input(format!(
                    "expected header `t,re,im` or `t,amp`, found `{}`",
                    other.join(",")
                )))
            }
        };

        let mut t = Vec::new();
        let mut amp = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Input(e.to_string()))?;
            let field = |i: usize| -> Result<f64> {
                let raw = record.get(i).unwrap_or("");
                raw.parse::<f64>().map_err(|_| {
                    Error::Input(format!(
                        "row {}: cannot parse `{raw}` as a number",
                        line + 2
                    ))
                })
            };
            t.push(field(0)?);
            let re = field(1)?;
            let im = if complex { field(2)? } else { 0.0 };
            amp.push(Complex64::new(re, im));
        }
        Self::new(t, amp)
    }

    /// Writes the `t,re,im` form read by [`SampledWaveform::read_csv`].
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,re,im")?;
        for (t, a) in self.t.iter().zip(&self.amp) {
            writeln!(out, "{},{},{}", fmt17(*t), fmt17(a.re), fmt17(a.im))?;
        }
        Ok(())
    }
}

/// Intensity samples on a strictly increasing angular-frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    omega: Vec<f64>,
    intensity: Vec<f64>,
}

impl Spectrum {
    pub fn new(omega: Vec<f64>, intensity: Vec<f64>) -> Result<Self> {
        if omega.len() != intensity.len() {
            return Err(Error::LengthMismatch {
                left: omega.len(),
                right: intensity.len(),
            });
        }
        check_grid(&omega, "frequency grid", 2)?;
        if intensity.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("intensities"));
        }
        if let Some(i) = intensity.iter().position(|&v| v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "intensity at index {i} is negative"
            )));
        }
        Ok(Self { omega, intensity })
    }

    /// Closed-form spectrum of `pulse` on `omega`.
    pub fn analytic(pulse: &Pulse, omega: Vec<f64>) -> Result<Self> {
        let intensity = omega
            .iter()
            .map(|&w| pulse.analytic_intensity(w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(omega, intensity)
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Grid point holding the largest sample (first one on ties).
    pub fn peak_index(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.intensity.iter().enumerate() {
            if v > self.intensity[best] {
                best = i;
            }
        }
        best
    }

    pub fn peak_intensity(&self) -> f64 {
        self.intensity[self.peak_index()]
    }

    /// Peak position, refined by a parabola through the three samples
    /// around the largest one when it is interior.
    pub fn peak_omega(&self) -> f64 {
        let i = self.peak_index();
        if i == 0 || i + 1 == self.len() {
            return self.omega[i];
        }
        parabola_vertex(&self.omega[i - 1..=i + 1], &self.intensity[i - 1..=i + 1])
    }

    /// Writes `omega,intensity` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "omega,intensity")?;
        for (w, v) in self.omega.iter().zip(&self.intensity) {
            writeln!(out, "{},{}", fmt17(*w), fmt17(*v))?;
        }
        Ok(())
    }
}

/// Spectral width measures. `product` is `first_zero_halfwidth × duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WidthReport {
    pub first_zero_halfwidth: f64,
    pub fwhm: f64,
    pub product: f64,
}

/// Energy characterization of a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean_omega: f64,
    pub mean_energy: f64,
    /// `2πħ/τ`.
    pub delta_e_convention: f64,
    pub hbar: f64,
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|j| lo + j as f64 * step).collect();
            v[n - 1] = hi;
            v
        }
    }
}

/// `∫ A(t)·e^{−iωt} dt` by the trapezoidal rule.
pub fn fourier_amplitude(waveform: &SampledWaveform, omega: f64) -> Complex64 {
    let t = &waveform.t;
    let a = &waveform.amp;
    let f = |j: usize| a[j] * Complex64::from_polar(1.0, -omega * t[j]);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev = f(0);
    for j in 1..t.len() {
        let cur = f(j);
        sum += (prev + cur) * (0.5 * (t[j] - t[j - 1]));
        prev = cur;
    }
    sum
}

/// Spectrum of a sampled waveform on `omega_grid`.
pub fn fourier_intensity(waveform: &SampledWaveform, omega_grid: &[f64]) -> Result<Spectrum> {
    check_grid(omega_grid, "frequency grid", 2)?;
    let intensity: Vec<f64> = omega_grid
        .par_iter()
        .map(|&w| fourier_amplitude(waveform, w).norm_sqr())
        .collect();
    Spectrum::new(omega_grid.to_vec(), intensity)
}

/// Peak-to-first-null distance `2π/τ` of the rectangular-envelope spectrum.
pub fn first_zero_halfwidth(pulse: &Pulse) -> f64 {
    TAU / pulse.tau()
}

/// `first_zero_halfwidth(pulse) × τ`, which is `2π` for every duration.
pub fn uncertainty_product(pulse: &Pulse) -> f64 {
    first_zero_halfwidth(pulse) * pulse.tau()
}

/// Locates the nearest spectral null on either side of the peak.
///
/// Scans outward from the largest sample to the first local minimum at or
/// below [`ZERO_LEVEL`] × peak. A sampled null of sinc² is a double zero, so
/// there is no sign crossing to interpolate; the position is instead refined
/// as the vertex of the parabola through the minimum and its two neighbours.
pub fn first_zero_halfwidth_numeric(spectrum: &Spectrum) -> Result<f64> {
    let peak_i = spectrum.peak_index();
    let peak_w = spectrum.peak_omega();
    let threshold = ZERO_LEVEL * spectrum.intensity[peak_i];
    let n = spectrum.len();
    let w = &spectrum.omega;
    let v = &spectrum.intensity;

    let is_null =
        |j: usize| j > 0 && j + 1 < n && v[j] <= threshold && v[j] <= v[j - 1] && v[j] <= v[j + 1];
    let refine = |j: usize| {
        if v[j] == 0.0 || v[j] == v[j - 1] || v[j] == v[j + 1] {
            w[j]
        } else {
            parabola_vertex(&w[j - 1..=j + 1], &v[j - 1..=j + 1])
        }
    };

    let right = (peak_i + 1..n)
        .find(|&j| is_null(j))
        .map(|j| refine(j) - peak_w);
    let left = (0..peak_i)
        .rev()
        .find(|&j| is_null(j))
        .map(|j| peak_w - refine(j));
    match (left, right) {
        (Some(l), Some(r)) => Ok(l.min(r)),
        (Some(d), None) | (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::NoZeroInRange),
    }
}

/// Full width at half of the largest sample, with both half-level crossings
/// located by linear interpolation.
pub fn fwhm(spectrum: &Spectrum) -> Result<f64> {
    let peak_i = spectrum.peak_index();
    let w = &spectrum.omega;
    let v = &spectrum.intensity;
    let half = 0.5 * v[peak_i];
    let cross = |a: usize, b: usize| w[a] + (half - v[a]) * (w[b] - w[a]) / (v[b] - v[a]);

    let right = (peak_i + 1..spectrum.len())
        .find(|&j| v[j] <= half)
        .map(|j| cross(j - 1, j))
        .ok_or(Error::HalfLevelNotCrossed)?;
    let left = (0..peak_i)
        .rev()
        .find(|&j| v[j] <= half)
        .map(|j| cross(j + 1, j))
        .ok_or(Error::HalfLevelNotCrossed)?;
    Ok(right - left)
}

/// Half-power point `u` of `sin²(u)/u²`, i.e. the root of `sin²u/u² = 1/2`
/// on `(0, π)`.
pub fn sinc2_half_power_point() -> f64 {
    static U: OnceLock<f64> = OnceLock::new();
    *U.get_or_init(|| {
        let g = |u: f64| {
            let s = u.sin() / u;
            s * s - 0.5
        };
        let (mut lo, mut hi) = (0.5, 2.0);
        while hi - lo > f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Closed-form FWHM `4u/τ` of the rectangular-envelope spectrum.
pub fn fwhm_analytic(pulse: &Pulse) -> f64 {
    4.0 * sinc2_half_power_point() / pulse.tau()
}

pub fn width_report(pulse: &Pulse) -> WidthReport {
    let half = first_zero_halfwidth(pulse);
    WidthReport {
        first_zero_halfwidth: half,
        fwhm: fwhm_analytic(pulse),
        product: half * pulse.tau(),
    }
}

/// Widths measured on a sampled spectrum, with the product taken against
/// `duration`.
pub fn width_report_numeric(spectrum: &Spectrum, duration: f64) -> Result<WidthReport> {
    let half = first_zero_halfwidth_numeric(spectrum)?;
    Ok(WidthReport {
        first_zero_halfwidth: half,
        fwhm: fwhm(spectrum)?,
        product: half * duration,
    })
}

/// Mean energy `ħω0` and the spread convention `2πħ/τ`.
///
/// The mean frequency is `ω0` because the spectrum is symmetric about it.
pub fn energy_moments(pulse: &Pulse, hbar: f64) -> Result<MomentReport> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "hbar must be finite and positive, got {hbar}"
        )));
    }
    Ok(MomentReport {
        mean_omega: pulse.omega0(),
        mean_energy: hbar * pulse.omega0(),
        delta_e_convention: 2.0 * PI * hbar / pulse.tau(),
        hbar,
    })
}

/// `∫ω·I dω / ∫I dω` by the trapezoidal rule over the spectrum's own grid.
///
/// The sinc² tails decay slowly, so a grid that is not symmetric about the
/// peak biases the result toward the longer side.
pub fn mean_omega_numeric(spectrum: &Spectrum) -> Result<f64> {
    let w = &spectrum.omega;
    let v = &spectrum.intensity;
    let mut total = 0.0;
    let mut first = 0.0;
    for j in 1..w.len() {
        let h = 0.5 * (w[j] - w[j - 1]);
        total += h * (v[j] + v[j - 1]);
        first += h * (w[j] * v[j] + w[j - 1] * v[j - 1]);
    }
    if total <= 0.0 {
        return Err(Error::ZeroIntensity);
    }
    Ok(first / total)
}

/// 17 significant digits; parses back to the same `f64`.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_grid(grid: &[f64], what: &'static str, min: usize) -> Result<()> {
    if grid.len() < min {
        return Err(Error::TooShort {
            what,
            min,
            len: grid.len(),
        });
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    if let Some(index) = grid.windows(2).position(|p| p[1] <= p[0]) {
        return Err(Error::NotIncreasing {
            what,
            index: index + 1,
        });
    }
    Ok(())
}

/// Abscissa of the vertex of the parabola through three points, clamped to
/// their span.
fn parabola_vertex(x: &[f64], y: &[f64]) -> f64 {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let (y0, y1, y2) = (y[0], y[1], y[2]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 || !den.is_finite() {
        return x1;
    }
    (x1 - 0.5 * num / den).clamp(x0, x2)
}
