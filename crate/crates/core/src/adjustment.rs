//! Continuing a real argument into the complex plane until an observable
//! becomes real.
//!
//! Given an observable `B(z)` and a nominal real argument `x0`, the solver
//! looks for the real offset `ζ` that makes `Im B(x0 + iζ) = 0` and reports
//! `Re B(x0 + iζ)` as the adjusted value. With a single continued argument
//! this one condition fixes `ζ`.
//!
//! For the complex energy product `(E + iΔE)·(t + iτ)` there are two closed
//! forms:
//!
//! - [`adjusted_energy_consistent`] solves `Eτ + ΔE·t = 0`, giving
//!   `τ = −ΔE·t/E` and the real value `(E + ΔE²/E)·t`.
//! - [`adjusted_energy_paper`] returns `E − ΔE²/E`, which follows from the
//!   unsigned substitution `τ = +ΔE·t/E`. At that `τ` the imaginary part is
//!   `2ΔE·t`, not zero; [`paper_residual`] reports it.
//!
//! Both are kept so callers can compare them.

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

/// Default mixed absolute/relative tolerance on `|Im B|`.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_REFINE_ITERATIONS: usize = 400;

/// A complex-valued observable of one continued argument.
///
/// The solver calls `evaluate` sequentially within one solve.
pub struct ComplexObservable<F> {
    evaluate: F,
    x0: f64,
}

impl<F> ComplexObservable<F>
where
    F: Fn(Complex64) -> Complex64,
{
    pub fn new(evaluate: F, x0: f64) -> Self {
        Self { evaluate, x0 }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// `B(x0 + iζ)`.
    pub fn at(&self, zeta: f64) -> Complex64 {
        (self.evaluate)(Complex64::new(self.x0, zeta))
    }

    /// `1e6 × max(1, |x0|)`.
    pub fn default_zeta_max(&self) -> f64 {
        1e6 * self.x0.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjustmentResult {
    pub zeta: f64,
    /// `Re B(x0 + iζ)`.
    pub adjusted_value: f64,
    /// `|Im B(x0 + iζ)|`.
    pub residual_im: f64,
    pub evaluations: usize,
}

/// Complex energy `e + i·de`; `de` is the level width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexEnergy {
    pub e: f64,
    pub de: f64,
}

impl ComplexEnergy {
    pub fn new(e: f64, de: f64) -> Result<Self> {
        if !(e.is_finite() && de.is_finite()) {
            return Err(Error::NonFinite("complex energy"));
        }
        Ok(Self { e, de })
    }

    /// Level width associated with a finite lifetime.
    pub fn from_lifetime(e: f64, tau_life: f64, hbar: f64) -> Result<Self> {
        Self::new(e, lifetime_width(tau_life, hbar)?)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.e, self.de)
    }

    fn nonzero(&self) -> Result<()> {
        if self.e == 0.0 {
            Err(Error::ZeroEnergy)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistentAdjustment {
    pub zeta: f64,
    pub value: f64,
}

/// Stateful view of one solve: counts evaluations and rejects non-finite
/// values.
struct Probe<'a, F> {
    obs: &'a ComplexObservable<F>,
    tol: f64,
    evaluations: usize,
}

#[derive(Clone, Copy)]
struct Sample {
    zeta: f64,
    value: Complex64,
}

impl Sample {
    fn im(&self) -> f64 {
        self.value.im
    }
}

impl<F: Fn(Complex64) -> Complex64> Probe<'_, F> {
    fn eval(&mut self, zeta: f64) -> Result<Sample> {
        self.evaluations += 1;
        let value = self.obs.at(zeta);
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::EvaluationFailure {
                zeta,
                value: value.to_string(),
            });
        }
        Ok(Sample { zeta, value })
    }

    fn converged(&self, s: &Sample) -> bool {
        s.im().abs() <= self.tol * s.value.norm().max(1.0)
    }

    fn finish(&self, s: Sample) -> AdjustmentResult {
        AdjustmentResult {
            zeta: s.zeta,
            adjusted_value: s.value.re,
            residual_im: s.im().abs(),
            evaluations: self.evaluations,
        }
    }

    /// Root of `Im B` inside a sign-changing bracket: secant steps, with
    /// bisection whenever the secant leaves the bracket or fails to halve it.
    fn refine(&mut self, mut a: Sample, mut b: Sample) -> Result<Sample> {
        let mut force_bisect = false;
        for _ in 0..MAX_REFINE_ITERATIONS {
            let width = (b.zeta - a.zeta).abs();
            let (lo, hi) = if a.zeta < b.zeta {
                (a.zeta, b.zeta)
            } else {
                (b.zeta, a.zeta)
            };
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            let secant = b.zeta - b.im() * (b.zeta - a.zeta) / (b.im() - a.im());
            let c = if !force_bisect && secant > lo && secant < hi {
                secant
            } else {
                mid
            };
            let s = self.eval(c)?;
            if self.converged(&s) {
                return Ok(s);
            }
            if (s.im() < 0.0) == (a.im() < 0.0) {
                a = s;
            } else {
                b = s;
            }
            force_bisect = (b.zeta - a.zeta).abs() > 0.5 * width;
        }
        let best = if a.im().abs() <= b.im().abs() { a } else { b };
        Err(Error::NotConverged {
            zeta: best.zeta,
            residual: best.im().abs(),
        })
    }
}

/// Finds the smallest-|ζ| root of `ζ ↦ Im B(x0 + iζ)` with `|ζ| <= zeta_max`.
///
/// Brackets are searched outward from `ζ = 0` on both sides at once, with
/// probe points `±tol, ±2·tol, ±4·tol, …` up to `±zeta_max`. The first step
/// that shows a sign change is refined; when both sides change sign in the
/// same step both roots are refined and the smaller one returned. Two roots
/// within one step cancel out and are not seen.
///
/// Converged means `|Im B| <= tol × max(1, |B|)` at the returned point.
pub fn solve_imag_zero<F>(
    obs: &ComplexObservable<F>,
    zeta_max: f64,
    tol: f64,
) -> Result<AdjustmentResult>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(zeta_max.is_finite() && zeta_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "zeta_max must be finite and positive, got {zeta_max}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be finite and positive, got {tol}"
        )));
    }
    if !obs.x0.is_finite() {
        return Err(Error::NonFinite("x0"));
    }

    let mut probe = Probe {
        obs,
        tol,
        evaluations: 0,
    };
    let origin = probe.eval(0.0)?;
    if probe.converged(&origin) {
        return Ok(probe.finish(origin));
    }

    let mut prev_pos = origin;
    let mut prev_neg = origin;
    let mut step = tol.min(zeta_max);
    loop {
        let pos = probe.eval(step)?;
        let neg = probe.eval(-step)?;

        let mut candidates = Vec::with_capacity(2);
        for (inner, outer) in [(prev_pos, pos), (prev_neg, neg)] {
            if probe.converged(&outer) {
                candidates.push(outer);
            } else if (inner.im() < 0.0) != (outer.im() < 0.0) {
                candidates.push(probe.refine(inner, outer)?);
            }
        }
        if let Some(best) = candidates
            .into_iter()
            .min_by(|a, b| a.zeta.abs().total_cmp(&b.zeta.abs()))
        {
            return Ok(probe.finish(best));
        }

        if step >= zeta_max {
            return Err(Error::NoRootInRange { zeta_max });
        }
        prev_pos = pos;
        prev_neg = neg;
        step = (2.0 * step).min(zeta_max);
    }
}

/// [`solve_imag_zero`] with [`DEFAULT_TOL`] and the observable's default
/// search radius.
pub fn solve_imag_zero_default<F>(obs: &ComplexObservable<F>) -> Result<AdjustmentResult>
where
    F: Fn(Complex64) -> Complex64,
{
    solve_imag_zero(obs, obs.default_zeta_max(), DEFAULT_TOL)
}

/// `(E + iΔE)(t + iτ) = (E·t − ΔE·τ) + i(E·τ + ΔE·t)`.
pub fn expand_product(ce: ComplexEnergy, t: f64, tau: f64) -> Complex64 {
    Complex64::new(ce.e * t - ce.de * tau, ce.e * tau + ce.de * t)
}

/// Closed-form root of `E·ζ + ΔE·t = 0` and the real part there.
pub fn adjusted_energy_consistent(ce: ComplexEnergy, t: f64) -> Result<ConsistentAdjustment> {
    ce.nonzero()?;
    Ok(ConsistentAdjustment {
        zeta: -ce.de * t / ce.e,
        value: (ce.e + ce.de * ce.de / ce.e) * t,
    })
}

/// `E − ΔE²/E`.
pub fn adjusted_energy_paper(ce: ComplexEnergy) -> Result<f64> {
    ce.nonzero()?;
    Ok(ce.e - ce.de * ce.de / ce.e)
}

/// Offset `τ = +ΔE·t/E` behind [`adjusted_energy_paper`].
pub fn paper_zeta(ce: ComplexEnergy, t: f64) -> Result<f64> {
    ce.nonzero()?;
    Ok(ce.de * t / ce.e)
}

/// `expand_product` at the [`paper_zeta`] offset. The imaginary part is
/// `2ΔE·t` up to rounding.
pub fn paper_residual(ce: ComplexEnergy, t: f64) -> Result<Complex64> {
    Ok(expand_product(ce, t, paper_zeta(ce, t)?))
}

/// Level width `ħ/τ_life` of a state with lifetime `tau_life`.
pub fn lifetime_width(tau_life: f64, hbar: f64) -> Result<f64> {
    if !(tau_life.is_finite() && tau_life > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lifetime must be finite and positive, got {tau_life}"
        )));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "hbar must be finite and positive, got {hbar}"
        )));
    }
    Ok(hbar / tau_life)
}
