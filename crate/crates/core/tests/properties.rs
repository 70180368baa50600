mod common;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use wavepacket::adjustment::{
    adjusted_energy_consistent, adjusted_energy_paper, expand_product, solve_imag_zero_default,
    ComplexEnergy, ComplexObservable,
};
use wavepacket::pulse::Pulse;
use wavepacket::recoil::recoil_stats;
use wavepacket::spectral::{
    first_zero_halfwidth, fourier_intensity, fwhm, fwhm_analytic, linspace, mean_omega_numeric,
    uncertainty_product, SampledWaveform, Spectrum,
};
use wavepacket::Complex64;

fn pulse_strategy() -> impl Strategy<Value = Pulse> {
    (
        prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
        0.5..50.0f64,
        0.05..20.0f64,
    )
        .prop_map(|(a0, w0, tau)| Pulse::new(a0, w0, tau).unwrap())
}

proptest! {
    #[test]
    fn intensity_is_nonnegative(p in pulse_strategy(), delta in -1e3..1e3f64) {
        prop_assert!(p.intensity_at_offset(delta) >= 0.0);
        prop_assert!(p.analytic_intensity(p.omega0() + delta).unwrap() >= 0.0);
    }

    #[test]
    fn intensity_is_even_in_detuning(p in pulse_strategy(), delta in -1e3..1e3f64) {
        prop_assert_eq!(p.intensity_at_offset(delta), p.intensity_at_offset(-delta));
    }

    #[test]
    fn intensity_scales_with_amplitude_squared(p in pulse_strategy(), delta in -50.0..50.0f64, k in -4i32..4) {
        let c = 2f64.powi(k);
        let q = Pulse::new(p.a0() * c, p.omega0(), p.tau()).unwrap();
        prop_assert_eq!(q.intensity_at_offset(delta), c * c * p.intensity_at_offset(delta));

        let c = 1.7;
        let q = Pulse::new(p.a0() * c, p.omega0(), p.tau()).unwrap();
        let want = c * c * p.intensity_at_offset(delta);
        prop_assert!((q.intensity_at_offset(delta) - want).abs() <= 8.0 * f64::EPSILON * want);
    }

    #[test]
    fn nulls_sit_at_multiples_of_two_pi_over_tau(p in pulse_strategy(), n in 1u32..20) {
        let delta = TAU * n as f64 / p.tau();
        prop_assert!(p.intensity_at_offset(delta) <= 1e-20 * p.peak_intensity());
    }

    #[test]
    fn closed_form_matches_quadrature(p in pulse_strategy(), x in -6.0..6.0f64) {
        let omega = p.omega0() + x * PI / p.tau();
        let want = common::quadrature_intensity(p.a0(), p.omega0(), p.tau(), omega);
        let got = p.analytic_intensity(omega).unwrap();
        prop_assert!(common::rel_err(got, want, 1e-20 * p.peak_intensity()) <= 1e-8);
    }

    #[test]
    fn product_is_two_pi(tau in 1e-3..1e3f64) {
        let p = Pulse::new(1.0, 1.0, tau).unwrap();
        prop_assert!((uncertainty_product(&p) - TAU).abs() <= 1e-12 * TAU);
    }

    #[test]
    fn widths_scale_inversely_with_duration(tau in 0.1..10.0f64) {
        let a = Pulse::new(1.0, 5.0, tau).unwrap();
        let b = Pulse::new(1.0, 5.0, 2.0 * tau).unwrap();
        prop_assert!((first_zero_halfwidth(&a) - 2.0 * first_zero_halfwidth(&b)).abs() <= 1e-12 * first_zero_halfwidth(&a));
        prop_assert!((fwhm_analytic(&a) - 2.0 * fwhm_analytic(&b)).abs() <= 1e-12 * fwhm_analytic(&a));

        let numeric = |p: &Pulse| {
            let half = 8.0 * PI / p.tau();
            let s = Spectrum::analytic(p, linspace(p.omega0() - half, p.omega0() + half, 4001)).unwrap();
            fwhm(&s).unwrap()
        };
        prop_assert!((numeric(&a) - 2.0 * numeric(&b)).abs() <= 1e-4 * numeric(&a));
    }

    #[test]
    fn symmetric_grid_mean_is_carrier(p in pulse_strategy(), lobes in 1.0..12.0f64) {
        let half = lobes * PI / p.tau();
        let offsets = linspace(-half, half, 1001);
        let grid: Vec<f64> = offsets.iter().map(|d| p.omega0() + d).collect();
        let s = Spectrum::analytic(&p, grid).unwrap();
        let mean = mean_omega_numeric(&s).unwrap();
        prop_assert!((mean - p.omega0()).abs() <= 1e-9 * p.omega0());
    }

    #[test]
    fn time_shift_leaves_spectrum_unchanged(shift in -50.0..50.0f64, tau in 0.5..4.0f64) {
        let p = Pulse::new(1.0, 10.0, tau).unwrap();
        let wf = SampledWaveform::from_pulse(&p, 512).unwrap();
        let grid = linspace(10.0 - 10.0 / tau, 10.0 + 10.0 / tau, 33);
        let a = fourier_intensity(&wf, &grid).unwrap();
        let b = fourier_intensity(&wf.time_shifted(shift).unwrap(), &grid).unwrap();
        let peak = a.peak_intensity();
        for (x, y) in a.intensity().iter().zip(b.intensity()) {
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1e-3 * peak));
        }
    }

    #[test]
    fn solver_agrees_with_closed_form(e in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64], frac in -0.99..0.99f64, x0 in -10.0..10.0f64) {
        let de = frac * e.abs();
        let c = Complex64::new(e, de);
        let obs = ComplexObservable::new(move |z: Complex64| c * z, x0);
        let r = solve_imag_zero_default(&obs).unwrap();
        let b = obs.at(r.zeta);
        prop_assert!(b.im.abs() <= 1e-12 * b.norm().max(1.0));
        prop_assert!((r.zeta + de * x0 / e).abs() <= 1e-10);
        let want = (e + de * de / e) * x0;
        prop_assert!((r.adjusted_value - want).abs() <= 1e-10 * want.abs().max(1e-300));
        prop_assert_eq!(solve_imag_zero_default(&obs).unwrap(), r);
    }

    #[test]
    fn consistent_zeta_zeroes_imaginary_part(e in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64], de in -10.0..10.0f64, t in -10.0..10.0f64) {
        let ce = ComplexEnergy::new(e, de).unwrap();
        let c = adjusted_energy_consistent(ce, t).unwrap();
        let p = expand_product(ce, t, c.zeta);
        // E·(−ΔE·t/E) + ΔE·t cancels up to the rounding of the quotient
        prop_assert!(p.im.abs() <= 2.0 * f64::EPSILON * (de * t).abs());
        prop_assert!((p.re - c.value).abs() <= 4.0 * f64::EPSILON * c.value.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn paper_energy_is_even_in_width(e in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64], de in -10.0..10.0f64) {
        let plus = adjusted_energy_paper(ComplexEnergy::new(e, de).unwrap()).unwrap();
        let minus = adjusted_energy_paper(ComplexEnergy::new(e, -de).unwrap()).unwrap();
        prop_assert_eq!(plus, minus);
    }

    #[test]
    fn zero_width_collapses(e in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64], t in -10.0..10.0f64) {
        let ce = ComplexEnergy::new(e, 0.0).unwrap();
        prop_assert_eq!(adjusted_energy_paper(ce).unwrap(), e);
        prop_assert_eq!(adjusted_energy_consistent(ce, t).unwrap().value, e * t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn recoil_is_deterministic(seed in any::<u64>(), n in 1u64..200_000) {
        let a = recoil_stats(1.25, n, seed).unwrap();
        let b = recoil_stats(1.25, n, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.mean_kz > 0.0 && a.mean_kz <= a.k);
    }
}

#[test]
fn recoil_does_not_depend_on_thread_count() {
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one.install(|| recoil_stats(1.0, 300_001, 77).unwrap());
    let b = four.install(|| recoil_stats(1.0, 300_001, 77).unwrap());
    assert_eq!(a, b);
}

#[test]
fn recoil_moments_match_uniform_cosine() {
    let n = 1_000_000u64;
    let s = recoil_stats(1.0, n, 21).unwrap();
    assert!(
        (s.var_cos_theta() - 1.0 / 12.0).abs() <= 0.05 / 12.0,
        "{s:?}"
    );
    // <x²> = <sin²θ>/2 = 1/3 for the transverse components
    let sigma = (1.0f64 / 3.0).sqrt() / (n as f64).sqrt();
    assert!(s.mean_kx.abs() <= 3.0 * sigma, "{s:?}");
    assert!(s.mean_ky.abs() <= 3.0 * sigma, "{s:?}");
}

#[test]
fn direction_draws_have_mean_cosine_one_half() {
    use wavepacket::recoil::{sample_direction, stream_rng};
    let mut rng = stream_rng(2024, 0);
    let n = 1_000_000;
    let mean = (0..n).map(|_| sample_direction(&mut rng).z).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() <= 3.0 * 0.2887 / 1e3, "{mean}");
}
