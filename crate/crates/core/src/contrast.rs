//! Contrast factor Υ = <e^{iϑ}> for ϑ(t0) = A cos ωt0 + B sin ωt0.
//!
//! Averaged over a full period this is J0(|C|), C = A + iB. The direct
//! emission-time average, the Gaussian-noise law exp(-<ϑ²>/2) and the
//! small-|C| series are provided alongside for comparison.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{ComplexNeumaierSum, GaussLegendre, NeumaierSum};

/// Below this argument J0 is summed from its power series.
const SERIES_CUTOFF: f64 = 12.0;

pub const DEFAULT_ORACLE_POINTS: usize = 1024;

/// Bessel function of the first kind, order zero.
///
/// Power series for |x| < 12, Hankel asymptotic expansion beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < SERIES_CUTOFF {
        j0_series(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = NeumaierSum::new();
    sum.add(term);
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum.add(term);
        if term.abs() < 1e-18 {
            break;
        }
        k += 1.0;
    }
    sum.value()
}

fn j0_asymptotic(x: f64) -> f64 {
    // a_k = prod_{j<=k} (-(2j-1)^2) / (k! 8^k); P takes the even k, Q the odd k,
    // each with alternating sign from i^k.
    let mut p = NeumaierSum::new();
    let mut q = NeumaierSum::new();
    let mut term = 1.0; // a_k / x^k
    p.add(1.0);
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        term *= -(2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if term.abs() >= prev || term.abs() < 1e-17 {
            break;
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p.add(sign * term);
        } else {
            q.add(sign * term);
        }
    }
    let (s, c) = x.sin_cos();
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p.value() * cos_chi - q.value() * sin_chi)
}

/// Υ = J0(|C|).
pub fn contrast_analytic(c: Complex64) -> f64 {
    bessel_j0(c.norm())
}

/// (1/2π) ∫ exp(i(A cos φ + B sin φ)) dφ by the periodic trapezoid rule.
pub fn oracle_time_average(a: f64, b: f64, n_points: usize) -> Result<Complex64> {
    if n_points < 16 {
        return Err(Error::domain(format!("oracle needs at least 16 nodes, got {n_points}")));
    }
    let n = n_points as f64;
    let sum: ComplexNeumaierSum = (0..n_points)
        .map(|k| {
            let (s, c) = (TAU * k as f64 / n).sin_cos();
            Complex64::from_polar(1.0, a * c + b * s)
        })
        .collect();
    Ok(sum.value() / n)
}

/// (1/2Ξ) ∫_{-Ξ}^{Ξ} exp(iϑ(t0)) dt0 over a finite emission window.
pub fn finite_window_average(a: f64, b: f64, omega: f64, window: f64) -> Result<Complex64> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::domain(format!("averaging window must be positive, got {window}")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("omega must be positive, got {omega}")));
    }
    let rule = GaussLegendre::new(16);
    let amp = a.hypot(b);
    let periods = 2.0 * window * omega / TAU;
    let per_period = (8.0f64).max(2.0 * amp).ceil();
    let panels = ((periods * per_period).ceil() as usize).max(1);
    let h = 2.0 * window / panels as f64;
    let mut sum = ComplexNeumaierSum::default();
    let mut weights = NeumaierSum::new();
    for i in 0..panels {
        let lo = -window + h * i as f64;
        let hi = if i + 1 == panels { window } else { lo + h };
        for (t, w) in rule.mapped(lo, hi) {
            let (s, c) = (omega * t).sin_cos();
            sum.add(Complex64::from_polar(w, a * c + b * s));
            weights.add(w);
        }
    }
    // normalizing by the discrete weight sum (= 2Ξ up to rounding) keeps
    // constant integrands exact
    Ok(sum.value() / weights.value())
}

/// Gaussian phase noise with <ϑ²> = |C|²/2: exp(-|C|²/4).
pub fn contrast_gaussian_model(c: Complex64) -> f64 {
    (-0.25 * c.norm_sqr()).exp()
}

/// 1 - |C|²/4 + |C|⁴/64.
pub fn contrast_taylor(c: Complex64) -> f64 {
    let x2 = c.norm_sqr();
    1.0 - x2 / 4.0 + x2 * x2 / 64.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastReport {
    pub abs_c: f64,
    pub upsilon_analytic: f64,
    pub upsilon_oracle: Complex64,
    pub upsilon_gaussian_model: f64,
    pub upsilon_taylor: f64,
}

impl ContrastReport {
    pub fn new(c: Complex64, oracle_points: usize) -> Result<Self> {
        Ok(ContrastReport {
            abs_c: c.norm(),
            upsilon_analytic: contrast_analytic(c),
            upsilon_oracle: oracle_time_average(c.re, c.im, oracle_points)?,
            upsilon_gaussian_model: contrast_gaussian_model(c),
            upsilon_taylor: contrast_taylor(c),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// (1/π) ∫_0^π cos(x sin φ) dφ by composite Simpson, independent of
    /// both the series and the trapezoid oracle.
    fn j0_integral(x: f64) -> f64 {
        let n = 20_000;
        let h = PI / n as f64;
        let f = |phi: f64| (x * phi.sin()).cos();
        let mut s = NeumaierSum::new();
        s.add(f(0.0));
        s.add(f(PI));
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s.add(w * f(h * i as f64));
        }
        s.value() * h / 3.0 / PI
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn j0_against_integral_oracle() {
        let mut x = 0.0;
        while x <= 40.0 {
            let err = (bessel_j0(x) - j0_integral(x)).abs();
            assert!(err <= 1e-10, "x = {x}: err {err:e}");
            x += 0.173;
        }
        for x in [11.999_999, 12.0, 12.000_001, 25.0] {
            assert!((bessel_j0(x) - j0_integral(x)).abs() <= 1e-10, "x = {x}");
        }
    }

    #[test]
    fn j0_reference_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!(bessel_j0(2.405).abs() <= 5e-4);
        // frozen from the integral oracle
        assert!((bessel_j0(1.0) - 0.765_197_686_6).abs() < 1e-9);
        assert!((j0_integral(1.0) - 0.765_197_686_6).abs() < 1e-9);
        assert_eq!(bessel_j0(-3.0), bessel_j0(3.0));
        assert_eq!(bessel_j0(f64::INFINITY), 0.0);
    }

    #[test]
    fn analytic_contrast_zero_and_minimum() {
        assert_eq!(contrast_analytic(Complex64::new(0.0, 0.0)), 1.0);
        // root of the oracle
        let z1 = bisect(j0_integral, 2.0, 3.0);
        assert!((z1 - 2.404_83).abs() < 1e-5);
        assert!(contrast_analytic(Complex64::new(z1, 0.0)).abs() < 1e-6);
        // minimum of the oracle, golden-section style ternary search
        let (mut lo, mut hi) = (3.0, 4.5);
        for _ in 0..100 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if j0_integral(m1) < j0_integral(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        assert!((0.5 * (lo + hi) - 3.8317).abs() < 1e-3);
        assert!((contrast_analytic(Complex64::new(3.8317, 0.0)) + 0.4028).abs() < 1e-3);
    }

    #[test]
    fn oracle_average() {
        assert_eq!(oracle_time_average(0.0, 0.0, 1024).unwrap(), Complex64::new(1.0, 0.0));
        let j = bessel_j0(1.2);
        let h = 0.6 * 2f64.sqrt();
        for (a, b) in [(1.2, 0.0), (0.0, 1.2), (h, h)] {
            let o = oracle_time_average(a, b, DEFAULT_ORACLE_POINTS).unwrap();
            assert!((o - j).norm() <= 1e-10, "({a}, {b})");
        }
        let z1 = bisect(j0_integral, 2.0, 3.0);
        assert!(oracle_time_average(z1, 0.0, 1024).unwrap().norm() <= 1e-6);
        assert!(oracle_time_average(1.0, 1.0, 8).is_err());
    }

    #[test]
    fn finite_window() {
        let (a, b, omega) = (1.5, 0.7, 2.0);
        let period = TAU / omega;
        let full = oracle_time_average(a, b, 1024).unwrap();
        let half_periods = finite_window_average(a, b, omega, 7.0 * period / 2.0).unwrap();
        assert!((half_periods - full).norm() <= 1e-10);

        // deviation scales as 1/Ξ when the fractional part of the window is held fixed
        let short = (finite_window_average(a, b, omega, 10.3 * period).unwrap() - full).norm();
        let long = (finite_window_average(a, b, omega, 103.3 * period).unwrap() - full).norm();
        let ratio = short / long;
        assert!((5.0..=20.0).contains(&ratio), "ratio {ratio}");

        for xi in [0.1, 1.0, 13.7] {
            assert_eq!(finite_window_average(0.0, 0.0, omega, xi).unwrap().re, 1.0);
        }
        assert!(finite_window_average(a, b, 0.0, 1.0).is_err());
        assert!(finite_window_average(a, b, 1.0, 0.0).is_err());
    }

    #[test]
    fn gaussian_model_and_taylor() {
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(contrast_gaussian_model(zero), 1.0);
        assert!((contrast_gaussian_model(Complex64::new(2.0, 0.0)) - (-1.0f64).exp()).abs() < 1e-12);
        let c = Complex64::new(0.3, 0.0);
        assert!((contrast_gaussian_model(c) - contrast_analytic(c)).abs() <= 0.3f64.powi(4) / 32.0);

        assert_eq!(contrast_taylor(zero), 1.0);
        assert_eq!(contrast_taylor(Complex64::new(0.5, 0.0)), 0.938_476_562_5);
        let mut x = 0.0;
        while x <= 0.5 {
            let c = Complex64::new(0.0, x);
            assert!((contrast_taylor(c) - contrast_analytic(c)).abs() <= x.powi(6) / 2304.0 + 1e-16);
            x += 0.01;
        }
    }

    #[test]
    fn monotone_decay_then_revival() {
        let n = 2000;
        let z1 = bisect(j0_integral, 2.0, 3.0);
        let z_min = 3.8317;
        let samples = |lo: f64, hi: f64| -> Vec<f64> {
            (0..=n)
                .map(|i| bessel_j0(lo + (hi - lo) * i as f64 / n as f64))
                .collect()
        };
        assert!(samples(0.0, z1).windows(2).all(|w| w[1] < w[0]));
        // fringes come back inverted: |Υ| grows up to the J1 zero
        assert!(samples(z1, z_min - 1e-3).windows(2).all(|w| w[1].abs() > w[0].abs()));
        assert!(samples(z_min + 1e-3, 5.0).windows(2).all(|w| w[1].abs() < w[0].abs()));
    }

    #[test]
    fn sinusoidal_noise_differs_from_gaussian() {
        let xs: Vec<f64> = (0..=400).map(|i| 4.0 + 4.0 * i as f64 / 400.0).collect();
        let max_gauss = xs
            .iter()
            .map(|&x| contrast_gaussian_model(Complex64::new(x, 0.0)).abs())
            .fold(0.0, f64::max);
        let max_j0 = xs.iter().map(|&x| bessel_j0(x).abs()).fold(0.0, f64::max);
        assert!(max_gauss < 0.02);
        assert!(max_j0 > 0.05);
    }

    #[test]
    fn report_fields() {
        let r = ContrastReport::new(Complex64::new(0.3, 0.4), 1024).unwrap();
        assert_eq!(r.abs_c, 0.5);
        assert!(r.upsilon_analytic.abs() <= 1.0);
        assert!(r.upsilon_oracle.norm() <= 1.0 + 1e-12);
        assert!(r.upsilon_oracle.im.abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn jacobi_anger(r in 0.0f64..10.0, phi in 0.0f64..TAU) {
            let (a, b) = (r * phi.cos(), r * phi.sin());
            let o = oracle_time_average(a, b, DEFAULT_ORACLE_POINTS).unwrap();
            prop_assert!((o - bessel_j0(r)).norm() <= 1e-8);
            prop_assert!(o.im.abs() <= 1e-12);
        }

        #[test]
        fn window_average_bounded(a in -20.0f64..20.0, b in -20.0f64..20.0, w in 0.01f64..10.0, xi in 0.01f64..30.0) {
            let v = finite_window_average(a, b, w, xi).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-12);
        }
    }
}
