//! Closed-form expressions for C, |C|², photon density and the Thomson mean
//! free path. Used to cross-check the quadrature engine and for fast sweeps.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::TrapezoidGeometry;
use crate::units::{
    self, elementary_charge_natural, flux_to_energy_density_natural, speed_from_kinetic_energy,
    ELECTRON_MASS_EV, HBAR_C_EV_M, THOMSON_CROSS_SECTION_M2,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveScenario {
    pub geom: TrapezoidGeometry,
    pub amplitude: f64,
    pub omega: f64,
}

impl PlaneWaveScenario {
    pub fn new(geom: TrapezoidGeometry, amplitude: f64, omega: f64) -> Result<Self> {
        geom.validate()?;
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(Error::domain(format!("amplitude must be non-negative, got {amplitude}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::domain(format!("omega must be positive, got {omega}")));
        }
        Ok(PlaneWaveScenario { geom, amplitude, omega })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianScenario {
    pub geom: TrapezoidGeometry,
    pub amplitude: f64,
    pub omega: f64,
    pub sigma: f64,
}

impl GaussianScenario {
    pub fn new(geom: TrapezoidGeometry, amplitude: f64, omega: f64, sigma: f64) -> Result<Self> {
        PlaneWaveScenario::new(geom, amplitude, omega)?;
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::domain(format!("beam width must be positive, got {sigma}")));
        }
        Ok(GaussianScenario {
            geom,
            amplitude,
            omega,
            sigma,
        })
    }

    /// The closed form assumes sigma ≲ 2c.
    pub fn sigma_exceeds_separation(&self) -> bool {
        self.sigma > 2.0 * self.geom.half_separation_c
    }

    /// The closed form assumes sigma ≲ 2d.
    pub fn sigma_exceeds_middle(&self) -> bool {
        self.sigma > 2.0 * self.geom.half_middle_d
    }
}

/// sin(x)/x, by its series near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// 4 e E0 (2c / (ω² Θ)) sin(ωΘ/2) sin(ω(T+Θ)/2).
///
/// Written as 2 e E0 c (T+Θ) sinc(ωΘ/2) sinc(ω(T+Θ)/2) so the ω → 0 limit
/// 2 e E0 c (T+Θ) comes out without 0/0 cancellation.
pub fn planewave_c(s: &PlaneWaveScenario) -> f64 {
    let theta = s.geom.slant_time();
    let t_mid = s.geom.middle_time();
    let c = s.geom.half_separation_c;
    let e = elementary_charge_natural();
    2.0 * e * s.amplitude * c * (t_mid + theta) * sinc(0.5 * s.omega * theta) * sinc(0.5 * s.omega * (t_mid + theta))
}

/// ω → 0 limit of [`planewave_c`].
pub fn planewave_c_static_limit(geom: &TrapezoidGeometry, amplitude: f64) -> f64 {
    2.0 * elementary_charge_natural() * amplitude * geom.half_separation_c * (geom.middle_time() + geom.slant_time())
}

/// |C|² with both sine factors replaced by their mean 1/2:
/// 8 e² ρ (2c / (ω² Θ))², i.e. (32π α) ρ (2c / (ω² Θ))².
pub fn planewave_c2_averaged(geom: &TrapezoidGeometry, rho: f64, omega: f64) -> Result<f64> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::domain(format!("energy density must be non-negative, got {rho}")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("omega must be positive, got {omega}")));
    }
    let e = elementary_charge_natural();
    let k = 2.0 * geom.half_separation_c / (omega * omega * geom.slant_time());
    Ok(8.0 * e * e * rho * k * k)
}

/// Cycle-averaged energy density ρ = E0²/2.
pub fn energy_density_from_amplitude(amplitude: f64) -> Result<f64> {
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::domain(format!("amplitude must be non-negative, got {amplitude}")));
    }
    Ok(0.5 * amplitude * amplitude)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricC2 {
    pub value: f64,
    /// 2c/s > 1 cannot be realized by a trapezoid (c > s).
    pub ratio_warning: bool,
}

/// (E_k / 5 keV)(flux / 1 W cm⁻²)(2c/s)²(λ / 100 μm)⁴.
pub fn planewave_c2_parametric(
    kinetic_kev: f64,
    flux_w_cm2: f64,
    ratio_2c_over_s: f64,
    wavelength_um: f64,
) -> Result<ParametricC2> {
    for (name, v) in [
        ("kinetic energy", kinetic_kev),
        ("flux", flux_w_cm2),
        ("2c/s", ratio_2c_over_s),
        ("wavelength", wavelength_um),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(ParametricC2 {
        value: (kinetic_kev / 5.0) * flux_w_cm2 * ratio_2c_over_s.powi(2) * (wavelength_um / 100.0).powi(4),
        ratio_warning: ratio_2c_over_s > 1.0,
    })
}

/// The same sine-averaged |C|² evaluated through the natural-unit pipeline
/// (CODATA constants, nonrelativistic speed, Θ = s/v) rather than the rounded
/// lab-unit normalization.
pub fn planewave_c2_natural(
    kinetic_kev: f64,
    flux_w_cm2: f64,
    ratio_2c_over_s: f64,
    wavelength_um: f64,
) -> Result<f64> {
    if !(ratio_2c_over_s > 0.0 && ratio_2c_over_s < 2.0) {
        return Err(Error::domain(format!("2c/s must lie in (0, 2), got {ratio_2c_over_s}")));
    }
    let speed = speed_from_kinetic_energy(kinetic_kev * 1e3, ELECTRON_MASS_EV)?.speed;
    // |C|² does not depend on the overall size of the loop, only on 2c/s.
    let s = units::micrometres(100.0)?;
    let c = 0.5 * ratio_2c_over_s * s;
    let l = (s * s - c * c).sqrt();
    let geom = TrapezoidGeometry::new(c, l, s, speed)?;
    let rho = flux_to_energy_density_natural(flux_w_cm2)?;
    let omega = units::omega_from_wavelength(units::micrometres(wavelength_um)?)?;
    planewave_c2_averaged(&geom, rho, omega)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEstimate {
    pub value: f64,
    pub sigma_exceeds_separation: bool,
    pub sigma_exceeds_middle: bool,
}

/// -(8√π e E0 d² / (ω² T σ)) (1 - cos θ) cos(ωT/2) exp(-d²/σ²), with d the
/// half length of the middle segment and θ the corner angle arctan(c/l).
pub fn gaussian_c(s: &GaussianScenario) -> GaussianEstimate {
    let d = s.geom.half_middle_d;
    let t_mid = s.geom.middle_time();
    let theta = s.geom.opening_angle();
    let e = elementary_charge_natural();
    let prefactor = 8.0 * PI.sqrt() * e * s.amplitude * d * d / (s.omega * s.omega * t_mid * s.sigma);
    let suppression = (-(d * d) / (s.sigma * s.sigma)).exp();
    let value = if suppression == 0.0 {
        0.0
    } else {
        -prefactor * (1.0 - theta.cos()) * (0.5 * s.omega * t_mid).cos() * suppression
    };
    GaussianEstimate {
        value,
        sigma_exceeds_separation: s.sigma_exceeds_separation(),
        sigma_exceeds_middle: s.sigma_exceeds_middle(),
    }
}

/// n ≃ ρ/ω (natural units, eV³).
pub fn photon_density(rho: f64, omega: f64) -> Result<f64> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::domain(format!("energy density must be non-negative, got {rho}")));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::domain(format!("omega must be positive, got {omega}")));
    }
    Ok(rho / omega)
}

/// Photon number density in m⁻³ for a beam of the given flux and wavelength.
pub fn photon_density_lab(flux_w_cm2: f64, wavelength_um: f64) -> Result<f64> {
    positive(flux_w_cm2, "flux")?;
    positive(wavelength_um, "wavelength")?;
    let rho = flux_to_energy_density_natural(flux_w_cm2)?;
    let omega = units::omega_from_wavelength(units::micrometres(wavelength_um)?)?;
    Ok(photon_density(rho, omega)? / HBAR_C_EV_M.powi(3))
}

/// Thomson mean free path l = ω / (σ_T ρ), in metres.
pub fn thomson_mfp(flux_w_cm2: f64, wavelength_um: f64) -> Result<f64> {
    positive(flux_w_cm2, "flux")?;
    positive(wavelength_um, "wavelength")?;
    let rho = flux_to_energy_density_natural(flux_w_cm2)?;
    let omega = units::omega_from_wavelength(units::micrometres(wavelength_um)?)?;
    let sigma_t = THOMSON_CROSS_SECTION_M2 / (HBAR_C_EV_M * HBAR_C_EV_M);
    units::length_from_natural(omega / (sigma_t * rho))
}

/// Expected number of Thomson scatterings along a path (≈ probability when small).
pub fn scattering_probability(path_length_m: f64, mfp_m: f64) -> Result<f64> {
    if !(path_length_m >= 0.0 && mfp_m > 0.0) {
        return Err(Error::domain("path length must be non-negative and mean free path positive"));
    }
    Ok(path_length_m / mfp_m)
}

fn positive(v: f64, name: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{ELEMENTARY_CHARGE_C, FINE_STRUCTURE_ALPHA, SPEED_OF_LIGHT_M_S};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn geom() -> TrapezoidGeometry {
        TrapezoidGeometry::new(2.0, 3.0, 1.0, 0.25).unwrap()
    }

    #[test]
    fn sinc_form_equals_product_of_sines() {
        let g = geom();
        let theta = g.slant_time();
        let t = g.middle_time();
        for omega in [0.01, 0.3, 1.7, 5.0] {
            let s = PlaneWaveScenario::new(g, 1.3, omega).unwrap();
            let e = elementary_charge_natural();
            let direct = 4.0 * e * 1.3 * (2.0 * 2.0 / (omega * omega * theta))
                * (0.5 * omega * theta).sin()
                * (0.5 * omega * (t + theta)).sin();
            assert!(rel(planewave_c(&s), direct) < 1e-12);
        }
    }

    #[test]
    fn full_periods_in_slant_time_cancel() {
        let g = geom();
        let omega = 2.0 * PI * 3.0 / g.slant_time();
        let s = PlaneWaveScenario::new(g, 1.0, omega).unwrap();
        let scale = planewave_c_static_limit(&g, 1.0);
        assert!(planewave_c(&s).abs() < 1e-14 * scale);
    }

    #[test]
    fn static_limit() {
        let g = geom();
        let s = PlaneWaveScenario::new(g, 1.0, 1e-7 / g.slant_time()).unwrap();
        assert!(rel(planewave_c(&s), planewave_c_static_limit(&g, 1.0)) < 1e-8);
        assert!(PlaneWaveScenario::new(g, 1.0, 0.0).is_err());
    }

    #[test]
    fn averaged_square() {
        let g = geom();
        assert_eq!(planewave_c2_averaged(&g, 0.0, 1.0).unwrap(), 0.0);
        let amp = 0.8;
        let omega = 2.3;
        let s = PlaneWaveScenario::new(g, amp, omega).unwrap();
        let theta = g.slant_time();
        let sin2 = (0.5 * omega * theta).sin().powi(2) * (0.5 * omega * (g.middle_time() + theta)).sin().powi(2);
        let sine_averaged = planewave_c(&s).powi(2) / sin2 * 0.25;
        let rho = energy_density_from_amplitude(amp).unwrap();
        assert!(rel(planewave_c2_averaged(&g, rho, omega).unwrap(), sine_averaged) < 1e-10);
    }

    #[test]
    fn sine_squared_mean_is_one_quarter() {
        let n = 400;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = 200.0 * (i as f64 + 0.5) / n as f64;
                let b = 200.0 * (j as f64 + 0.5) / n as f64;
                acc += (0.5 * a).sin().powi(2) * (0.5 * (a + b)).sin().powi(2);
            }
        }
        let mean = acc / (n * n) as f64;
        assert!(rel(mean, 0.25) < 0.02, "{mean}");
    }

    #[test]
    fn coefficient_with_rounded_alpha() {
        // 8 e² = 32π α; with α = 1/137 this is the quoted 32π/137
        let e = elementary_charge_natural();
        let ours = 8.0 * e * e;
        assert!(rel(ours / FINE_STRUCTURE_ALPHA * (1.0 / 137.0), 32.0 * PI / 137.0) < 1e-12);
        assert!(rel(ours, 32.0 * PI / 137.0) < 5e-4);
    }

    #[test]
    fn energy_density() {
        assert_eq!(energy_density_from_amplitude(0.0).unwrap(), 0.0);
        assert_eq!(energy_density_from_amplitude(1.0).unwrap(), 0.5);
        assert!(energy_density_from_amplitude(-1.0).is_err());
    }

    #[test]
    fn parametric_formula() {
        let r = planewave_c2_parametric(5.0, 1.0, 1.0, 100.0).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(!r.ratio_warning);
        let doubled = planewave_c2_parametric(5.0, 2.0, 1.0, 100.0).unwrap();
        assert_eq!(doubled.value, 2.0);
        assert!(planewave_c2_parametric(5.0, 1.0, 1.2, 100.0).unwrap().ratio_warning);
        assert!(planewave_c2_parametric(0.0, 1.0, 1.0, 100.0).is_err());
    }

    #[test]
    fn natural_pipeline_reference_point() {
        // |C|² = 4 α ρ E_k λ⁴ / (π³ m_e), evaluated by hand with CODATA values
        let rho = flux_to_energy_density_natural(1.0).unwrap();
        let lambda = units::micrometres(100.0).unwrap();
        let by_hand = 4.0 * FINE_STRUCTURE_ALPHA * rho * 5e3 * lambda.powi(4) / (PI.powi(3) * ELECTRON_MASS_EV);
        let pipeline = planewave_c2_natural(5.0, 1.0, 1.0, 100.0).unwrap();
        assert!(rel(pipeline, by_hand) < 1e-12);
        assert!((pipeline - 0.972).abs() < 0.005 * 0.972, "{pipeline}");
    }

    #[test]
    fn gaussian_closed_form() {
        let g = TrapezoidGeometry::new(2.0, 3.0, 1.5, 0.25).unwrap();
        let omega = 0.4;
        let est = |sigma: f64| gaussian_c(&GaussianScenario::new(g, 1.0, omega, sigma).unwrap());
        assert_eq!(est(1e-3).value, 0.0);
        assert!(est(1e-2).value.abs() < 1e-100);

        let d = g.half_middle_d;
        let ratio = est(d / 3.0).value.abs() / est(d / 2.0).value.abs();
        assert!(ratio < (-4.0f64).exp(), "{ratio}");

        let omega_pi = PI / g.middle_time();
        let pi_t = GaussianScenario::new(g, 1.0, omega_pi, 1.0).unwrap();
        let e = elementary_charge_natural();
        let without_cos = 8.0 * PI.sqrt() * e * d * d / (omega_pi * omega_pi * g.middle_time())
            * (1.0 - g.opening_angle().cos())
            * (-d * d).exp();
        assert!(gaussian_c(&pi_t).value.abs() <= 1e-15 * without_cos);

        // ωT < π: negative
        let small = GaussianScenario::new(g, 1.0, 0.5 * PI / g.middle_time(), 1.0).unwrap();
        assert!(gaussian_c(&small).value < 0.0);

        let wide = est(10.0);
        assert!(wide.sigma_exceeds_separation && wide.sigma_exceeds_middle);
        assert!(!est(1.0).sigma_exceeds_separation);
    }

    #[test]
    fn photon_density_values() {
        assert_eq!(photon_density(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(photon_density(2.0, 0.5).unwrap(), 2.0 * photon_density(2.0, 1.0).unwrap());
        // ρ = flux / c over photon energy hc/λ
        let h_c = 2.0 * PI * HBAR_C_EV_M * ELEMENTARY_CHARGE_C;
        let by_hand = 1e4 / SPEED_OF_LIGHT_M_S / (h_c / 1e-6);
        let n = photon_density_lab(1.0, 1.0).unwrap();
        assert!(rel(n, by_hand) < 1e-12);
        assert!(rel(n, 1.679e14) < 0.01);
    }

    #[test]
    fn mean_free_path() {
        // l = ħω c / (σ_T flux)
        let hbar_omega_j = 2.0 * PI * HBAR_C_EV_M / 1e-6 * ELEMENTARY_CHARGE_C;
        let by_hand = hbar_omega_j * SPEED_OF_LIGHT_M_S / (THOMSON_CROSS_SECTION_M2 * 1e4);
        let l = thomson_mfp(1.0, 1.0).unwrap();
        assert!(rel(l, by_hand) < 1e-12);
        assert!(rel(l, 8.95e13) < 0.02);
        assert!(rel(thomson_mfp(10.0, 10.0).unwrap(), 8.95e11) < 0.02);
        assert!(rel(thomson_mfp(3.0, 7.0).unwrap(), l / 21.0) < 1e-12);
        assert!(thomson_mfp(0.0, 1.0).is_err());
        assert!(thomson_mfp(1.0, -1.0).is_err());
    }
}
