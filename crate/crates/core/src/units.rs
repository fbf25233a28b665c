//! Physical constants and conversions between laboratory units and the
//! Lorentz-Heaviside natural system (hbar = c = 1, e^2 = 4 pi alpha).
//!
//! Internally every quantity carries a power of eV: lengths and times are
//! eV^-1, fields eV^2, energy densities eV^4. Values are CODATA 2018.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// fine-structure constant
pub const FINE_STRUCTURE_ALPHA: f64 = 1.0 / 137.035999;

/// electron rest energy (eV)
pub const ELECTRON_MASS_EV: f64 = 510_998.95;

/// hbar * c (eV m)
pub const HBAR_C_EV_M: f64 = 1.973_269_80e-7;

/// Thomson cross section (m^2)
pub const THOMSON_CROSS_SECTION_M2: f64 = 6.652_458_7e-29;

/// speed of light in vacuum (m s^-1), exact
pub const SPEED_OF_LIGHT_M_S: f64 = 2.997_924_58e8;

/// elementary charge (C), exact; also J per eV
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

/// vacuum permittivity (F m^-1)
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Speeds above this fraction of c make the nonrelativistic kinetic energy
/// relation noticeably wrong.
pub const NONRELATIVISTIC_SPEED_LIMIT: f64 = 0.3;

/// The constants bundled together, mostly for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub fine_structure_alpha: f64,
    pub electron_mass: f64,
    pub hbar_c: f64,
    pub thomson_cross_section: f64,
    pub speed_of_light: f64,
    /// e = sqrt(4 pi alpha) in Lorentz-Heaviside units.
    pub elementary_charge_natural: f64,
}

impl PhysicalConstants {
    pub fn codata() -> Self {
        PhysicalConstants {
            fine_structure_alpha: FINE_STRUCTURE_ALPHA,
            electron_mass: ELECTRON_MASS_EV,
            hbar_c: HBAR_C_EV_M,
            thomson_cross_section: THOMSON_CROSS_SECTION_M2,
            speed_of_light: SPEED_OF_LIGHT_M_S,
            elementary_charge_natural: elementary_charge_natural(),
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

/// Electron charge in natural Lorentz-Heaviside units.
pub fn elementary_charge_natural() -> f64 {
    (4.0 * PI * FINE_STRUCTURE_ALPHA).sqrt()
}

/// hbar in eV s.
pub fn hbar_ev_s() -> f64 {
    HBAR_C_EV_M / SPEED_OF_LIGHT_M_S
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabUnit {
    ElectronVolt,
    KiloElectronVolt,
    WattPerCm2,
    Micrometre,
    Metre,
    Second,
    VoltPerMetre,
    Dimensionless,
}

impl LabUnit {
    pub fn symbol(self) -> &'static str {
        match self {
            LabUnit::ElectronVolt => "eV",
            LabUnit::KiloElectronVolt => "keV",
            LabUnit::WattPerCm2 => "W/cm^2",
            LabUnit::Micrometre => "um",
            LabUnit::Metre => "m",
            LabUnit::Second => "s",
            LabUnit::VoltPerMetre => "V/m",
            LabUnit::Dimensionless => "1",
        }
    }
}

/// A value tagged with the laboratory unit it was given in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabQuantity {
    pub value: f64,
    pub unit: LabUnit,
}

impl LabQuantity {
    pub fn new(value: f64, unit: LabUnit) -> Self {
        LabQuantity { value, unit }
    }

    /// Converts to the matching power of eV.
    pub fn to_natural(&self) -> Result<f64> {
        let v = self.value;
        match self.unit {
            LabUnit::ElectronVolt => nonnegative(v, "energy"),
            LabUnit::KiloElectronVolt => nonnegative(v, "energy").map(|v| v * 1e3),
            LabUnit::WattPerCm2 => flux_to_energy_density_natural(v),
            LabUnit::Micrometre => length_to_natural(v * 1e-6),
            LabUnit::Metre => length_to_natural(v),
            LabUnit::Second => time_to_natural(v),
            LabUnit::VoltPerMetre => field_amplitude_to_natural(v),
            LabUnit::Dimensionless => Ok(v),
        }
    }

    /// Inverse of [`LabQuantity::to_natural`].
    pub fn from_natural(natural: f64, unit: LabUnit) -> Result<Self> {
        let value = match unit {
            LabUnit::ElectronVolt => nonnegative(natural, "energy")?,
            LabUnit::KiloElectronVolt => nonnegative(natural, "energy")? * 1e-3,
            LabUnit::WattPerCm2 => energy_density_natural_to_flux(natural)?,
            LabUnit::Micrometre => length_from_natural(natural)? * 1e6,
            LabUnit::Metre => length_from_natural(natural)?,
            LabUnit::Second => time_from_natural(natural)?,
            LabUnit::VoltPerMetre => field_amplitude_from_natural(natural)?,
            LabUnit::Dimensionless => natural,
        };
        Ok(LabQuantity { value, unit })
    }
}

fn nonnegative(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!("{what} must be finite and non-negative, got {v}")))
    }
}

/// eV^4 per (J m^-3).
fn energy_density_si_to_natural_factor() -> f64 {
    HBAR_C_EV_M.powi(3) / ELEMENTARY_CHARGE_C
}

/// Energy flux in W/cm^2 to energy density in eV^4. With c = 1 the flux of a
/// plane wave and its energy density coincide.
pub fn flux_to_energy_density_natural(flux_w_cm2: f64) -> Result<f64> {
    let flux = nonnegative(flux_w_cm2, "flux")?;
    let joule_per_m3 = flux * 1e4 / SPEED_OF_LIGHT_M_S;
    Ok(joule_per_m3 * energy_density_si_to_natural_factor())
}

pub fn energy_density_natural_to_flux(rho: f64) -> Result<f64> {
    let rho = nonnegative(rho, "energy density")?;
    Ok(rho / energy_density_si_to_natural_factor() * SPEED_OF_LIGHT_M_S * 1e-4)
}

/// Field amplitude in V/m to eV^2.
///
/// Goes through the cycle-averaged energy density of a plane wave,
/// rho = eps0 E^2 / 2 (SI) = E_nat^2 / 2 (natural), so there is exactly one
/// field conversion path in the crate.
pub fn field_amplitude_to_natural(volt_per_m: f64) -> Result<f64> {
    let e = nonnegative(volt_per_m, "field amplitude")?;
    let rho_si = 0.5 * VACUUM_PERMITTIVITY * e * e;
    let rho = rho_si * energy_density_si_to_natural_factor();
    Ok((2.0 * rho).sqrt())
}

pub fn field_amplitude_from_natural(amplitude: f64) -> Result<f64> {
    let a = nonnegative(amplitude, "field amplitude")?;
    let rho = 0.5 * a * a;
    let rho_si = rho / energy_density_si_to_natural_factor();
    Ok((2.0 * rho_si / VACUUM_PERMITTIVITY).sqrt())
}

/// Metres to eV^-1.
pub fn length_to_natural(metres: f64) -> Result<f64> {
    Ok(nonnegative(metres, "length")? / HBAR_C_EV_M)
}

/// eV^-1 to metres.
pub fn length_from_natural(inverse_ev: f64) -> Result<f64> {
    Ok(nonnegative(inverse_ev, "length")? * HBAR_C_EV_M)
}

pub fn time_to_natural(seconds: f64) -> Result<f64> {
    Ok(nonnegative(seconds, "time")? / hbar_ev_s())
}

pub fn time_from_natural(inverse_ev: f64) -> Result<f64> {
    Ok(nonnegative(inverse_ev, "time")? * hbar_ev_s())
}

pub fn micrometres(um: f64) -> Result<f64> {
    length_to_natural(um * 1e-6)
}

/// Angular frequency (eV) of light with vacuum wavelength `lambda` (eV^-1).
pub fn omega_from_wavelength(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("wavelength must be positive, got {lambda}")));
    }
    Ok(2.0 * PI / lambda)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronSpeed {
    /// v / c
    pub speed: f64,
    /// Set when v exceeds [`NONRELATIVISTIC_SPEED_LIMIT`].
    pub relativistic_warning: bool,
}

/// Nonrelativistic v = sqrt(2 E_k / m).
pub fn speed_from_kinetic_energy(kinetic: f64, mass: f64) -> Result<ElectronSpeed> {
    if !(kinetic.is_finite() && kinetic > 0.0) {
        return Err(Error::domain(format!("kinetic energy must be positive, got {kinetic}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    let speed = (2.0 * kinetic / mass).sqrt();
    Ok(ElectronSpeed {
        speed,
        relativistic_warning: speed > NONRELATIVISTIC_SPEED_LIMIT,
    })
}
