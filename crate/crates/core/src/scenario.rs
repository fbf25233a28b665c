//! Lab-unit description of one interferometer + field configuration, and its
//! resolution into natural-unit geometry and field objects.
//!
//! Key names carry their units (`wavelength_um`, `flux_W_cm2`, ...).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::closedform::GaussianScenario;
use crate::error::{Error, Result};
use crate::fields::{Field, GaussianBeamField, NullField, PlaneWaveField};
use crate::geometry::{build_trapezoid, TrajectoryPair, TrapezoidGeometry};
use crate::units::{self, speed_from_kinetic_energy, ELECTRON_MASS_EV, SPEED_OF_LIGHT_M_S};

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub half_separation_um: f64,
    pub longitudinal_um: f64,
    pub half_middle_um: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_keV: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    PlaneWave,
    GaussianBeam,
    Null,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    #[serde(rename = "type")]
    pub kind: FieldKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_V_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux_W_cm2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_x_um: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_z_um: Option<f64>,
}

/// Geometry and field, in lab units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub geometry: GeometryBlock,
    pub field: FieldBlock,
}

impl Default for Scenario {
    /// 5 keV electrons, 2c = s = 100 μm, 200 μm parallel section, 1 W/cm² at
    /// λ = 100 μm: the reference point of the parametric |C|² formula.
    fn default() -> Self {
        Scenario {
            geometry: GeometryBlock {
                half_separation_um: 50.0,
                longitudinal_um: 50.0 * 3f64.sqrt(),
                half_middle_um: 100.0,
                energy_keV: Some(5.0),
                speed: None,
            },
            field: FieldBlock {
                kind: FieldKind::PlaneWave,
                amplitude_V_m: None,
                flux_W_cm2: Some(1.0),
                wavelength_um: Some(100.0),
                sigma_um: None,
                center_x_um: None,
                center_z_um: None,
            },
        }
    }
}

/// Physics advisories. They never stop a computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    RelativisticSpeed { speed: f64 },
    BeamWiderThanSeparation { sigma_um: f64, two_c_um: f64 },
    BeamWiderThanMiddle { sigma_um: f64, two_d_um: f64 },
    SlowField { period_s: f64, measurement_s: f64 },
    Cancellation { ratio: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::RelativisticSpeed { speed } => write!(
                f,
                "electron speed {speed} c exceeds {}: nonrelativistic kinematics degrade",
                units::NONRELATIVISTIC_SPEED_LIMIT
            ),
            Warning::BeamWiderThanSeparation { sigma_um, two_c_um } => write!(
                f,
                "beam width {sigma_um} um exceeds the arm separation 2c = {two_c_um} um; the Gaussian closed form assumes sigma <~ 2c"
            ),
            Warning::BeamWiderThanMiddle { sigma_um, two_d_um } => write!(
                f,
                "beam width {sigma_um} um exceeds the middle segment 2d = {two_d_um} um; the Gaussian closed form assumes sigma <~ 2d"
            ),
            Warning::SlowField { period_s, measurement_s } => write!(
                f,
                "field period {period_s} s is longer than a tenth of the measurement time {measurement_s} s; the emission-time average may not apply"
            ),
            Warning::Cancellation { ratio } => write!(
                f,
                "region contributions exceed |C| by a factor {ratio:.3e}; result limited by cancellation"
            ),
        }
    }
}

/// A scenario converted to natural units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub geom: TrapezoidGeometry,
    pub pair: TrajectoryPair,
    pub field: Field,
    pub warnings: Vec<Warning>,
    /// Kinetic energy in keV, given or implied by the speed.
    pub kinetic_kev: f64,
    /// Cycle-averaged intensity in W/cm², given or implied by the amplitude.
    pub flux_w_cm2: f64,
}

impl Resolved {
    pub fn omega(&self) -> f64 {
        use crate::fields::FieldConfig;
        self.field.omega()
    }

    pub fn gaussian_scenario(&self) -> Option<GaussianScenario> {
        match self.field {
            Field::GaussianBeam(b) => GaussianScenario::new(self.geom, b.amplitude, b.omega, b.sigma).ok(),
            _ => None,
        }
    }
}

fn need(v: Option<f64>, what: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("field: missing `{what}`")))
}

impl Scenario {
    /// Checks the exactly-one-of rules without converting anything.
    pub fn check(&self) -> Result<()> {
        match (self.geometry.energy_keV, self.geometry.speed) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "geometry: both `energy_keV` and `speed` given; specify exactly one".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "geometry: one of `energy_keV` or `speed` is required".into(),
                ))
            }
            _ => {}
        }
        if self.field.kind != FieldKind::Null {
            match (self.field.amplitude_V_m, self.field.flux_W_cm2) {
                (Some(_), Some(_)) => {
                    return Err(Error::Config(
                        "field: both `amplitude_V_m` and `flux_W_cm2` given; specify exactly one".into(),
                    ))
                }
                (None, None) => {
                    return Err(Error::Config(
                        "field: one of `amplitude_V_m` or `flux_W_cm2` is required".into(),
                    ))
                }
                _ => {}
            }
            need(self.field.wavelength_um, "wavelength_um")?;
        }
        if self.field.kind == FieldKind::GaussianBeam {
            need(self.field.sigma_um, "sigma_um")?;
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<Resolved> {
        self.check()?;
        let g = &self.geometry;
        let mut warnings = Vec::new();
        let (speed, kinetic_kev) = match (g.energy_keV, g.speed) {
            (Some(kev), None) => {
                let s = speed_from_kinetic_energy(kev * 1e3, ELECTRON_MASS_EV)?;
                if s.relativistic_warning {
                    warnings.push(Warning::RelativisticSpeed { speed: s.speed });
                }
                (s.speed, kev)
            }
            (None, Some(v)) => {
                if v > units::NONRELATIVISTIC_SPEED_LIMIT {
                    warnings.push(Warning::RelativisticSpeed { speed: v });
                }
                (v, 0.5 * ELECTRON_MASS_EV * v * v * 1e-3)
            }
            _ => unreachable!("checked above"),
        };
        let geom = TrapezoidGeometry::new(
            units::micrometres(g.half_separation_um)?,
            units::micrometres(g.longitudinal_um)?,
            units::micrometres(g.half_middle_um)?,
            speed,
        )?;
        let pair = build_trapezoid(&geom)?;

        let f = &self.field;
        let (field, flux_w_cm2) = match f.kind {
            FieldKind::Null => (Field::Null(NullField), 0.0),
            kind => {
                let (amplitude, flux) = match (f.amplitude_V_m, f.flux_W_cm2) {
                    (Some(v_m), None) => {
                        let amp = units::field_amplitude_to_natural(v_m)?;
                        let rho = 0.5 * amp * amp;
                        (amp, units::energy_density_natural_to_flux(rho)?)
                    }
                    (None, Some(flux)) => {
                        let rho = units::flux_to_energy_density_natural(flux)?;
                        ((2.0 * rho).sqrt(), flux)
                    }
                    _ => unreachable!("checked above"),
                };
                let omega = units::omega_from_wavelength(units::micrometres(need(f.wavelength_um, "wavelength_um")?)?)?;
                let field = match kind {
                    FieldKind::PlaneWave => Field::PlaneWave(PlaneWaveField::new(amplitude, omega)),
                    FieldKind::GaussianBeam => {
                        let sigma_um = need(f.sigma_um, "sigma_um")?;
                        if !(sigma_um.is_finite() && sigma_um > 0.0) {
                            return Err(Error::domain(format!("beam width must be positive, got {sigma_um}")));
                        }
                        if sigma_um > 2.0 * g.half_separation_um {
                            warnings.push(Warning::BeamWiderThanSeparation {
                                sigma_um,
                                two_c_um: 2.0 * g.half_separation_um,
                            });
                        }
                        if sigma_um > 2.0 * g.half_middle_um {
                            warnings.push(Warning::BeamWiderThanMiddle {
                                sigma_um,
                                two_d_um: 2.0 * g.half_middle_um,
                            });
                        }
                        let to_nat = |um: Option<f64>| -> Result<f64> {
                            let um = um.unwrap_or(0.0);
                            let mag = units::micrometres(um.abs())?;
                            Ok(mag.copysign(um))
                        };
                        Field::GaussianBeam(
                            GaussianBeamField::centered(amplitude, omega, units::micrometres(sigma_um)?)
                                .with_center(to_nat(f.center_x_um)?, to_nat(f.center_z_um)?),
                        )
                    }
                    FieldKind::Null => unreachable!(),
                };
                (field, flux)
            }
        };
        Ok(Resolved {
            geom,
            pair,
            field,
            warnings,
            kinetic_kev,
            flux_w_cm2,
        })
    }

    /// Adds the measurement-time advisory when an integration time is known.
    pub fn measurement_warning(&self, measurement_s: f64) -> Option<Warning> {
        let lambda_um = self.field.wavelength_um?;
        if self.field.kind == FieldKind::Null {
            return None;
        }
        let period_s = lambda_um * 1e-6 / SPEED_OF_LIGHT_M_S;
        (period_s > measurement_s / 10.0).then_some(Warning::SlowField {
            period_s,
            measurement_s,
        })
    }

    /// 2c/s of the geometry.
    pub fn separation_ratio(&self) -> f64 {
        let g = &self.geometry;
        2.0 * g.half_separation_um / g.half_separation_um.hypot(g.longitudinal_um)
    }
}
