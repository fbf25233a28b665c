//! Applied field configurations. Only E^z is modelled, through its complex
//! phasor envelope E(x, y, z) e^{iky}; the physical field is
//! Re[phasor e^{-i omega t}] = E cos(ky - omega t). Vacuum dispersion, k = omega.

use num_complex::Complex64;

/// A linearly z-polarized field propagating along y.
pub trait FieldConfig: Send + Sync {
    /// Angular frequency in eV. Zero marks a static field.
    fn omega(&self) -> f64;

    /// Real envelope E(x, y, z), the slowly varying amplitude.
    fn envelope(&self, x: f64, y: f64, z: f64) -> f64;

    /// E(x, y, z) e^{iky}.
    fn phasor(&self, x: f64, y: f64, z: f64) -> Complex64 {
        let amp = self.envelope(x, y, z);
        if y == 0.0 {
            return Complex64::new(amp, 0.0);
        }
        Complex64::from_polar(amp, self.omega() * y)
    }

    /// Instantaneous E^z = E cos(ky - omega t).
    fn field_in_time(&self, x: f64, y: f64, z: f64, t: f64) -> f64 {
        (self.phasor(x, y, z) * Complex64::from_polar(1.0, -self.omega() * t)).re
    }

    /// True when the envelope vanishes identically.
    fn is_null(&self) -> bool {
        false
    }

    fn is_static(&self) -> bool {
        self.omega() == 0.0
    }
}

/// No applied field.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NullField;

impl FieldConfig for NullField {
    fn omega(&self) -> f64 {
        0.0
    }

    fn envelope(&self, _x: f64, _y: f64, _z: f64) -> f64 {
        0.0
    }

    fn is_null(&self) -> bool {
        true
    }
}

/// Uniform amplitude everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveField {
    pub amplitude: f64,
    pub omega: f64,
}

impl PlaneWaveField {
    pub fn new(amplitude: f64, omega: f64) -> Self {
        PlaneWaveField { amplitude, omega }
    }
}

impl FieldConfig for PlaneWaveField {
    fn omega(&self) -> f64 {
        self.omega
    }

    fn envelope(&self, _x: f64, _y: f64, _z: f64) -> f64 {
        self.amplitude
    }
}

/// Beam of 1/e half-width `sigma` in the x-z plane, normally incident on it:
/// E(x, z) = E0 exp(-((x - x0)^2 + (z - z0)^2) / sigma^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeamField {
    pub amplitude: f64,
    pub omega: f64,
    pub sigma: f64,
    pub center_x: f64,
    pub center_z: f64,
}

impl GaussianBeamField {
    /// Beam centred on the origin.
    pub fn centered(amplitude: f64, omega: f64, sigma: f64) -> Self {
        GaussianBeamField {
            amplitude,
            omega,
            sigma,
            center_x: 0.0,
            center_z: 0.0,
        }
    }

    pub fn with_center(mut self, x: f64, z: f64) -> Self {
        self.center_x = x;
        self.center_z = z;
        self
    }
}

impl FieldConfig for GaussianBeamField {
    fn omega(&self) -> f64 {
        self.omega
    }

    fn envelope(&self, x: f64, _y: f64, z: f64) -> f64 {
        let dx = x - self.center_x;
        let dz = z - self.center_z;
        self.amplitude * (-(dx * dx + dz * dz) / (self.sigma * self.sigma)).exp()
    }
}

/// Closed set of the supported fields, for code that needs a concrete type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    Null(NullField),
    PlaneWave(PlaneWaveField),
    GaussianBeam(GaussianBeamField),
}

impl Field {
    pub fn amplitude(&self) -> f64 {
        match self {
            Field::Null(_) => 0.0,
            Field::PlaneWave(f) => f.amplitude,
            Field::GaussianBeam(f) => f.amplitude,
        }
    }

    fn inner(&self) -> &dyn FieldConfig {
        match self {
            Field::Null(f) => f,
            Field::PlaneWave(f) => f,
            Field::GaussianBeam(f) => f,
        }
    }
}

impl FieldConfig for Field {
    fn omega(&self) -> f64 {
        self.inner().omega()
    }

    fn envelope(&self, x: f64, y: f64, z: f64) -> f64 {
        self.inner().envelope(x, y, z)
    }

    fn is_null(&self) -> bool {
        self.inner().is_null()
    }
}
