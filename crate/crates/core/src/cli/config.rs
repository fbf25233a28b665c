//! JSON run configuration.
//!
//! ```json
//! {
//!   "geometry": { "half_separation_um": 50, "longitudinal_um": 86.6, "half_middle_um": 100, "energy_keV": 5 },
//!   "field": { "type": "plane_wave", "flux_W_cm2": 1, "wavelength_um": 100 },
//!   "quadrature": { "relative_tolerance": 1e-9 },
//!   "measurement": { "integration_time_s": 1e-3 },
//!   "output": { "path": "scan.csv", "format": "csv" }
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::QuadratureSettings;
use crate::scenario::{FieldBlock, GeometryBlock, Scenario};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_samples_per_period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementBlock {
    pub integration_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryBlock,
    pub field: FieldBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement: Option<MeasurementBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputBlock>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = Scenario::default();
        RunConfig {
            geometry: s.geometry,
            field: s.field,
            quadrature: None,
            measurement: None,
            output: None,
        }
    }
}

impl RunConfig {
    /// Parses and checks a configuration. Errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.scenario().check()?;
        if let Some(m) = &cfg.measurement {
            if !(m.integration_time_s.is_finite() && m.integration_time_s > 0.0) {
                return Err(Error::Config(format!(
                    "measurement: `integration_time_s` must be positive, got {}",
                    m.integration_time_s
                )));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            geometry: self.geometry.clone(),
            field: self.field.clone(),
        }
    }

    /// Quadrature settings from the config, over the defaults.
    pub fn settings(&self) -> QuadratureSettings {
        let mut s = QuadratureSettings::default();
        if let Some(q) = &self.quadrature {
            if let Some(v) = q.relative_tolerance {
                s.relative_tolerance = v;
            }
            if let Some(v) = q.min_samples_per_period {
                s.min_samples_per_period = v;
            }
            if let Some(v) = q.max_subdivisions {
                s.max_subdivisions = v;
            }
        }
        s
    }

    pub fn integration_time_s(&self) -> Option<f64> {
        self.measurement.as_ref().map(|m| m.integration_time_s)
    }
}
