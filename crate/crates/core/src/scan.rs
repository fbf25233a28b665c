//! Parameter sweeps of |C| and Υ, contrast-zero location and revival counting.
//!
//! Points are evaluated in parallel but stored by index, so the table is
//! identical for any thread count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{gaussian_c, planewave_c, GaussianScenario, PlaneWaveScenario};
use crate::contrast::{bessel_j0, ContrastReport, DEFAULT_ORACLE_POINTS};
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::phase::{compute_c, PhaseResult, QuadratureSettings};
use crate::scenario::{FieldKind, Resolved, Scenario};

/// |Υ| at which bisection stops.
pub const ZERO_TOLERANCE: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    Amplitude,
    Flux,
    Wavelength,
    HalfSeparation,
    BeamWidth,
}

impl SweptParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweptParameter::Amplitude => "amplitude",
            SweptParameter::Flux => "flux",
            SweptParameter::Wavelength => "wavelength",
            SweptParameter::HalfSeparation => "half_separation",
            SweptParameter::BeamWidth => "beam_width",
        }
    }

    /// Lab unit of the swept value, as used in the CSV header.
    pub fn unit(self) -> &'static str {
        match self {
            SweptParameter::Amplitude => "V_m",
            SweptParameter::Flux => "W_cm2",
            SweptParameter::Wavelength | SweptParameter::HalfSeparation | SweptParameter::BeamWidth => "um",
        }
    }

    /// `base` with this parameter set to `value`.
    pub fn apply(self, base: &Scenario, value: f64) -> Scenario {
        let mut s = base.clone();
        match self {
            SweptParameter::Amplitude => {
                s.field.amplitude_V_m = Some(value);
                s.field.flux_W_cm2 = None;
            }
            SweptParameter::Flux => {
                s.field.flux_W_cm2 = Some(value);
                s.field.amplitude_V_m = None;
            }
            SweptParameter::Wavelength => s.field.wavelength_um = Some(value),
            SweptParameter::HalfSeparation => s.geometry.half_separation_um = value,
            SweptParameter::BeamWidth => s.field.sigma_um = Some(value),
        }
        s
    }
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweptParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "amplitude" => SweptParameter::Amplitude,
            "flux" => SweptParameter::Flux,
            "wavelength" => SweptParameter::Wavelength,
            "half_separation" => SweptParameter::HalfSeparation,
            "beam_width" => SweptParameter::BeamWidth,
            other => return Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Numeric,
    ClosedForm,
    Both,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "numeric" => Engine::Numeric,
            "closed_form" | "closed-form" => Engine::ClosedForm,
            "both" => Engine::Both,
            other => return Err(Error::Config(format!("unknown engine `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub parameter: SweptParameter,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
    pub spacing: Spacing,
    pub base: Scenario,
    pub engine: Engine,
    pub settings: QuadratureSettings,
    pub oracle_points: usize,
}

impl ScanSpec {
    pub fn new(parameter: SweptParameter, lo: f64, hi: f64, n_points: usize, base: Scenario) -> Self {
        ScanSpec {
            parameter,
            lo,
            hi,
            n_points,
            spacing: Spacing::Linear,
            base,
            engine: Engine::Numeric,
            settings: QuadratureSettings::default(),
            oracle_points: DEFAULT_ORACLE_POINTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::Config(format!(
                "scan range must satisfy lo < hi, got {}..{}",
                self.lo, self.hi
            )));
        }
        if self.n_points < 2 {
            return Err(Error::Config(format!("scan needs at least 2 points, got {}", self.n_points)));
        }
        if self.spacing == Spacing::Log && self.lo <= 0.0 {
            return Err(Error::Config(format!("log spacing needs lo > 0, got {}", self.lo)));
        }
        if self.parameter == SweptParameter::BeamWidth && self.base.field.kind != FieldKind::GaussianBeam {
            return Err(Error::Config("beam_width can only be swept for a gaussian_beam field".into()));
        }
        self.settings.validate()?;
        self.base.check()
    }

    /// Sample values of the swept parameter.
    pub fn values(&self) -> Vec<f64> {
        let n = self.n_points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.lo;
                }
                if i == n - 1 {
                    return self.hi;
                }
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.lo + f * (self.hi - self.lo),
                    Spacing::Log => (self.lo.ln() + f * (self.hi.ln() - self.lo.ln())).exp(),
                }
            })
            .collect()
    }

    /// C at one value of the swept parameter.
    pub fn evaluate_at(&self, value: f64) -> Result<PointValue> {
        let resolved = self.parameter.apply(&self.base, value).resolve()?;
        evaluate(&resolved, self.engine, &self.settings)
    }
}

/// Engine output at one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValue {
    pub c: Complex64,
    /// Relative difference of the two engines' |C| (engine `both` only).
    pub engine_disagreement: Option<f64>,
    pub quadrature: Option<PhaseResult>,
}

/// Closed-form C, real by construction. The Gaussian form ignores beam offsets.
pub fn closed_form_c(resolved: &Resolved) -> Result<f64> {
    match resolved.field {
        Field::Null(_) => Ok(0.0),
        Field::PlaneWave(p) => Ok(planewave_c(&PlaneWaveScenario::new(resolved.geom, p.amplitude, p.omega)?)),
        Field::GaussianBeam(b) => Ok(gaussian_c(&GaussianScenario::new(resolved.geom, b.amplitude, b.omega, b.sigma)?).value),
    }
}

pub fn evaluate(resolved: &Resolved, engine: Engine, settings: &QuadratureSettings) -> Result<PointValue> {
    let numeric = || compute_c(&resolved.pair, &resolved.field, settings);
    Ok(match engine {
        Engine::Numeric => {
            let r = numeric()?;
            PointValue {
                c: r.c,
                engine_disagreement: None,
                quadrature: Some(r),
            }
        }
        Engine::ClosedForm => PointValue {
            c: Complex64::new(closed_form_c(resolved)?, 0.0),
            engine_disagreement: None,
            quadrature: None,
        },
        Engine::Both => {
            let r = numeric()?;
            let closed = closed_form_c(resolved)?.abs();
            let num = r.abs();
            let scale = num.max(closed);
            let d = if scale == 0.0 { 0.0 } else { (num - closed).abs() / scale };
            PointValue {
                c: r.c,
                engine_disagreement: Some(d),
                quadrature: Some(r),
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub parameter_value: f64,
    pub abs_c: f64,
    pub upsilon_analytic: f64,
    pub upsilon_oracle: Complex64,
    pub upsilon_gaussian_model: f64,
    pub engine_disagreement: Option<f64>,
    /// Set when this point failed; the numbers are then the best available
    /// estimate or NaN.
    pub error: Option<String>,
}

impl ScanRow {
    fn from_c(parameter_value: f64, c: Complex64, disagreement: Option<f64>, oracle_points: usize) -> Result<Self> {
        let r = ContrastReport::new(c, oracle_points)?;
        Ok(ScanRow {
            parameter_value,
            abs_c: r.abs_c,
            upsilon_analytic: r.upsilon_analytic,
            upsilon_oracle: r.upsilon_oracle,
            upsilon_gaussian_model: r.upsilon_gaussian_model,
            engine_disagreement: disagreement,
            error: None,
        })
    }

    fn failed(parameter_value: f64, err: &Error, oracle_points: usize) -> Self {
        let mut row = match err {
            Error::Quadrature { best } => ScanRow::from_c(parameter_value, best.c, None, oracle_points).ok(),
            _ => None,
        }
        .unwrap_or(ScanRow {
            parameter_value,
            abs_c: f64::NAN,
            upsilon_analytic: f64::NAN,
            upsilon_oracle: Complex64::new(f64::NAN, f64::NAN),
            upsilon_gaussian_model: f64::NAN,
            engine_disagreement: None,
            error: None,
        });
        row.error = Some(err.to_string());
        row
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Evaluates every point of the sweep. Invalid specs fail up front; a point
/// that fails is recorded in its row and the scan carries on.
pub fn run_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    spec.validate()?;
    let rows = spec
        .values()
        .into_par_iter()
        .map(|v| match spec.evaluate_at(v) {
            Ok(p) => ScanRow::from_c(v, p.c, p.engine_disagreement, spec.oracle_points)
                .unwrap_or_else(|e| ScanRow::failed(v, &e, spec.oracle_points)),
            Err(e) => ScanRow::failed(v, &e, spec.oracle_points),
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCrossing {
    pub parameter_value: f64,
    pub abs_c: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Brackets of sign changes of Υ between adjacent successful rows.
fn sign_brackets(rows: &[ScanRow]) -> Vec<(usize, usize)> {
    let ok: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].is_ok()).collect();
    ok.windows(2)
        .filter_map(|w| {
            let (a, b) = (rows[w[0]].upsilon_analytic, rows[w[1]].upsilon_analytic);
            // an exact zero on a row is reported once, from its left bracket
            (a != 0.0 && (a > 0.0) != (b > 0.0)).then_some((w[0], w[1]))
        })
        .collect()
}

/// Refines every sign change of Υ in `rows` by bisection on the engine.
pub fn refine_zeros(spec: &ScanSpec, rows: &[ScanRow]) -> Result<Vec<ZeroCrossing>> {
    sign_brackets(rows)
        .into_par_iter()
        .map(|(i, j)| bisect_zero(spec, &rows[i], &rows[j]))
        .collect()
}

/// Runs the scan and locates the zeros of Υ within its range.
pub fn find_contrast_zeros(spec: &ScanSpec) -> Result<Vec<ZeroCrossing>> {
    let rows = run_scan(spec)?;
    refine_zeros(spec, &rows)
}

fn bisect_zero(spec: &ScanSpec, left: &ScanRow, right: &ScanRow) -> Result<ZeroCrossing> {
    let bracket = (left.parameter_value, right.parameter_value);
    let (mut lo, mut hi) = bracket;
    let lo_positive = left.upsilon_analytic > 0.0;
    if right.upsilon_analytic == 0.0 {
        return Ok(ZeroCrossing {
            parameter_value: hi,
            abs_c: right.abs_c,
            bracket,
            iterations: 0,
        });
    }
    let mut best = (f64::INFINITY, lo, left.abs_c);
    for it in 1..=MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let abs_c = spec.evaluate_at(mid)?.c.norm();
        let ups = bessel_j0(abs_c);
        if ups.abs() < best.0 {
            best = (ups.abs(), mid, abs_c);
        }
        if ups.abs() <= ZERO_TOLERANCE || mid <= lo || mid >= hi {
            return Ok(ZeroCrossing {
                parameter_value: best.1,
                abs_c: best.2,
                bracket,
                iterations: it,
            });
        }
        if (ups > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ZeroCrossing {
        parameter_value: best.1,
        abs_c: best.2,
        bracket,
        iterations: MAX_BISECTIONS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevivalPeak {
    pub parameter_value: f64,
    pub abs_c: f64,
    pub abs_upsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevivalSummary {
    pub count: usize,
    pub peaks: Vec<RevivalPeak>,
}

/// Local maxima of |Υ| after the first zero, read off the table.
pub fn count_revivals(rows: &[ScanRow]) -> RevivalSummary {
    let ok: Vec<&ScanRow> = rows.iter().filter(|r| r.is_ok()).collect();
    let first_zero = ok.windows(2).position(|w| {
        let (a, b) = (w[0].upsilon_analytic, w[1].upsilon_analytic);
        a == 0.0 || (a > 0.0) != (b > 0.0)
    });
    let mut peaks = Vec::new();
    if let Some(z) = first_zero {
        for i in (z + 1)..ok.len().saturating_sub(1) {
            let (prev, cur, next) = (
                ok[i - 1].upsilon_analytic.abs(),
                ok[i].upsilon_analytic.abs(),
                ok[i + 1].upsilon_analytic.abs(),
            );
            if cur > prev && cur >= next {
                peaks.push(RevivalPeak {
                    parameter_value: ok[i].parameter_value,
                    abs_c: ok[i].abs_c,
                    abs_upsilon: cur,
                });
            }
        }
    }
    RevivalSummary {
        count: peaks.len(),
        peaks,
    }
}

/// Shortest decimal string that parses back to exactly `x`; scientific
/// notation outside [1e-4, 1e15).
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// CSV table. Floats use shortest round-trip formatting.
pub fn write_csv(out: &mut dyn Write, parameter: SweptParameter, rows: &[ScanRow]) -> Result<()> {
    writeln!(
        out,
        "{}_{},abs_C,upsilon_analytic,upsilon_oracle_re,upsilon_oracle_im,upsilon_gaussian_model,engine_disagreement,error",
        parameter.name(),
        parameter.unit()
    )?;
    for r in rows {
        let err = r.error.as_deref().unwrap_or("").replace(['"', ','], ";");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_float(r.parameter_value),
            format_float(r.abs_c),
            format_float(r.upsilon_analytic),
            format_float(r.upsilon_oracle.re),
            format_float(r.upsilon_oracle.im),
            format_float(r.upsilon_gaussian_model),
            opt(r.engine_disagreement),
            err
        )?;
    }
    Ok(())
}

/// Plain-text summary of zeros and revivals.
pub fn write_summary(
    out: &mut dyn Write,
    parameter: SweptParameter,
    zeros: &[ZeroCrossing],
    revivals: &RevivalSummary,
    failed_points: usize,
) -> Result<()> {
    writeln!(out, "swept = {} [{}]", parameter.name(), parameter.unit())?;
    writeln!(out, "zeros = {}", zeros.len())?;
    for (k, z) in zeros.iter().enumerate() {
        writeln!(
            out,
            "zero {}: parameter = {} abs_C = {} bracket = [{}, {}] iterations = {}",
            k + 1,
            format_float(z.parameter_value),
            format_float(z.abs_c),
            format_float(z.bracket.0),
            format_float(z.bracket.1),
            z.iterations
        )?;
    }
    writeln!(out, "revivals = {}", revivals.count)?;
    for (k, p) in revivals.peaks.iter().enumerate() {
        writeln!(
            out,
            "revival {}: parameter = {} abs_C = {} abs_upsilon = {}",
            k + 1,
            format_float(p.parameter_value),
            format_float(p.abs_c),
            format_float(p.abs_upsilon)
        )?;
    }
    writeln!(out, "failed_points = {failed_points}")?;
    Ok(())
}

/// Rows, zeros and revivals as one JSON document.
pub fn structured(
    parameter: SweptParameter,
    rows: &[ScanRow],
    zeros: &[ZeroCrossing],
    revivals: &RevivalSummary,
) -> serde_json::Value {
    let num = |x: f64| if x.is_finite() { serde_json::json!(x) } else { serde_json::Value::Null };
    let rows: Vec<_> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "parameter": num(r.parameter_value),
                "abs_C": num(r.abs_c),
                "upsilon_analytic": num(r.upsilon_analytic),
                "upsilon_oracle": [num(r.upsilon_oracle.re), num(r.upsilon_oracle.im)],
                "upsilon_gaussian_model": num(r.upsilon_gaussian_model),
                "engine_disagreement": r.engine_disagreement,
                "error": r.error,
            })
        })
        .collect();
    serde_json::json!({
        "swept": parameter.name(),
        "unit": parameter.unit(),
        "rows": rows,
        "zeros": zeros,
        "revivals": revivals,
    })
}
