use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;

use super::config::{OutputFormat, RunConfig};
use crate::closedform::{
    self, energy_density_from_amplitude, gaussian_c, planewave_c, planewave_c2_averaged, planewave_c2_parametric,
    GaussianScenario, PlaneWaveScenario,
};
use crate::contrast::{bessel_j0, oracle_time_average, ContrastReport, DEFAULT_ORACLE_POINTS};
use crate::error::{Error, Result};
use crate::fields::{Field, FieldConfig, GaussianBeamField, PlaneWaveField};
use crate::geometry::{build_trapezoid, TrapezoidGeometry};
use crate::phase::{compute_c, PhaseResult, QuadratureSettings};
use crate::scan::{self, format_float as f, Engine, ScanSpec, Spacing, SweptParameter};
use crate::scenario::{Resolved, Warning};
use crate::units;

/// Plane-wave agreement required by `validate`.
pub const PLANE_WAVE_TOLERANCE: f64 = 1e-6;
/// Jacobi-Anger agreement required by `validate`.
pub const JACOBI_ANGER_TOLERANCE: f64 = 1e-8;
/// Grid of ωΘ and ωT values used by `validate`.
pub const VALIDATION_GRID: [f64; 5] = [0.1, 1.0, 3.0, 10.0, 30.0];
/// Looser quadrature tolerances cannot meet [`PLANE_WAVE_TOLERANCE`], so
/// plane-wave failures become warnings.
const SOFT_MODE_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ValidationFailed,
}

fn write_warnings(out: &mut dyn Write, warnings: &[Warning]) -> Result<()> {
    for w in warnings {
        writeln!(out, "warning: {w}")?;
    }
    Ok(())
}

fn resolve(config: &RunConfig) -> Result<Resolved> {
    let scenario = config.scenario();
    let mut r = scenario.resolve()?;
    if let Some(t) = config.integration_time_s() {
        r.warnings.extend(scenario.measurement_warning(t));
    }
    Ok(r)
}

/// |C| and every contrast estimate for one configuration.
pub fn cmd_contrast(config: &RunConfig, settings: &QuadratureSettings, engine: Engine, out: &mut dyn Write) -> Result<Outcome> {
    settings.validate()?;
    let mut r = resolve(config)?;
    let point = scan::evaluate(&r, engine, settings)?;
    if let Some(q) = point.quadrature.filter(PhaseResult::cancellation_warning) {
        r.warnings.push(Warning::Cancellation {
            ratio: q.cancellation_ratio,
        });
    }
    let report = ContrastReport::new(point.c, DEFAULT_ORACLE_POINTS)?;
    let engine_name = match engine {
        Engine::Numeric => "numeric",
        Engine::ClosedForm => "closed_form",
        Engine::Both => "both",
    };
    writeln!(out, "engine = {engine_name}")?;
    writeln!(out, "A = {}", f(point.c.re))?;
    writeln!(out, "B = {}", f(point.c.im))?;
    writeln!(out, "abs_C = {}", f(report.abs_c))?;
    writeln!(out, "abs_C2 = {}", f(report.abs_c * report.abs_c))?;
    if let Some(q) = point.quadrature {
        writeln!(out, "quadrature_error_estimate = {}", f(q.quadrature_error_estimate))?;
        writeln!(out, "nodes_used = {}", q.nodes_used)?;
    }
    if let Some(d) = point.engine_disagreement {
        writeln!(out, "engine_disagreement = {}", f(d))?;
    }
    if let Field::PlaneWave(p) = r.field {
        let rho = energy_density_from_amplitude(p.amplitude)?;
        writeln!(out, "abs_C2_sine_averaged = {}", f(planewave_c2_averaged(&r.geom, rho, p.omega)?))?;
    }
    writeln!(out, "upsilon_analytic = {}", f(report.upsilon_analytic))?;
    writeln!(out, "upsilon_oracle = {} {}", f(report.upsilon_oracle.re), f(report.upsilon_oracle.im))?;
    writeln!(out, "upsilon_gaussian_model = {}", f(report.upsilon_gaussian_model))?;
    writeln!(out, "upsilon_taylor = {}", f(report.upsilon_taylor))?;
    write_warnings(out, &r.warnings)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanArgs {
    pub sweep: SweptParameter,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub engine: Engine,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Parses `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config(format!("range must look like lo:hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

/// Runs a sweep. The table goes to `args.output` (or `out` when absent), the
/// zero/revival summary to `out` (or `summary_out` when the table took `out`).
pub fn cmd_scan(
    config: &RunConfig,
    settings: &QuadratureSettings,
    args: &ScanArgs,
    out: &mut dyn Write,
    summary_out: &mut dyn Write,
) -> Result<Outcome> {
    let spec = ScanSpec {
        spacing: args.spacing,
        engine: args.engine,
        settings: *settings,
        ..ScanSpec::new(args.sweep, args.lo, args.hi, args.points, config.scenario())
    };
    let rows = scan::run_scan(&spec)?;
    let zeros = scan::refine_zeros(&spec, &rows)?;
    let revivals = scan::count_revivals(&rows);
    let failed = rows.iter().filter(|r| !r.is_ok()).count();

    let mut table = Vec::new();
    match args.format {
        OutputFormat::Csv => scan::write_csv(&mut table, args.sweep, &rows)?,
        OutputFormat::Structured => {
            let doc = scan::structured(args.sweep, &rows, &zeros, &revivals);
            serde_json::to_writer_pretty(&mut table, &doc).map_err(std::io::Error::from)?;
            table.push(b'\n');
        }
    }
    let summary_sink: &mut dyn Write = match &args.output {
        Some(path) => {
            std::fs::write(path, &table)?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
            out
        }
        None => {
            out.write_all(&table)?;
            summary_out
        }
    };
    scan::write_summary(summary_sink, args.sweep, &zeros, &revivals, failed)?;
    let r = resolve(config)?;
    write_warnings(summary_sink, &r.warnings)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub omega_theta: f64,
    pub omega_t: f64,
    pub numeric_abs_c: f64,
    pub closed_abs_c: f64,
    pub relative_error: f64,
}

/// Plane-wave |C| by quadrature and in closed form on the ωΘ × ωT grid. The
/// slant segments of `base` are kept; ω and the middle length d are chosen to
/// hit each grid point.
pub fn plane_wave_grid(base: &TrapezoidGeometry, amplitude: f64, settings: &QuadratureSettings) -> Result<Vec<GridPoint>> {
    let theta = base.slant_time();
    let mut rows = Vec::new();
    for &wt in &VALIDATION_GRID {
        for &wm in &VALIDATION_GRID {
            let omega = wt / theta;
            let d = wm * base.speed_v / (2.0 * omega);
            let geom = TrapezoidGeometry::new(base.half_separation_c, base.longitudinal_l, d, base.speed_v)?;
            let pair = build_trapezoid(&geom)?;
            let numeric = compute_c(&pair, &PlaneWaveField::new(amplitude, omega), settings)?.abs();
            let closed = planewave_c(&PlaneWaveScenario::new(geom, amplitude, omega)?).abs();
            rows.push(GridPoint {
                omega_theta: wt,
                omega_t: wm,
                numeric_abs_c: numeric,
                closed_abs_c: closed,
                relative_error: (numeric - closed).abs() / closed,
            });
        }
    }
    Ok(rows)
}

/// Max |oracle average − J0(|C|)| over 200 points filling the disc |C| ≤ 10.
pub fn jacobi_anger_check() -> Result<f64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut worst = 0.0f64;
    for k in 0..200 {
        let r = 10.0 * ((k as f64 + 0.5) / 200.0).sqrt();
        let phi = golden * k as f64;
        let c = Complex64::from_polar(r, phi);
        let avg = oracle_time_average(c.re, c.im, DEFAULT_ORACLE_POINTS)?;
        worst = worst.max((avg - Complex64::new(bessel_j0(r), 0.0)).norm());
    }
    Ok(worst)
}

/// Numeric vs closed-form Gaussian-beam |C| for the configured geometry.
fn gaussian_rows(r: &Resolved, amplitude: f64, omega: f64, settings: &QuadratureSettings) -> Vec<(f64, String, f64, String)> {
    let d = r.geom.half_middle_d;
    [1.0 / 3.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&k| {
            let sigma = k * d;
            let beam = GaussianBeamField::centered(amplitude, omega, sigma);
            let numeric = match compute_c(&r.pair, &beam, settings) {
                Ok(p) => Some(p.abs()),
                Err(Error::Quadrature { best }) => Some(best.abs()),
                Err(_) => None,
            };
            let closed = GaussianScenario::new(r.geom, amplitude, omega, sigma)
                .map(|s| gaussian_c(&s).value.abs())
                .unwrap_or(f64::NAN);
            let (num_s, ratio) = match numeric {
                Some(n) => (f(n), if closed > 0.0 { f(n / closed) } else { "n/a".into() }),
                None => ("n/a".into(), "n/a".into()),
            };
            (k, num_s, closed, ratio)
        })
        .collect()
}

/// Numeric-vs-closed-form report. Fails on a hard-test miss unless the
/// quadrature tolerance is too loose for it to be meaningful.
pub fn cmd_validate(config: &RunConfig, settings: &QuadratureSettings, out: &mut dyn Write) -> Result<Outcome> {
    settings.validate()?;
    let r = resolve(config)?;
    let (amplitude, omega) = match r.field {
        Field::PlaneWave(p) => (p.amplitude, p.omega),
        Field::GaussianBeam(b) => (b.amplitude, b.omega),
        Field::Null(_) => (1.0, 1.0 / r.geom.slant_time()),
    };
    let soft = settings.relative_tolerance > SOFT_MODE_TOLERANCE;
    let mut pass = true;

    writeln!(out, "== plane wave: quadrature vs closed form (tolerance {PLANE_WAVE_TOLERANCE:e}) ==")?;
    writeln!(out, "omega_theta,omega_T,numeric_abs_C,closed_abs_C,relative_error")?;
    let grid = plane_wave_grid(&r.geom, amplitude, settings)?;
    for g in &grid {
        writeln!(
            out,
            "{},{},{},{},{}",
            f(g.omega_theta),
            f(g.omega_t),
            f(g.numeric_abs_c),
            f(g.closed_abs_c),
            f(g.relative_error)
        )?;
    }
    let max_err = grid.iter().map(|g| g.relative_error).fold(0.0, f64::max);
    let pw_ok = max_err <= PLANE_WAVE_TOLERANCE;
    writeln!(out, "plane_wave_max_relative_error = {}", f(max_err))?;
    if soft {
        writeln!(
            out,
            "warning: relative tolerance {} is looser than {SOFT_MODE_TOLERANCE:e}; plane-wave agreement reported but not enforced (soft mode)",
            settings.relative_tolerance
        )?;
    }
    if pw_ok {
        writeln!(out, "plane_wave: PASS")?;
    } else if soft {
        writeln!(out, "plane_wave: DEGRADED")?;
    } else {
        writeln!(out, "plane_wave: FAIL")?;
        pass = false;
    }

    writeln!(out, "== Jacobi-Anger: time average vs J0 (tolerance {JACOBI_ANGER_TOLERANCE:e}) ==")?;
    let ja = jacobi_anger_check()?;
    writeln!(out, "jacobi_anger_max_error = {}", f(ja))?;
    if ja <= JACOBI_ANGER_TOLERANCE {
        writeln!(out, "jacobi_anger: PASS")?;
    } else {
        writeln!(out, "jacobi_anger: FAIL")?;
        pass = false;
    }

    writeln!(out, "== Gaussian beam: diagnostic — no hard tolerance ==")?;
    writeln!(out, "sigma_over_d,numeric_abs_C,closed_abs_C,ratio")?;
    for (k, num, closed, ratio) in gaussian_rows(&r, amplitude, omega, settings) {
        writeln!(out, "{},{num},{},{ratio}", f(k), f(closed))?;
    }

    write_warnings(out, &r.warnings)?;
    writeln!(out, "overall: {}", if pass { "PASS" } else { "FAIL" })?;
    Ok(if pass { Outcome::Success } else { Outcome::ValidationFailed })
}

/// Thomson mean free path, photon density and scattering estimate.
pub fn cmd_mfp(config: &RunConfig, flux: Option<f64>, wavelength_um: Option<f64>, out: &mut dyn Write) -> Result<Outcome> {
    let flux = match flux {
        Some(f) => f,
        None => match (config.field.flux_W_cm2, config.field.amplitude_V_m) {
            (Some(f), _) => f,
            (None, Some(a)) => units::energy_density_natural_to_flux(energy_density_from_amplitude(
                units::field_amplitude_to_natural(a)?,
            )?)?,
            (None, None) => return Err(Error::Config("mfp needs --flux or a field intensity in the config".into())),
        },
    };
    let lambda = wavelength_um
        .or(config.field.wavelength_um)
        .ok_or_else(|| Error::Config("mfp needs --wavelength or `wavelength_um` in the config".into()))?;
    let mfp = closedform::thomson_mfp(flux, lambda)?;
    let n = closedform::photon_density_lab(flux, lambda)?;
    let mut scenario = config.scenario();
    scenario.field.kind = crate::scenario::FieldKind::Null;
    let path = units::length_from_natural(scenario.resolve()?.geom.path_length())?;
    writeln!(out, "flux_W_cm2 = {}", f(flux))?;
    writeln!(out, "wavelength_um = {}", f(lambda))?;
    writeln!(out, "mean_free_path_m = {}", f(mfp))?;
    writeln!(out, "photon_density_m3 = {}", f(n))?;
    writeln!(out, "path_length_m = {}", f(path))?;
    writeln!(out, "scattering_probability = {}", f(closedform::scattering_probability(path, mfp)?))?;
    Ok(Outcome::Success)
}

/// Names accepted by `eval`.
pub const EVAL_NAMES: [&str; 7] = [
    "planewave_C",
    "planewave_C2_averaged",
    "planewave_C2_parametric",
    "energy_density_from_amplitude",
    "gaussian_C",
    "photon_density",
    "thomson_mfp",
];

/// One closed-form expression evaluated on the configured scenario.
pub fn cmd_eval(config: &RunConfig, name: &str, out: &mut dyn Write) -> Result<Outcome> {
    let r = resolve(config)?;
    let amplitude = r.field.amplitude();
    let omega = r.field.omega();
    let rho = energy_density_from_amplitude(amplitude)?;
    let lambda = config.field.wavelength_um;
    let need_lambda = || lambda.ok_or_else(|| Error::Config("`wavelength_um` is required".into()));
    let sigma = match r.field {
        Field::GaussianBeam(b) => Some(b.sigma),
        _ => None,
    };
    let value = match name {
        "planewave_C" => planewave_c(&PlaneWaveScenario::new(r.geom, amplitude, omega)?),
        "planewave_C2_averaged" => planewave_c2_averaged(&r.geom, rho, omega)?,
        "planewave_C2_parametric" => {
            let p = planewave_c2_parametric(r.kinetic_kev, r.flux_w_cm2, config.scenario().separation_ratio(), need_lambda()?)?;
            if p.ratio_warning {
                writeln!(out, "warning: 2c/s > 1 is outside the trapezoid geometry")?;
            }
            p.value
        }
        "energy_density_from_amplitude" => rho,
        "gaussian_C" => {
            let sigma = sigma.ok_or_else(|| Error::Config("gaussian_C needs a gaussian_beam field".into()))?;
            let g = gaussian_c(&GaussianScenario::new(r.geom, amplitude, omega, sigma)?);
            g.value
        }
        "photon_density" => closedform::photon_density(rho, omega)?,
        "thomson_mfp" => closedform::thomson_mfp(r.flux_w_cm2, need_lambda()?)?,
        other => {
            return Err(Error::Config(format!(
                "unknown eval target `{other}`; expected one of {}",
                EVAL_NAMES.join(", ")
            )))
        }
    };
    writeln!(out, "{name} = {}", f(value))?;
    write_warnings(out, &r.warnings)?;
    Ok(Outcome::Success)
}
