//! Numerical Aharonov-Bohm phase amplitude.
//!
//! C = e ∫ dt e^{-iωt} ∫_{z_lower(t)}^{z_upper(t)} dz E(x(t), 0, z) e^{ik·0},
//! integrated over the surface swept by equal-time chords between the arms.
//! The instantaneous phase for emission time t0 is Re[C e^{-iωt0}].
//!
//! Time integration: composite Gauss-Legendre panels between the arm
//! breakpoints, refined by panel doubling until two levels agree. Panel sums
//! are reduced in a fixed order with compensated summation, so the result does
//! not depend on the rayon thread count.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::FieldConfig;
use crate::geometry::TrajectoryPair;
use crate::quadrature::{adaptive_simpson, ComplexNeumaierSum, GaussLegendre, NeumaierSum};
use crate::units::elementary_charge_natural;

/// Gauss-Legendre nodes per time panel.
const PANEL_NODES: usize = 8;

/// Above this ratio of ∫|integrand| to |C| the cancellation warning is raised.
pub const CANCELLATION_WARNING_RATIO: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub relative_tolerance: f64,
    /// Minimum number of time panels per field period.
    pub min_samples_per_period: usize,
    /// Maximum number of panel doublings.
    pub max_subdivisions: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            relative_tolerance: 1e-9,
            min_samples_per_period: 64,
            max_subdivisions: 12,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance.is_finite() && self.relative_tolerance > 0.0) {
            return Err(Error::domain(format!(
                "relative tolerance must be positive, got {}",
                self.relative_tolerance
            )));
        }
        if self.min_samples_per_period < 8 {
            return Err(Error::domain(format!(
                "need at least 8 samples per period, got {}",
                self.min_samples_per_period
            )));
        }
        Ok(())
    }
}

/// C = A + iB with quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    pub c: Complex64,
    pub a: f64,
    pub b: f64,
    pub quadrature_error_estimate: f64,
    pub nodes_used: usize,
    /// e ∫|integrand| / |C|; large values mean heavy cancellation between regions.
    pub cancellation_ratio: f64,
}

impl PhaseResult {
    pub fn new(c: Complex64) -> Self {
        PhaseResult {
            c,
            a: c.re,
            b: c.im,
            quadrature_error_estimate: 0.0,
            nodes_used: 0,
            cancellation_ratio: 1.0,
        }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0))
    }

    pub fn abs(&self) -> f64 {
        self.c.norm()
    }

    pub fn cancellation_warning(&self) -> bool {
        self.cancellation_ratio > CANCELLATION_WARNING_RATIO
    }
}

struct SurfaceIntegral {
    value: Complex64,
    error: f64,
    nodes: usize,
    mass: f64,
}

/// ∫ dt e^{-iωt} ∫ dz phasor over the surface, without the charge factor.
fn integrate_surface(
    pair: &TrajectoryPair,
    field: &dyn FieldConfig,
    omega: f64,
    settings: &QuadratureSettings,
) -> std::result::Result<SurfaceIntegral, SurfaceIntegral> {
    let rule = GaussLegendre::new(PANEL_NODES);
    let breaks = pair.breakpoints();
    let base_panels: Vec<usize> = breaks
        .windows(2)
        .map(|w| {
            let periods = (w[1] - w[0]) * omega / TAU;
            ((settings.min_samples_per_period as f64 * periods).ceil() as usize).max(1)
        })
        .collect();
    let inner_tol = settings.relative_tolerance * 1e-3;

    let level = |k: u32| -> (Complex64, f64, usize) {
        let mult = 1usize << k;
        let panels: Vec<(f64, f64)> = breaks
            .windows(2)
            .zip(&base_panels)
            .flat_map(|(w, &n)| {
                let n = n * mult;
                let h = (w[1] - w[0]) / n as f64;
                (0..n).map(move |i| {
                    let a = w[0] + h * i as f64;
                    let b = if i + 1 == n { w[1] } else { w[0] + h * (i + 1) as f64 };
                    (a, b)
                })
            })
            .collect();
        let contributions: Vec<(Complex64, f64)> = panels
            .par_iter()
            .map(|&(a, b)| {
                let mut sum = ComplexNeumaierSum::default();
                let mut mass = NeumaierSum::new();
                for (t, w) in rule.mapped(a, b) {
                    let chord = pair
                        .chord_at(t.clamp(pair.start_time(), pair.end_time()))
                        .expect("node inside flight interval");
                    let inner = adaptive_simpson(
                        |z| field.phasor(chord.x_common, 0.0, z),
                        chord.z_lower,
                        chord.z_upper,
                        inner_tol,
                        0.0,
                    )
                    .value;
                    let osc = if omega == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::from_polar(1.0, -omega * t)
                    };
                    sum.add(inner * osc * w);
                    mass.add(inner.norm() * w.abs());
                }
                (sum.value(), mass.value())
            })
            .collect();
        let mut total = ComplexNeumaierSum::default();
        let mut mass = NeumaierSum::new();
        for (z, m) in &contributions {
            total.add(*z);
            mass.add(*m);
        }
        (total.value(), mass.value(), panels.len() * PANEL_NODES)
    };

    let (mut prev, _, mut nodes) = level(0);
    let mut best = SurfaceIntegral {
        value: prev,
        error: f64::INFINITY,
        nodes,
        mass: 0.0,
    };
    for k in 1..=settings.max_subdivisions.max(1) {
        let (cur, mass, n) = level(k);
        nodes += n;
        let err = (cur - prev).norm();
        best = SurfaceIntegral {
            value: cur,
            error: err,
            nodes,
            mass,
        };
        let floor = 64.0 * f64::EPSILON * mass;
        if err <= settings.relative_tolerance * cur.norm() + floor {
            return Ok(best);
        }
        prev = cur;
    }
    Err(best)
}

/// Numerical C for an oscillating field.
pub fn compute_c(pair: &TrajectoryPair, field: &dyn FieldConfig, settings: &QuadratureSettings) -> Result<PhaseResult> {
    settings.validate()?;
    if field.is_null() {
        return Ok(PhaseResult::zero());
    }
    let omega = field.omega();
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::StaticField { omega });
    }
    let e = elementary_charge_natural();
    let finish = |s: SurfaceIntegral| {
        let c = s.value * e;
        let norm = c.norm();
        PhaseResult {
            c,
            a: c.re,
            b: c.im,
            quadrature_error_estimate: e * s.error,
            nodes_used: s.nodes,
            cancellation_ratio: if norm > 0.0 { e * s.mass / norm } else { f64::INFINITY },
        }
    };
    match integrate_surface(pair, field, omega, settings) {
        Ok(s) => Ok(finish(s)),
        Err(s) => Err(Error::Quadrature {
            best: Box::new(finish(s)),
        }),
    }
}

/// ϑ(t0) = Re[C e^{-iωt0}] = A cos ωt0 + B sin ωt0.
pub fn phase_at_emission(result: &PhaseResult, omega: f64, t0: f64) -> f64 {
    let (s, c) = (omega * t0).sin_cos();
    result.a * c + result.b * s
}

/// Phase shift e ∬ dt dz E for a time-independent field.
///
/// The field's frequency is ignored: its envelope is treated as static, so
/// there is no emission-time dependence and no contrast loss.
pub fn static_phase(pair: &TrajectoryPair, field: &dyn FieldConfig, settings: &QuadratureSettings) -> Result<f64> {
    settings.validate()?;
    if field.is_null() {
        return Ok(0.0);
    }
    let e = elementary_charge_natural();
    match integrate_surface(pair, field, 0.0, settings) {
        Ok(s) => Ok(e * s.value.re),
        Err(s) => Err(Error::Quadrature {
            best: Box::new(PhaseResult {
                quadrature_error_estimate: e * s.error,
                nodes_used: s.nodes,
                ..PhaseResult::new(s.value * e)
            }),
        }),
    }
}
