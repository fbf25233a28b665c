//! Piecewise-linear spacetime paths of the two interferometer arms and the
//! equal-time chords spanning the surface between them.
//!
//! Convention: mean electron drift along x, arm separation along z (the
//! polarization axis of the applied field), everything in the y = 0 plane.
//! The middle of the interferometer sits at the spatial origin.

use crate::error::{Error, Result};

/// A spacetime event in natural units (eV^-1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        SpacetimePoint { t, x, y, z }
    }

    fn lerp(&self, other: &SpacetimePoint, t: f64) -> SpacetimePoint {
        if t == self.t {
            return *self;
        }
        if t == other.t {
            return *other;
        }
        let f = (t - self.t) / (other.t - self.t);
        SpacetimePoint {
            t,
            x: self.x + f * (other.x - self.x),
            y: self.y + f * (other.y - self.y),
            z: self.z + f * (other.z - self.z),
        }
    }
}

/// The three-segment arm shape: diverge, run parallel, converge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapezoidGeometry {
    /// Half of the maximum arm separation.
    pub half_separation_c: f64,
    /// Drift length of each slanted segment.
    pub longitudinal_l: f64,
    /// Half length of the parallel middle segment.
    pub half_middle_d: f64,
    /// Electron speed as a fraction of c.
    pub speed_v: f64,
}

impl TrapezoidGeometry {
    pub fn new(half_separation_c: f64, longitudinal_l: f64, half_middle_d: f64, speed_v: f64) -> Result<Self> {
        let g = TrapezoidGeometry {
            half_separation_c,
            longitudinal_l,
            half_middle_d,
            speed_v,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("half separation c", self.half_separation_c),
            ("longitudinal length l", self.longitudinal_l),
            ("half middle length d", self.half_middle_d),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Construction(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.speed_v > 0.0 && self.speed_v < 1.0) {
            return Err(Error::Construction(format!(
                "electron speed must lie in (0, 1), got {}",
                self.speed_v
            )));
        }
        Ok(())
    }

    /// Length of the slanted first and last segments.
    pub fn slant_length(&self) -> f64 {
        self.half_separation_c.hypot(self.longitudinal_l)
    }

    /// Flight time along one slanted segment.
    pub fn slant_time(&self) -> f64 {
        self.slant_length() / self.speed_v
    }

    /// Flight time along the middle segment.
    pub fn middle_time(&self) -> f64 {
        2.0 * self.half_middle_d / self.speed_v
    }

    pub fn total_time(&self) -> f64 {
        2.0 * self.slant_time() + self.middle_time()
    }

    /// Corner deflection angle arctan(c / l).
    pub fn opening_angle(&self) -> f64 {
        self.half_separation_c.atan2(self.longitudinal_l)
    }

    /// Spatial length of one arm.
    pub fn path_length(&self) -> f64 {
        2.0 * self.slant_length() + 2.0 * self.half_middle_d
    }
}

/// Two arms with common endpoints, parametrized by a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPair {
    upper: Vec<SpacetimePoint>,
    lower: Vec<SpacetimePoint>,
    speed_bound: f64,
}

/// One equal-time chord between the arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordSample {
    pub t: f64,
    pub x_common: f64,
    pub z_upper: f64,
    pub z_lower: f64,
}

const X_MATCH_TOL: f64 = 1e-12;

impl TrajectoryPair {
    /// Builds a pair from explicit vertex lists.
    ///
    /// Only pairs whose arms share x(t) at equal times are accepted, since
    /// the phase engine integrates along equal-time chords at fixed x.
    pub fn new(upper: Vec<SpacetimePoint>, lower: Vec<SpacetimePoint>, speed_bound: f64) -> Result<Self> {
        if !(speed_bound > 0.0 && speed_bound < 1.0) {
            return Err(Error::Construction(format!("speed bound must lie in (0, 1), got {speed_bound}")));
        }
        for (name, path) in [("upper", &upper), ("lower", &lower)] {
            if path.len() < 2 {
                return Err(Error::Construction(format!("{name} path needs at least two vertices")));
            }
            for p in path.iter() {
                if ![p.t, p.x, p.y, p.z].iter().all(|v| v.is_finite()) {
                    return Err(Error::Construction(format!("{name} path has a non-finite vertex")));
                }
                if p.y != 0.0 {
                    return Err(Error::Construction(format!("{name} path leaves the y = 0 plane")));
                }
            }
            let span = path[path.len() - 1].t - path[0].t;
            for w in path.windows(2) {
                let dt = w[1].t - w[0].t;
                if dt <= 0.0 {
                    return Err(Error::Construction(format!("{name} path vertex times must strictly increase")));
                }
                let dist = ((w[1].x - w[0].x).powi(2) + (w[1].z - w[0].z).powi(2)).sqrt();
                // vertex times carry rounding from sums of segment durations
                if dist > speed_bound * (dt * (1.0 + 1e-12) + 1e-12 * span) {
                    return Err(Error::Construction(format!(
                        "{name} path segment speed {} exceeds bound {speed_bound}",
                        dist / dt
                    )));
                }
            }
        }
        if upper[0] != lower[0] || upper[upper.len() - 1] != lower[lower.len() - 1] {
            return Err(Error::Construction("paths must share first and last vertices".into()));
        }
        let pair = TrajectoryPair {
            upper,
            lower,
            speed_bound,
        };
        let scale = pair
            .upper
            .iter()
            .chain(&pair.lower)
            .map(|p| p.x.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for t in pair.breakpoints() {
            let xu = interpolate(&pair.upper, t).x;
            let xl = interpolate(&pair.lower, t).x;
            if (xu - xl).abs() > X_MATCH_TOL * scale {
                return Err(Error::UnsupportedGeometry(format!(
                    "arms have different x at t = {t}: {xu} vs {xl}"
                )));
            }
        }
        Ok(pair)
    }

    pub fn upper(&self) -> &[SpacetimePoint] {
        &self.upper
    }

    pub fn lower(&self) -> &[SpacetimePoint] {
        &self.lower
    }

    pub fn speed_bound(&self) -> f64 {
        self.speed_bound
    }

    pub fn start_time(&self) -> f64 {
        self.upper[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.upper[self.upper.len() - 1].t
    }

    pub fn total_time(&self) -> f64 {
        self.end_time() - self.start_time()
    }

    /// Sorted union of the vertex times of both arms.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.upper.iter().chain(&self.lower).map(|p| p.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    /// Exchanges the roles of the arms, reversing the loop orientation.
    pub fn swapped(&self) -> TrajectoryPair {
        TrajectoryPair {
            upper: self.lower.clone(),
            lower: self.upper.clone(),
            speed_bound: self.speed_bound,
        }
    }

    /// The same pair emitted `dt` later.
    pub fn delayed(&self, dt: f64) -> TrajectoryPair {
        let shift = |p: &SpacetimePoint| SpacetimePoint { t: p.t + dt, ..*p };
        TrajectoryPair {
            upper: self.upper.iter().map(shift).collect(),
            lower: self.lower.iter().map(shift).collect(),
            speed_bound: self.speed_bound,
        }
    }

    pub fn chord_at(&self, t: f64) -> Result<ChordSample> {
        if !(t >= self.start_time() && t <= self.end_time()) {
            return Err(Error::domain(format!(
                "time {t} outside the flight interval [{}, {}]",
                self.start_time(),
                self.end_time()
            )));
        }
        let u = interpolate(&self.upper, t);
        let l = interpolate(&self.lower, t);
        let scale = u.x.abs().max(l.x.abs()).max(self.max_abs_x()).max(f64::MIN_POSITIVE);
        if (u.x - l.x).abs() > X_MATCH_TOL * scale {
            return Err(Error::UnsupportedGeometry(format!(
                "arms have different x at t = {t}: {} vs {}",
                u.x, l.x
            )));
        }
        Ok(ChordSample {
            t,
            x_common: u.x,
            z_upper: u.z,
            z_lower: l.z,
        })
    }

    fn max_abs_x(&self) -> f64 {
        self.upper.iter().map(|p| p.x.abs()).fold(0.0, f64::max)
    }

    /// Arm separation z_upper - z_lower as a piecewise-linear function of time.
    pub fn separation_profile(&self) -> SeparationProfile {
        let times = self.breakpoints();
        let separations = times
            .iter()
            .map(|&t| interpolate(&self.upper, t).z - interpolate(&self.lower, t).z)
            .collect();
        SeparationProfile { times, separations }
    }
}

/// Position on a piecewise-linear path; `t` is clamped to the path's span.
fn interpolate(path: &[SpacetimePoint], t: f64) -> SpacetimePoint {
    let i = path.partition_point(|p| p.t <= t);
    if i == 0 {
        return path[0];
    }
    if i >= path.len() {
        return path[path.len() - 1];
    }
    path[i - 1].lerp(&path[i], t)
}

/// Builds the arm pair for a trapezoid geometry.
///
/// Upper arm vertices sit at times (0, Θ, Θ+T, 2Θ+T) with z = (0, c, c, 0)
/// and x = (-(d+l), -d, d, d+l); the lower arm is its mirror in z.
pub fn build_trapezoid(geom: &TrapezoidGeometry) -> Result<TrajectoryPair> {
    geom.validate()?;
    let c = geom.half_separation_c;
    let l = geom.longitudinal_l;
    let d = geom.half_middle_d;
    let slant = geom.slant_time();
    let middle = geom.middle_time();
    if !(slant > 0.0 && middle > 0.0) {
        return Err(Error::Construction("segment flight times must be positive".into()));
    }
    let times = [0.0, slant, slant + middle, 2.0 * slant + middle];
    let xs = [-(d + l), -d, d, d + l];
    let arm = |sign: f64| -> Vec<SpacetimePoint> {
        let zs = [0.0, sign * c, sign * c, 0.0];
        (0..4).map(|i| SpacetimePoint::new(times[i], xs[i], 0.0, zs[i])).collect()
    };
    TrajectoryPair::new(arm(1.0), arm(-1.0), geom.speed_v)
}

/// Breakpoints and values of the piecewise-linear arm separation.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationProfile {
    pub times: Vec<f64>,
    pub separations: Vec<f64>,
}

impl SeparationProfile {
    pub fn slopes(&self) -> Vec<f64> {
        self.times
            .windows(2)
            .zip(self.separations.windows(2))
            .map(|(t, s)| (s[1] - s[0]) / (t[1] - t[0]))
            .collect()
    }

    pub fn max(&self) -> f64 {
        self.separations.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exact integral of the piecewise-linear profile.
    pub fn integral(&self) -> f64 {
        self.times
            .windows(2)
            .zip(self.separations.windows(2))
            .map(|(t, s)| 0.5 * (t[1] - t[0]) * (s[0] + s[1]))
            .sum()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&x| x <= t);
        if i == 0 {
            return self.separations[0];
        }
        if i >= self.times.len() {
            return self.separations[self.separations.len() - 1];
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (s0, s1) = (self.separations[i - 1], self.separations[i]);
        s0 + (t - t0) / (t1 - t0) * (s1 - s0)
    }
}
