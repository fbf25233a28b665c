//! Small numeric kernels shared by the phase engine and the contrast oracles:
//! compensated summation, Gauss-Legendre rules and adaptive Simpson.

use std::ops::AddAssign;

use num_complex::Complex64;

/// Kahan-Babuska-Neumaier running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated sum over complex values, real and imaginary parts separately.
#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexNeumaierSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexNeumaierSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexNeumaierSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexNeumaierSum::default();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Tricomi initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// (node, weight) pairs mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b)
            .map(|(t, w)| w * f(t))
            .collect::<NeumaierSum>()
            .value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of [`adaptive_simpson`].
#[derive(Debug, Clone, Copy)]
pub struct SimpsonResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// False when some interval hit the depth limit before meeting its tolerance.
    pub converged: bool,
}

const SIMPSON_MAX_DEPTH: u32 = 40;

/// Adaptive Simpson quadrature of a complex integrand on [a, b].
///
/// Stops when the Richardson difference on every subinterval is below its
/// share of `rel_tol * |whole-interval estimate| + abs_floor`.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_floor: f64) -> SimpsonResult
where
    F: FnMut(f64) -> Complex64,
{
    if a == b {
        return SimpsonResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = rel_tol * whole.norm() + abs_floor;
    let mut state = SimpsonState {
        evaluations: 3,
        error: 0.0,
        converged: true,
        sum: ComplexNeumaierSum::default(),
    };
    simpson_step(&mut f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH, &mut state);
    SimpsonResult {
        value: state.sum.value(),
        error_estimate: state.error,
        evaluations: state.evaluations,
        converged: state.converged,
    }
}

struct SimpsonState {
    evaluations: usize,
    error: f64,
    converged: bool,
    sum: ComplexNeumaierSum,
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    state: &mut SimpsonState,
) where
    F: FnMut(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    state.evaluations += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let err = delta.norm() / 15.0;
    if err <= tol || depth == 0 || (m - a).abs() <= f64::EPSILON * m.abs() {
        if err > tol {
            state.converged = false;
        }
        state.error += err;
        state.sum.add(left + right + delta / 15.0);
        return;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, state);
    simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, state);
}
