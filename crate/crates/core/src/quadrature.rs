//! Gauss–Legendre rules and composite integration.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Single-panel integral of `f` over [a, b].
    pub fn integrate<T: Accumulate, F: FnMut(f64) -> T>(&self, a: f64, b: f64, mut f: F) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc.add_scaled(f(mid + half * z), w * half);
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

static RULE_8: OnceLock<GaussLegendre> = OnceLock::new();
static RULE_20: OnceLock<GaussLegendre> = OnceLock::new();

/// Shared 8-point rule, used for oscillatory integrands on short panels.
pub fn rule8() -> &'static GaussLegendre {
    RULE_8.get_or_init(|| GaussLegendre::new(8))
}

/// Shared 20-point rule, used for smooth integrands.
pub fn rule20() -> &'static GaussLegendre {
    RULE_20.get_or_init(|| GaussLegendre::new(20))
}

/// Values that can be summed with real weights.
pub trait Accumulate: Copy {
    fn zero() -> Self;
    fn add_scaled(self, other: Self, w: f64) -> Self;
    fn magnitude(&self) -> f64;
}

impl Accumulate for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(self, other: Self, w: f64) -> Self {
        self + other * w
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Accumulate for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(self, other: Self, w: f64) -> Self {
        self + other * w
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl<const N: usize> Accumulate for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add_scaled(mut self, other: Self, w: f64) -> Self {
        for (s, o) in self.iter_mut().zip(other) {
            *s += o * w;
        }
        self
    }
    fn magnitude(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Composite rule with `panels` equal panels over [a, b].
pub fn composite<T: Accumulate, F: FnMut(f64) -> T>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> T {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut acc = T::zero();
    for k in 0..panels {
        let lo = a + width * k as f64;
        let hi = if k + 1 == panels { b } else { lo + width };
        acc = acc.add_scaled(rule.integrate(lo, hi, &mut f), 1.0);
    }
    acc
}

/// Composite integral whose panel width does not exceed `max_panel`.
pub fn composite_max_width<T: Accumulate, F: FnMut(f64) -> T>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    max_panel: f64,
    f: F,
) -> T {
    let panels = ((b - a).abs() / max_panel).ceil().max(1.0) as usize;
    composite(rule, a, b, panels, f)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

const ROUNDOFF_PANELS: usize = 128;
const ROUNDOFF_REL: f64 = 1e-10;

/// Doubles the panel count of a 20-point composite rule until two
/// successive estimates agree to `rel_tol` (or `abs_tol`).
pub fn adaptive<T: Accumulate, F: FnMut(f64) -> T>(
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    mut f: F,
) -> Result<Estimate<T>> {
    let rule = rule20();
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            error: 0.0,
        });
    }
    let mut panels = 2;
    let mut previous = composite(rule, a, b, 1, &mut f);
    let mut previous_diff = f64::INFINITY;
    loop {
        let current = composite(rule, a, b, panels, &mut f);
        let diff = current.add_scaled(previous, -1.0).magnitude();
        let scale = current.magnitude();
        // Past ROUNDOFF_PANELS a difference that no longer halves is
        // rounding noise in the integrand, not truncation error.
        let plateau = panels >= ROUNDOFF_PANELS && diff <= ROUNDOFF_REL * scale && diff > 0.5 * previous_diff;
        if diff <= rel_tol * scale || diff <= abs_tol || plateau {
            return Ok(Estimate {
                value: current,
                error: diff,
            });
        }
        previous_diff = diff;
        if panels >= 4096 {
            return Err(Error::QuadratureNonConvergence {
                value: scale,
                error_estimate: diff,
            });
        }
        previous = current;
        panels *= 2;
    }
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid_uniform(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dx * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// Cumulative trapezoid integral; first entry is zero.
pub fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * dx * (values[i - 1] + v);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 8, 20, 33] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert_relative_eq!(s, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(8);
        let integral = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert_relative_eq!(integral, 2f64.powi(16) / 16.0, max_relative = 1e-13);
    }

    #[test]
    fn adaptive_oscillatory() {
        let est = adaptive(0.0, 50.0, 1e-13, 0.0, |x: f64| (3.0 * x).cos()).unwrap();
        assert_relative_eq!(est.value, (150.0f64).sin() / 3.0, max_relative = 1e-11);
    }

    #[test]
    fn adaptive_complex_and_vector() {
        let est = adaptive(0.0, 1.0, 1e-14, 0.0, |x: f64| [x, x * x]).unwrap();
        assert_relative_eq!(est.value[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(est.value[1], 1.0 / 3.0, epsilon = 1e-14);
        let c = adaptive(0.0, std::f64::consts::PI, 1e-13, 0.0, |x: f64| {
            Complex64::new(0.0, x).exp()
        })
        .unwrap();
        assert!((c.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn trapezoid_helpers() {
        let v = [0.0, 1.0, 2.0, 3.0];
        assert_relative_eq!(trapezoid_uniform(&v, 1.0), 4.5);
        assert_eq!(cumulative_trapezoid(&v, 1.0), vec![0.0, 0.5, 2.0, 4.5]);
    }
}
