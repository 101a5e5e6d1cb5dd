//! Complex wave fields with spatial derivatives.

use num_complex::Complex64;

use crate::error::{Flag, Flagged};

/// A wavefunction ψ(x, t) that can be evaluated together with ∂ₓψ.
pub trait WaveField: Sync {
    /// (ψ, ∂ₓψ) at (x, t).
    fn evaluate(&self, x: f64, t: f64) -> Flagged<(Complex64, Complex64)>;

    /// Interval outside which the field is not evaluable.
    fn support(&self) -> (f64, f64);

    /// Smallest de Broglie wavelength present; sets quadrature and step scales.
    fn shortest_wavelength(&self) -> f64;

    fn hbar(&self) -> f64;

    fn mass(&self) -> f64;

    /// Density scale for node thresholds (an upper bound on |ψ|²).
    fn node_scale(&self) -> f64;
}

/// Static Gaussian f(x) e^{ipx/ħ} with f real, normalized:
/// (πw²)^{-1/4} exp(−(x−x₀)²/2w² + ip(x − x₀/2)/ħ).
///
/// With width `w` this is the coherent state |x₀, p⟩ of the same width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWave {
    pub center: f64,
    pub momentum: f64,
    pub width: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl GaussianWave {
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let d = x - self.center;
        let norm = (std::f64::consts::PI * self.width * self.width).powf(-0.25);
        let phase = self.momentum * (x - 0.5 * self.center) / self.hbar;
        Complex64::from_polar(norm * (-d * d / (2.0 * self.width * self.width)).exp(), phase)
    }
}

impl WaveField for GaussianWave {
    fn evaluate(&self, x: f64, _t: f64) -> Flagged<(Complex64, Complex64)> {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return Err(Flag::OutsideWell);
        }
        let psi = self.amplitude(x);
        let k = Complex64::new(
            -(x - self.center) / (self.width * self.width),
            self.momentum / self.hbar,
        );
        Ok((psi, psi * k))
    }

    fn support(&self) -> (f64, f64) {
        (self.center - 12.0 * self.width, self.center + 12.0 * self.width)
    }

    fn shortest_wavelength(&self) -> f64 {
        let k = self.momentum.abs() / self.hbar + 3.0 / self.width;
        std::f64::consts::TAU / k
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn node_scale(&self) -> f64 {
        1.0 / (std::f64::consts::PI.sqrt() * self.width)
    }
}
