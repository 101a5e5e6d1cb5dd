use std::f64::consts::PI;

use crate::error::{Flag, Flagged};
use crate::field::WaveField;
use crate::quadrature::{composite, rule8};
use crate::well::{ClassicalPoint, PotentialWell};
use crate::wkb::{envelope_at, EnvelopeField, SuperpositionSpec};

/// Densities below this fraction of the field's density scale are nodes.
pub const NODE_THRESHOLD: f64 = 1e-12;
/// Default classicality cut on ½(ρ₊/ρ₋ + ρ₋/ρ₊).
pub const DEFAULT_CLASSICALITY_THRESHOLD: f64 = 50.0;

/// ħ Im(ψ* ∂ₓψ) / (m |ψ|²).
pub fn bohm_velocity_exact<F: WaveField + ?Sized>(field: &F, x: f64, t: f64) -> Flagged<f64> {
    let (psi, dpsi) = field.evaluate(x, t)?;
    let density = psi.norm_sqr();
    if !(density >= NODE_THRESHOLD * field.node_scale()) {
        return Err(Flag::Node);
    }
    Ok(field.hbar() * (psi.conj() * dpsi).im / (field.mass() * density))
}

/// Envelopes and classical data needed by the semiclassical formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkbLocal {
    pub point: ClassicalPoint,
    pub envelope: EnvelopeField,
    pub classical_speed: f64,
    pub hbar: f64,
}

impl WkbLocal {
    pub fn at(spec: &SuperpositionSpec, well: &PotentialWell, x: f64, t: f64) -> Flagged<Self> {
        let point = spec.locate(well, x)?;
        Ok(WkbLocal {
            envelope: envelope_at(spec, well, &point, t),
            classical_speed: point.momentum / well.mass(),
            hbar: well.hbar(),
            point,
        })
    }

    pub fn density(&self) -> f64 {
        self.envelope.density(self.point.action, self.hbar)
    }

    /// v_cl (ρ₊ − ρ₋) / density, flagged below `node_floor`.
    pub fn velocity(&self, node_floor: f64) -> Flagged<f64> {
        let density = self.density();
        if !(density >= node_floor) || density <= 0.0 {
            return Err(Flag::Node);
        }
        let env = &self.envelope;
        Ok(self.classical_speed * (env.rho_plus - env.rho_minus) / density)
    }
}

/// Semiclassical Bohmian velocity v_cl (ρ₊ − ρ₋)/(ρ₊ + ρ₋ − 2√(ρ₊ρ₋) cos(2S/ħ + φ₊ − φ₋)).
pub fn bohm_velocity_wkb(spec: &SuperpositionSpec, well: &PotentialWell, x: f64, t: f64) -> Flagged<f64> {
    WkbLocal::at(spec, well, x, t)?.velocity(NODE_THRESHOLD * spec.node_scale())
}

/// (v₋, v₊) = v_cl (√ρ₊ ∓ √ρ₋)/(√ρ₊ ± √ρ₋), the bounds between which the
/// semiclassical velocity oscillates; |v₋| ≤ |v₊| and v₋v₊ = v_cl².
pub fn extremal_from_densities(rho_plus: f64, rho_minus: f64, classical_speed: f64) -> Flagged<(f64, f64)> {
    let (a, b) = (rho_plus.sqrt(), rho_minus.sqrt());
    if a + b == 0.0 {
        return Err(Flag::Node);
    }
    if a == b {
        return Err(Flag::EqualDensities);
    }
    Ok((
        classical_speed * (a - b) / (a + b),
        classical_speed * (a + b) / (a - b),
    ))
}

pub fn extremal_velocities(spec: &SuperpositionSpec, well: &PotentialWell, x: f64, t: f64) -> Flagged<(f64, f64)> {
    let local = WkbLocal::at(spec, well, x, t)?;
    extremal_from_densities(
        local.envelope.rho_plus,
        local.envelope.rho_minus,
        local.classical_speed,
    )
}

/// ½(ρ₊/ρ₋ + ρ₋/ρ₊); +∞ when exactly one density vanishes.
pub fn classicality_measure(rho_plus: f64, rho_minus: f64) -> Flagged<f64> {
    match (rho_plus > 0.0, rho_minus > 0.0) {
        (true, true) => Ok(0.5 * (rho_plus / rho_minus + rho_minus / rho_plus)),
        (false, false) => Err(Flag::Node),
        _ => Ok(f64::INFINITY),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classicality {
    pub measure: f64,
    pub is_classical: bool,
}

pub fn classicality(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    x: f64,
    t: f64,
    threshold: f64,
) -> Flagged<Classicality> {
    let local = WkbLocal::at(spec, well, x, t)?;
    let measure = classicality_measure(local.envelope.rho_plus, local.envelope.rho_minus)?;
    Ok(Classicality {
        measure,
        is_classical: measure >= threshold,
    })
}

/// Probability carried by points whose classicality measure is below the
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonclassicalReport {
    /// Nonclassical mass over the full mean-density mass Σ|c_r|².
    pub probability: f64,
    /// Nonclassical mass over the mass outside the turning-point zones.
    pub interior_probability: f64,
    /// ∫ρ̄ outside the zones.
    pub interior_mass: f64,
    /// Mean-density mass inside the zones, not evaluated.
    pub excluded_mass: f64,
}

/// Integrates ρ̄ and ρ̄·[measure < threshold] over the evaluable interval
/// with `panels` 8-point Gauss panels.
pub fn nonclassical_probability(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    t: f64,
    threshold: f64,
    panels: usize,
) -> NonclassicalReport {
    let (lo, hi) = spec.interior();
    let total: f64 = spec.coefficients().iter().map(|c| c.norm_sqr()).sum();
    if !(hi > lo) {
        return NonclassicalReport {
            probability: 0.0,
            interior_probability: 0.0,
            interior_mass: 0.0,
            excluded_mass: total,
        };
    }
    let [mass, nonclassical] = composite(rule8(), lo, hi, panels, |x| {
        let Ok(local) = WkbLocal::at(spec, well, x, t) else {
            return [0.0, 0.0];
        };
        let env = local.envelope;
        let flag = match classicality_measure(env.rho_plus, env.rho_minus) {
            Ok(m) if m < threshold => 1.0,
            _ => 0.0,
        };
        [env.rho_bar, env.rho_bar * flag]
    });
    NonclassicalReport {
        probability: nonclassical / total,
        interior_probability: if mass > 0.0 { nonclassical / mass } else { 0.0 },
        interior_mass: mass,
        excluded_mass: (total - mass).max(0.0),
    }
}

/// Frozen-envelope parameters of the motion near (x₀, t₀).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMotionParams {
    /// ½ ln(ρ₊/ρ₋)
    pub chi0: f64,
    /// 2S(x₀)/ħ + φ₊ − φ₋
    pub phi0: f64,
    /// h / p(x₀)
    pub lambda0: f64,
    pub v_cl0: f64,
    pub x0: f64,
    pub t0: f64,
}

impl LocalMotionParams {
    /// Parameters chosen directly, anchored at x₀ = t₀ = 0.
    pub fn synthetic(chi0: f64, phi0: f64, lambda0: f64, v_cl0: f64) -> Self {
        LocalMotionParams {
            chi0,
            phi0,
            lambda0,
            v_cl0,
            x0: 0.0,
            t0: 0.0,
        }
    }

    /// v sinh χ₀ / (cosh χ₀ − cos(φ₀ + 4π(x − x₀)/λ₀)).
    pub fn velocity(&self, x: f64) -> f64 {
        let phase = self.phi0 + 4.0 * PI * (x - self.x0) / self.lambda0;
        self.v_cl0 * self.chi0.sinh() / (self.chi0.cosh() - phase.cos())
    }

    /// v tanh χ₀, the mean speed over one wavelength.
    pub fn mean_velocity(&self) -> f64 {
        self.v_cl0 * self.chi0.tanh()
    }

    /// λ₀ cosh χ₀ / (v sinh χ₀), the time to cross one wavelength.
    pub fn crossing_time(&self) -> f64 {
        self.lambda0 / self.mean_velocity().abs()
    }

    /// v coth(χ₀/2), the largest speed reached.
    pub fn peak_velocity(&self) -> f64 {
        self.v_cl0 / (0.5 * self.chi0).tanh()
    }

    /// Fraction of time spent below the mean speed, 1/2 + 1/(π cosh χ₀).
    pub fn slow_fraction(&self) -> f64 {
        0.5 + 1.0 / (PI * self.chi0.cosh())
    }
}

pub fn local_params(spec: &SuperpositionSpec, well: &PotentialWell, x0: f64, t0: f64) -> Flagged<LocalMotionParams> {
    let local = WkbLocal::at(spec, well, x0, t0)?;
    let env = local.envelope;
    if !(env.rho_plus > 0.0 && env.rho_minus > 0.0) {
        return Err(Flag::OneSided);
    }
    let phi0 = env
        .interference_phase(local.point.action, local.hbar)
        .ok_or(Flag::OneSided)?;
    Ok(LocalMotionParams {
        chi0: 0.5 * (env.rho_plus / env.rho_minus).ln(),
        phi0,
        lambda0: well.planck() / local.point.momentum,
        v_cl0: local.classical_speed,
        x0,
        t0,
    })
}

/// Residual of the implicit local solution,
/// [Δx − (λ₀ sech χ₀/4π)(sin(φ₀ + 4πΔx/λ₀) − sin φ₀) − v tanh χ₀ Δt] / λ₀.
pub fn local_trajectory_residual(params: &LocalMotionParams, x: f64, t: f64) -> f64 {
    let dx = x - params.x0;
    let dt = t - params.t0;
    let k = 4.0 * PI / params.lambda0;
    let wobble = ((params.phi0 + k * dx).sin() - params.phi0.sin()) / (k * params.chi0.cosh());
    (dx - wobble - params.mean_velocity() * dt) / params.lambda0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussianWave;
    use crate::wkb::CoefficientPreset;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn harmonic() -> PotentialWell {
        PotentialWell::harmonic(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn plane_phase_velocity() {
        let wave = GaussianWave {
            center: 0.3,
            momentum: 2.5,
            width: 0.7,
            hbar: 1.0,
            mass: 2.0,
        };
        for x in [-0.5, 0.3, 1.1] {
            assert_relative_eq!(bohm_velocity_exact(&wave, x, 0.0).unwrap(), 1.25, max_relative = 1e-13);
        }
    }

    #[test]
    fn right_mover_hook() {
        let point = ClassicalPoint {
            x: 0.0,
            momentum: 3.0,
            time: 0.0,
            action: 1.0,
        };
        let local = WkbLocal {
            point,
            envelope: EnvelopeField::from_amplitudes(Complex64::new(0.2, 0.1), Complex64::new(0.0, 0.0)),
            classical_speed: 3.0,
            hbar: 1.0,
        };
        assert_relative_eq!(local.velocity(0.0).unwrap(), 3.0, max_relative = 1e-14);
        assert_eq!(extremal_from_densities(0.05, 0.0, 3.0), Ok((3.0, 3.0)));
    }

    #[test]
    fn balanced_quadrature_point_has_zero_velocity() {
        // ρ₊ = ρ₋ and cos = 0
        let g = Complex64::new(0.3, 0.0);
        let local = WkbLocal {
            point: ClassicalPoint {
                x: 0.0,
                momentum: 1.0,
                time: 0.0,
                action: PI / 4.0,
            },
            envelope: EnvelopeField::from_amplitudes(g, g),
            classical_speed: 1.0,
            hbar: 1.0,
        };
        assert!(local.velocity(0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn extremal_examples() {
        let (lo, hi) = extremal_from_densities((0.02f64).exp(), 1.0, 1.0).unwrap();
        assert_relative_eq!(hi, 1.0 / 0.005f64.tanh(), max_relative = 1e-10);
        assert_relative_eq!(lo * hi, 1.0, max_relative = 1e-12);
        assert_eq!(extremal_from_densities(0.5, 0.5, 1.0), Err(Flag::EqualDensities));
    }

    #[test]
    fn classicality_examples() {
        assert_eq!(classicality_measure(1.0, 1.0), Ok(1.0));
        assert_relative_eq!(classicality_measure(100.0, 1.0).unwrap(), 50.005, epsilon = 1e-12);
        let m = classicality_measure(0.02f64.exp(), 1.0).unwrap();
        assert_relative_eq!(m, 1.0002, epsilon = 1e-6);
        assert_eq!(classicality_measure(1.0, 0.0), Ok(f64::INFINITY));
    }

    #[test]
    fn chi_from_density_ratio() {
        assert_relative_eq!(0.5 * 1.02f64.ln(), 0.0099, epsilon = 1e-4);
    }

    #[test]
    fn eigenstate_is_entirely_nonclassical() {
        let w = harmonic();
        let spec = SuperpositionSpec::eigenstate(&w, 60).unwrap();
        let report = nonclassical_probability(&spec, &w, 0.3, 50.0, 400);
        assert_relative_eq!(report.interior_probability, 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            report.interior_mass + report.excluded_mass,
            1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn moving_packet_is_classical() {
        let w = harmonic();
        let c = CoefficientPreset::mid_well_packet(10).coefficients(10).unwrap();
        let spec = SuperpositionSpec::new(&w, 120, 10, c).unwrap();
        let report = nonclassical_probability(&spec, &w, 0.0, 50.0, 400);
        assert!(report.probability < 0.05, "{report:?}");
        assert!(report.excluded_mass < 1e-3);
    }

    #[test]
    fn residual_vanishes_at_start_and_after_a_wavelength() {
        let p = LocalMotionParams::synthetic(0.01, 0.3, 1.0, 1.0);
        assert_eq!(local_trajectory_residual(&p, 0.0, 0.0), 0.0);
        let t = 0.01f64.cosh() / 0.01f64.sinh();
        assert!(local_trajectory_residual(&p, 1.0, t).abs() < 1e-12);
    }

    #[test]
    fn local_params_from_packet() {
        let w = harmonic();
        let c = CoefficientPreset::mid_well_packet(10).coefficients(10).unwrap();
        let spec = SuperpositionSpec::new(&w, 120, 10, c).unwrap();
        let params = local_params(&spec, &w, 1.0, 0.0).unwrap();
        let p = w.classical_momentum(spec.level().energy, 1.0).unwrap();
        assert_relative_eq!(params.lambda0, 2.0 * PI / p, max_relative = 1e-12);
        assert!(params.chi0 > 1.0);
        let eig = SuperpositionSpec::eigenstate(&w, 120).unwrap();
        assert!(local_params(&eig, &w, 1.0, 0.0).unwrap().chi0.abs() < 1e-12);
    }
}
