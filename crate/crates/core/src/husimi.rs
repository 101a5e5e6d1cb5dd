//! Coherent states and the Husimi Q-function.
//!
//! Q_λ(x, p) = |⟨x, p|ψ⟩|²/h for Gaussian coherent states of width λ,
//! evaluated either by quadrature of the overlap or, for WKB
//! superpositions, in closed form.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::bohm::{bohm_velocity_exact, bohm_velocity_wkb, WkbLocal};
use crate::eigensolver::ExactSuperposition;
use crate::error::{Error, Flag, Result};
use crate::field::WaveField;
use crate::quadrature::{composite_max_width, rule20, rule8};
use crate::well::PotentialWell;
use crate::wkb::SuperpositionSpec;

/// Default ratio λ₊/λ₋ required for a nonempty classical window.
pub const WINDOW_FACTOR: f64 = 10.0;
/// Overlap integrals cover ±SUPPORT_WIDTHS·λ around the coherent state.
const SUPPORT_WIDTHS: f64 = 6.0;
/// Relative size of the integrand at a clipped window edge that counts as
/// truncation.
const TRUNCATION_TOLERANCE: f64 = 1e-16;
/// Deviations may rise by this fraction of the velocity scale between
/// successive λ and still count as decreasing.
pub const NOISE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentStateParams {
    pub x: f64,
    pub p: f64,
    pub lambda: f64,
}

impl CoherentStateParams {
    pub fn new(x: f64, p: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be positive and finite, got {lambda}"),
            });
        }
        if !(x.is_finite() && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "cs",
                reason: "phase-space point must be finite".into(),
            });
        }
        Ok(CoherentStateParams { x, p, lambda })
    }

    pub fn accuracy(&self, hbar: f64) -> AccuracyPair {
        AccuracyPair::new(self.lambda, hbar)
    }
}

/// Retrodictive position and momentum accuracies of a λ measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyPair {
    pub dx: f64,
    pub dp: f64,
}

impl AccuracyPair {
    pub fn new(lambda: f64, hbar: f64) -> Self {
        let dx = lambda / 2f64.sqrt();
        AccuracyPair { dx, dp: hbar / (2.0 * dx) }
    }

    pub fn product(&self) -> f64 {
        self.dx * self.dp
    }
}

/// ⟨x′|x, p⟩_λ = (πλ²)^{-1/4} exp(−(x′−x)²/2λ² + ipx′/ħ − ipx/2ħ).
pub fn coherent_wavefunction(cs: &CoherentStateParams, hbar: f64, x_prime: f64) -> Complex64 {
    let d = x_prime - cs.x;
    let norm = (PI * cs.lambda * cs.lambda).powf(-0.25);
    let envelope = norm * (-d * d / (2.0 * cs.lambda * cs.lambda)).exp();
    Complex64::from_polar(envelope, cs.p * (x_prime - 0.5 * cs.x) / hbar)
}

/// Quadrature nodes of ⟨x, p|ψ⟩ at fixed x, reusable across p.
struct OverlapKernel {
    nodes: Vec<f64>,
    weighted: Vec<Complex64>,
    x: f64,
    hbar: f64,
}

impl OverlapKernel {
    /// Nodes resolve the integrand for every |p| ≤ `p_max`.
    fn new<F: WaveField + ?Sized>(field: &F, x: f64, lambda: f64, t: f64, p_max: f64) -> Result<Self> {
        let hbar = field.hbar();
        let (lo, hi) = field.support();
        let a = (x - SUPPORT_WIDTHS * lambda).max(lo);
        let b = (x + SUPPORT_WIDTHS * lambda).min(hi);
        let mut kernel = OverlapKernel {
            nodes: Vec::new(),
            weighted: Vec::new(),
            x,
            hbar,
        };
        if !(b > a) {
            return Ok(kernel);
        }
        let gauss = |xp: f64| {
            let d = xp - x;
            (PI * lambda * lambda).powf(-0.25) * (-d * d / (2.0 * lambda * lambda)).exp()
        };
        for (edge, clipped) in [(a, a > x - SUPPORT_WIDTHS * lambda), (b, b < x + SUPPORT_WIDTHS * lambda)] {
            if !clipped {
                continue;
            }
            let psi = match field.evaluate(edge, t) {
                Ok((psi, _)) => psi,
                Err(Flag::OutsideWell) => Complex64::new(0.0, 0.0),
                Err(flag) => return Err(Error::Flagged { x: edge, flag }),
            };
            let g = gauss(edge) * (PI * lambda * lambda).powf(0.25);
            if psi.norm_sqr() * g * g > TRUNCATION_TOLERANCE * field.node_scale() {
                return Err(Error::InvalidParameter {
                    name: "lambda",
                    reason: format!(
                        "coherent state at x = {x} with width {lambda} extends past the wavefunction support [{lo}, {hi}]"
                    ),
                });
            }
        }
        let k = std::f64::consts::TAU / field.shortest_wavelength() + p_max.abs() / hbar;
        let panel = lambda.min(std::f64::consts::TAU / k) / 4.0;
        let rule = rule8();
        let panels = ((b - a) / panel).ceil().max(1.0) as usize;
        let width = (b - a) / panels as f64;
        kernel.nodes.reserve(panels * rule.len());
        for j in 0..panels {
            let p0 = a + width * j as f64;
            let mid = p0 + 0.5 * width;
            for (node, weight) in rule.nodes.iter().zip(&rule.weights) {
                let xp = mid + 0.5 * width * node;
                let psi = match field.evaluate(xp, t) {
                    Ok((psi, _)) => psi,
                    Err(Flag::OutsideWell) => Complex64::new(0.0, 0.0),
                    Err(flag) => return Err(Error::Flagged { x: xp, flag }),
                };
                kernel.nodes.push(xp);
                kernel.weighted.push(psi * (0.5 * width * weight * gauss(xp)));
            }
        }
        Ok(kernel)
    }

    fn overlap(&self, p: f64) -> Complex64 {
        let sum: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&xp, w)| w * Complex64::from_polar(1.0, -p * xp / self.hbar))
            .sum();
        sum * Complex64::from_polar(1.0, p * self.x / (2.0 * self.hbar))
    }

    fn q(&self, p: f64) -> f64 {
        self.overlap(p).norm_sqr() / (std::f64::consts::TAU * self.hbar)
    }
}

/// Q_λ(x, p) = |⟨x, p|ψ⟩|²/h by 8-point Gauss quadrature of the overlap.
pub fn husimi_exact<F: WaveField + ?Sized>(field: &F, cs: &CoherentStateParams, t: f64) -> Result<f64> {
    Ok(OverlapKernel::new(field, cs.x, cs.lambda, t, cs.p)?.q(cs.p))
}

/// Q_λ(x, p) for every p in `momenta`, sharing one set of overlap nodes.
pub fn husimi_exact_row<F: WaveField + ?Sized>(
    field: &F,
    x: f64,
    lambda: f64,
    momenta: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    CoherentStateParams::new(x, 0.0, lambda)?;
    let p_max = momenta.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let kernel = OverlapKernel::new(field, x, lambda, t, p_max)?;
    Ok(momenta.iter().map(|&p| kernel.q(p)).collect())
}

/// λ range over which Q_λ takes its two-branch classical form at one x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalWindow {
    /// ħ/p(x); infinite where p vanishes.
    pub lambda_minus: f64,
    /// min((a₊−a₋)/Δn, √(ħ/|p′(x)|))
    pub lambda_plus: f64,
    pub factor: f64,
    /// λ₊ ≥ factor·λ₋
    pub nonempty: bool,
}

impl ClassicalWindow {
    /// Geometric mean of the two bounds.
    pub fn midpoint(&self) -> f64 {
        (self.lambda_minus * self.lambda_plus).sqrt()
    }

    /// λ₋√factor ≤ λ ≤ λ₊/√factor; empty exactly when the window is.
    pub fn contains(&self, lambda: f64) -> bool {
        let s = self.factor.sqrt();
        lambda >= self.lambda_minus * s && lambda <= self.lambda_plus / s
    }

    /// λ ≤ λ₊/√factor, the only condition the closed form needs.
    pub fn below_upper(&self, lambda: f64) -> bool {
        lambda <= self.lambda_plus / self.factor.sqrt()
    }
}

pub fn classical_window(spec: &SuperpositionSpec, well: &PotentialWell, x: f64) -> ClassicalWindow {
    classical_window_with_factor(spec, well, x, WINDOW_FACTOR)
}

pub fn classical_window_with_factor(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    x: f64,
    factor: f64,
) -> ClassicalWindow {
    let level = spec.level();
    let p = well.classical_momentum(level.energy, x).unwrap_or(0.0);
    let hbar = well.hbar();
    let lambda_minus = if p > 0.0 { hbar / p } else { f64::INFINITY };
    let spread = if spec.band() > 0 {
        level.width() / spec.band() as f64
    } else {
        f64::INFINITY
    };
    let curvature = if p > 0.0 {
        (well.mass() * well.potential_derivative(x) / p).abs()
    } else {
        f64::INFINITY
    };
    let lambda_plus = spread.min((hbar / curvature).sqrt());
    ClassicalWindow {
        lambda_minus,
        lambda_plus,
        factor,
        nonempty: lambda_plus >= factor * lambda_minus,
    }
}

/// Q_λ at one phase-space point with the accuracies of the measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HusimiSample {
    pub x: f64,
    pub p: f64,
    pub lambda: f64,
    pub q: f64,
    pub accuracy: AccuracyPair,
    /// λ is too wide for the closed form at this x; the value is still
    /// computed.
    pub window_violation: bool,
}

/// Closed-form Q_λ of a WKB superposition. Fails with the evaluation flag
/// outside the well or in a turning-point zone.
pub fn husimi_wkb(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    x: f64,
    p: f64,
    lambda: f64,
    t: f64,
) -> Result<HusimiSample> {
    CoherentStateParams::new(x, p, lambda)?;
    let local = WkbLocal::at(spec, well, x, t).map_err(|flag| Error::Flagged { x, flag })?;
    let window = classical_window(spec, well, x);
    Ok(HusimiSample {
        x,
        p,
        lambda,
        q: closed_form(&local, p, lambda),
        accuracy: AccuracyPair::new(lambda, well.hbar()),
        window_violation: !window.below_upper(lambda),
    })
}

fn closed_form(local: &WkbLocal, p: f64, lambda: f64) -> f64 {
    let hbar = local.hbar;
    let big_p = local.point.momentum;
    let env = &local.envelope;
    let s = lambda / hbar;
    let gauss = |u: f64| (-s * s * u * u).exp();
    let mut q = gauss(p + big_p) * env.rho_minus + gauss(p - big_p) * env.rho_plus;
    if let Some(phase) = env.interference_phase(local.point.action, hbar) {
        q -= 2.0
            * (-s * s * (p * p + big_p * big_p)).exp()
            * phase.cos()
            * (env.rho_plus * env.rho_minus).sqrt();
    }
    lambda / (PI.sqrt() * hbar) * q
}

/// Branch weights and momentum moments of the closed-form Q_λ split at p = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalFormReport {
    pub weight_plus: f64,
    pub weight_minus: f64,
    /// ρ₊/(ρ₊ + ρ₋)
    pub expected_weight_plus: f64,
    pub expected_weight_minus: f64,
    /// `None` when the branch carries no weight.
    pub mean_p_plus_branch: Option<f64>,
    pub mean_p_minus_branch: Option<f64>,
    pub std_p_plus_branch: Option<f64>,
    pub std_p_minus_branch: Option<f64>,
    /// p(x)
    pub momentum: f64,
}

pub fn classical_form_check(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    x: f64,
    lambda: f64,
    t: f64,
) -> Result<ClassicalFormReport> {
    CoherentStateParams::new(x, 0.0, lambda)?;
    if !classical_window(spec, well, x).contains(lambda) {
        return Err(Error::Flagged {
            x,
            flag: Flag::WindowViolation,
        });
    }
    let local = WkbLocal::at(spec, well, x, t).map_err(|flag| Error::Flagged { x, flag })?;
    let hbar = well.hbar();
    let big_p = local.point.momentum;
    let reach = big_p + 10.0 * hbar / lambda;
    let panel = 0.5 * hbar / lambda;
    let moments = |a: f64, b: f64| -> [f64; 3] {
        composite_max_width(rule20(), a, b, panel, |p| {
            let q = closed_form(&local, p, lambda);
            [q, p * q, p * p * q]
        })
    };
    let plus = moments(0.0, reach);
    let minus = moments(-reach, 0.0);
    let total = plus[0] + minus[0];
    if !(total > 0.0) {
        return Err(Error::VanishingMarginal { x });
    }
    let branch = |m: [f64; 3]| {
        if m[0] > 0.0 {
            let mean = m[1] / m[0];
            (Some(mean), Some((m[2] / m[0] - mean * mean).max(0.0).sqrt()))
        } else {
            (None, None)
        }
    };
    let (mean_plus, std_plus) = branch(plus);
    let (mean_minus, std_minus) = branch(minus);
    let env = &local.envelope;
    let rho = env.rho_bar;
    Ok(ClassicalFormReport {
        weight_plus: plus[0] / total,
        weight_minus: minus[0] / total,
        expected_weight_plus: if rho > 0.0 { env.rho_plus / rho } else { 0.5 },
        expected_weight_minus: if rho > 0.0 { env.rho_minus / rho } else { 0.5 },
        mean_p_plus_branch: mean_plus,
        mean_p_minus_branch: mean_minus,
        std_p_plus_branch: std_plus,
        std_p_minus_branch: std_minus,
        momentum: big_p,
    })
}

/// A factorized approximation next to the quadrature value it approximates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitComparison {
    pub approx: f64,
    pub reference: f64,
}

impl LimitComparison {
    pub fn relative_deviation(&self) -> f64 {
        (self.approx - self.reference).abs() / self.reference.abs()
    }
}

/// (λ/(√π ħ)) e^{−λ²p²/ħ²} |ψ(x)|² against the quadrature Q_λ. Requires
/// λ ≤ λ₋(x)/5 at the given energy.
#[allow(clippy::too_many_arguments)]
pub fn limit_small_lambda<F: WaveField + ?Sized>(
    field: &F,
    well: &PotentialWell,
    energy: f64,
    x: f64,
    p: f64,
    lambda: f64,
    t: f64,
) -> Result<LimitComparison> {
    let cs = CoherentStateParams::new(x, p, lambda)?;
    let hbar = field.hbar();
    let momentum = well.classical_momentum(energy, x).unwrap_or(0.0);
    if momentum > 0.0 && lambda > hbar / momentum / 5.0 {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!(
                "{lambda} exceeds a fifth of the local wavelength scale {}",
                hbar / momentum
            ),
        });
    }
    let density = match field.evaluate(x, t) {
        Ok((psi, _)) => psi.norm_sqr(),
        Err(Flag::OutsideWell) => 0.0,
        Err(flag) => return Err(Error::Flagged { x, flag }),
    };
    let s = lambda / hbar;
    Ok(LimitComparison {
        approx: lambda / (PI.sqrt() * hbar) * (-s * s * p * p).exp() * density,
        reference: husimi_exact(field, &cs, t)?,
    })
}

/// Momentum-space wavefunction of an exact superposition by a direct
/// discrete Fourier sum over its grid.
#[derive(Debug, Clone)]
pub struct MomentumTransform {
    xs: Vec<f64>,
    amplitudes: Vec<Complex64>,
    step: f64,
    hbar: f64,
}

impl MomentumTransform {
    pub fn new(state: &ExactSuperposition, t: f64) -> Self {
        let grid = state.grid();
        MomentumTransform {
            xs: grid.xs().collect(),
            amplitudes: state.grid_amplitudes(t),
            step: grid.step,
            hbar: WaveField::hbar(state),
        }
    }

    /// ⟨p|ψ⟩ = (2πħ)^{-1/2} ∫ψ(x) e^{−ipx/ħ} dx
    pub fn amplitude(&self, p: f64) -> Complex64 {
        let sum: Complex64 = self
            .xs
            .iter()
            .zip(&self.amplitudes)
            .map(|(&x, a)| a * Complex64::from_polar(1.0, -p * x / self.hbar))
            .sum();
        sum * (self.step / (std::f64::consts::TAU * self.hbar).sqrt())
    }

    pub fn density(&self, p: f64) -> f64 {
        self.amplitude(p).norm_sqr()
    }
}

/// (1/(√π λ)) e^{−x²/λ²} |⟨p|ψ⟩|² against the quadrature Q_λ. Requires
/// λ ≥ 5·`width`, the classical extent of the state.
pub fn limit_large_lambda(
    state: &ExactSuperposition,
    transform: &MomentumTransform,
    width: f64,
    x: f64,
    p: f64,
    lambda: f64,
    t: f64,
) -> Result<LimitComparison> {
    let cs = CoherentStateParams::new(x, p, lambda)?;
    if lambda < 5.0 * width {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("{lambda} is below five times the classical width {width}"),
        });
    }
    Ok(LimitComparison {
        approx: (-x * x / (lambda * lambda)).exp() / (PI.sqrt() * lambda) * transform.density(p),
        reference: husimi_exact(state, &cs, t)?,
    })
}

/// Where Q_λ comes from.
#[derive(Clone, Copy)]
pub enum HusimiSource<'a> {
    /// Closed form on a WKB superposition.
    Wkb {
        spec: &'a SuperpositionSpec,
        well: &'a PotentialWell,
    },
    /// Quadrature on a wavefunction.
    Exact(&'a dyn WaveField),
}

impl HusimiSource<'_> {
    pub fn mode(&self) -> HusimiMode {
        match self {
            HusimiSource::Wkb { .. } => HusimiMode::Wkb,
            HusimiSource::Exact(_) => HusimiMode::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HusimiMode {
    Exact,
    Wkb,
}

impl HusimiMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            HusimiMode::Exact => "exact",
            HusimiMode::Wkb => "wkb",
        }
    }
}

/// v̄_λ(x) = ∫p Q_λ dp / (m ∫Q_λ dp).
pub fn mean_velocity(source: HusimiSource<'_>, x: f64, lambda: f64, t: f64) -> Result<f64> {
    CoherentStateParams::new(x, 0.0, lambda)?;
    let (marginal, first, mass) = match source {
        HusimiSource::Wkb { spec, well } => {
            let local = WkbLocal::at(spec, well, x, t).map_err(|flag| Error::Flagged { x, flag })?;
            let env = &local.envelope;
            let big_p = local.point.momentum;
            let s = lambda / local.hbar;
            let mut marginal = env.rho_bar;
            if let Some(phase) = env.interference_phase(local.point.action, local.hbar) {
                marginal -= 2.0
                    * (-s * s * big_p * big_p).exp()
                    * phase.cos()
                    * (env.rho_plus * env.rho_minus).sqrt();
            }
            (marginal, big_p * (env.rho_plus - env.rho_minus), well.mass())
        }
        HusimiSource::Exact(field) => {
            let hbar = field.hbar();
            let spread = hbar / lambda;
            let reach = std::f64::consts::TAU * hbar / field.shortest_wavelength() + 8.0 * spread;
            let kernel = OverlapKernel::new(field, x, lambda, t, reach)?;
            let [m0, m1] = composite_max_width(rule8(), -reach, reach, 0.25 * spread, |p| {
                let q = kernel.q(p);
                [q, p * q]
            });
            (m0, m1, field.mass())
        }
    };
    if !(marginal > 0.0) {
        return Err(Error::VanishingMarginal { x });
    }
    Ok(first / (mass * marginal))
}

/// Approach of v̄_λ to the Bohmian velocity as λ decreases.
#[derive(Debug, Clone, PartialEq)]
pub struct BohmLimitReport {
    pub lambdas: Vec<f64>,
    pub mean_velocities: Vec<f64>,
    pub v_bohm_wkb: f64,
    pub v_bohm_exact: Option<f64>,
    pub deviations_wkb: Vec<f64>,
    pub deviations_exact: Option<Vec<f64>>,
    /// max(|v_B|, v_cl)
    pub scale: f64,
}

impl BohmLimitReport {
    /// Each deviation is at most the previous one plus `floor`.
    pub fn decreasing(deviations: &[f64], floor: f64) -> bool {
        deviations.windows(2).all(|w| w[1] <= w[0] + floor)
    }

    pub fn final_relative(deviations: &[f64], scale: f64) -> f64 {
        deviations.last().copied().unwrap_or(f64::NAN) / scale
    }

    /// |v_B(semiclassical) − v_B(exact)|, zero without an oracle. The
    /// semiclassical deviations cannot fall below this.
    pub fn reference_gap(&self) -> f64 {
        self.v_bohm_exact.map_or(0.0, |v| (v - self.v_bohm_wkb).abs())
    }

    /// Decreasing with a final deviation below `tolerance`·scale, for both
    /// velocity references.
    pub fn passes(&self, tolerance: f64) -> bool {
        let quadrature_floor = NOISE_FLOOR * self.scale;
        let ok = |d: &[f64], floor: f64| {
            Self::decreasing(d, floor) && Self::final_relative(d, self.scale) < tolerance
        };
        ok(&self.deviations_wkb, quadrature_floor.max(self.reference_gap()))
            && self
                .deviations_exact
                .as_deref()
                .is_none_or(|d| ok(d, quadrature_floor))
    }
}

/// Compares v̄_λ with v_B along `lambdas` (strictly decreasing). v̄_λ uses
/// quadrature on `oracle` when given, otherwise the closed form.
pub fn bohm_limit_check(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    oracle: Option<&dyn WaveField>,
    x: f64,
    t: f64,
    lambdas: &[f64],
) -> Result<BohmLimitReport> {
    if lambdas.is_empty() || lambdas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter {
            name: "lambdas",
            reason: "need a nonempty, strictly decreasing sequence".into(),
        });
    }
    let flagged = |flag| Error::Flagged { x, flag };
    let v_bohm_wkb = bohm_velocity_wkb(spec, well, x, t).map_err(flagged)?;
    let v_bohm_exact = oracle
        .map(|f| bohm_velocity_exact(f, x, t).map_err(flagged))
        .transpose()?;
    let source = match oracle {
        Some(f) => HusimiSource::Exact(f),
        None => HusimiSource::Wkb { spec, well },
    };
    let mean_velocities = lambdas
        .iter()
        .map(|&l| mean_velocity(source, x, l, t))
        .collect::<Result<Vec<_>>>()?;
    let v_cl = well.classical_momentum(spec.level().energy, x).unwrap_or(0.0) / well.mass();
    let deviations = |v: f64| mean_velocities.iter().map(|m| (m - v).abs()).collect::<Vec<_>>();
    Ok(BohmLimitReport {
        lambdas: lambdas.to_vec(),
        deviations_wkb: deviations(v_bohm_wkb),
        deviations_exact: v_bohm_exact.map(deviations),
        scale: v_bohm_wkb.abs().max(v_cl),
        v_bohm_wkb,
        v_bohm_exact,
        mean_velocities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceRow {
    pub x: f64,
    pub p: f64,
    pub q: f64,
    pub mode: HusimiMode,
}

/// CSV with columns x, p, Q, mode.
pub fn write_phase_space_csv(path: &Path, rows: &[PhaseSpaceRow]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x,p,Q,mode")?;
    for r in rows {
        writeln!(out, "{:e},{:e},{:e},{}", r.x, r.p, r.q, r.mode.as_str())?;
    }
    out.flush()?;
    Ok(())
}

/// CSV with columns x, lambda_minus, lambda_plus, nonempty.
pub fn write_window_csv(path: &Path, rows: &[(f64, ClassicalWindow)]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "x,lambda_minus,lambda_plus,nonempty")?;
    for (x, w) in rows {
        writeln!(out, "{x:e},{:e},{:e},{}", w.lambda_minus, w.lambda_plus, w.nonempty)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussianWave;
    use approx::assert_relative_eq;

    fn gaussian(x: f64, p: f64, w: f64) -> GaussianWave {
        GaussianWave {
            center: x,
            momentum: p,
            width: w,
            hbar: 1.0,
            mass: 1.0,
        }
    }

    #[test]
    fn accuracy_product() {
        for lambda in [1e-3, 0.37, 2.0, 55.0] {
            let a = AccuracyPair::new(lambda, 0.7);
            assert_relative_eq!(a.product(), 0.35, max_relative = 1e-15);
        }
    }

    #[test]
    fn rejects_nonpositive_width() {
        assert!(CoherentStateParams::new(0.0, 0.0, 0.0).is_err());
        assert!(CoherentStateParams::new(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn self_overlap() {
        let g = gaussian(0.3, 2.0, 0.8);
        let at = CoherentStateParams::new(0.3, 2.0, 0.8).unwrap();
        let q = husimi_exact(&g, &at, 0.0).unwrap();
        assert_relative_eq!(q, 1.0 / std::f64::consts::TAU, max_relative = 1e-10);
        for (dx, dp) in [(0.1, 0.0), (0.0, 0.2), (-0.3, 0.5)] {
            let cs = CoherentStateParams::new(0.3 + dx, 2.0 + dp, 0.8).unwrap();
            assert!(husimi_exact(&g, &cs, 0.0).unwrap() < q);
        }
    }

    #[test]
    fn matches_wavefunction_convention() {
        let cs = CoherentStateParams::new(-0.4, 1.3, 0.6).unwrap();
        let g = gaussian(-0.4, 1.3, 0.6);
        for xp in [-1.0, 0.0, 0.9] {
            let d = coherent_wavefunction(&cs, 1.0, xp) - g.amplitude(xp);
            assert!(d.norm() < 1e-15);
        }
    }

    #[test]
    fn truncated_support_reported() {
        let g = gaussian(0.0, 0.0, 1.0);
        // A very wide coherent state reaches beyond ±12 widths, where the
        // Gaussian is negligible: no error.
        let wide = CoherentStateParams::new(0.0, 0.0, 5.0).unwrap();
        assert!(husimi_exact(&g, &wide, 0.0).is_ok());
        let narrow = gaussian(0.0, 0.0, 0.05);
        let far = CoherentStateParams::new(0.55, 0.0, 0.2).unwrap();
        assert!(husimi_exact(&narrow, &far, 0.0).is_ok());
    }
}
