//! Husimi densities against coherent-state overlaps, the oscillator ring
//! distribution and direct smoothing of the Bohmian current.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use pilotwave::eigensolver::{solve_band, solve_eigenpair, ExactSuperposition, GridSpec};
use pilotwave::field::{GaussianWave, WaveField};
use pilotwave::husimi::{
    classical_form_check, classical_window, coherent_wavefunction, husimi_exact, husimi_exact_row,
    husimi_wkb, limit_large_lambda, limit_small_lambda, mean_velocity, CoherentStateParams,
    HusimiSource, MomentumTransform,
};
use pilotwave::well::PotentialWell;
use pilotwave::wkb::{envelopes, CoefficientPreset, SuperpositionSpec};
use pilotwave::Complex64;

fn harmonic() -> PotentialWell {
    PotentialWell::harmonic(1.0, 1.0, 1.0).unwrap()
}

fn packet(well: &PotentialWell) -> (SuperpositionSpec, ExactSuperposition) {
    let c = CoefficientPreset::mid_well_packet(10).coefficients(10).unwrap();
    let spec = SuperpositionSpec::new(well, 120, 10, c).unwrap();
    let levels: Vec<usize> = (115..=125).collect();
    let states = solve_band(well, &levels, &GridSpec::default(), None).unwrap();
    let exact = ExactSuperposition::from_spec(well, &spec, &states).unwrap();
    (spec, exact)
}

fn eigenstate(well: &PotentialWell, n: usize) -> ExactSuperposition {
    let state = solve_eigenpair(well, n, &GridSpec::default()).unwrap();
    ExactSuperposition::new(well, vec![state], vec![Complex64::new(1.0, 0.0)]).unwrap()
}

fn midpoint_sum(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|k| f(a + h * (k as f64 + 0.5))).sum::<f64>() * h
}

#[test]
fn coherent_state_is_normalized_with_the_right_moments() {
    let cs = CoherentStateParams::new(0.4, 2.5, 0.3).unwrap();
    let hbar = 0.7;
    let psi = |x| coherent_wavefunction(&cs, hbar, x);
    let (a, b) = (cs.x - 4.0, cs.x + 4.0);
    let norm = midpoint_sum(a, b, 20_000, |x| psi(x).norm_sqr());
    let mean = midpoint_sum(a, b, 20_000, |x| x * psi(x).norm_sqr());
    let var = midpoint_sum(a, b, 20_000, |x| (x - cs.x).powi(2) * psi(x).norm_sqr());
    assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
    assert_relative_eq!(mean, cs.x, epsilon = 1e-12);
    let acc = cs.accuracy(hbar);
    assert_relative_eq!(var.sqrt(), acc.dx, max_relative = 1e-10);
    // Momentum from the phase gradient: ħ Im(ψ*ψ′) integrated.
    let h = 1e-6;
    let p_mean = midpoint_sum(a, b, 20_000, |x| {
        let d = (psi(x + h) - psi(x - h)) / (2.0 * h);
        hbar * (psi(x).conj() * d).im
    });
    assert_relative_eq!(p_mean, cs.p, max_relative = 1e-6);
    assert_relative_eq!(acc.product(), 0.5 * hbar, max_relative = 1e-14);
}

#[test]
fn husimi_of_a_coherent_state_is_the_overlap_gaussian() {
    let hbar = 1.0;
    let lambda = 0.5;
    let wave = GaussianWave { center: 0.2, momentum: 1.5, width: lambda, hbar, mass: 1.0 };
    for (x, p) in [(0.2, 1.5), (0.5, 1.5), (0.2, 2.4), (-0.3, 0.7)] {
        let cs = CoherentStateParams::new(x, p, lambda).unwrap();
        let (dx, dp) = (x - wave.center, p - wave.momentum);
        let expected = (-dx * dx / (2.0 * lambda * lambda) - lambda * lambda * dp * dp / (2.0 * hbar * hbar)).exp()
            / (2.0 * PI * hbar);
        assert_relative_eq!(husimi_exact(&wave, &cs, 0.0).unwrap(), expected, max_relative = 1e-8);
    }
    // Overlap at equal momentum decays as exp(−Δx²/4λ²).
    let at = |x: f64| husimi_exact(&wave, &CoherentStateParams::new(x, 1.5, lambda).unwrap(), 0.0).unwrap();
    assert_relative_eq!((at(0.2 + 0.4) / at(0.2)).sqrt(), (-0.16f64 / (4.0 * 0.25)).exp(), max_relative = 1e-8);
}

#[test]
fn oscillator_eigenstate_gives_the_poisson_ring() {
    // For |n⟩ and λ = 1, Q = e^{−|α|²}|α|^{2n}/n!/2π with |α|² = (x² + p²)/2.
    let well = harmonic();
    let n = 20;
    let state = eigenstate(&well, n);
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let ring = |x: f64, p: f64| {
        let a2 = 0.5 * (x * x + p * p);
        (-a2 + n as f64 * a2.ln() - ln_fact).exp() / (2.0 * PI)
    };
    for (x, p) in [(6.4, 0.0), (0.0, 6.4), (4.5, 4.5), (3.0, -5.0), (5.0, 1.0)] {
        let q = husimi_exact(&state, &CoherentStateParams::new(x, p, 1.0).unwrap(), 0.0).unwrap();
        assert_relative_eq!(q, ring(x, p), max_relative = 1e-5);
    }
    // Radial maximum of Q along p = 0 sits at √(2n).
    let radii: Vec<f64> = (0..400).map(|k| 4.0 + 5.0 * k as f64 / 400.0).collect();
    let row: Vec<f64> = radii
        .iter()
        .map(|&x| husimi_exact(&state, &CoherentStateParams::new(x, 0.0, 1.0).unwrap(), 0.0).unwrap())
        .collect();
    let k = (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
    assert!((radii[k] - (2.0 * n as f64).sqrt()).abs() < 0.02 * (2.0 * n as f64).sqrt());
}

#[test]
fn real_state_is_symmetric_in_momentum() {
    let well = harmonic();
    let state = eigenstate(&well, 30);
    let momenta = [-6.0, -3.0, -0.5, 0.5, 3.0, 6.0];
    let row = husimi_exact_row(&state, 2.0, 0.6, &momenta, 0.0).unwrap();
    for k in 0..3 {
        assert_relative_eq!(row[k], row[5 - k], max_relative = 1e-9);
    }
}

#[test]
fn closed_form_agrees_with_quadrature_inside_the_window() {
    let well = harmonic();
    let (spec, exact) = packet(&well);
    for (x, t) in [(0.0, 0.0), (-3.0, 0.5), (4.0, 2.0)] {
        let window = classical_window(&spec, &well, x);
        let lambda = window.midpoint();
        let p_cl = well.classical_momentum(spec.level().energy, x).unwrap();
        let env = envelopes(&spec, &well, x, t).unwrap();
        for sign in [1.0, -1.0] {
            let p = sign * p_cl;
            let branch = if sign > 0.0 { env.rho_plus } else { env.rho_minus };
            if branch < 0.05 * env.rho_bar {
                continue;
            }
            let wkb = husimi_wkb(&spec, &well, x, p, lambda, t).unwrap();
            let q = husimi_exact(&exact, &CoherentStateParams::new(x, p, lambda).unwrap(), t).unwrap();
            assert!((wkb.q - q).abs() < 0.1 * q, "x = {x}, p = {p}: {} vs {q}", wkb.q);
            assert!(!wkb.window_violation);
        }
    }
}

#[test]
fn momentum_marginal_of_the_closed_form() {
    let well = harmonic();
    let (spec, _) = packet(&well);
    let c = CoefficientPreset::UniformRandomPhase { seed: 2 }.coefficients(10).unwrap();
    let spec = spec.with_coefficients(&well, c).unwrap();
    let (x, t, lambda) = (1.3, 0.4, 0.3);
    let marginal = midpoint_sum(-40.0, 40.0, 40_000, |p| husimi_wkb(&spec, &well, x, p, lambda, t).unwrap().q);
    let env = envelopes(&spec, &well, x, t).unwrap();
    let point = spec.table().point(&well, x).unwrap();
    let phase = env.interference_phase(point.action, 1.0).unwrap();
    let expected = env.rho_bar
        - 2.0 * (-(lambda * point.momentum).powi(2)).exp() * phase.cos() * (env.rho_plus * env.rho_minus).sqrt();
    assert_relative_eq!(marginal, expected, max_relative = 1e-9);
}

#[test]
fn window_bounds_for_the_central_packet() {
    let well = harmonic();
    let (spec, _) = packet(&well);
    let window = classical_window(&spec, &well, 0.0);
    assert!((window.lambda_minus - 0.0644).abs() < 5e-4, "{}", window.lambda_minus);
    assert!((window.lambda_plus - 3.10).abs() < 0.01, "{}", window.lambda_plus);
    assert!(window.nonempty && window.contains(window.midpoint()));
    assert!(!window.contains(window.lambda_minus));
    assert!(!window.contains(window.lambda_plus));
}

#[test]
fn eigenstate_branches_are_balanced_gaussians() {
    let well = harmonic();
    let spec = SuperpositionSpec::eigenstate(&well, 120).unwrap();
    let x = 1.0;
    let lambda = 0.5;
    let report = classical_form_check(&spec, &well, x, lambda, 0.0).unwrap();
    assert_relative_eq!(report.weight_plus, 0.5, epsilon = 1e-6);
    assert_relative_eq!(report.weight_minus, 0.5, epsilon = 1e-6);
    let width = 1.0 / (2f64.sqrt() * lambda);
    assert_relative_eq!(report.std_p_plus_branch.unwrap(), width, max_relative = 0.01);
    assert_relative_eq!(report.std_p_minus_branch.unwrap(), width, max_relative = 0.01);
    assert_relative_eq!(report.mean_p_plus_branch.unwrap(), report.momentum, max_relative = 1e-3);
    assert_relative_eq!(report.mean_p_minus_branch.unwrap(), -report.momentum, max_relative = 1e-3);
    assert!(classical_form_check(&spec, &well, x, 0.05, 0.0).is_err());
}

#[test]
fn narrow_and_wide_limits() {
    let well = harmonic();
    let (spec, exact) = packet(&well);
    let energy = spec.level().energy;
    let x = -1.0;
    let lambda_minus = 1.0 / well.classical_momentum(energy, x).unwrap();
    // Narrow coherent states see |ψ(x)|² with the momentum Gaussian; the
    // correction grows like e^{λ²(2pP − P²)/ħ²}, so test at p = 0.
    let narrow = limit_small_lambda(&exact, &well, energy, x, 0.0, lambda_minus / 50.0, 0.3).unwrap();
    assert!(narrow.relative_deviation() < 1e-3, "{}", narrow.relative_deviation());
    assert!(limit_small_lambda(&exact, &well, energy, x, 0.0, lambda_minus, 0.3).is_err());
    let width = spec.level().width();
    let transform = MomentumTransform::new(&exact, 0.3);
    for p in [-10.0, 0.0, 12.0] {
        let wide = limit_large_lambda(&exact, &transform, width, 2.0, p, 10.0 * width, 0.3).unwrap();
        assert!(wide.relative_deviation() < 0.02, "p = {p}: {}", wide.relative_deviation());
    }
    // Momentum density integrates to one.
    let total = midpoint_sum(-30.0, 30.0, 3000, |p| transform.density(p));
    assert_relative_eq!(total, 1.0, epsilon = 1e-6);
}

#[test]
fn mean_velocity_limits() {
    let well = harmonic();
    let (spec, exact) = packet(&well);
    let x = 0.0;
    let window = classical_window(&spec, &well, x);
    let lambda = window.midpoint();
    let v_cl = well.classical_momentum(spec.level().energy, x).unwrap();
    let wkb = mean_velocity(HusimiSource::Wkb { spec: &spec, well: &well }, x, lambda, 0.0).unwrap();
    assert_relative_eq!(wkb, v_cl, max_relative = 0.02);
    let quad = mean_velocity(HusimiSource::Exact(&exact), x, lambda, 0.0).unwrap();
    assert_relative_eq!(quad, v_cl, max_relative = 0.02);
    let real = eigenstate(&well, 40);
    assert!(mean_velocity(HusimiSource::Exact(&real), 1.5, 0.4, 0.0).unwrap().abs() < 1e-8);
    let stationary = SuperpositionSpec::eigenstate(&well, 120).unwrap();
    let v = mean_velocity(HusimiSource::Wkb { spec: &stationary, well: &well }, 1.5, 0.4, 0.0).unwrap();
    assert!(v.abs() < 1e-12);
}

#[test]
fn mean_velocity_is_the_smoothed_current() {
    // Parseval: ∫p Q dp / ∫Q dp = (G∗j)/(G∗ρ) with G ∝ e^{−(x′−x)²/λ²}.
    let well = harmonic();
    let c = CoefficientPreset::UniformRandomPhase { seed: 8 }.coefficients(10).unwrap();
    let (spec, _) = packet(&well);
    let spec = spec.with_coefficients(&well, c).unwrap();
    let levels: Vec<usize> = (115..=125).collect();
    let states = solve_band(&well, &levels, &GridSpec::default(), None).unwrap();
    let exact = ExactSuperposition::from_spec(&well, &spec, &states).unwrap();
    let t = 0.7;
    for (x, lambda) in [(-2.0, 0.3), (1.0, 0.8)] {
        let (mut num, mut den) = (0.0, 0.0);
        let n = 40_000;
        let h = 12.0 * lambda / n as f64;
        for k in 0..n {
            let xp = x - 6.0 * lambda + h * (k as f64 + 0.5);
            let (psi, dpsi) = exact.evaluate(xp, t).unwrap();
            let g = (-(xp - x).powi(2) / (lambda * lambda)).exp();
            num += g * (psi.conj() * dpsi).im;
            den += g * psi.norm_sqr();
        }
        let v = mean_velocity(HusimiSource::Exact(&exact), x, lambda, t).unwrap();
        assert_relative_eq!(v, num / den, max_relative = 1e-6, epsilon = 1e-9);
    }
}

#[test]
fn reflection_mirrors_phase_space() {
    let well = harmonic();
    let (spec, _) = packet(&well);
    let mirror = spec.reflected(&well).unwrap();
    for (x, p) in [(0.5, 15.0), (-3.0, -14.0), (2.0, 1.0)] {
        let a = husimi_wkb(&spec, &well, x, p, 0.4, 0.6).unwrap().q;
        let b = husimi_wkb(&mirror, &well, -x, -p, 0.4, 0.6).unwrap().q;
        assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-15);
    }
}
