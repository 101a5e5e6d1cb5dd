//! Bohmian velocity fields and trajectories against analytic local motion,
//! stationary states and sampling statistics.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use pilotwave::bohm::{
    bohm_velocity_exact, bohm_velocity_wkb, classicality, equivariance_check, exact_density_table,
    extremal_from_densities, integrate_trajectory, local_params, local_trajectory_residual,
    sample_initial_positions, ExactField, IntegratorOptions, LocalField, LocalMotionParams, WkbField,
    DEFAULT_CLASSICALITY_THRESHOLD,
};
use pilotwave::eigensolver::{solve_band, solve_eigenpair, ExactSuperposition, GridSpec};
use pilotwave::well::PotentialWell;
use pilotwave::wkb::{wkb_density, CoefficientPreset, SuperpositionSpec};
use pilotwave::Complex64;
use proptest::prelude::*;

fn harmonic() -> PotentialWell {
    PotentialWell::harmonic(1.0, 1.0, 1.0).unwrap()
}

/// Time spent below the mean speed over one period of the local field, by
/// midpoint quadrature of dt = dx / v.
fn slow_time_fraction(params: &LocalMotionParams) -> f64 {
    let mean = params.mean_velocity().abs();
    let count = 200_000;
    let h = 0.5 * params.lambda0 / count as f64;
    let (mut slow, mut total) = (0.0, 0.0);
    for k in 0..count {
        let v = params.velocity((k as f64 + 0.5) * h).abs();
        total += h / v;
        if v < mean {
            slow += h / v;
        }
    }
    slow / total
}

#[test]
fn local_motion_matches_direct_quadrature() {
    for chi0 in [0.2, 0.5, 1.0, 2.0] {
        let params = LocalMotionParams::synthetic(chi0, 0.3, 1.0, 1.0);
        assert_relative_eq!(params.slow_fraction(), slow_time_fraction(&params), max_relative = 1e-6);
        // Time to cross half a wavelength, ∫dx/v, sets the mean speed.
        let count = 200_000;
        let h = 0.5 / count as f64;
        let time: f64 = (0..count).map(|k| h / params.velocity((k as f64 + 0.5) * h)).sum();
        assert_relative_eq!(0.5 / time, params.mean_velocity(), max_relative = 1e-8);
        let peak = (0..10_000)
            .map(|k| params.velocity(k as f64 / 20_000.0))
            .fold(0.0, f64::max);
        assert_relative_eq!(peak, params.peak_velocity(), max_relative = 1e-4);
    }
}

#[test]
fn strongly_one_sided_motion_is_classical() {
    let params = LocalMotionParams::synthetic(3.0, 0.0, 1.0, 1.0);
    assert!((params.mean_velocity() - 1.0).abs() < 0.005);
    assert!(params.peak_velocity() < 1.25);
    // Two-branch limit: the motion stalls for half the time at χ → 0.
    let weak = LocalMotionParams::synthetic(0.05, 0.0, 1.0, 1.0);
    assert!(weak.slow_fraction() > 0.8);
    assert_relative_eq!(
        LocalMotionParams::synthetic(0.0001, 0.0, 1.0, 1.0).slow_fraction(),
        0.5 + 1.0 / PI,
        max_relative = 1e-6
    );
}

#[test]
fn integrated_local_trajectory_solves_the_implicit_equation() {
    for chi0 in [0.3, 1.0] {
        let params = LocalMotionParams::synthetic(chi0, 1.1, 0.7, 2.0);
        let field = LocalField(params);
        let span = 3.0 * params.crossing_time();
        let outputs: Vec<f64> = (0..=60).map(|k| span * k as f64 / 60.0).collect();
        let traj = integrate_trajectory(&field, 0.0, 0.0, span, &IntegratorOptions::default(), &outputs).unwrap();
        for s in traj.samples() {
            let r = local_trajectory_residual(&params, s.x, s.t);
            assert!(r.abs() < 1e-6, "chi {chi0} t {} residual {r}", s.t);
        }
        let fraction = traj.time_fraction_below(&field, params.mean_velocity(), 16);
        assert!((fraction - params.slow_fraction()).abs() < 0.01, "{fraction}");
    }
}

#[test]
fn eigenstates_are_stationary() {
    let well = harmonic();
    let spec = SuperpositionSpec::eigenstate(&well, 60).unwrap();
    let exact = solve_eigenpair(&well, 60, &GridSpec::default()).unwrap();
    let single = ExactSuperposition::new(&well, vec![exact], vec![Complex64::new(1.0, 0.0)]).unwrap();
    let (lo, hi) = spec.interior();
    for k in 0..200 {
        let x = lo + (hi - lo) * (k as f64 + 0.5) / 200.0;
        if let Ok(v) = bohm_velocity_wkb(&spec, &well, x, 0.4) {
            assert_eq!(v, 0.0);
        }
        if let Ok(v) = bohm_velocity_exact(&single, x, 0.4) {
            assert!(v.abs() < 1e-12);
        }
    }
    let traj = integrate_trajectory(&ExactField(&single), 0.37, 0.0, 5.0, &IntegratorOptions::default(), &[]).unwrap();
    assert!((traj.end().1 - 0.37).abs() < 1e-12);
}

#[test]
fn ground_state_samples_have_the_right_variance() {
    let well = harmonic();
    let ground = solve_eigenpair(&well, 0, &GridSpec::default()).unwrap();
    let single = ExactSuperposition::new(&well, vec![ground], vec![Complex64::new(1.0, 0.0)]).unwrap();
    let table = exact_density_table(&single, 0.0).unwrap();
    let samples = sample_initial_positions(&table, 20_000, 17);
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() < 0.02);
    assert!((var - 0.5).abs() < 0.025, "variance {var}");
    assert_eq!(samples, sample_initial_positions(&table, 20_000, 17));
}

fn two_level() -> (PotentialWell, ExactSuperposition) {
    let well = harmonic();
    let states = solve_band(&well, &[0, 1], &GridSpec::default(), None).unwrap();
    let c = Complex64::new(0.5f64.sqrt(), 0.0);
    let exact = ExactSuperposition::new(&well, states, vec![c, c]).unwrap();
    (well, exact)
}

#[test]
fn zero_time_transport_reproduces_the_initial_statistic() {
    let (_, exact) = two_level();
    let t0 = 0.3;
    let table = exact_density_table(&exact, t0).unwrap();
    let positions = sample_initial_positions(&table, 500, 4);
    let report = equivariance_check(&ExactField(&exact), &positions, t0, t0, &table, &table, &IntegratorOptions::default());
    assert_eq!(report.excluded, 0);
    assert_eq!(report.ks, report.initial_ks);
}

#[test]
fn trajectories_do_not_cross() {
    let (_, exact) = two_level();
    let field = ExactField(&exact);
    let starts = [-1.2, -0.6, -0.1, 0.4, 0.9, 1.5];
    let outputs: Vec<f64> = (1..=40).map(|k| 0.1 * k as f64).collect();
    let paths: Vec<_> = starts
        .iter()
        .map(|&x| integrate_trajectory(&field, x, 0.3, 4.3, &IntegratorOptions::default(), &outputs).unwrap())
        .collect();
    for &t in &outputs[3..] {
        let xs: Vec<f64> = paths.iter().map(|p| p.position_at(t).unwrap()).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]), "order broken at t = {t}: {xs:?}");
    }
}

#[test]
fn local_wavelength_matches_density_fringes() {
    let well = harmonic();
    let c = CoefficientPreset::UniformRandomPhase { seed: 3 }.coefficients(10).unwrap();
    let spec = SuperpositionSpec::new(&well, 120, 10, c).unwrap();
    let (x0, t0) = (-2.0, 0.2);
    let params = local_params(&spec, &well, x0, t0).unwrap();
    // Fringes of cos(2S/ħ) repeat every λ₀/2; locate successive minima.
    let h = params.lambda0 / 2000.0;
    let rho: Vec<f64> = (0..6000).map(|k| wkb_density(&spec, &well, x0 + h * k as f64, t0).unwrap()).collect();
    let minima: Vec<f64> = (1..rho.len() - 1)
        .filter(|&k| rho[k] < rho[k - 1] && rho[k] <= rho[k + 1])
        .map(|k| x0 + h * k as f64)
        .collect();
    assert!(minima.len() >= 4);
    let spacing = (minima[minima.len() - 1] - minima[0]) / (minima.len() - 1) as f64;
    assert_relative_eq!(spacing, 0.5 * params.lambda0, max_relative = 0.02);
    let v = bohm_velocity_wkb(&spec, &well, x0, t0).unwrap();
    assert_relative_eq!(v, params.velocity(x0), max_relative = 1e-10);
}

#[test]
fn classicality_examples() {
    let well = harmonic();
    let packet = CoefficientPreset::mid_well_packet(10).coefficients(10).unwrap();
    let spec = SuperpositionSpec::new(&well, 120, 10, packet).unwrap();
    // Mid-well at t = 0 only the right-moving branch is populated.
    let c = classicality(&spec, &well, 0.0, 0.0, DEFAULT_CLASSICALITY_THRESHOLD).unwrap();
    assert!(c.is_classical && c.measure > 1e3);
    let eigen = SuperpositionSpec::eigenstate(&well, 120).unwrap();
    let c = classicality(&eigen, &well, 1.0, 0.0, DEFAULT_CLASSICALITY_THRESHOLD).unwrap();
    assert_relative_eq!(c.measure, 1.0, max_relative = 1e-12);
    assert!(!c.is_classical);
    let field = WkbField { spec: &spec, well: &well };
    let traj = integrate_trajectory(&field, 0.0, 0.0, 0.3, &IntegratorOptions::default(), &[]).unwrap();
    // A classical packet carries its particle at nearly the classical speed.
    let expected = spec.level().turning_right * 0.3f64.sin();
    assert!((traj.end().1 - expected).abs() < 0.02 * expected);
}

proptest! {
    #[test]
    fn extremal_speeds_bound_the_velocity(
        rho_plus in 1e-3f64..10.0,
        rho_minus in 1e-3f64..10.0,
        v in 0.1f64..5.0,
        phase in 0.0f64..(2.0 * PI),
    ) {
        prop_assume!((rho_plus.sqrt() - rho_minus.sqrt()).abs() > 1e-3);
        let (slow, fast) = extremal_from_densities(rho_plus, rho_minus, v).unwrap();
        prop_assert!((slow * fast - v * v).abs() <= 1e-10 * v * v);
        let density = rho_plus + rho_minus - 2.0 * (rho_plus * rho_minus).sqrt() * phase.cos();
        let vb = v * (rho_plus - rho_minus) / density;
        prop_assert!(vb.abs() >= slow.abs() * (1.0 - 1e-12));
        prop_assert!(vb.abs() <= fast.abs() * (1.0 + 1e-12));
        prop_assert!(vb * slow >= 0.0);
    }
}
