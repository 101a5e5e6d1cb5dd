//! Classical quantities against an independently integrated orbit.

use approx::assert_relative_eq;
use pilotwave::well::PotentialWell;

/// RK4 for ẍ = −V′(x)/m from rest at `start`; returns (t, x, v) samples
/// until the velocity turns negative again.
fn classical_orbit(well: &PotentialWell, start: f64, dt: f64) -> Vec<(f64, f64, f64)> {
    let m = well.mass();
    let accel = |x: f64| -well.potential_derivative(x) / m;
    let (mut t, mut x, mut v) = (0.0, start, 0.0);
    let mut out = vec![(t, x, v)];
    loop {
        let (k1x, k1v) = (v, accel(x));
        let (k2x, k2v) = (v + 0.5 * dt * k1v, accel(x + 0.5 * dt * k1x));
        let (k3x, k3v) = (v + 0.5 * dt * k2v, accel(x + 0.5 * dt * k2x));
        let (k4x, k4v) = (v + dt * k3v, accel(x + dt * k3x));
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t += dt;
        out.push((t, x, v));
        if v < 0.0 {
            return out;
        }
    }
}

/// Time at which the sampled orbit passes `target`, by cubic Hermite
/// interpolation in t between the bracketing samples.
fn passage_time(orbit: &[(f64, f64, f64)], target: f64) -> f64 {
    let k = orbit.iter().position(|s| s.1 >= target).unwrap();
    let (t0, x0, v0) = orbit[k - 1];
    let (t1, x1, v1) = orbit[k];
    let h = t1 - t0;
    let pos = |s: f64| {
        let (h00, h10, h01, h11) = (
            2.0 * s.powi(3) - 3.0 * s * s + 1.0,
            s.powi(3) - 2.0 * s * s + s,
            -2.0 * s.powi(3) + 3.0 * s * s,
            s.powi(3) - s * s,
        );
        h00 * x0 + h10 * h * v0 + h01 * x1 + h11 * h * v1
    };
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if pos(mid) < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    t0 + 0.5 * (a + b) * h
}

#[test]
fn quartic_time_of_flight_matches_integrated_orbit() {
    let well = PotentialWell::quartic(1.0, 1.0, 1.0).unwrap();
    let energy = 1.0;
    let orbit_data = well.orbit(energy).unwrap();
    assert_relative_eq!(orbit_data.a_minus, -1.0, epsilon = 1e-12);
    assert_relative_eq!(orbit_data.a_plus, 1.0, epsilon = 1e-12);
    let orbit = classical_orbit(&well, orbit_data.a_minus, 1e-4);
    for target in [-0.9, -0.5, 0.0, 0.3, 0.8, 0.95] {
        let tau = well.classical_time(energy, target).unwrap();
        assert_relative_eq!(tau, passage_time(&orbit, target), max_relative = 1e-8);
    }
    // Momentum along the orbit is m·v by energy conservation.
    for &(_, x, v) in orbit.iter().step_by(997) {
        if x > -0.99 && x < 0.99 {
            assert_relative_eq!(well.classical_momentum(energy, x).unwrap(), v, max_relative = 1e-8);
        }
    }
    let turn = orbit.last().unwrap().0;
    let half = 0.5 * well.period(energy).unwrap();
    assert!((turn - half).abs() < 2e-4, "turn {turn} vs T/2 {half}");
}

#[test]
fn anharmonic_orbit_and_quantization() {
    let well = PotentialWell::anharmonic(1.0, 1.0, 0.1, 1.0, (-6.0, 10.0)).unwrap();
    let (a, b) = well.turning_points(0.5).unwrap();
    assert!((well.potential(a) - 0.5).abs() < 1e-10);
    assert!((well.potential(b) - 0.5).abs() < 1e-10);
    let orbit = classical_orbit(&well, a, 1e-4);
    for target in [a + 0.2, 0.0, 0.5 * b] {
        assert_relative_eq!(
            well.classical_time(0.5, target).unwrap(),
            passage_time(&orbit, target),
            max_relative = 1e-8
        );
    }
    for n in [0, 3, 7] {
        let level = well.solve_level(n).unwrap();
        assert!(level.quantization_residual(&well).unwrap().abs() < 1e-9);
    }
}

#[test]
fn time_is_increasing_and_reaches_half_period() {
    let well = PotentialWell::quartic(1.0, 1.0, 1.0).unwrap();
    let level = well.solve_level(30).unwrap();
    let mut previous = -1.0;
    for k in 0..=200 {
        let x = level.turning_left + level.width() * k as f64 / 200.0;
        let tau = well.classical_time(level.energy, x).unwrap();
        assert!(tau > previous);
        previous = tau;
    }
    assert_relative_eq!(previous, 0.5 * level.period, max_relative = 1e-12);
    assert_relative_eq!(level.angular_frequency * level.period, std::f64::consts::TAU, max_relative = 1e-15);
}

#[test]
fn levels_increase_and_satisfy_quantization() {
    let well = PotentialWell::quartic(1.0, 1.0, 1.0).unwrap();
    let mut previous = f64::NEG_INFINITY;
    for n in 0..60 {
        let level = well.solve_level(n).unwrap();
        assert!(level.energy > previous);
        assert!(level.quantization_residual(&well).unwrap().abs() < 1e-9 * (n as f64 + 1.0));
        previous = level.energy;
    }
}

#[test]
fn quartic_spacing_is_the_classical_frequency() {
    let well = PotentialWell::quartic(1.0, 1.0, 1.0).unwrap();
    let level = well.solve_level(100).unwrap();
    let next = well.solve_level(101).unwrap();
    let spacing = next.energy - level.energy;
    assert_relative_eq!(spacing, well.hbar() * level.angular_frequency, max_relative = 0.01);
}
