//! Invariants of the configured state, checked at random points and
//! written as a JSON report plus a text summary. The report contains no
//! timings, so a fixed seed reproduces it byte for byte.

use std::fmt::Write as _;

use pilotwave::bohm::{bohm_velocity_wkb, extremal_velocities};
use pilotwave::field::WaveField;
use pilotwave::husimi::{husimi_wkb, AccuracyPair};
use pilotwave::quadrature::trapezoid_uniform;
use pilotwave::well::{PotentialKind, PotentialWell};
use pilotwave::wkb::{envelopes, normalize, norm_squared, wkb_density, wkb_wavefunction, SuperpositionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::{Context, Outcome};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value` ≤ `tolerance`.
    fn at_most(name: &'static str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed: value <= tolerance,
            value,
            tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub center_level: usize,
    pub band: usize,
    pub oracle: bool,
    pub samples: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let well = ctx.well()?;
    let seed = ctx.seed_for("property_suite");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = ctx.config.analysis.property_suite.samples;
    let mut checks = Vec::new();

    // Normalization is checked on the raw coefficients; the remaining
    // checks run on the normalized set so that one bad input does not mask
    // the rest.
    let mut coefficients = ctx.config.raw_coefficients(ctx.seed_for("coefficients"))?;
    let norm = norm_squared(&coefficients);
    checks.push(Check::at_most(
        "coefficient_normalization",
        (norm - 1.0).abs(),
        1e-12,
        format!("sum |c_r|^2 = {norm:.15}"),
    ));
    normalize(&mut coefficients)?;
    let spec = ctx.config.build_spec(&well, coefficients)?;
    let level = *spec.level();
    let (lo, hi) = spec.interior();
    if !(hi > lo) {
        return Err(CliError::invalid("spec.zone_factor", "turning-point zones cover the whole orbit"));
    }
    let scale = spec.node_scale();
    let points: Vec<(f64, f64)> = (0..samples)
        .map(|_| (rng.gen_range(lo..hi), rng.gen_range(0.0..level.period)))
        .collect();

    checks.push(quantization(&well, &spec)?);
    checks.push(level_order(&well, &spec)?);

    let mut min_density = f64::INFINITY;
    let mut mismatch = 0.0f64;
    let mut periodic = 0.0f64;
    for &(x, t) in &points {
        let Ok(rho) = wkb_density(&spec, &well, x, t) else { continue };
        min_density = min_density.min(rho);
        if let Ok(psi) = wkb_wavefunction(&spec, &well, x, t) {
            mismatch = mismatch.max((psi.norm_sqr() - rho).abs());
        }
        if let Ok(later) = wkb_density(&spec, &well, x, t + level.period) {
            periodic = periodic.max((later - rho).abs());
        }
    }
    checks.push(Check::at_most(
        "density_nonnegative",
        (-min_density / scale).max(0.0),
        1e-12,
        format!("min density {min_density:.3e}"),
    ));
    checks.push(Check::at_most(
        "density_matches_wavefunction",
        mismatch / scale,
        1e-9,
        "| |psi|^2 - three-term density | / density scale",
    ));
    checks.push(Check::at_most(
        "density_period",
        periodic / scale,
        1e-9,
        "| rho(x, t + T) - rho(x, t) | / density scale",
    ));

    let mut product = 0.0f64;
    let mut violations = 0usize;
    let mut evaluated = 0usize;
    for &(x, t) in &points {
        let (Ok((slow, fast)), Ok(v)) = (extremal_velocities(&spec, &well, x, t), bohm_velocity_wkb(&spec, &well, x, t))
        else {
            continue;
        };
        evaluated += 1;
        let v_cl = well.classical_momentum(level.energy, x)? / well.mass();
        product = product.max((slow * fast - v_cl * v_cl).abs() / (v_cl * v_cl));
        if v.abs() < slow.abs() * (1.0 - 1e-9) || v.abs() > fast.abs() * (1.0 + 1e-9) {
            violations += 1;
        }
    }
    checks.push(Check::at_most(
        "extremal_velocity_product",
        product,
        1e-12,
        format!("max |v+ v- - v_cl^2| / v_cl^2 over {evaluated} points"),
    ));
    checks.push(Check::at_most(
        "velocity_between_extremes",
        violations as f64,
        0.0,
        format!("{violations} of {evaluated} points outside [|v-|, |v+|]"),
    ));

    let worst_product = [0.01, 0.1, 1.0, 10.0]
        .iter()
        .map(|&l| {
            let a = AccuracyPair::new(l, well.hbar());
            (a.product() - 0.5 * well.hbar()).abs() / (0.5 * well.hbar())
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("accuracy_product", worst_product, 1e-14, "dx dp = hbar/2"));

    checks.push(momentum_marginal(&spec, &well, &points)?);
    if symmetric(&well) {
        checks.push(reflection(&spec, &well, &points)?);
    }
    checks.push(stasis(&well, &spec, &points)?);

    if ctx.oracle {
        let exact = ctx.exact(&well, &spec)?;
        let step = exact.grid().step;
        let drift = [0.0, 0.3, 0.7]
            .iter()
            .map(|f| (trapezoid_uniform(&exact.grid_density(f * level.period), step) - 1.0).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most("exact_norm", drift, 1e-6, "| int |psi|^2 - 1 | at three times"));
        checks.push(continuity(&exact, &well, &level, &points)?);
    }

    let failed = checks.iter().filter(|c| !c.passed).count();
    let report = SuiteReport {
        seed,
        center_level: spec.center_level(),
        band: spec.band(),
        oracle: ctx.oracle,
        samples,
        passed: checks.len() - failed,
        failed,
        checks,
    };
    let json_path = ctx.output("property_report.json")?;
    crate::write_json(&json_path, &report)?;
    let text = summary_text(&report);
    print!("{text}");
    let text_path = ctx.output("property_report.txt")?;
    std::fs::write(&text_path, &text).map_err(|e| CliError::io(&text_path, e))?;
    let failure = (failed > 0).then_some(CliError::ChecksFailed {
        failed,
        total: report.checks.len(),
    });
    Ok(Outcome {
        files: vec![json_path, text_path],
        failure,
    })
}

fn summary_text(report: &SuiteReport) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{verdict}  {:<28} {:>10.3e} (tol {:.0e})  {}", c.name, c.value, c.tolerance, c.detail);
    }
    let _ = writeln!(s, "{} passed, {} failed", report.passed, report.failed);
    s
}

fn quantization(well: &PotentialWell, spec: &SuperpositionSpec) -> Result<Check> {
    let mut worst = 0.0f64;
    for (n, _) in spec.terms() {
        let level = well.solve_level(n)?;
        worst = worst.max(level.quantization_residual(well)?.abs() / well.planck());
    }
    Ok(Check::at_most(
        "quantization_residual",
        worst,
        1e-9,
        "| int p dx - (2n+1) h/4 | / h over the band",
    ))
}

fn level_order(well: &PotentialWell, spec: &SuperpositionSpec) -> Result<Check> {
    let energies = spec
        .offsets()
        .map(|r| well.solve_level((spec.center_level() as i64 + r) as usize).map(|l| l.energy))
        .collect::<pilotwave::Result<Vec<f64>>>()?;
    let min_gap = energies.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let bad = energies.windows(2).filter(|w| !(w[1] > w[0])).count();
    Ok(Check::at_most(
        "energies_increasing",
        bad as f64,
        0.0,
        format!("smallest gap {min_gap:.6e}"),
    ))
}

/// ∫Q dp of the closed form against ρ̄ − 2e^{−λ²P²/ħ²} cos Φ √(ρ₊ρ₋).
fn momentum_marginal(spec: &SuperpositionSpec, well: &PotentialWell, points: &[(f64, f64)]) -> Result<Check> {
    let hbar = well.hbar();
    let mut worst = 0.0f64;
    for &(x, t) in points.iter().take(20) {
        let Ok(env) = envelopes(spec, well, x, t) else { continue };
        let point = spec.table().point(well, x)?;
        let p = point.momentum;
        let lambda = 2.0 * hbar / p;
        let half = p + 12.0 * hbar / lambda;
        let n = 4000;
        let h = 2.0 * half / n as f64;
        let mut integral = 0.0;
        for k in 0..n {
            let q = -half + h * (k as f64 + 0.5);
            integral += husimi_wkb(spec, well, x, q, lambda, t)?.q * h;
        }
        let mut expected = env.rho_bar;
        if let Some(phase) = env.interference_phase(point.action, hbar) {
            expected -= 2.0 * (-(lambda * p / hbar).powi(2)).exp() * phase.cos() * (env.rho_plus * env.rho_minus).sqrt();
        }
        worst = worst.max((integral - expected).abs() / env.rho_bar.max(f64::MIN_POSITIVE));
    }
    Ok(Check::at_most(
        "husimi_momentum_marginal",
        worst,
        1e-8,
        "closed-form p-marginal against the smoothed density",
    ))
}

fn symmetric(well: &PotentialWell) -> bool {
    let (lo, hi) = well.domain();
    matches!(well.kind(), PotentialKind::Harmonic { .. } | PotentialKind::Quartic { .. }) && (lo + hi).abs() < 1e-12 * (hi - lo)
}

fn reflection(spec: &SuperpositionSpec, well: &PotentialWell, points: &[(f64, f64)]) -> Result<Check> {
    let mirror = spec.reflected(well)?;
    let mut worst = 0.0f64;
    for &(x, t) in points {
        if let (Ok(a), Ok(b)) = (wkb_density(spec, well, x, t), wkb_density(&mirror, well, -x, t)) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(Check::at_most(
        "reflection_parity",
        worst / spec.node_scale(),
        1e-9,
        "rho(x) of the state against rho(-x) of its mirror image",
    ))
}

fn stasis(well: &PotentialWell, spec: &SuperpositionSpec, points: &[(f64, f64)]) -> Result<Check> {
    let eigen = SuperpositionSpec::with_options(
        well,
        spec.center_level(),
        0,
        vec![pilotwave::Complex64::new(1.0, 0.0)],
        pilotwave::wkb::SpecOptions {
            zone_factor: spec.zone_factor(),
            ..Default::default()
        },
    )?;
    let worst = points
        .iter()
        .filter_map(|&(x, t)| bohm_velocity_wkb(&eigen, well, x, t).ok())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(Check::at_most("eigenstate_stasis", worst, 1e-10, "max |v_B| for the single level n-bar"))
}

/// ∂ₜρ + ∂ₓj on the exact state by central differences, relative to
/// ρ_env·p²/m at the same point.
fn continuity(
    exact: &pilotwave::eigensolver::ExactSuperposition,
    well: &PotentialWell,
    level: &pilotwave::well::ClassicalLevel,
    points: &[(f64, f64)],
) -> Result<Check> {
    let (hbar, mass) = (WaveField::hbar(exact), WaveField::mass(exact));
    let p_top = (2.0 * mass * (level.energy - well.minimum().1)).sqrt();
    let lambda = well.planck() / p_top;
    let (hx, ht) = (1e-4 * lambda, 1e-4 * lambda * mass / p_top);
    let rho = |x: f64, t: f64| exact.amplitude(x, t).map(|a| a.norm_sqr());
    let flux = |x: f64, t: f64| {
        exact
            .amplitude_and_gradient(x, t)
            .map(|(psi, d)| hbar * (psi.conj() * d).im / mass)
    };
    let mut worst = 0.0f64;
    for &(x, t) in points.iter().take(200) {
        let drho = (rho(x, t + ht)? - rho(x, t - ht)?) / (2.0 * ht);
        let dflux = (flux(x + hx, t)? - flux(x - hx, t)?) / (2.0 * hx);
        let p = well.classical_momentum(level.energy, x)?;
        let scale = exact.envelope_density(x)? * p * p / mass;
        worst = worst.max((drho + dflux).abs() / scale);
    }
    Ok(Check::at_most(
        "continuity_residual",
        worst,
        1e-4,
        "| d_t rho + d_x j | / (rho_env p^2/m)",
    ))
}
