//! Phase-space grid, classical-window report, limit checks and the
//! Bohm-limit table.

use pilotwave::eigensolver::ExactSuperposition;
use pilotwave::field::WaveField;
use pilotwave::husimi::{
    bohm_limit_check, classical_window, husimi_exact, husimi_exact_row, husimi_wkb,
    limit_large_lambda, limit_small_lambda, write_phase_space_csv, write_window_csv,
    CoherentStateParams, HusimiMode, MomentumTransform, PhaseSpaceRow,
};
use pilotwave::well::PotentialWell;
use pilotwave::wkb::{envelopes, SuperpositionSpec};
use pilotwave::Error;
use rayon::prelude::*;
use serde::Serialize;

use super::{cell_midpoints, linspace};
use crate::error::{CliError, Result};
use crate::{num, write_json, Context, CsvWriter, Outcome};

/// Limit and closed-form comparisons must agree to this relative deviation.
const LIMIT_TOLERANCE: f64 = 0.1;
/// Bohm-limit deviations must end below this fraction of the speed scale.
const BOHM_TOLERANCE: f64 = 0.02;

#[derive(Debug, Serialize)]
struct HusimiSummary {
    mode: &'static str,
    t: f64,
    lambda: f64,
    accuracy_dx: f64,
    accuracy_dp: f64,
    /// ∫∫Q over the grid; ∫ρ̄ over the interior in wkb mode.
    normalization: f64,
    window_points: usize,
    window_nonempty: usize,
    limits_pass: Option<bool>,
    bohm_limit_pass: bool,
}

struct LimitRow {
    regime: &'static str,
    x: f64,
    p: f64,
    lambda: f64,
    approx: f64,
    reference: f64,
}

impl LimitRow {
    fn deviation(&self) -> f64 {
        (self.approx - self.reference).abs() / self.reference.abs()
    }
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let well = ctx.well()?;
    let spec = ctx.spec(&well)?;
    let cfg = &ctx.config.analysis.husimi;
    let level = *spec.level();
    let t = cfg.time * level.period;
    let (lo, hi) = spec.interior();
    if !(hi > lo) {
        return Err(CliError::invalid("spec.zone_factor", "turning-point zones cover the whole orbit"));
    }
    let probe = cfg.probe_x.unwrap_or(well.minimum().0);
    if !(probe > lo && probe < hi) {
        return Err(CliError::invalid(
            "analysis.husimi.probe_x",
            format!("{probe} is outside the evaluable interval ({lo}, {hi})"),
        ));
    }
    let lambda = match cfg.lambda {
        Some(l) => l,
        None => default_lambda(&spec, &well),
    };
    let exact = if ctx.oracle { Some(ctx.exact(&well, &spec)?) } else { None };
    let mode = if exact.is_some() { HusimiMode::Exact } else { HusimiMode::Wkb };
    let mut files = Vec::new();

    // Window report.
    let window_x = if cfg.window_x.is_empty() {
        cell_midpoints(lo, hi, 41)
    } else {
        cfg.window_x.clone()
    };
    let windows: Vec<_> = window_x.iter().map(|&x| (x, classical_window(&spec, &well, x))).collect();
    let path = ctx.output("husimi_window.csv")?;
    write_window_csv(&path, &windows)?;
    files.push(path);

    // Phase-space grid over the orbit, padded by a few coherent widths.
    let hbar = well.hbar();
    let top = level.energy + spec.band() as f64 * hbar * level.angular_frequency;
    let p_max = (2.0 * well.mass() * (top - well.minimum().1)).sqrt() + 5.0 * hbar / lambda;
    let xs = linspace(level.turning_left - 4.0 * lambda, level.turning_right + 4.0 * lambda, cfg.x_points);
    let ps = linspace(-p_max, p_max, cfg.p_points);
    let (dx, dp) = (xs[1] - xs[0], ps[1] - ps[0]);
    let rows: Vec<Vec<PhaseSpaceRow>> = xs
        .par_iter()
        .map(|&x| grid_row(&spec, &well, exact.as_ref(), x, &ps, lambda, t))
        .collect::<Result<_>>()?;
    let rows: Vec<PhaseSpaceRow> = rows.into_iter().flatten().collect();
    let normalization = match mode {
        HusimiMode::Exact => rows.iter().map(|r| r.q).sum::<f64>() * dx * dp,
        HusimiMode::Wkb => {
            let n = 4000;
            let h = (hi - lo) / n as f64;
            cell_midpoints(lo, hi, n)
                .iter()
                .map(|&x| envelopes(&spec, &well, x, t).map_or(0.0, |e| e.rho_bar))
                .sum::<f64>()
                * h
        }
    };
    let path = ctx.output("husimi_grid.csv")?;
    write_phase_space_csv(&path, &rows)?;
    files.push(path);

    // Limit regimes against quadrature on the oracle.
    let limits_pass = match &exact {
        Some(state) => {
            let limits = limit_rows(&spec, &well, state, probe, t)?;
            let path = ctx.output("husimi_limits.csv")?;
            let mut csv = CsvWriter::create(
                &path,
                &["regime", "x", "p", "lambda", "approx", "reference", "relative_deviation", "tolerance", "pass"],
            )?;
            let mut all = true;
            for r in &limits {
                let pass = r.deviation() < LIMIT_TOLERANCE;
                all &= pass;
                csv.row(&[
                    r.regime.to_string(),
                    num(r.x),
                    num(r.p),
                    num(r.lambda),
                    num(r.approx),
                    num(r.reference),
                    num(r.deviation()),
                    num(LIMIT_TOLERANCE),
                    pass.to_string(),
                ])?;
                println!("{:<7} lambda {:.4e}  deviation {:.3e}", r.regime, r.lambda, r.deviation());
            }
            files.push(csv.finish()?);
            Some(all)
        }
        None => None,
    };

    // Bohm limit along decreasing λ.
    let lambda_minus = classical_window(&spec, &well, probe).lambda_minus;
    let lambdas: Vec<f64> = cfg.bohm_lambda_fractions.iter().map(|f| f * lambda_minus).collect();
    let oracle: Option<&dyn WaveField> = exact.as_ref().map(|e| e as &dyn WaveField);
    let report = bohm_limit_check(&spec, &well, oracle, probe, t, &lambdas)?;
    let path = ctx.output("husimi_bohm_limit.csv")?;
    let mut csv = CsvWriter::create(
        &path,
        &["lambda", "mean_velocity", "v_bohm_wkb", "deviation_wkb", "v_bohm_exact", "deviation_exact"],
    )?;
    for (k, &l) in report.lambdas.iter().enumerate() {
        let (v_exact, d_exact) = match (&report.v_bohm_exact, &report.deviations_exact) {
            (Some(v), Some(d)) => (num(*v), num(d[k])),
            _ => (String::new(), String::new()),
        };
        csv.row(&[
            num(l),
            num(report.mean_velocities[k]),
            num(report.v_bohm_wkb),
            num(report.deviations_wkb[k]),
            v_exact,
            d_exact,
        ])?;
    }
    files.push(csv.finish()?);
    let bohm_limit_pass = report.passes(BOHM_TOLERANCE);

    let accuracy = CoherentStateParams::new(probe, 0.0, lambda)?.accuracy(hbar);
    let summary = HusimiSummary {
        mode: mode.as_str(),
        t,
        lambda,
        accuracy_dx: accuracy.dx,
        accuracy_dp: accuracy.dp,
        normalization,
        window_points: windows.len(),
        window_nonempty: windows.iter().filter(|(_, w)| w.nonempty).count(),
        limits_pass,
        bohm_limit_pass,
    };
    println!(
        "mode {}  lambda {lambda:.4}  normalization {normalization:.9}  bohm limit {}",
        summary.mode,
        if bohm_limit_pass { "pass" } else { "fail" }
    );
    files.push(write_json(&ctx.output("husimi_summary.json")?, &summary)?);
    Ok(Outcome::ok(files))
}

/// Window midpoint at the bottom of the well, or the geometric mean of λ₋
/// and the orbit width where the window is unbounded.
fn default_lambda(spec: &SuperpositionSpec, well: &PotentialWell) -> f64 {
    let w = classical_window(spec, well, well.minimum().0);
    let mid = w.midpoint();
    if mid.is_finite() {
        mid
    } else {
        (w.lambda_minus * spec.level().width()).sqrt()
    }
}

fn grid_row(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    exact: Option<&ExactSuperposition>,
    x: f64,
    ps: &[f64],
    lambda: f64,
    t: f64,
) -> Result<Vec<PhaseSpaceRow>> {
    match exact {
        Some(state) => {
            let q = husimi_exact_row(state, x, lambda, ps, t)?;
            Ok(ps
                .iter()
                .zip(q)
                .map(|(&p, q)| PhaseSpaceRow { x, p, q, mode: HusimiMode::Exact })
                .collect())
        }
        None => {
            let mut row = Vec::with_capacity(ps.len());
            for &p in ps {
                match husimi_wkb(spec, well, x, p, lambda, t) {
                    Ok(s) => row.push(PhaseSpaceRow { x, p, q: s.q, mode: HusimiMode::Wkb }),
                    // Not evaluable in the turning-point zones or outside.
                    Err(Error::Flagged { .. }) => return Ok(Vec::new()),
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(row)
        }
    }
}

/// Small-λ, mid-window and large-λ comparisons at the probe position, on
/// the momentum branch that carries more weight.
fn limit_rows(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    state: &ExactSuperposition,
    x: f64,
    t: f64,
) -> Result<Vec<LimitRow>> {
    let level = spec.level();
    let env = envelopes(spec, well, x, t).map_err(|flag| Error::Flagged { x, flag })?;
    let big_p = well.classical_momentum(level.energy, x)?;
    let p = if env.rho_plus >= env.rho_minus { big_p } else { -big_p };
    let window = classical_window(spec, well, x);
    let mut rows = Vec::new();

    let small = window.lambda_minus / 50.0;
    let c = limit_small_lambda(state, well, level.energy, x, p, small, t)?;
    rows.push(LimitRow { regime: "small", x, p, lambda: small, approx: c.approx, reference: c.reference });

    let mid = if window.midpoint().is_finite() {
        window.midpoint()
    } else {
        (window.lambda_minus * level.width()).sqrt()
    };
    let closed = husimi_wkb(spec, well, x, p, mid, t)?.q;
    let reference = husimi_exact(state, &CoherentStateParams::new(x, p, mid)?, t)?;
    rows.push(LimitRow { regime: "window", x, p, lambda: mid, approx: closed, reference });

    let width = level.width();
    let large = 10.0 * width;
    let transform = MomentumTransform::new(state, t);
    let c = limit_large_lambda(state, &transform, width, x, p, large, t)?;
    rows.push(LimitRow { regime: "large", x, p, lambda: large, approx: c.approx, reference: c.reference });
    Ok(rows)
}
