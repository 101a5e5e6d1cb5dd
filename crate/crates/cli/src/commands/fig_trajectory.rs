//! A single trajectory in the frozen-envelope local field.

use pilotwave::bohm::{
    integrate_trajectory, local_trajectory_residual, time_averaged_velocity, IntegratorOptions,
    LocalField, LocalMotionParams,
};
use serde::Serialize;

use super::linspace;
use crate::error::Result;
use crate::{write_json, Context, Outcome};

#[derive(Debug, Serialize)]
struct TrajectorySummary {
    chi0: f64,
    phi0: f64,
    lambda0: f64,
    v_cl: f64,
    peak_velocity: f64,
    peak_velocity_expected: f64,
    peak_time: f64,
    /// λ₀ over the first-passage time; absent if the run is shorter than
    /// one crossing.
    time_averaged_velocity: Option<f64>,
    time_averaged_velocity_expected: f64,
    slow_fraction: f64,
    slow_fraction_expected: f64,
    max_implicit_residual: f64,
    steps: usize,
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let cfg = &ctx.config.analysis.fig_trajectory;
    let params = LocalMotionParams::synthetic(cfg.chi0, cfg.phi0, cfg.lambda0, cfg.v_cl);
    let field = LocalField(params);
    let crossing = params.crossing_time();
    let span = cfg.crossings * crossing;
    let count = ((cfg.samples as f64 * cfg.crossings).ceil() as usize).max(2);
    let outputs = linspace(0.0, span, count);
    let options = IntegratorOptions::for_width(cfg.lambda0);
    let traj = integrate_trajectory(&field, 0.0, 0.0, span, &options, &outputs)?;

    let (peak_time, peak) = traj.peak_speed(&field);
    let average = time_averaged_velocity(&traj, 0.0, cfg.lambda0).ok();
    let mean = params.mean_velocity();
    let residual = traj
        .samples()
        .iter()
        .map(|s| local_trajectory_residual(&params, s.x, s.t).abs())
        .fold(0.0, f64::max);
    let summary = TrajectorySummary {
        chi0: cfg.chi0,
        phi0: cfg.phi0,
        lambda0: cfg.lambda0,
        v_cl: cfg.v_cl,
        peak_velocity: peak.copysign(cfg.chi0),
        peak_velocity_expected: params.peak_velocity(),
        peak_time,
        time_averaged_velocity: average,
        time_averaged_velocity_expected: mean,
        slow_fraction: traj.time_fraction_below(&field, mean.abs(), 16),
        slow_fraction_expected: params.slow_fraction(),
        max_implicit_residual: residual,
        steps: traj.stats().steps,
    };
    println!(
        "peak v {:.6} (expected {:.6}), mean v {} (expected {:.6}), slow fraction {:.4}",
        summary.peak_velocity,
        summary.peak_velocity_expected,
        average.map_or("n/a".to_string(), |v| format!("{v:.6}")),
        mean,
        summary.slow_fraction
    );

    let csv = ctx.output("trajectory.csv")?;
    traj.write_csv(&csv)?;
    let json = write_json(&ctx.output("trajectory_summary.json")?, &summary)?;
    Ok(Outcome::ok(vec![csv, json]))
}
