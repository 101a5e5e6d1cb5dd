//! Transport of a |ψ|²-distributed ensemble and its KS distance from
//! |ψ(t1)|².

use pilotwave::bohm::{
    equivariance_check, exact_density_table, sample_initial_positions, wkb_density_table,
    write_ensemble_csv, ExactField, IntegratorOptions, WkbField,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::{write_json, Context, Outcome};

/// Points of the tabulated WKB density when no oracle is used.
const WKB_TABLE_POINTS: usize = 20_000;

#[derive(Debug, Serialize)]
struct EquivarianceSummary {
    mode: &'static str,
    trajectories: usize,
    t0: f64,
    t1: f64,
    seed: u64,
    ks: f64,
    initial_ks: f64,
    integrated: usize,
    excluded: usize,
    ks_tolerance: f64,
    pass: bool,
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let well = ctx.well()?;
    let spec = ctx.spec(&well)?;
    let cfg = &ctx.config.analysis.equivariance;
    let level = spec.level();
    let t0 = cfg.t0 * level.period;
    let t1 = t0 + cfg.span * level.period;
    let seed = ctx.seed_for("ensemble");
    let options = IntegratorOptions::for_width(level.width());

    let (mode, report, positions) = if ctx.oracle {
        let exact = ctx.exact(&well, &spec)?;
        let table0 = exact_density_table(&exact, t0)?;
        let table1 = exact_density_table(&exact, t1)?;
        let positions = sample_initial_positions(&table0, cfg.trajectories, seed);
        let report = equivariance_check(&ExactField(&exact), &positions, t0, t1, &table0, &table1, &options);
        ("exact", report, positions)
    } else {
        let table0 = wkb_density_table(&spec, &well, t0, WKB_TABLE_POINTS)?;
        let table1 = wkb_density_table(&spec, &well, t1, WKB_TABLE_POINTS)?;
        let positions = sample_initial_positions(&table0, cfg.trajectories, seed);
        let field = WkbField { spec: &spec, well: &well };
        let report = equivariance_check(&field, &positions, t0, t1, &table0, &table1, &options);
        ("wkb", report, positions)
    };

    let csv = ctx.output("ensemble.csv")?;
    write_ensemble_csv(&csv, t0, &positions, t1, &report.final_positions)?;
    let pass = report.ks < cfg.ks_tolerance;
    let summary = EquivarianceSummary {
        mode,
        trajectories: cfg.trajectories,
        t0,
        t1,
        seed,
        ks: report.ks,
        initial_ks: report.initial_ks,
        integrated: report.integrated,
        excluded: report.excluded,
        ks_tolerance: cfg.ks_tolerance,
        pass,
    };
    println!(
        "{mode}: KS {:.4} (initial {:.4}), {} integrated, {} excluded",
        report.ks, report.initial_ks, report.integrated, report.excluded
    );
    let json = write_json(&ctx.output("equivariance.json")?, &summary)?;
    let failure = (!pass).then_some(CliError::ChecksFailed { failed: 1, total: 1 });
    Ok(Outcome {
        files: vec![csv, json],
        failure,
    })
}
