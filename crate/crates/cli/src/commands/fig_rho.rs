//! Envelope snapshots ρ±(x, t) and their mean ρ̄.

use pilotwave::wkb::envelopes;
use serde::Serialize;

use super::cell_midpoints;
use crate::error::{CliError, Result};
use crate::{num, write_json, Context, CsvWriter, Outcome};

#[derive(Debug, Serialize)]
struct Snapshot {
    t: f64,
    /// ∫ρ̄ over the evaluable interval.
    mass: f64,
    /// Share of that mass where 1/2 ≤ ρ₊/ρ₋ ≤ 2.
    two_branch_fraction: f64,
    /// max ρ₋ / max ρ̄ and the same for ρ₊.
    peak_ratio_minus: f64,
    peak_ratio_plus: f64,
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let well = ctx.well()?;
    let spec = ctx.spec(&well)?;
    let cfg = &ctx.config.analysis.fig_rho;
    let period = spec.level().period;
    let (lo, hi) = spec.interior();
    if !(hi > lo) {
        return Err(CliError::invalid("spec.zone_factor", "turning-point zones cover the whole orbit"));
    }
    let xs = cell_midpoints(lo, hi, cfg.points);
    let h = (hi - lo) / cfg.points as f64;

    let path = ctx.output("rho_snapshots.csv")?;
    let mut csv = CsvWriter::create(&path, &["t", "x", "rho_plus", "rho_minus", "rho_bar"])?;
    let mut summary = Vec::new();
    for &frac in &cfg.times {
        let t = frac * period;
        let mut snap = Snapshot {
            t,
            mass: 0.0,
            two_branch_fraction: 0.0,
            peak_ratio_minus: 0.0,
            peak_ratio_plus: 0.0,
        };
        let (mut peak_bar, mut peak_plus, mut peak_minus, mut mixed) = (0.0f64, 0.0f64, 0.0f64, 0.0);
        for &x in &xs {
            let e = envelopes(&spec, &well, x, t).map_err(|flag| pilotwave::Error::Flagged { x, flag })?;
            csv.row(&[num(t), num(x), num(e.rho_plus), num(e.rho_minus), num(e.rho_bar)])?;
            snap.mass += e.rho_bar * h;
            if e.rho_minus > 0.0 && (0.5..=2.0).contains(&(e.rho_plus / e.rho_minus)) {
                mixed += e.rho_bar * h;
            }
            peak_bar = peak_bar.max(e.rho_bar);
            peak_plus = peak_plus.max(e.rho_plus);
            peak_minus = peak_minus.max(e.rho_minus);
        }
        if peak_bar > 0.0 {
            snap.two_branch_fraction = mixed / snap.mass;
            snap.peak_ratio_plus = peak_plus / peak_bar;
            snap.peak_ratio_minus = peak_minus / peak_bar;
        }
        println!(
            "t/T = {frac:.4}  two-branch fraction {:.4}  max rho_minus / max rho_bar {:.2e}",
            snap.two_branch_fraction, snap.peak_ratio_minus
        );
        summary.push(snap);
    }
    let csv_path = csv.finish()?;
    let json = write_json(&ctx.output("rho_summary.json")?, &summary)?;
    Ok(Outcome::ok(vec![csv_path, json]))
}
