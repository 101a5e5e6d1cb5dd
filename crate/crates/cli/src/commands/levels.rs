//! Level table: WKB energies and turning points, optionally against the
//! Numerov oracle.

use pilotwave::eigensolver::{solve_band, EigenCache, GridSpec};
use pilotwave::well::{ClassicalLevel, PotentialKind};

use crate::error::Result;
use crate::{num, Context, CsvWriter, Outcome};

pub fn run(ctx: &Context) -> Result<Outcome> {
    let well = ctx.well()?;
    let levels = &ctx.config.analysis.levels.levels;
    let classical = levels
        .iter()
        .map(|&n| well.solve_level(n))
        .collect::<pilotwave::Result<Vec<ClassicalLevel>>>()?;

    // The oscillator spectrum is known in closed form; other wells use the
    // shooting solver.
    let exact: Option<Vec<f64>> = if !ctx.oracle {
        None
    } else if let PotentialKind::Harmonic { omega } = well.kind() {
        Some(levels.iter().map(|&n| well.hbar() * omega * (n as f64 + 0.5)).collect())
    } else {
        let cache = match &ctx.config.output.cache_dir {
            Some(dir) => Some(EigenCache::new(dir)?),
            None => None,
        };
        let states = solve_band(&well, levels, &GridSpec::default(), cache.as_ref())?;
        Some(
            levels
                .iter()
                .map(|&n| states.iter().find(|s| s.index == n).map_or(f64::NAN, |s| s.energy))
                .collect(),
        )
    };

    let path = ctx.output("levels.csv")?;
    let mut csv = CsvWriter::create(&path, &["n", "E_wkb", "E_exact", "rel_err", "a_minus", "a_plus", "T"])?;
    for (k, level) in classical.iter().enumerate() {
        let (e_exact, rel) = match &exact {
            Some(e) => (num(e[k]), num(((level.energy - e[k]) / e[k]).abs())),
            None => (String::new(), String::new()),
        };
        csv.row(&[
            level.index.to_string(),
            num(level.energy),
            e_exact,
            rel,
            num(level.turning_left),
            num(level.turning_right),
            num(level.period),
        ])?;
        println!("n = {:>4}  E = {:.12}", level.index, level.energy);
    }
    Ok(Outcome::ok(vec![csv.finish()?]))
}
