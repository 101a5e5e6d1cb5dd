//! |ψ|²-distributed ensembles and the equivariance test.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigensolver::ExactSuperposition;
use crate::error::{Error, Result};
use crate::well::PotentialWell;
use crate::wkb::{wkb_density, SuperpositionSpec};

use super::integrate::{integrate_endpoint, IntegratorOptions, VelocityField};

/// Piecewise-linear CDF of a tabulated density (trapezoid rule).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    total: f64,
}

impl DensityTable {
    pub fn new(xs: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if xs.len() != density.len() || xs.len() < 2 {
            return Err(Error::DegenerateDensity(format!(
                "{} abscissae for {} density values",
                xs.len(),
                density.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateDensity("abscissae must increase".into()));
        }
        if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::DegenerateDensity("negative or non-finite value".into()));
        }
        let mut cdf = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..xs.len() {
            acc += 0.5 * (density[i] + density[i - 1]) * (xs[i] - xs[i - 1]);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::DegenerateDensity("density integrates to zero".into()));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(DensityTable { xs, cdf, total: acc })
    }

    /// Unnormalized integral of the tabulated density.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let k = self.xs.partition_point(|&v| v <= x) - 1;
        let w = (x - self.xs[k]) / (self.xs[k + 1] - self.xs[k]);
        self.cdf[k] + w * (self.cdf[k + 1] - self.cdf[k])
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.xs.len();
        let k = self.cdf.partition_point(|&c| c < u).clamp(1, n - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let w = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.xs[k - 1] + w * (self.xs[k] - self.xs[k - 1])
    }
}

/// |ψ(x, t)|² of an exact superposition on its grid.
pub fn exact_density_table(state: &ExactSuperposition, t: f64) -> Result<DensityTable> {
    DensityTable::new(state.grid().xs().collect(), state.grid_density(t))
}

/// WKB density on `points` uniform points of the evaluable interval.
pub fn wkb_density_table(
    spec: &SuperpositionSpec,
    well: &PotentialWell,
    t: f64,
    points: usize,
) -> Result<DensityTable> {
    let (lo, hi) = spec.interior();
    if !(hi > lo) || points < 2 {
        return Err(Error::DegenerateDensity("no evaluable interval".into()));
    }
    let xs: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let density = xs
        .iter()
        .map(|&x| wkb_density(spec, well, x, t).unwrap_or(0.0).max(0.0))
        .collect();
    DensityTable::new(xs, density)
}

/// Inverse-CDF samples, deterministic for a given seed.
pub fn sample_initial_positions(table: &DensityTable, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| table.quantile(rng.gen::<f64>())).collect()
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivarianceReport {
    /// KS distance of the transported ensemble from the reference at t1.
    pub ks: f64,
    /// KS distance of the initial ensemble from the reference at t0.
    pub initial_ks: f64,
    pub integrated: usize,
    pub excluded: usize,
    /// Final positions, `None` for excluded trajectories.
    pub final_positions: Vec<Option<f64>>,
}

impl EquivarianceReport {
    pub fn exclusion_fraction(&self) -> f64 {
        self.excluded as f64 / (self.integrated + self.excluded).max(1) as f64
    }
}

/// Transports `positions` from t0 to t1 and compares the result with
/// `reference_t1`. Trajectories that hit a node are excluded and counted.
pub fn equivariance_check<V: VelocityField + ?Sized>(
    field: &V,
    positions: &[f64],
    t0: f64,
    t1: f64,
    reference_t0: &DensityTable,
    reference_t1: &DensityTable,
    options: &IntegratorOptions,
) -> EquivarianceReport {
    let final_positions: Vec<Option<f64>> = positions
        .par_iter()
        .map(|&x| integrate_endpoint(field, x, t0, t1, options).ok())
        .collect();
    let moved: Vec<f64> = final_positions.iter().flatten().copied().collect();
    EquivarianceReport {
        ks: ks_statistic(&moved, |x| reference_t1.cdf(x)),
        initial_ks: ks_statistic(positions, |x| reference_t0.cdf(x)),
        integrated: moved.len(),
        excluded: positions.len() - moved.len(),
        final_positions,
    }
}

/// CSV with columns trajectory_id, t, x: one row per ensemble member at t0
/// and, if it was transported, one at t1.
pub fn write_ensemble_csv(
    path: &Path,
    t0: f64,
    initial: &[f64],
    t1: f64,
    transported: &[Option<f64>],
) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "trajectory_id,t,x")?;
    for (id, x) in initial.iter().enumerate() {
        writeln!(out, "{id},{t0:e},{x:e}")?;
    }
    for (id, x) in transported.iter().enumerate() {
        if let Some(x) = x {
            writeln!(out, "{id},{t1:e},{x:e}")?;
        }
    }
    out.flush()?;
    Ok(())
}
