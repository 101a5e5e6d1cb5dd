//! Numerov shooting eigensolver.
//!
//! Eigenvalues are isolated by counting the nodes of the forward Numerov
//! solution (a Sturm sequence count for the discrete problem) and then
//! refined by bisection on the Casoratian mismatch of inward and outward
//! solutions at a matching point just inside the right turning point.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Flag, Flagged, Result};
use crate::field::WaveField;
use crate::interp::UniformGrid;
use crate::well::PotentialWell;
use crate::wkb::SuperpositionSpec;

const MIN_POINTS_PER_WAVELENGTH: f64 = 20.0;
const RESCALE_ABOVE: f64 = 1e100;

/// How the integration grid is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    /// Grid sized from the highest requested level.
    Auto {
        /// Points per de Broglie wavelength at the well minimum.
        points_per_wavelength: f64,
        min_points: usize,
        /// Required WKB decay exponent ∫κ dx beyond each turning point.
        tail_decay: f64,
    },
    Explicit { start: f64, end: f64, points: usize },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Auto {
            points_per_wavelength: 100.0,
            min_points: 4000,
            tail_decay: 26.0,
        }
    }
}

impl GridSpec {
    /// Resolves the spec to a concrete grid able to hold levels up to `energy`.
    pub fn resolve(&self, well: &PotentialWell, energy: f64) -> Result<UniformGrid> {
        let grid = match *self {
            GridSpec::Explicit { start, end, points } => {
                if points < 16 || !(end > start) {
                    return Err(Error::InvalidParameter {
                        name: "grid",
                        reason: format!("[{start}, {end}] with {points} points"),
                    });
                }
                UniformGrid::new(start, end, points)
            }
            GridSpec::Auto {
                points_per_wavelength,
                min_points,
                tail_decay,
            } => {
                let (a_minus, a_plus) = well.turning_points(energy)?;
                let width = a_plus - a_minus;
                let hbar_omega = well.hbar() * std::f64::consts::TAU / well.period(energy)?;
                let (lo, hi) = well.domain();
                let left = extend_tail(well, energy, a_minus, lo, hbar_omega, tail_decay)
                    .min(a_minus - 0.25 * width)
                    .max(lo);
                let right = extend_tail(well, energy, a_plus, hi, hbar_omega, tail_decay)
                    .max(a_plus + 0.25 * width)
                    .min(hi);
                let step = wavelength_at_minimum(well, energy) / points_per_wavelength;
                let points = (((right - left) / step).ceil() as usize + 1).max(min_points);
                UniformGrid::new(left, right, points)
            }
        };
        let ppw = wavelength_at_minimum(well, energy) / grid.step;
        if ppw < MIN_POINTS_PER_WAVELENGTH {
            return Err(Error::InsufficientResolution {
                points_per_wavelength: ppw,
                required: MIN_POINTS_PER_WAVELENGTH,
            });
        }
        Ok(grid)
    }
}

fn wavelength_at_minimum(well: &PotentialWell, energy: f64) -> f64 {
    let p = (2.0 * well.mass() * (energy - well.minimum().1)).sqrt();
    well.planck() / p
}

/// Walks outward from a turning point until V − E > 10ħω and the WKB decay
/// exponent reaches `tail_decay`, or the domain ends.
fn extend_tail(
    well: &PotentialWell,
    energy: f64,
    turning: f64,
    boundary: f64,
    hbar_omega: f64,
    tail_decay: f64,
) -> f64 {
    let steps = 20_000;
    let dx = (boundary - turning) / steps as f64;
    let mut exponent = 0.0;
    let kappa = |x: f64| {
        (2.0 * well.mass() * (well.potential(x) - energy).max(0.0)).sqrt() / well.hbar()
    };
    let mut prev = kappa(turning);
    for i in 1..=steps {
        let x = turning + dx * i as f64;
        let k = kappa(x);
        exponent += 0.5 * (prev + k) * dx.abs();
        prev = k;
        if exponent >= tail_decay && well.potential(x) - energy > 10.0 * hbar_omega {
            return x;
        }
    }
    boundary
}

/// A bound eigenstate tabulated on a uniform grid with its first and
/// second derivatives, interpolated by quintic Hermite polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactEigenstate {
    pub index: usize,
    pub energy: f64,
    pub grid: UniformGrid,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    pub second_derivative: Vec<f64>,
}

impl ExactEigenstate {
    fn from_values(
        well: &PotentialWell,
        index: usize,
        energy: f64,
        grid: UniformGrid,
        mut values: Vec<f64>,
    ) -> Self {
        let norm = trapezoid_norm(&values, grid.step).sqrt();
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // Sign convention: the first significant lobe is positive.
        let first = values
            .iter()
            .find(|v| v.abs() > 1e-3 * max)
            .copied()
            .unwrap_or(1.0);
        let scale = first.signum() / norm;
        values.iter_mut().for_each(|v| *v *= scale);
        let derivative = central_derivative(&values, grid.step);
        let coef = 2.0 * well.mass() / (well.hbar() * well.hbar());
        let second_derivative = values
            .iter()
            .enumerate()
            .map(|(i, y)| coef * (well.potential(grid.x(i)) - energy) * y)
            .collect();
        ExactEigenstate {
            index,
            energy,
            grid,
            values,
            derivative,
            second_derivative,
        }
    }

    /// ψ(x) and ψ′(x); `None` outside the grid.
    pub fn eval(&self, x: f64) -> Option<(f64, f64)> {
        let w = self.grid.hermite(x)?;
        Some(w.apply(&self.values, &self.derivative, &self.second_derivative))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.eval(x).map(|v| v.0).ok_or(Error::OutsideGrid {
            x,
            lo: self.grid.start,
            hi: self.grid.end(),
        })
    }

    pub fn norm_squared(&self) -> f64 {
        trapezoid_norm(&self.values, self.grid.step)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sign changes, ignoring the tails below 1e-8 of the maximum.
    pub fn node_count(&self) -> usize {
        let floor = 1e-8 * self.max_abs();
        let mut count = 0;
        let mut last = 0.0;
        for &v in &self.values {
            if v.abs() < floor {
                continue;
            }
            if last != 0.0 && v.signum() != f64::signum(last) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Residual of the Numerov form −(ħ²/2m)δ²ψ + B(Vψ) − E·Bψ, where B is
    /// the (1, 10, 1)/12 averaging operator, relative to |E|·max|ψ|.
    pub fn numerov_residual(&self, well: &PotentialWell) -> f64 {
        let h = self.grid.step;
        let kin = well.hbar() * well.hbar() / (2.0 * well.mass() * h * h);
        let y = &self.values;
        let vy: Vec<f64> = (0..y.len()).map(|i| well.potential(self.grid.x(i)) * y[i]).collect();
        let mut worst: f64 = 0.0;
        for i in 1..y.len() - 1 {
            let lap = y[i + 1] - 2.0 * y[i] + y[i - 1];
            let bv = (vy[i + 1] + 10.0 * vy[i] + vy[i - 1]) / 12.0;
            let by = (y[i + 1] + 10.0 * y[i] + y[i - 1]) / 12.0;
            worst = worst.max((-kin * lap + bv - self.energy * by).abs());
        }
        worst / (self.energy.abs() * self.max_abs())
    }
}

fn trapezoid_norm(values: &[f64], step: f64) -> f64 {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    crate::quadrature::trapezoid_uniform(&sq, step)
}

/// Sixth-order central differences, lower order at the ends.
fn central_derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            if i >= 3 && i + 3 < n {
                (-y[i - 3] + 9.0 * y[i - 2] - 45.0 * y[i - 1] + 45.0 * y[i + 1] - 9.0 * y[i + 2]
                    + y[i + 3])
                    / (60.0 * h)
            } else if i >= 1 && i + 1 < n {
                (y[i + 1] - y[i - 1]) / (2.0 * h)
            } else if i == 0 {
                (y[1] - y[0]) / h
            } else {
                (y[n - 1] - y[n - 2]) / h
            }
        })
        .collect()
}

/// Discretized radial problem on a fixed grid.
struct Numerov {
    grid: UniformGrid,
    potential: Vec<f64>,
    /// (2m/ħ²)·h²/12
    coef: f64,
}

impl Numerov {
    fn new(well: &PotentialWell, grid: UniformGrid) -> Self {
        let potential = grid.xs().map(|x| well.potential(x)).collect();
        let coef = 2.0 * well.mass() / (well.hbar() * well.hbar()) * grid.step * grid.step / 12.0;
        Numerov {
            grid,
            potential,
            coef,
        }
    }

    fn f(&self, energy: f64, i: usize) -> f64 {
        1.0 + self.coef * (energy - self.potential[i])
    }

    fn stable(&self, energy: f64) -> bool {
        self.potential.iter().all(|v| self.coef * (v - energy) < 0.5)
    }

    /// Number of sign changes of the forward solution with y₀ = 0.
    fn count_nodes(&self, energy: f64) -> usize {
        let n = self.grid.len;
        let (mut y0, mut y1) = (0.0, 1.0);
        let mut f0 = self.f(energy, 0);
        let mut f1 = self.f(energy, 1);
        let mut count = 0;
        for i in 1..n - 1 {
            let f2 = self.f(energy, i + 1);
            let mut y2 = ((12.0 - 10.0 * f1) * y1 - f0 * y0) / f2;
            if y2.abs() > RESCALE_ABOVE {
                y1 /= RESCALE_ABOVE;
                y2 /= RESCALE_ABOVE;
            }
            if y2 == 0.0 || y2.signum() != y1.signum() {
                count += 1;
            }
            y0 = y1;
            y1 = y2;
            f0 = f1;
            f1 = f2;
        }
        count
    }

    /// Outward solution on [0, m+1] and inward solution on [m, N-1].
    fn shoot(&self, energy: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.len;
        let mut left = vec![0.0; m + 2];
        left[1] = 1e-30;
        for i in 1..=m {
            left[i + 1] = ((12.0 - 10.0 * self.f(energy, i)) * left[i]
                - self.f(energy, i - 1) * left[i - 1])
                / self.f(energy, i + 1);
            if left[i + 1].abs() > RESCALE_ABOVE {
                left.iter_mut().for_each(|v| *v /= RESCALE_ABOVE);
            }
        }
        let mut right = vec![0.0; n];
        right[n - 2] = 1e-30;
        for i in (m + 1..n - 1).rev() {
            right[i - 1] = ((12.0 - 10.0 * self.f(energy, i)) * right[i]
                - self.f(energy, i + 1) * right[i + 1])
                / self.f(energy, i - 1);
            if right[i - 1].abs() > RESCALE_ABOVE {
                right.iter_mut().for_each(|v| *v /= RESCALE_ABOVE);
            }
        }
        (left, right)
    }

    /// Casoratian of the transformed solutions u = f·y at (m, m+1).
    fn mismatch(&self, energy: f64, m: usize) -> f64 {
        let (l, r) = self.shoot(energy, m);
        let (fm, fm1) = (self.f(energy, m), self.f(energy, m + 1));
        let (lm, lm1) = (l[m] * fm, l[m + 1] * fm1);
        let (rm, rm1) = (r[m] * fm, r[m + 1] * fm1);
        let scale = (lm.abs() + lm1.abs()) * (rm.abs() + rm1.abs());
        (lm * rm1 - lm1 * rm) / scale
    }

    fn eigenvector(&self, energy: f64, m: usize) -> Vec<f64> {
        let (l, r) = self.shoot(energy, m);
        let s = (l[m] * r[m] + l[m + 1] * r[m + 1]) / (r[m] * r[m] + r[m + 1] * r[m + 1]);
        let mut y = r.iter().map(|v| v * s).collect::<Vec<_>>();
        y[..=m].copy_from_slice(&l[..=m]);
        y
    }
}

/// Solves for the `n`-th bound state on the grid described by `grid_spec`.
pub fn solve_eigenpair(well: &PotentialWell, n: usize, grid_spec: &GridSpec) -> Result<ExactEigenstate> {
    let level = well.solve_level(n)?;
    let grid = grid_spec.resolve(well, level.energy)?;
    solve_on_grid(well, n, grid)
}

/// Solves the `n`-th bound state on a fixed grid.
pub fn solve_on_grid(well: &PotentialWell, n: usize, grid: UniformGrid) -> Result<ExactEigenstate> {
    let guess = well.solve_level(n)?;
    let problem = Numerov::new(well, grid);
    let vmin = well.minimum().1;
    let hbar_omega = well.hbar() * guess.angular_frequency;

    // Isolate the eigenvalue between energies with n and n+1 nodes.
    let mut lo = vmin;
    let mut hi = guess.energy + 2.0 * hbar_omega;
    let mut expand = 0;
    while problem.count_nodes(hi) < n + 1 {
        hi = vmin + 2.0 * (hi - vmin);
        expand += 1;
        if expand > 60 {
            return Err(Error::NodeCountBracket { n });
        }
    }
    if !problem.stable(hi) {
        return Err(Error::InsufficientResolution {
            points_per_wavelength: wavelength_at_minimum(well, guess.energy) / grid.step,
            required: MIN_POINTS_PER_WAVELENGTH,
        });
    }
    let mut isolated = false;
    for _ in 0..200 {
        if problem.count_nodes(lo) == n && problem.count_nodes(hi) == n + 1 {
            isolated = true;
            break;
        }
        let mid = 0.5 * (lo + hi);
        if problem.count_nodes(mid) <= n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !isolated {
        return Err(Error::NodeCountBracket { n });
    }

    let matching = {
        let a_plus = guess.turning_right;
        let idx = ((a_plus - grid.start) / grid.step).floor() as isize;
        idx.clamp(2, grid.len as isize - 4) as usize
    };
    let mut f_lo = problem.mismatch(lo, matching);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = problem.mismatch(mid, matching);
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let energy = 0.5 * (lo + hi);
    let values = problem.eigenvector(energy, matching);
    Ok(ExactEigenstate::from_values(well, n, energy, grid, values))
}

/// Solves several levels on one grid sized for the highest of them.
pub fn solve_band(
    well: &PotentialWell,
    levels: &[usize],
    grid_spec: &GridSpec,
    cache: Option<&EigenCache>,
) -> Result<Vec<ExactEigenstate>> {
    let top = *levels.iter().max().ok_or(Error::InvalidParameter {
        name: "levels",
        reason: "no levels requested".into(),
    })?;
    let grid = grid_spec.resolve(well, well.solve_level(top)?.energy)?;
    levels
        .par_iter()
        .map(|&n| {
            if let Some(cache) = cache {
                if let Some(state) = cache.load(well, n, &grid)? {
                    return Ok(state);
                }
                let state = solve_on_grid(well, n, grid)?;
                cache.store(well, &state)?;
                Ok(state)
            } else {
                solve_on_grid(well, n, grid)
            }
        })
        .collect()
}

/// On-disk store of solved eigenstates keyed by (well, n, grid).
#[derive(Debug, Clone)]
pub struct EigenCache {
    dir: PathBuf,
}

impl EigenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(EigenCache { dir })
    }

    fn path(&self, well: &PotentialWell, n: usize, grid: &UniformGrid) -> Option<PathBuf> {
        let fingerprint = well.fingerprint()?;
        let mut hasher = Sha256::new();
        hasher.update(fingerprint.as_bytes());
        hasher.update(
            format!("|n={n}|grid={:e},{:e},{}", grid.start, grid.step, grid.len).as_bytes(),
        );
        let digest = hasher.finalize();
        let key: String = digest[..12].iter().map(|b| format!("{b:02x}")).collect();
        Some(self.dir.join(format!("eig_{key}_n{n}.csv")))
    }

    pub fn load(&self, well: &PotentialWell, n: usize, grid: &UniformGrid) -> Result<Option<ExactEigenstate>> {
        let Some(path) = self.path(well, n, grid) else {
            return Ok(None);
        };
        if !path.exists() {
            return Ok(None);
        }
        let state = read_eigenstate(&path, well)?;
        if state.index != n || state.grid != *grid {
            return Ok(None);
        }
        Ok(Some(state))
    }

    pub fn store(&self, well: &PotentialWell, state: &ExactEigenstate) -> Result<()> {
        if let Some(path) = self.path(well, state.index, &state.grid) {
            write_eigenstate(&path, state)?;
        }
        Ok(())
    }
}

/// Writes an eigenstate as CSV: a metadata header, then one ψ value per row.
pub fn write_eigenstate(path: &Path, state: &ExactEigenstate) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(out, "index,energy,start,step,points")?;
    writeln!(
        out,
        "{},{:e},{:e},{:e},{}",
        state.index, state.energy, state.grid.start, state.grid.step, state.grid.len
    )?;
    writeln!(out, "psi")?;
    for v in &state.values {
        writeln!(out, "{v:e}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_eigenstate(path: &Path, well: &PotentialWell) -> Result<ExactEigenstate> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut lines = reader.lines();
    let bad = |what: &str| Error::Parse(format!("{}: {what}", path.display()));
    lines.next().ok_or_else(|| bad("missing header"))??;
    let meta = lines.next().ok_or_else(|| bad("missing metadata"))??;
    let fields: Vec<&str> = meta.split(',').collect();
    if fields.len() != 5 {
        return Err(bad("metadata must have 5 fields"));
    }
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bad number"));
    let index = fields[0].trim().parse::<usize>().map_err(|_| bad("bad index"))?;
    let energy = parse(fields[1])?;
    let start = parse(fields[2])?;
    let step = parse(fields[3])?;
    let len = fields[4].trim().parse::<usize>().map_err(|_| bad("bad length"))?;
    lines.next().ok_or_else(|| bad("missing column header"))??;
    let values = lines
        .map(|l| l.map_err(Error::from).and_then(|l| parse(&l)))
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != len {
        return Err(bad("value count does not match metadata"));
    }
    let grid = UniformGrid { start, step, len };
    Ok(ExactEigenstate::from_values(well, index, energy, grid, values))
}

/// Exact superposition Σ c_r e^{−iE t/ħ} ψ_{n̄+r}(x) on a common grid.
#[derive(Debug, Clone)]
pub struct ExactSuperposition {
    states: Vec<ExactEigenstate>,
    coefficients: Vec<Complex64>,
    grid: UniformGrid,
    hbar: f64,
    mass: f64,
    node_scale: f64,
    wavelength: f64,
}

impl ExactSuperposition {
    pub fn new(
        well: &PotentialWell,
        states: Vec<ExactEigenstate>,
        coefficients: Vec<Complex64>,
    ) -> Result<Self> {
        if states.is_empty() || states.len() != coefficients.len() {
            return Err(Error::InvalidParameter {
                name: "coefficients",
                reason: format!("{} states for {} coefficients", states.len(), coefficients.len()),
            });
        }
        let grid = states[0].grid;
        if states.iter().any(|s| s.grid != grid) {
            return Err(Error::InvalidParameter {
                name: "states",
                reason: "eigenstates must share one grid".into(),
            });
        }
        let bound: f64 = states
            .iter()
            .zip(&coefficients)
            .map(|(s, c)| c.norm() * s.max_abs())
            .sum();
        let top = states.iter().map(|s| s.energy).fold(f64::MIN, f64::max);
        Ok(ExactSuperposition {
            grid,
            hbar: well.hbar(),
            mass: well.mass(),
            node_scale: bound * bound,
            wavelength: wavelength_at_minimum(well, top),
            states,
            coefficients,
        })
    }

    /// Selects the states n̄ + r named by `spec` from `states`.
    pub fn from_spec(
        well: &PotentialWell,
        spec: &SuperpositionSpec,
        states: &[ExactEigenstate],
    ) -> Result<Self> {
        let mut chosen = Vec::new();
        let mut coefficients = Vec::new();
        for (level, c) in spec.terms() {
            let state = states
                .iter()
                .find(|s| s.index == level)
                .ok_or(Error::InvalidParameter {
                    name: "states",
                    reason: format!("missing eigenstate for level {level}"),
                })?;
            chosen.push(state.clone());
            coefficients.push(c);
        }
        Self::new(well, chosen, coefficients)
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    pub fn states(&self) -> &[ExactEigenstate] {
        &self.states
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    fn phases(&self, t: f64) -> impl Iterator<Item = Complex64> + '_ {
        self.states
            .iter()
            .zip(&self.coefficients)
            .map(move |(s, c)| c * Complex64::from_polar(1.0, -s.energy * t / self.hbar))
    }

    /// ψ(x, t) and ∂ₓψ(x, t).
    pub fn amplitude_and_gradient(&self, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
        let w = self.grid.hermite(x).ok_or(Error::OutsideGrid {
            x,
            lo: self.grid.start,
            hi: self.grid.end(),
        })?;
        let mut psi = Complex64::new(0.0, 0.0);
        let mut dpsi = Complex64::new(0.0, 0.0);
        for (s, c) in self.states.iter().zip(self.phases(t)) {
            let (v, d) = w.apply(&s.values, &s.derivative, &s.second_derivative);
            psi += c * v;
            dpsi += c * d;
        }
        Ok((psi, dpsi))
    }

    pub fn amplitude(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.amplitude_and_gradient(x, t)?.0)
    }

    /// ψ(xᵢ, t) at the grid nodes.
    pub fn grid_amplitudes(&self, t: f64) -> Vec<Complex64> {
        let phases: Vec<Complex64> = self.phases(t).collect();
        (0..self.grid.len)
            .map(|i| {
                self.states
                    .iter()
                    .zip(&phases)
                    .map(|(s, c)| c * s.values[i])
                    .sum::<Complex64>()
            })
            .collect()
    }

    /// |ψ(xᵢ, t)|² at the grid nodes.
    pub fn grid_density(&self, t: f64) -> Vec<f64> {
        self.grid_amplitudes(t).iter().map(|a| a.norm_sqr()).collect()
    }

    /// Upper bound (Σ|c_r| max|ψ_r|)² on the density, used for node thresholds.
    pub fn density_bound(&self) -> f64 {
        self.node_scale
    }

    /// (Σ|c_r||ψ_r(x)|)², a local envelope of the density.
    pub fn envelope_density(&self, x: f64) -> Result<f64> {
        let mut sum = 0.0;
        for (s, c) in self.states.iter().zip(&self.coefficients) {
            sum += c.norm() * s.value(x)?.abs();
        }
        Ok(sum * sum)
    }
}

impl WaveField for ExactSuperposition {
    fn evaluate(&self, x: f64, t: f64) -> Flagged<(Complex64, Complex64)> {
        self.amplitude_and_gradient(x, t).map_err(|_| Flag::OutsideWell)
    }

    fn support(&self) -> (f64, f64) {
        (self.grid.start, self.grid.end())
    }

    fn shortest_wavelength(&self) -> f64 {
        self.wavelength
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn node_scale(&self) -> f64 {
        self.node_scale
    }
}
