//! WKB eigenfunctions, approximate energy eigenstates built from a band of
//! levels, and their decomposition into right- and left-moving envelopes.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Flag, Flagged, Result};
use crate::field::WaveField;
use crate::well::{ClassicalLevel, ClassicalPoint, OrbitTable, PotentialWell};

/// Default turning-point exclusion half-width, in Airy lengths.
pub const DEFAULT_ZONE_FACTOR: f64 = 3.0;
/// Default bound on Δn / n̄.
pub const DEFAULT_BAND_RATIO: f64 = 0.1;
const NORM_TOLERANCE: f64 = 1e-12;

/// Positions closer than `zone_factor` Airy lengths to a turning point are
/// excluded. Returns the remaining open interval, which may be empty.
pub fn evaluable_interval(
    well: &PotentialWell,
    a_minus: f64,
    a_plus: f64,
    zone_factor: f64,
) -> (f64, f64) {
    (
        a_minus + zone_factor * well.airy_length(a_minus),
        a_plus - zone_factor * well.airy_length(a_plus),
    )
}

/// 2√(m/(T p)) sin(S/ħ) for a single level. Zero outside the classical
/// region, flagged inside the turning-point zones.
pub fn wkb_eigenfunction(level: &ClassicalLevel, well: &PotentialWell, x: f64) -> Flagged<f64> {
    if !level.contains(x) {
        return Ok(0.0);
    }
    let (lo, hi) = evaluable_interval(
        well,
        level.turning_left,
        level.turning_right,
        DEFAULT_ZONE_FACTOR,
    );
    if x <= lo || x >= hi {
        return Err(Flag::TurningPointZone);
    }
    let point = level.point(well, x).map_err(|_| Flag::OutsideWell)?;
    let amplitude = 2.0 * (well.mass() / (level.period * point.momentum)).sqrt();
    Ok(amplitude * (point.action / well.hbar()).sin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecOptions {
    /// Largest allowed Δn / n̄.
    pub band_ratio: f64,
    /// Exclusion-zone half-width in Airy lengths.
    pub zone_factor: f64,
}

impl Default for SpecOptions {
    fn default() -> Self {
        SpecOptions {
            band_ratio: DEFAULT_BAND_RATIO,
            zone_factor: DEFAULT_ZONE_FACTOR,
        }
    }
}

/// An approximate energy eigenstate Σ_r c_r |n̄ + r⟩, r ∈ [−Δn/2, Δn/2],
/// together with the classical data of the central level.
#[derive(Debug, Clone)]
pub struct SuperpositionSpec {
    center_level: usize,
    band: usize,
    coefficients: Vec<Complex64>,
    level: ClassicalLevel,
    table: OrbitTable,
    options: SpecOptions,
    interior: (f64, f64),
    node_scale: f64,
}

impl SuperpositionSpec {
    pub fn new(
        well: &PotentialWell,
        center_level: usize,
        band: usize,
        coefficients: Vec<Complex64>,
    ) -> Result<Self> {
        Self::with_options(well, center_level, band, coefficients, SpecOptions::default())
    }

    /// The single eigenstate |n⟩.
    pub fn eigenstate(well: &PotentialWell, n: usize) -> Result<Self> {
        Self::new(well, n, 0, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn with_options(
        well: &PotentialWell,
        center_level: usize,
        band: usize,
        coefficients: Vec<Complex64>,
        options: SpecOptions,
    ) -> Result<Self> {
        validate(center_level, band, &coefficients, &options)?;
        let level = well.solve_level(center_level)?;
        Ok(Self::assemble(well, center_level, band, coefficients, level, options))
    }

    fn assemble(
        well: &PotentialWell,
        center_level: usize,
        band: usize,
        coefficients: Vec<Complex64>,
        level: ClassicalLevel,
        options: SpecOptions,
    ) -> Self {
        let interior = evaluable_interval(
            well,
            level.turning_left,
            level.turning_right,
            options.zone_factor,
        );
        let p_edge = [interior.0, interior.1]
            .iter()
            .filter_map(|&x| well.classical_momentum(level.energy, x).ok())
            .fold(f64::INFINITY, f64::min);
        let p_edge = if p_edge.is_finite() && p_edge > 0.0 {
            p_edge
        } else {
            (2.0 * well.mass() * (level.energy - well.minimum().1)).sqrt()
        };
        let sum: f64 = coefficients.iter().map(|c| c.norm()).sum();
        let node_scale = 4.0 * sum * sum * well.mass() / (level.period * p_edge);
        SuperpositionSpec {
            center_level,
            band,
            table: level.table(well),
            coefficients,
            level,
            options,
            interior,
            node_scale,
        }
    }

    /// Same levels, new coefficients.
    pub fn with_coefficients(&self, well: &PotentialWell, coefficients: Vec<Complex64>) -> Result<Self> {
        validate(self.center_level, self.band, &coefficients, &self.options)?;
        Ok(Self::assemble(
            well,
            self.center_level,
            self.band,
            coefficients,
            self.level,
            self.options,
        ))
    }

    /// Mirror image ψ(−x) in a well symmetric about the origin:
    /// c_r → (−1)^{n̄+r} c_r.
    pub fn reflected(&self, well: &PotentialWell) -> Result<Self> {
        let coefficients = self
            .offsets()
            .zip(&self.coefficients)
            .map(|(r, c)| {
                if (self.center_level as i64 + r) % 2 == 0 {
                    *c
                } else {
                    -c
                }
            })
            .collect();
        self.with_coefficients(well, coefficients)
    }

    pub fn center_level(&self) -> usize {
        self.center_level
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// c_r, zero outside the band.
    pub fn coefficient(&self, r: i64) -> Complex64 {
        let half = (self.band / 2) as i64;
        if r.abs() > half {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients[(r + half) as usize]
    }

    pub fn offsets(&self) -> std::ops::RangeInclusive<i64> {
        let half = (self.band / 2) as i64;
        -half..=half
    }

    /// (n̄ + r, c_r) for every nonzero coefficient.
    pub fn terms(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.offsets()
            .zip(self.coefficients.iter().copied())
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(move |(r, c)| ((self.center_level as i64 + r) as usize, c))
    }

    pub fn level(&self) -> &ClassicalLevel {
        &self.level
    }

    pub fn table(&self) -> &OrbitTable {
        &self.table
    }

    pub fn zone_factor(&self) -> f64 {
        self.options.zone_factor
    }

    /// Open interval left after removing the turning-point zones.
    pub fn interior(&self) -> (f64, f64) {
        self.interior
    }

    /// Upper bound on the WKB density, used for node thresholds.
    pub fn node_scale(&self) -> f64 {
        self.node_scale
    }

    /// Classical data at `x`, or the reason the point is not evaluable.
    pub fn locate(&self, well: &PotentialWell, x: f64) -> Flagged<ClassicalPoint> {
        if !self.level.contains(x) {
            return Err(Flag::OutsideWell);
        }
        if x <= self.interior.0 || x >= self.interior.1 {
            return Err(Flag::TurningPointZone);
        }
        self.table.point(well, x).map_err(|_| Flag::OutsideWell)
    }
}

fn validate(
    center_level: usize,
    band: usize,
    coefficients: &[Complex64],
    options: &SpecOptions,
) -> Result<()> {
    if !band.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "band",
            reason: format!("Δn must be even, got {band}"),
        });
    }
    if coefficients.len() != band + 1 {
        return Err(Error::InvalidParameter {
            name: "coefficients",
            reason: format!("expected {} coefficients for Δn = {band}, got {}", band + 1, coefficients.len()),
        });
    }
    let norm = norm_squared(coefficients);
    if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
        return Err(Error::InvalidParameter {
            name: "coefficients",
            reason: format!("Σ|c_r|² = {norm:.15} differs from 1 by {:e}", norm - 1.0),
        });
    }
    if band / 2 > center_level {
        return Err(Error::InvalidParameter {
            name: "center_level",
            reason: format!("n̄ = {center_level} is below Δn/2 = {}", band / 2),
        });
    }
    if band as f64 > options.band_ratio * center_level as f64 {
        return Err(Error::InvalidParameter {
            name: "band",
            reason: format!(
                "Δn = {band} exceeds {} × n̄ = {}",
                options.band_ratio,
                options.band_ratio * center_level as f64
            ),
        });
    }
    if !(options.zone_factor >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "zone_factor",
            reason: format!("must be non-negative, got {}", options.zone_factor),
        });
    }
    Ok(())
}

pub fn norm_squared(coefficients: &[Complex64]) -> f64 {
    coefficients.iter().map(|c| c.norm_sqr()).sum()
}

/// Scales `coefficients` to unit norm.
pub fn normalize(coefficients: &mut [Complex64]) -> Result<()> {
    let norm = norm_squared(coefficients).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "coefficients",
            reason: "all coefficients vanish".into(),
        });
    }
    coefficients.iter_mut().for_each(|c| *c /= norm);
    Ok(())
}

/// Built-in coefficient sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientPreset {
    /// c_r ∝ exp(−r²/4σ²) e^{irθ₀}: a packet localized in the orbit angle.
    GaussianPacket { sigma_r: f64, theta0: f64 },
    /// Equal moduli with phases drawn uniformly from a seeded generator.
    UniformRandomPhase { seed: u64 },
    /// Levels n̄ and n̄ + 1 only.
    TwoLevel { lower: Complex64, upper: Complex64 },
}

impl CoefficientPreset {
    /// Packet of width σ_r = Δn/6 that sits mid-well and moves right at t = 0.
    pub fn mid_well_packet(band: usize) -> Self {
        CoefficientPreset::GaussianPacket {
            sigma_r: (band as f64 / 6.0).max(0.5),
            theta0: -0.5 * PI,
        }
    }

    /// Normalized coefficients for a band of width Δn.
    pub fn coefficients(&self, band: usize) -> Result<Vec<Complex64>> {
        if !band.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "band",
                reason: format!("Δn must be even, got {band}"),
            });
        }
        let half = (band / 2) as i64;
        let mut c: Vec<Complex64> = match *self {
            CoefficientPreset::GaussianPacket { sigma_r, theta0 } => {
                if !(sigma_r > 0.0 && sigma_r.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "sigma_r",
                        reason: format!("must be positive, got {sigma_r}"),
                    });
                }
                (-half..=half)
                    .map(|r| {
                        let r = r as f64;
                        Complex64::from_polar((-r * r / (4.0 * sigma_r * sigma_r)).exp(), r * theta0)
                    })
                    .collect()
            }
            CoefficientPreset::UniformRandomPhase { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (-half..=half)
                    .map(|_| Complex64::from_polar(1.0, TAU * rng.gen::<f64>()))
                    .collect()
            }
            CoefficientPreset::TwoLevel { lower, upper } => {
                if band < 2 {
                    return Err(Error::InvalidParameter {
                        name: "band",
                        reason: "a two-level set needs Δn ≥ 2".into(),
                    });
                }
                let mut c = vec![Complex64::new(0.0, 0.0); band + 1];
                c[half as usize] = lower;
                c[half as usize + 1] = upper;
                c
            }
        };
        normalize(&mut c)?;
        Ok(c)
    }
}

/// Writes coefficients as CSV rows (r, re, im).
pub fn write_coefficients(path: &Path, coefficients: &[Complex64]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "r,re,im")?;
    let half = (coefficients.len() / 2) as i64;
    for (k, c) in coefficients.iter().enumerate() {
        writeln!(out, "{},{:e},{:e}", k as i64 - half, c.re, c.im)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads (r, re, im) rows. Offsets must cover −Δn/2..=Δn/2 exactly once;
/// row order is free. The result is not renormalized.
pub fn read_coefficients(path: &Path) -> Result<Vec<Complex64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["r", "re", "im"] {
        return Err(Error::Parse(format!(
            "{}: expected header r,re,im",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let bad = || Error::Parse(format!("{}: malformed row {:?}", path.display(), record));
        let r: i64 = record[0].parse().map_err(|_| bad())?;
        let re: f64 = record[1].parse().map_err(|_| bad())?;
        let im: f64 = record[2].parse().map_err(|_| bad())?;
        rows.push((r, Complex64::new(re, im)));
    }
    rows.sort_by_key(|(r, _)| *r);
    let half = (rows.len() / 2) as i64;
    if rows.len() % 2 == 0 || rows.iter().enumerate().any(|(k, (r, _))| *r != k as i64 - half) {
        return Err(Error::Parse(format!(
            "{}: offsets must run over −Δn/2..=Δn/2 without gaps",
            path.display()
        )));
    }
    Ok(rows.into_iter().map(|(_, c)| c).collect())
}

/// Slowly varying travelling-wave amplitudes at one (x, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeField {
    pub g_plus: Complex64,
    pub g_minus: Complex64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// Principal value; `None` where ρ₊ = 0.
    pub phi_plus: Option<f64>,
    pub phi_minus: Option<f64>,
    pub rho_bar: f64,
}

impl EnvelopeField {
    pub fn zero() -> Self {
        Self::from_amplitudes(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn from_amplitudes(g_plus: Complex64, g_minus: Complex64) -> Self {
        let phase = |g: Complex64| (g.norm_sqr() > 0.0).then(|| g.arg());
        let rho_plus = g_plus.norm_sqr();
        let rho_minus = g_minus.norm_sqr();
        EnvelopeField {
            g_plus,
            g_minus,
            rho_plus,
            rho_minus,
            phi_plus: phase(g_plus),
            phi_minus: phase(g_minus),
            rho_bar: rho_plus + rho_minus,
        }
    }

    /// 2S/ħ + φ₊ − φ₋, or `None` if either envelope vanishes.
    pub fn interference_phase(&self, action: f64, hbar: f64) -> Option<f64> {
        Some(2.0 * action / hbar + self.phi_plus? - self.phi_minus?)
    }

    /// ρ₊ + ρ₋ − 2√(ρ₊ρ₋) cos(2S/ħ + φ₊ − φ₋).
    pub fn density(&self, action: f64, hbar: f64) -> f64 {
        match self.interference_phase(action, hbar) {
            Some(phase) => {
                self.rho_bar - 2.0 * (self.rho_plus * self.rho_minus).sqrt() * phase.cos()
            }
            None => self.rho_bar,
        }
    }
}

/// The sums Σ c_r e^{irω(τ−t)} and Σ c_r e^{−irω(τ+t)}. The envelopes are
/// these times √(m/(T p)); each depends on (τ, t) only through τ ∓ t.
pub fn propagating_sums(spec: &SuperpositionSpec, tau: f64, t: f64) -> (Complex64, Complex64) {
    let omega = spec.level.angular_frequency;
    let half = (spec.band / 2) as i32;
    let plus = fourier_sum(&spec.coefficients, half, omega * (tau - t));
    let minus = fourier_sum(&spec.coefficients, half, -omega * (tau + t));
    (plus, minus)
}

/// Σ_k c_k e^{i(k − half)θ}.
fn fourier_sum(c: &[Complex64], half: i32, theta: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, theta);
    let mut z = Complex64::from_polar(1.0, -(half as f64) * theta);
    let mut sum = Complex64::new(0.0, 0.0);
    for ck in c {
        sum += ck * z;
        z *= step;
    }
    sum
}

/// Σ_k c_k (k − half) e^{i(k − half)θ}, the θ-derivative divided by i.
fn fourier_sum_weighted(c: &[Complex64], half: i32, theta: f64) -> (Complex64, Complex64) {
    let step = Complex64::from_polar(1.0, theta);
    let mut z = Complex64::from_polar(1.0, -(half as f64) * theta);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut weighted = Complex64::new(0.0, 0.0);
    for (k, ck) in c.iter().enumerate() {
        let term = ck * z;
        sum += term;
        weighted += term * (k as i32 - half) as f64;
        z *= step;
    }
    (sum, weighted)
}

/// Envelopes from classical data already evaluated at x.
pub fn envelope_at(spec: &SuperpositionSpec, well: &PotentialWell, point: &ClassicalPoint, t: f64) -> EnvelopeField {
    let amplitude = (well.mass() / (spec.level.period * point.momentum)).sqrt();
    let (plus, minus) = propagating_sums(spec, point.time, t);
    EnvelopeField::from_amplitudes(plus * amplitude, minus * amplitude)
}

/// g±, ρ±, φ± and ρ̄ at (x, t). Zero outside the classical region.
pub fn envelopes(spec: &SuperpositionSpec, well: &PotentialWell, x: f64, t: f64) -> Flagged<EnvelopeField> {
    match spec.locate(well, x) {
        Ok(point) => Ok(envelope_at(spec, well, &point, t)),
        Err(Flag::OutsideWell) => Ok(EnvelopeField::zero()),
        Err(flag) => Err(flag),
    }
}

/// i(e^{−i(S+Et)/ħ} g₋ − e^{i(S−Et)/ħ} g₊).
pub fn wkb_wavefunction(spec: &SuperpositionSpec, well: &PotentialWell, x: f64, t: f64) -> Flagged<Complex64> {
    match spec.locate(well, x) {
        Ok(point) => {
            let env = envelope_at(spec, well, &point, t);
            Ok(combine(spec, well, &point, &env, t))
        }
        Err(Flag::OutsideWell) => Ok(Complex64::new(0.0, 0.0)),
        Err(flag) => Err(flag),
    }
}

fn combine(spec: &SuperpositionSpec, well: &PotentialWell, point: &ClassicalPoint, env: &EnvelopeField, t: f64) -> Complex64 {
    let hbar = well.hbar();
    let s = point.action / hbar;
    let et = spec.level.energy * t / hbar;
    let i = Complex64::i();
    i * (Complex64::from_polar(1.0, -(s + et)) * env.g_minus
        - Complex64::from_polar(1.0, s - et) * env.g_plus)
}

/// The three-term density ρ₊ + ρ₋ − 2√(ρ₊ρ₋) cos(2S/ħ + φ₊ − φ₋).
pub fn wkb_density(spec: &SuperpositionSpec, well: &PotentialWell, x: f64, t: f64) -> Flagged<f64> {
    match spec.locate(well, x) {
        Ok(point) => Ok(envelope_at(spec, well, &point, t).density(point.action, well.hbar())),
        Err(Flag::OutsideWell) => Ok(0.0),
        Err(flag) => Err(flag),
    }
}

/// The WKB wavefunction as a [`WaveField`], with an analytic derivative.
#[derive(Debug, Clone, Copy)]
pub struct WkbWave<'a> {
    spec: &'a SuperpositionSpec,
    well: &'a PotentialWell,
}

impl<'a> WkbWave<'a> {
    pub fn new(spec: &'a SuperpositionSpec, well: &'a PotentialWell) -> Self {
        WkbWave { spec, well }
    }
}

impl WaveField for WkbWave<'_> {
    fn evaluate(&self, x: f64, t: f64) -> Flagged<(Complex64, Complex64)> {
        let spec = self.spec;
        let well = self.well;
        let point = spec.locate(well, x)?;
        let hbar = well.hbar();
        let mass = well.mass();
        let p = point.momentum;
        let omega = spec.level.angular_frequency;
        let half = (spec.band / 2) as i32;
        let amp = (mass / (spec.level.period * p)).sqrt();
        let damp = amp * mass * well.potential_derivative(x) / (2.0 * p * p);
        let (sp, wp) = fourier_sum_weighted(&spec.coefficients, half, omega * (point.time - t));
        let (sm, wm) = fourier_sum_weighted(&spec.coefficients, half, -omega * (point.time + t));
        let i = Complex64::i();
        // dτ/dx = m/p
        let dsp = i * omega * wp * (mass / p);
        let dsm = -i * omega * wm * (mass / p);
        let g_plus = amp * sp;
        let g_minus = amp * sm;
        let dg_plus = damp * sp + amp * dsp;
        let dg_minus = damp * sm + amp * dsm;
        let s = point.action / hbar;
        let et = spec.level.energy * t / hbar;
        let e_minus = Complex64::from_polar(1.0, -(s + et));
        let e_plus = Complex64::from_polar(1.0, s - et);
        let k = p / hbar;
        let psi = i * (e_minus * g_minus - e_plus * g_plus);
        let dpsi = i * (e_minus * (dg_minus - i * k * g_minus) - e_plus * (dg_plus + i * k * g_plus));
        Ok((psi, dpsi))
    }

    fn support(&self) -> (f64, f64) {
        self.spec.interior
    }

    fn shortest_wavelength(&self) -> f64 {
        let p = (2.0 * self.well.mass() * (self.spec.level.energy - self.well.minimum().1)).sqrt();
        self.well.planck() / p
    }

    fn hbar(&self) -> f64 {
        self.well.hbar()
    }

    fn mass(&self) -> f64 {
        self.well.mass()
    }

    fn node_scale(&self) -> f64 {
        self.spec.node_scale
    }
}
