//! Scenario configuration: a strict TOML schema and its validation.

use std::path::{Path, PathBuf};

use pilotwave::wkb::{read_coefficients, CoefficientPreset, SpecOptions, SuperpositionSpec};
use pilotwave::well::PotentialWell;
use pilotwave::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub well: WellConfig,
    #[serde(default)]
    pub units: UnitsConfig,
    pub spec: SpecConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WellKind {
    Harmonic,
    Quartic,
    Anharmonic,
    Tabulated,
}

/// Potential selection. Which parameters are required depends on `kind`:
/// harmonic takes `omega`, quartic `strength`, anharmonic `quadratic`,
/// `cubic` and `domain`, tabulated a two-column CSV `table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellConfig {
    pub kind: WellKind,
    pub omega: Option<f64>,
    pub strength: Option<f64>,
    pub quadratic: Option<f64>,
    pub cubic: Option<f64>,
    pub domain: Option<[f64; 2]>,
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsConfig {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        UnitsConfig { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetKind {
    GaussianPacket,
    UniformRandomPhase,
    TwoLevel,
    Eigenstate,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub center_level: usize,
    #[serde(default)]
    pub band: usize,
    pub preset: PresetKind,
    /// Packet width in levels; defaults to Δn/6.
    pub sigma_r: Option<f64>,
    /// Packet phase step; defaults to −π/2 (mid-well, moving right).
    pub theta0: Option<f64>,
    /// (r, re, im) CSV for the `file` preset.
    pub coefficients: Option<PathBuf>,
    /// Top-level seed, expanded per component.
    #[serde(default)]
    pub seed: u64,
    pub zone_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Compare against the Numerov oracle where a command supports it.
    #[serde(default = "yes")]
    pub oracle: bool,
    #[serde(default)]
    pub levels: LevelsConfig,
    #[serde(default)]
    pub fig_rho: FigRhoConfig,
    #[serde(default)]
    pub fig_trajectory: TrajectoryConfig,
    #[serde(default)]
    pub husimi: HusimiConfig,
    #[serde(default)]
    pub equivariance: EquivarianceConfig,
    #[serde(default)]
    pub property_suite: PropertySuiteConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsConfig {
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
}

impl Default for LevelsConfig {
    fn default() -> Self {
        LevelsConfig { levels: default_levels() }
    }
}

/// Times are in units of the classical period T of level n̄.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigRhoConfig {
    #[serde(default = "default_rho_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_rho_points")]
    pub points: usize,
}

impl Default for FigRhoConfig {
    fn default() -> Self {
        FigRhoConfig {
            times: default_rho_times(),
            points: default_rho_points(),
        }
    }
}

/// Local frozen-envelope field v sinh χ₀/(cosh χ₀ − cos(φ₀ + 4πx/λ₀)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    #[serde(default = "default_chi0")]
    pub chi0: f64,
    #[serde(default)]
    pub phi0: f64,
    #[serde(default = "one")]
    pub lambda0: f64,
    #[serde(default = "one")]
    pub v_cl: f64,
    /// Integration span in wavelength-crossing times.
    #[serde(default = "default_crossings")]
    pub crossings: f64,
    /// Output times per crossing, on top of the integrator steps.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig {
            chi0: default_chi0(),
            phi0: 0.0,
            lambda0: 1.0,
            v_cl: 1.0,
            crossings: default_crossings(),
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HusimiConfig {
    /// Time in units of T.
    #[serde(default)]
    pub time: f64,
    /// Coherent-state width for the phase-space grid; defaults to the
    /// window midpoint at the bottom of the well.
    pub lambda: Option<f64>,
    #[serde(default = "default_grid_points")]
    pub x_points: usize,
    #[serde(default = "default_grid_points")]
    pub p_points: usize,
    /// Positions for the window report; defaults to 41 interior points.
    #[serde(default)]
    pub window_x: Vec<f64>,
    /// Where the limit checks and the Bohm-limit table are evaluated;
    /// defaults to the bottom of the well.
    pub probe_x: Option<f64>,
    /// λ sequence for the Bohm-limit table, in units of λ₋ at `probe_x`.
    #[serde(default = "default_bohm_fractions")]
    pub bohm_lambda_fractions: Vec<f64>,
}

impl Default for HusimiConfig {
    fn default() -> Self {
        HusimiConfig {
            time: 0.0,
            lambda: None,
            x_points: default_grid_points(),
            p_points: default_grid_points(),
            window_x: Vec::new(),
            probe_x: None,
            bohm_lambda_fractions: default_bohm_fractions(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivarianceConfig {
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    /// Start and span in units of T.
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_span")]
    pub span: f64,
    #[serde(default = "default_ks_tolerance")]
    pub ks_tolerance: f64,
}

impl Default for EquivarianceConfig {
    fn default() -> Self {
        EquivarianceConfig {
            trajectories: default_trajectories(),
            t0: default_t0(),
            span: default_span(),
            ks_tolerance: default_ks_tolerance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertySuiteConfig {
    /// Random (x, t) points per sampled check.
    #[serde(default = "default_suite_samples")]
    pub samples: usize,
}

impl Default for PropertySuiteConfig {
    fn default() -> Self {
        PropertySuiteConfig {
            samples: default_suite_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// Directory for cached exact eigenstates; none disables caching.
    pub cache_dir: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
            cache_dir: None,
        }
    }
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_levels() -> Vec<usize> {
    vec![20, 40, 60, 80, 100, 120]
}
fn default_rho_times() -> Vec<f64> {
    vec![0.0, 0.25]
}
fn default_rho_points() -> usize {
    400
}
fn default_chi0() -> f64 {
    0.01
}
fn default_crossings() -> f64 {
    1.05
}
fn default_samples() -> usize {
    200
}
fn default_grid_points() -> usize {
    121
}
fn default_bohm_fractions() -> Vec<f64> {
    vec![0.5, 0.2, 0.05]
}
fn default_trajectories() -> usize {
    10_000
}
fn default_t0() -> f64 {
    0.05
}
fn default_span() -> f64 {
    0.125
}
fn default_ks_tolerance() -> f64 {
    0.02
}
fn default_suite_samples() -> usize {
    1000
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ScenarioConfig {
    /// Parses TOML; unknown keys and type errors are reported with their
    /// line and field.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(config)
    }

    /// Relative input paths are taken relative to the config file.
    fn resolve_paths(&mut self, base: &Path) {
        for p in [&mut self.well.table, &mut self.spec.coefficients].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Range and consistency checks that do not need any computation.
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::invalid(field, format!("must be positive and finite, got {v}")))
            }
        };
        let finite = |field: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(CliError::invalid(field, format!("must be finite, got {v}")))
            }
        };
        let w = &self.well;
        let need = |field: &str, v: Option<f64>| {
            v.ok_or_else(|| CliError::invalid(field, format!("required for kind = {:?}", w.kind)))
        };
        let unused = |field: &str, present: bool| {
            if present {
                Err(CliError::invalid(field, format!("not used by kind = {:?}", w.kind)))
            } else {
                Ok(())
            }
        };
        match w.kind {
            WellKind::Harmonic => {
                positive("well.omega", need("well.omega", w.omega)?)?;
                unused("well.strength", w.strength.is_some())?;
                unused("well.quadratic", w.quadratic.is_some() || w.cubic.is_some())?;
                unused("well.table", w.table.is_some())?;
            }
            WellKind::Quartic => {
                positive("well.strength", need("well.strength", w.strength)?)?;
                unused("well.omega", w.omega.is_some())?;
                unused("well.quadratic", w.quadratic.is_some() || w.cubic.is_some())?;
                unused("well.table", w.table.is_some())?;
            }
            WellKind::Anharmonic => {
                positive("well.quadratic", need("well.quadratic", w.quadratic)?)?;
                finite("well.cubic", need("well.cubic", w.cubic)?)?;
                if w.domain.is_none() {
                    return Err(CliError::invalid("well.domain", "required for kind = Anharmonic"));
                }
                unused("well.omega", w.omega.is_some() || w.strength.is_some())?;
                unused("well.table", w.table.is_some())?;
            }
            WellKind::Tabulated => {
                if w.table.is_none() {
                    return Err(CliError::invalid("well.table", "required for kind = Tabulated"));
                }
                unused("well.omega", w.omega.is_some() || w.strength.is_some())?;
                unused("well.quadratic", w.quadratic.is_some() || w.cubic.is_some())?;
            }
        }
        if let Some([lo, hi]) = w.domain {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CliError::invalid("well.domain", format!("[{lo}, {hi}] is not a proper interval")));
            }
        }
        positive("units.hbar", self.units.hbar)?;
        positive("units.mass", self.units.mass)?;

        let s = &self.spec;
        if !s.band.is_multiple_of(2) {
            return Err(CliError::invalid("spec.band", format!("must be even, got {}", s.band)));
        }
        if s.band / 2 > s.center_level {
            return Err(CliError::invalid("spec.band", "Δn/2 exceeds center_level"));
        }
        match s.preset {
            PresetKind::Eigenstate if s.band != 0 => {
                return Err(CliError::invalid("spec.band", "must be 0 for the eigenstate preset"));
            }
            PresetKind::TwoLevel if s.band < 2 => {
                return Err(CliError::invalid("spec.band", "two_level needs band ≥ 2"));
            }
            PresetKind::File if s.coefficients.is_none() => {
                return Err(CliError::invalid("spec.coefficients", "required for preset = file"));
            }
            _ => {}
        }
        if s.coefficients.is_some() && s.preset != PresetKind::File {
            return Err(CliError::invalid("spec.coefficients", "only used by preset = file"));
        }
        if let Some(v) = s.sigma_r {
            positive("spec.sigma_r", v)?;
        }
        if let Some(v) = s.theta0 {
            finite("spec.theta0", v)?;
        }
        if let Some(v) = s.zone_factor {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::invalid("spec.zone_factor", format!("must be non-negative, got {v}")));
            }
        }

        let a = &self.analysis;
        if a.levels.levels.is_empty() {
            return Err(CliError::invalid("analysis.levels.levels", "level list is empty"));
        }
        if a.fig_rho.times.is_empty() {
            return Err(CliError::invalid("analysis.fig_rho.times", "time list is empty"));
        }
        for t in &a.fig_rho.times {
            finite("analysis.fig_rho.times", *t)?;
        }
        if a.fig_rho.points < 2 {
            return Err(CliError::invalid("analysis.fig_rho.points", "must be at least 2"));
        }
        let tr = &a.fig_trajectory;
        finite("analysis.fig_trajectory.chi0", tr.chi0)?;
        if tr.chi0 == 0.0 {
            return Err(CliError::invalid("analysis.fig_trajectory.chi0", "must be nonzero"));
        }
        finite("analysis.fig_trajectory.phi0", tr.phi0)?;
        positive("analysis.fig_trajectory.lambda0", tr.lambda0)?;
        positive("analysis.fig_trajectory.v_cl", tr.v_cl)?;
        positive("analysis.fig_trajectory.crossings", tr.crossings)?;
        if tr.samples < 2 {
            return Err(CliError::invalid("analysis.fig_trajectory.samples", "must be at least 2"));
        }
        let h = &a.husimi;
        finite("analysis.husimi.time", h.time)?;
        if let Some(l) = h.lambda {
            positive("analysis.husimi.lambda", l)?;
        }
        if h.x_points < 2 || h.p_points < 2 {
            return Err(CliError::invalid("analysis.husimi", "x_points and p_points must be at least 2"));
        }
        for x in &h.window_x {
            finite("analysis.husimi.window_x", *x)?;
        }
        if let Some(x) = h.probe_x {
            finite("analysis.husimi.probe_x", x)?;
        }
        let fr = &h.bohm_lambda_fractions;
        if fr.is_empty() || fr.iter().any(|f| !(*f > 0.0 && f.is_finite())) || fr.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(CliError::invalid(
                "analysis.husimi.bohm_lambda_fractions",
                "need positive, strictly decreasing values",
            ));
        }
        let e = &a.equivariance;
        if e.trajectories == 0 {
            return Err(CliError::invalid("analysis.equivariance.trajectories", "must be positive"));
        }
        finite("analysis.equivariance.t0", e.t0)?;
        positive("analysis.equivariance.span", e.span)?;
        positive("analysis.equivariance.ks_tolerance", e.ks_tolerance)?;
        if a.property_suite.samples == 0 {
            return Err(CliError::invalid("analysis.property_suite.samples", "must be positive"));
        }
        Ok(())
    }

    pub fn build_well(&self) -> Result<PotentialWell> {
        let (m, hbar) = (self.units.mass, self.units.hbar);
        let w = &self.well;
        let well = match w.kind {
            WellKind::Harmonic => PotentialWell::harmonic(m, w.omega.unwrap_or(1.0), hbar)?,
            WellKind::Quartic => PotentialWell::quartic(m, w.strength.unwrap_or(1.0), hbar)?,
            WellKind::Anharmonic => {
                let [lo, hi] = w.domain.unwrap_or([-1.0, 1.0]);
                return Ok(PotentialWell::anharmonic(
                    m,
                    w.quadratic.unwrap_or(1.0),
                    w.cubic.unwrap_or(0.0),
                    hbar,
                    (lo, hi),
                )?);
            }
            WellKind::Tabulated => {
                let path = w.table.as_ref().ok_or_else(|| CliError::invalid("well.table", "missing"))?;
                PotentialWell::from_csv(path, m, hbar)?
            }
        };
        match w.domain {
            Some([lo, hi]) => Ok(well.with_domain(lo, hi)?),
            None => Ok(well),
        }
    }

    /// Coefficients as configured. File coefficients are returned as read,
    /// without renormalization.
    pub fn raw_coefficients(&self, coefficient_seed: u64) -> Result<Vec<Complex64>> {
        let s = &self.spec;
        let band = s.band;
        let c = match s.preset {
            PresetKind::GaussianPacket => {
                let default = CoefficientPreset::mid_well_packet(band);
                let CoefficientPreset::GaussianPacket { sigma_r, theta0 } = default else {
                    unreachable!()
                };
                CoefficientPreset::GaussianPacket {
                    sigma_r: s.sigma_r.unwrap_or(sigma_r),
                    theta0: s.theta0.unwrap_or(theta0),
                }
                .coefficients(band)?
            }
            PresetKind::UniformRandomPhase => {
                CoefficientPreset::UniformRandomPhase { seed: coefficient_seed }.coefficients(band)?
            }
            PresetKind::TwoLevel => {
                let half = Complex64::new(0.5f64.sqrt(), 0.0);
                CoefficientPreset::TwoLevel { lower: half, upper: half }.coefficients(band)?
            }
            PresetKind::Eigenstate => vec![Complex64::new(1.0, 0.0)],
            PresetKind::File => {
                let path = s
                    .coefficients
                    .as_ref()
                    .ok_or_else(|| CliError::invalid("spec.coefficients", "missing"))?;
                let c = read_coefficients(path)?;
                if c.len() != band + 1 {
                    return Err(CliError::invalid(
                        "spec.coefficients",
                        format!("{} rows for band = {band}", c.len()),
                    ));
                }
                c
            }
        };
        Ok(c)
    }

    pub fn spec_options(&self) -> SpecOptions {
        let mut options = SpecOptions::default();
        if let Some(z) = self.spec.zone_factor {
            options.zone_factor = z;
        }
        options
    }

    pub fn build_spec(&self, well: &PotentialWell, coefficients: Vec<Complex64>) -> Result<SuperpositionSpec> {
        Ok(SuperpositionSpec::with_options(
            well,
            self.spec.center_level,
            self.spec.band,
            coefficients,
            self.spec_options(),
        )?)
    }
}
