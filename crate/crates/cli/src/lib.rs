//! Reproducible experiments driven by a TOML scenario file.
//!
//! Each subcommand reads one [`config::ScenarioConfig`], writes its CSV or
//! JSON outputs into the output directory and leaves a
//! `<command>.manifest.json` sidecar with the config hash, seeds and output
//! checksums.

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pilotwave::eigensolver::{solve_band, EigenCache, ExactSuperposition, GridSpec};
use pilotwave::well::PotentialWell;
use pilotwave::wkb::SuperpositionSpec;

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::manifest::{component_seed, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Levels,
    FigRho,
    FigTrajectory,
    Husimi,
    Equivariance,
    PropertySuite,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Levels => "levels",
            CommandKind::FigRho => "fig-rho",
            CommandKind::FigTrajectory => "fig-trajectory",
            CommandKind::Husimi => "husimi",
            CommandKind::Equivariance => "equivariance",
            CommandKind::PropertySuite => "property-suite",
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub oracle: Option<bool>,
}

/// Validated configuration plus the run-wide settings derived from it.
pub struct Context {
    pub config: ScenarioConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub oracle: bool,
}

impl Context {
    pub fn new(mut config: ScenarioConfig, overrides: &Overrides) -> Result<Self> {
        if let Some(out) = &overrides.out {
            config.output.dir = out.clone();
        }
        if let Some(seed) = overrides.seed {
            config.spec.seed = seed;
        }
        if let Some(oracle) = overrides.oracle {
            config.analysis.oracle = oracle;
        }
        config.validate()?;
        Ok(Context {
            out_dir: config.output.dir.clone(),
            seed: config.spec.seed,
            oracle: config.analysis.oracle,
            config,
        })
    }

    pub fn seed_for(&self, component: &str) -> u64 {
        component_seed(self.seed, component)
    }

    pub fn well(&self) -> Result<PotentialWell> {
        self.config.build_well()
    }

    pub fn spec(&self, well: &PotentialWell) -> Result<SuperpositionSpec> {
        let c = self.config.raw_coefficients(self.seed_for("coefficients"))?;
        self.config.build_spec(well, c)
    }

    /// Numerov eigenstates for every level of the band.
    pub fn exact(&self, well: &PotentialWell, spec: &SuperpositionSpec) -> Result<ExactSuperposition> {
        let levels: Vec<usize> = spec
            .offsets()
            .map(|r| (spec.center_level() as i64 + r) as usize)
            .collect();
        let cache = match &self.config.output.cache_dir {
            Some(dir) => Some(EigenCache::new(dir)?),
            None => None,
        };
        let states = solve_band(well, &levels, &GridSpec::default(), cache.as_ref())?;
        Ok(ExactSuperposition::from_spec(well, spec, &states)?)
    }

    /// Path of an output file; creates the output directory on first use
    /// so that runs failing validation leave nothing behind.
    pub fn output(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| CliError::io(&self.out_dir, e))?;
        Ok(self.out_dir.join(name))
    }
}

/// Files written by a command. `failure` is set when the command completed
/// and wrote its report but some check did not pass.
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn ok(files: Vec<PathBuf>) -> Self {
        Outcome { files, failure: None }
    }
}

/// Runs one subcommand and writes its manifest. Returns the manifest path.
pub fn run(kind: CommandKind, config: ScenarioConfig, overrides: &Overrides) -> Result<PathBuf> {
    let ctx = Context::new(config, overrides)?;
    let started = Instant::now();
    let outcome = match kind {
        CommandKind::Levels => commands::levels::run(&ctx)?,
        CommandKind::FigRho => commands::fig_rho::run(&ctx)?,
        CommandKind::FigTrajectory => commands::fig_trajectory::run(&ctx)?,
        CommandKind::Husimi => commands::husimi::run(&ctx)?,
        CommandKind::Equivariance => commands::equivariance::run(&ctx)?,
        CommandKind::PropertySuite => commands::property_suite::run(&ctx)?,
    };
    // Where the outputs go is not part of the experiment.
    let mut hashed = ctx.config.clone();
    hashed.output.dir = PathBuf::new();
    let mut manifest = RunManifest::new(kind.name(), &hashed.to_toml(), ctx.seed, ctx.oracle);
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.record_outputs(&ctx.out_dir, &outcome.files)?;
    let path = ctx.output(&format!("{}.manifest.json", kind.name()))?;
    manifest.write(&path)?;
    match outcome.failure {
        Some(err) => Err(err),
        None => Ok(path),
    }
}

/// Minimal CSV writer: a header, then rows of preformatted fields.
pub struct CsvWriter {
    out: std::io::BufWriter<std::fs::File>,
    path: PathBuf,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = CsvWriter {
            out: std::io::BufWriter::new(file),
            path: path.to_path_buf(),
        };
        w.line(&header.join(","))?;
        Ok(w)
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        self.line(&fields.join(","))
    }

    fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "{text}").map_err(|e| CliError::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.out.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}
