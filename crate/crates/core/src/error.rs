use thiserror::Error;

/// Errors raised by the solvers and analyses in this crate.
///
/// Pointwise field evaluations that fail for physical reasons (nodes,
/// turning-point zones) do not use this type; they return a [`Flag`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("position {x} is outside the classically allowed region [{a_minus}, {a_plus}]")]
    OutsideClassicalRegion { x: f64, a_minus: f64, a_plus: f64 },

    #[error("position {x} is classically forbidden at energy {energy} (V = {potential})")]
    ClassicallyForbidden { x: f64, energy: f64, potential: f64 },

    #[error("energy {energy} cannot be bracketed: the well only confines energies below {limit}")]
    BracketFailure { energy: f64, limit: f64 },

    #[error("level n = {n} lies above the confinement range of the domain (max energy {limit})")]
    LevelOutOfRange { n: usize, limit: f64 },

    #[error("quadrature did not converge: estimate {value}, error estimate {error_estimate}")]
    QuadratureNonConvergence { value: f64, error_estimate: f64 },

    #[error("potential is not a single well: derivative changes sign {sign_changes} times on the scan grid")]
    NotSingleWell { sign_changes: usize },

    #[error("insufficient grid resolution: {points_per_wavelength:.2} points per wavelength (need at least {required})")]
    InsufficientResolution {
        points_per_wavelength: f64,
        required: f64,
    },

    #[error("eigenvalue for level {n} could not be isolated by node counting")]
    NodeCountBracket { n: usize },

    #[error("position {x} lies outside the grid [{lo}, {hi}]")]
    OutsideGrid { x: f64, lo: f64, hi: f64 },

    #[error("trajectory entered a node region at t = {t}, x = {x}")]
    NodeEncountered { t: f64, x: f64 },

    #[error("step size underflow at t = {t}, x = {x} (step {step:e})")]
    StepUnderflow { t: f64, x: f64, step: f64 },

    #[error("trajectory never advanced {distance} from its start within its time span")]
    NoPassage { distance: f64 },

    #[error("density is degenerate: {0}")]
    DegenerateDensity(String),

    #[error("marginal density vanishes at x = {x}")]
    VanishingMarginal { x: f64 },

    #[error("flagged evaluation at x = {x}: {flag}")]
    Flagged { x: f64, flag: Flag },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed data: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reason a pointwise evaluation was not computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    /// Outside the classically allowed interval.
    OutsideWell,
    /// Inside an Airy-length zone around a turning point.
    TurningPointZone,
    /// Density below the node threshold.
    Node,
    /// One of the two travelling densities vanishes.
    OneSided,
    /// Travelling densities are equal, so an extremal velocity is unbounded.
    EqualDensities,
    /// Coherent-state width outside the classical window.
    WindowViolation,
}

impl std::fmt::Display for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Flag::OutsideWell => "outside the classical region",
            Flag::TurningPointZone => "inside a turning-point exclusion zone",
            Flag::Node => "density below node threshold",
            Flag::OneSided => "one travelling density vanishes",
            Flag::EqualDensities => "travelling densities are equal",
            Flag::WindowViolation => "width outside the classical window",
        };
        f.write_str(s)
    }
}

pub type Flagged<T> = std::result::Result<T, Flag>;
