//! Potential wells, classical orbits and Bohr–Sommerfeld levels.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interp::CubicSpline;
use crate::quadrature::adaptive;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const SCAN_POINTS: usize = 2001;
const QUAD_REL_TOL: f64 = 1e-13;

/// Functional form of the potential.
#[derive(Clone)]
pub enum PotentialKind {
    /// V = ½ m ω² x²
    Harmonic { omega: f64 },
    /// V = g x⁴
    Quartic { strength: f64 },
    /// V = a x² + b x³ (restrict the domain to the confining region)
    Anharmonic { quadratic: f64, cubic: f64 },
    /// Natural cubic spline through (x, V) samples.
    Tabulated(CubicSpline),
    /// Arbitrary closure, optionally with its derivative.
    Custom {
        label: String,
        potential: ScalarFn,
        derivative: Option<ScalarFn>,
    },
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialKind::Harmonic { omega } => write!(f, "Harmonic {{ omega: {omega} }}"),
            PotentialKind::Quartic { strength } => write!(f, "Quartic {{ strength: {strength} }}"),
            PotentialKind::Anharmonic { quadratic, cubic } => {
                write!(f, "Anharmonic {{ quadratic: {quadratic}, cubic: {cubic} }}")
            }
            PotentialKind::Tabulated(s) => write!(f, "Tabulated({} points)", s.points().count()),
            PotentialKind::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

/// A particle of mass `mass` confined by a single-minimum potential on a
/// closed domain.
#[derive(Clone, Debug)]
pub struct PotentialWell {
    kind: PotentialKind,
    mass: f64,
    hbar: f64,
    domain: (f64, f64),
    minimum: (f64, f64),
}

impl PotentialWell {
    pub fn new(kind: PotentialKind, mass: f64, hbar: f64, domain: (f64, f64)) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(invalid("mass", format!("must be positive, got {mass}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar", format!("must be positive, got {hbar}")));
        }
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid("domain", format!("[{lo}, {hi}] is not a proper interval")));
        }
        match &kind {
            PotentialKind::Harmonic { omega } if !(*omega > 0.0) => {
                return Err(invalid("omega", format!("must be positive, got {omega}")));
            }
            PotentialKind::Quartic { strength } if !(*strength > 0.0) => {
                return Err(invalid("strength", format!("must be positive, got {strength}")));
            }
            PotentialKind::Tabulated(s) => {
                let (tlo, thi) = s.domain();
                if lo < tlo || hi > thi {
                    return Err(invalid(
                        "domain",
                        format!("[{lo}, {hi}] extends beyond the table [{tlo}, {thi}]"),
                    ));
                }
            }
            _ => {}
        }
        let mut well = PotentialWell {
            kind,
            mass,
            hbar,
            domain,
            minimum: (0.0, 0.0),
        };
        well.minimum = well.locate_minimum()?;
        Ok(well)
    }

    /// Harmonic well with a domain of 60 oscillator lengths on each side.
    pub fn harmonic(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        let length = (hbar / (mass * omega)).sqrt();
        Self::new(
            PotentialKind::Harmonic { omega },
            mass,
            hbar,
            (-60.0 * length, 60.0 * length),
        )
    }

    /// Quartic well g x⁴ on twelve natural lengths either side.
    pub fn quartic(mass: f64, strength: f64, hbar: f64) -> Result<Self> {
        let length = (hbar * hbar / (mass * strength)).powf(1.0 / 6.0);
        Self::new(
            PotentialKind::Quartic { strength },
            mass,
            hbar,
            (-12.0 * length, 12.0 * length),
        )
    }

    pub fn anharmonic(
        mass: f64,
        quadratic: f64,
        cubic: f64,
        hbar: f64,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::new(PotentialKind::Anharmonic { quadratic, cubic }, mass, hbar, domain)
    }

    pub fn tabulated(xs: Vec<f64>, vs: Vec<f64>, mass: f64, hbar: f64) -> Result<Self> {
        let spline = CubicSpline::new(xs, vs)?;
        let domain = spline.domain();
        Self::new(PotentialKind::Tabulated(spline), mass, hbar, domain)
    }

    /// Reads a two-column (x, V) CSV table. A non-numeric first row is
    /// treated as a header.
    pub fn from_csv(path: impl AsRef<Path>, mass: f64, hbar: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Parse(format!(
                    "row {}: expected 2 columns, found {}",
                    row + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(v)) => {
                    xs.push(x);
                    vs.push(v);
                }
                _ if row == 0 => continue,
                _ => return Err(Error::Parse(format!("row {}: non-numeric entry", row + 1))),
            }
        }
        Self::tabulated(xs, vs, mass, hbar)
    }

    pub fn with_domain(self, lo: f64, hi: f64) -> Result<Self> {
        Self::new(self.kind, self.mass, self.hbar, (lo, hi))
    }

    pub fn custom(
        label: impl Into<String>,
        potential: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: Option<ScalarFn>,
        mass: f64,
        hbar: f64,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::new(
            PotentialKind::Custom {
                label: label.into(),
                potential: Arc::new(potential),
                derivative,
            },
            mass,
            hbar,
            domain,
        )
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Planck's constant h = 2πħ.
    pub fn planck(&self) -> f64 {
        std::f64::consts::TAU * self.hbar
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Location and value of the potential minimum.
    pub fn minimum(&self) -> (f64, f64) {
        self.minimum
    }

    /// Highest energy whose orbit stays inside the domain.
    pub fn confinement_limit(&self) -> f64 {
        self.potential(self.domain.0).min(self.potential(self.domain.1))
    }

    pub fn potential(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Harmonic { omega } => 0.5 * self.mass * omega * omega * x * x,
            PotentialKind::Quartic { strength } => strength * x.powi(4),
            PotentialKind::Anharmonic { quadratic, cubic } => x * x * (quadratic + cubic * x),
            PotentialKind::Tabulated(s) => s.value(x),
            PotentialKind::Custom { potential, .. } => potential(x),
        }
    }

    /// dV/dx. Falls back to a central difference with step 1e-6 of the
    /// domain width when no analytic form is available.
    pub fn potential_derivative(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Harmonic { omega } => self.mass * omega * omega * x,
            PotentialKind::Quartic { strength } => 4.0 * strength * x.powi(3),
            PotentialKind::Anharmonic { quadratic, cubic } => x * (2.0 * quadratic + 3.0 * cubic * x),
            PotentialKind::Tabulated(s) => s.derivative(x),
            PotentialKind::Custom {
                derivative: Some(d),
                ..
            } => d(x),
            PotentialKind::Custom { potential, .. } => {
                let h = 1e-6 * (self.domain.1 - self.domain.0);
                (potential(x + h) - potential(x - h)) / (2.0 * h)
            }
        }
    }

    /// Stable textual identity of the well, used for cache keys.
    /// Closure-backed wells have none.
    pub fn fingerprint(&self) -> Option<String> {
        let kind = match &self.kind {
            PotentialKind::Harmonic { omega } => format!("harmonic:{omega:e}"),
            PotentialKind::Quartic { strength } => format!("quartic:{strength:e}"),
            PotentialKind::Anharmonic { quadratic, cubic } => {
                format!("anharmonic:{quadratic:e}:{cubic:e}")
            }
            PotentialKind::Tabulated(s) => {
                let mut out = String::from("table");
                for (x, v) in s.points() {
                    out.push_str(&format!(":{x:e},{v:e}"));
                }
                out
            }
            PotentialKind::Custom { .. } => return None,
        };
        Some(format!(
            "{kind}|m={:e}|hbar={:e}|domain={:e},{:e}",
            self.mass, self.hbar, self.domain.0, self.domain.1
        ))
    }

    fn locate_minimum(&self) -> Result<(f64, f64)> {
        let (lo, hi) = self.domain;
        let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
        let mut changes = Vec::new();
        let mut prev = (lo, self.potential_derivative(lo));
        for i in 0..SCAN_POINTS {
            let x = lo + step * i as f64;
            let v = self.potential(x);
            if !v.is_finite() {
                return Err(invalid("potential", format!("non-finite value at x = {x}")));
            }
            let d = self.potential_derivative(x);
            if d == 0.0 {
                continue;
            }
            if prev.1 == 0.0 {
                prev = (x, d);
                continue;
            }
            if d.signum() != prev.1.signum() {
                changes.push((prev.0, x, prev.1 < 0.0));
            }
            prev = (x, d);
        }
        match changes.as_slice() {
            [(a, b, true)] => {
                let (mut a, mut b) = (*a, *b);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if self.potential_derivative(m) < 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                    if b - a <= 1e-15 * (hi - lo) {
                        break;
                    }
                }
                let x = 0.5 * (a + b);
                Ok((x, self.potential(x)))
            }
            other => Err(Error::NotSingleWell {
                sign_changes: other.len(),
            }),
        }
    }

    /// Classical momentum √(2m(E − V(x))).
    pub fn classical_momentum(&self, energy: f64, x: f64) -> Result<f64> {
        let kinetic = energy - self.potential(x);
        let tol = 1e-9 * (energy - self.minimum.1).abs().max(f64::MIN_POSITIVE);
        if kinetic < -tol {
            return Err(Error::ClassicallyForbidden {
                x,
                energy,
                potential: self.potential(x),
            });
        }
        Ok((2.0 * self.mass * kinetic.max(0.0)).sqrt())
    }

    /// Turning points bisected to machine precision.
    pub fn turning_points(&self, energy: f64) -> Result<(f64, f64)> {
        self.turning_points_with_tol(energy, 0.0)
    }

    /// Turning points (a₋, a₊) found by bisection outward from the minimum.
    /// The returned points sit on the allowed side of each root.
    pub fn turning_points_with_tol(&self, energy: f64, rel_tol: f64) -> Result<(f64, f64)> {
        let (xm, vm) = self.minimum;
        if !(energy > vm) {
            return Err(invalid(
                "energy",
                format!("{energy} is not above the well minimum {vm}"),
            ));
        }
        let limit = self.confinement_limit();
        if energy >= limit {
            return Err(Error::BracketFailure { energy, limit });
        }
        let tol = rel_tol * (self.domain.1 - self.domain.0);
        let left = self.bisect_root(energy, xm, self.domain.0, tol);
        let right = self.bisect_root(energy, xm, self.domain.1, tol);
        Ok((left, right))
    }

    fn bisect_root(&self, energy: f64, inside: f64, outside: f64, tol: f64) -> f64 {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..400 {
            if (b - a).abs() <= tol {
                break;
            }
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if self.potential(m) <= energy {
                a = m;
            } else {
                b = m;
            }
        }
        a
    }

    /// Airy length (ħ²/(2m|V′(a)|))^{1/3}, the WKB breakdown scale at a turning point.
    pub fn airy_length(&self, turning_point: f64) -> f64 {
        let slope = self.potential_derivative(turning_point).abs();
        (self.hbar * self.hbar / (2.0 * self.mass * slope)).cbrt()
    }

    pub fn orbit(&self, energy: f64) -> Result<Orbit> {
        let (a_minus, a_plus) = self.turning_points(energy)?;
        Ok(Orbit {
            energy,
            a_minus,
            a_plus,
        })
    }

    /// τ(x): classical time of flight from a₋ to x.
    pub fn classical_time(&self, energy: f64, x: f64) -> Result<f64> {
        Ok(self.orbit(energy)?.integrals(self, x)?[0])
    }

    /// S(x) = ∫_{a₋}^{x} p dx′ + h/8.
    pub fn reduced_action(&self, energy: f64, x: f64) -> Result<f64> {
        Ok(self.orbit(energy)?.integrals(self, x)?[1] + self.planck() / 8.0)
    }

    /// T = 2τ(a₊).
    pub fn period(&self, energy: f64) -> Result<f64> {
        let orbit = self.orbit(energy)?;
        Ok(2.0 * orbit.integrals(self, orbit.a_plus)?[0])
    }

    /// ∫_{a₋}^{a₊} p dx.
    pub fn action_integral(&self, energy: f64) -> Result<f64> {
        let orbit = self.orbit(energy)?;
        Ok(orbit.integrals(self, orbit.a_plus)?[1])
    }

    /// Solves ∫p dx = (2n+1)h/4 for Eₙ.
    pub fn solve_level(&self, n: usize) -> Result<ClassicalLevel> {
        let target = (2 * n + 1) as f64 * self.planck() / 4.0;
        let limit = self.confinement_limit();
        let vmin = self.minimum.1;
        let mut lo = vmin;
        let mut step = (limit - vmin) * 1e-6;
        let mut hi;
        // Double the upper bound until the action exceeds the target.
        loop {
            hi = vmin + step;
            if hi >= limit {
                hi = vmin + 0.5 * (limit - vmin) + 0.5 * (hi - vmin).min(limit - vmin);
                hi = hi.min(limit - (limit - vmin) * 1e-12);
                let action = self
                    .action_integral(hi)
                    .map_err(|_| Error::LevelOutOfRange { n, limit })?;
                if action < target {
                    return Err(Error::LevelOutOfRange { n, limit });
                }
                break;
            }
            let action = self.action_integral(hi)?;
            if action >= target {
                break;
            }
            lo = hi;
            step *= 2.0;
        }
        // Safeguarded Newton: dA/dE = T/2.
        let mut energy = 0.5 * (lo + hi);
        for _ in 0..200 {
            let orbit = self.orbit(energy)?;
            let [half_period, action] = orbit.integrals(self, orbit.a_plus)?;
            let residual = action - target;
            if residual.abs() <= 1e-14 * target {
                break;
            }
            if residual > 0.0 {
                hi = energy;
            } else {
                lo = energy;
            }
            let newton = energy - residual / half_period;
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - energy).abs() <= 4.0 * f64::EPSILON * energy.abs().max(1e-300) {
                energy = next;
                break;
            }
            energy = next;
        }
        ClassicalLevel::at_energy(self, n, energy)
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

/// Turning points of a classical orbit at fixed energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit {
    pub energy: f64,
    pub a_minus: f64,
    pub a_plus: f64,
}

impl Orbit {
    /// [τ(x), ∫_{a₋}^{x} p dx′]. The interval is split at its midpoint and
    /// each half uses x′ = a ∓ u², which removes the 1/p endpoint singularity.
    pub fn integrals(&self, well: &PotentialWell, x: f64) -> Result<[f64; 2]> {
        let Orbit {
            energy,
            a_minus,
            a_plus,
        } = *self;
        let span = a_plus - a_minus;
        let slack = 1e-9 * span;
        if x < a_minus - slack || x > a_plus + slack {
            return Err(Error::OutsideClassicalRegion { x, a_minus, a_plus });
        }
        let x = x.clamp(a_minus, a_plus);
        let mid = 0.5 * (a_minus + a_plus);
        let integrand = |anchor: f64, sign: f64, u: f64| substituted(well, anchor, sign, u);
        let scale = [span / (energy - well.minimum().1).abs().max(1e-300).sqrt(), 0.0];
        let abs_tol = 1e-16 * scale[0];
        let left = |upper: f64| -> Result<[f64; 2]> {
            Ok(adaptive(0.0, upper, QUAD_REL_TOL, abs_tol, |u| integrand(a_minus, 1.0, u))?.value)
        };
        if x <= mid {
            return left((x - a_minus).max(0.0).sqrt());
        }
        let full_left = left((mid - a_minus).sqrt())?;
        let right = adaptive(
            (a_plus - x).max(0.0).sqrt(),
            (a_plus - mid).sqrt(),
            QUAD_REL_TOL,
            abs_tol,
            |u| integrand(a_plus, -1.0, u),
        )?
        .value;
        Ok([full_left[0] + right[0], full_left[1] + right[1]])
    }
}

/// Integrand of [τ, ∫p] after the substitution x′ = anchor + sign·u².
fn substituted(well: &PotentialWell, anchor: f64, sign: f64, u: f64) -> [f64; 2] {
    let mass = well.mass();
    // Measuring from V(anchor) rather than E keeps the integrand analytic
    // in u even when the turning point is off by rounding.
    let kinetic = well.potential(anchor) - well.potential(anchor + sign * u * u);
    if kinetic > 0.0 {
        let p = (2.0 * mass * kinetic).sqrt();
        [2.0 * u * mass / p, 2.0 * u * p]
    } else {
        // Limit u → 0: 2u m/p → 2m/√(2m|V′(a)|)
        let slope = well.potential_derivative(anchor).abs();
        [2.0 * mass / (2.0 * mass * slope).sqrt(), 0.0]
    }
}

const TABLE_CELLS: usize = 96;

/// Cumulative [τ, ∫p] on a uniform grid in u = √|x − a| for each half of
/// an orbit. A query adds one 20-point panel to the nearest node below,
/// so values agree with [`Orbit::integrals`] to rounding.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    orbit: Orbit,
    mid: f64,
    left: HalfTable,
    right: HalfTable,
    half_period: f64,
    half_action: f64,
}

#[derive(Debug, Clone)]
struct HalfTable {
    anchor: f64,
    sign: f64,
    step: f64,
    cumulative: Vec<[f64; 2]>,
}

impl HalfTable {
    fn new(well: &PotentialWell, anchor: f64, sign: f64, mid: f64) -> Self {
        let step = (mid - anchor).abs().sqrt() / TABLE_CELLS as f64;
        let rule = crate::quadrature::rule20();
        let mut cumulative = Vec::with_capacity(TABLE_CELLS + 1);
        let mut acc = [0.0, 0.0];
        cumulative.push(acc);
        for k in 0..TABLE_CELLS {
            let lo = step * k as f64;
            let v = rule.integrate(lo, lo + step, |u| substituted(well, anchor, sign, u));
            acc = [acc[0] + v[0], acc[1] + v[1]];
            cumulative.push(acc);
        }
        HalfTable {
            anchor,
            sign,
            step,
            cumulative,
        }
    }

    fn at(&self, well: &PotentialWell, u: f64) -> [f64; 2] {
        let k = ((u / self.step).floor() as usize).min(TABLE_CELLS);
        let base = self.cumulative[k];
        let lo = self.step * k as f64;
        if u <= lo {
            return base;
        }
        let v = crate::quadrature::rule20()
            .integrate(lo, u, |s| substituted(well, self.anchor, self.sign, s));
        [base[0] + v[0], base[1] + v[1]]
    }
}

impl OrbitTable {
    pub fn new(well: &PotentialWell, orbit: Orbit) -> Self {
        let mid = 0.5 * (orbit.a_minus + orbit.a_plus);
        let left = HalfTable::new(well, orbit.a_minus, 1.0, mid);
        let right = HalfTable::new(well, orbit.a_plus, -1.0, mid);
        let (l, r) = (left.cumulative[TABLE_CELLS], right.cumulative[TABLE_CELLS]);
        OrbitTable {
            orbit,
            mid,
            left,
            right,
            half_period: l[0] + r[0],
            half_action: l[1] + r[1],
        }
    }

    pub fn orbit(&self) -> Orbit {
        self.orbit
    }

    /// τ(a₊) = T/2.
    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    /// ∫_{a₋}^{a₊} p dx.
    pub fn half_action(&self) -> f64 {
        self.half_action
    }

    /// [τ(x), ∫_{a₋}^{x} p dx′]; `x` must lie in [a₋, a₊].
    pub fn integrals(&self, well: &PotentialWell, x: f64) -> [f64; 2] {
        let Orbit { a_minus, a_plus, .. } = self.orbit;
        if x <= self.mid {
            self.left.at(well, (x - a_minus).max(0.0).sqrt())
        } else {
            let v = self.right.at(well, (a_plus - x).max(0.0).sqrt());
            [self.half_period - v[0], self.half_action - v[1]]
        }
    }

    /// Momentum, time of flight and action at `x`.
    pub fn point(&self, well: &PotentialWell, x: f64) -> Result<ClassicalPoint> {
        let Orbit {
            energy,
            a_minus,
            a_plus,
        } = self.orbit;
        let slack = 1e-9 * (a_plus - a_minus);
        if x < a_minus - slack || x > a_plus + slack {
            return Err(Error::OutsideClassicalRegion { x, a_minus, a_plus });
        }
        let [time, integral] = self.integrals(well, x.clamp(a_minus, a_plus));
        Ok(ClassicalPoint {
            x,
            momentum: well.classical_momentum(energy, x.clamp(a_minus, a_plus))?,
            time,
            action: integral + well.planck() / 8.0,
        })
    }
}

/// Classical data for one quantized level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalLevel {
    pub index: usize,
    pub energy: f64,
    pub turning_left: f64,
    pub turning_right: f64,
    pub period: f64,
    pub angular_frequency: f64,
}

/// Classical quantities of a level evaluated at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalPoint {
    pub x: f64,
    pub momentum: f64,
    /// τ(x)
    pub time: f64,
    /// S(x), including the h/8 offset.
    pub action: f64,
}

impl ClassicalLevel {
    /// Fills level data for an arbitrary energy, tagging it with `index`.
    pub fn at_energy(well: &PotentialWell, index: usize, energy: f64) -> Result<Self> {
        let orbit = well.orbit(energy)?;
        let period = 2.0 * orbit.integrals(well, orbit.a_plus)?[0];
        Ok(ClassicalLevel {
            index,
            energy,
            turning_left: orbit.a_minus,
            turning_right: orbit.a_plus,
            period,
            angular_frequency: std::f64::consts::TAU / period,
        })
    }

    pub fn orbit(&self) -> Orbit {
        Orbit {
            energy: self.energy,
            a_minus: self.turning_left,
            a_plus: self.turning_right,
        }
    }

    pub fn width(&self) -> f64 {
        self.turning_right - self.turning_left
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.turning_left && x < self.turning_right
    }

    /// Momentum, time of flight and action at `x`.
    pub fn point(&self, well: &PotentialWell, x: f64) -> Result<ClassicalPoint> {
        let [time, integral] = self.orbit().integrals(well, x)?;
        Ok(ClassicalPoint {
            x,
            momentum: well.classical_momentum(self.energy, x)?,
            time,
            action: integral + well.planck() / 8.0,
        })
    }

    pub fn table(&self, well: &PotentialWell) -> OrbitTable {
        OrbitTable::new(well, self.orbit())
    }

    /// Quantization residual ∫p dx − (2n+1)h/4.
    pub fn quantization_residual(&self, well: &PotentialWell) -> Result<f64> {
        let integral = self.orbit().integrals(well, self.turning_right)?[1];
        Ok(integral - (2 * self.index + 1) as f64 * well.planck() / 4.0)
    }
}
