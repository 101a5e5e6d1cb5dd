//! Dormand–Prince 5(4) integration of dx/dt = v(x, t) with dense output.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Flagged, Result};
use crate::field::WaveField;
use crate::well::PotentialWell;
use crate::wkb::SuperpositionSpec;

use super::velocity::{bohm_velocity_exact, bohm_velocity_wkb, LocalMotionParams};

/// A velocity field together with the length and speed scales that cap
/// the step size.
pub trait VelocityField: Sync {
    fn velocity(&self, x: f64, t: f64) -> Flagged<f64>;

    /// (local wavelength, classical speed) near x.
    fn resolution(&self, x: f64) -> (f64, f64);
}

/// The frozen-envelope field v sinh χ₀ / (cosh χ₀ − cos(φ₀ + 4π(x−x₀)/λ₀)).
#[derive(Debug, Clone, Copy)]
pub struct LocalField(pub LocalMotionParams);

impl VelocityField for LocalField {
    fn velocity(&self, x: f64, _t: f64) -> Flagged<f64> {
        Ok(self.0.velocity(x))
    }

    fn resolution(&self, _x: f64) -> (f64, f64) {
        (self.0.lambda0, self.0.v_cl0)
    }
}

/// Bohmian velocity of an arbitrary wavefunction.
#[derive(Clone, Copy)]
pub struct ExactField<'a, F: WaveField + ?Sized>(pub &'a F);

impl<F: WaveField + ?Sized> VelocityField for ExactField<'_, F> {
    fn velocity(&self, x: f64, t: f64) -> Flagged<f64> {
        bohm_velocity_exact(self.0, x, t)
    }

    fn resolution(&self, _x: f64) -> (f64, f64) {
        let lambda = self.0.shortest_wavelength();
        let speed = std::f64::consts::TAU * self.0.hbar() / (self.0.mass() * lambda);
        (lambda, speed)
    }
}

/// The semiclassical velocity field of a superposition spec.
#[derive(Clone, Copy)]
pub struct WkbField<'a> {
    pub spec: &'a SuperpositionSpec,
    pub well: &'a PotentialWell,
}

impl VelocityField for WkbField<'_> {
    fn velocity(&self, x: f64, t: f64) -> Flagged<f64> {
        bohm_velocity_wkb(self.spec, self.well, x, t)
    }

    fn resolution(&self, x: f64) -> (f64, f64) {
        let energy = self.spec.level().energy;
        let p = self
            .well
            .classical_momentum(energy, x)
            .ok()
            .filter(|p| *p > 0.0)
            .unwrap_or_else(|| (2.0 * self.well.mass() * (energy - self.well.minimum().1)).sqrt());
        (self.well.planck() / p, p / self.well.mass())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Steps are capped at λ / (cap_divisor · max(|v|, v_cl)).
    pub cap_divisor: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-8,
            atol: 1e-10,
            cap_divisor: 40.0,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorOptions {
    /// Default tolerances with atol = 1e-10 · `width`.
    pub fn for_width(width: f64) -> Self {
        IntegratorOptions {
            atol: 1e-10 * width,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub min_step: f64,
    pub max_step: f64,
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    coef: [f64; 5],
}

impl DenseSegment {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn x0(&self) -> f64 {
        self.coef[0]
    }

    pub fn x1(&self) -> f64 {
        self.coef[0] + self.coef[1]
    }

    pub fn position(&self, t: f64) -> f64 {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let r = &self.coef;
        r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])))
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrates from (x0, t0) to t1, calling `on_step` with each accepted
/// segment and the velocity at its end. Returns the final position.
pub fn drive<V, S>(
    field: &V,
    x0: f64,
    t0: f64,
    t1: f64,
    options: &IntegratorOptions,
    mut on_step: S,
) -> Result<(f64, IntegratorStats)>
where
    V: VelocityField + ?Sized,
    S: FnMut(&DenseSegment, f64),
{
    if !(t1 >= t0) {
        return Err(Error::InvalidParameter {
            name: "t1",
            reason: format!("end time {t1} precedes start time {t0}"),
        });
    }
    let mut stats = IntegratorStats {
        min_step: f64::INFINITY,
        ..Default::default()
    };
    let mut t = t0;
    let mut x = x0;
    let mut k1 = field
        .velocity(x, t)
        .map_err(|_| Error::NodeEncountered { t, x })?;
    let span = t1 - t0;
    let floor = 1e-14 * span.max(t0.abs()).max(1e-300);
    let cap = |x: f64, v: f64| {
        let (lambda, speed) = field.resolution(x);
        lambda / (options.cap_divisor * v.abs().max(speed))
    };
    let mut h = cap(x, k1).min(span);
    while t1 - t > floor {
        if stats.steps + stats.rejected >= options.max_steps {
            return Err(Error::StepUnderflow { t, x, step: h });
        }
        h = h.min(cap(x, k1));
        let last = h * (1.0 + 1e-6) >= t1 - t;
        let step = if last { t1 - t } else { h };
        let mut k = [0.0; 7];
        k[0] = k1;
        let mut flagged = false;
        for s in 1..7 {
            let xs = x + step * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            match field.velocity(xs, t + C[s] * step) {
                Ok(v) => k[s] = v,
                Err(_) => {
                    flagged = true;
                    break;
                }
            }
        }
        if flagged {
            stats.rejected += 1;
            h = 0.25 * step;
            if h < floor {
                return Err(Error::NodeEncountered { t, x });
            }
            continue;
        }
        // Stage 7 sits at t + h with the fifth-order solution.
        let x_new = x + step * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let err = step * (0..7).map(|j| E[j] * k[j]).sum::<f64>();
        let scale = options.atol + options.rtol * x.abs().max(x_new.abs());
        let ratio = (err / scale).abs();
        let factor = if ratio == 0.0 {
            5.0
        } else {
            (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        if ratio <= 1.0 {
            let diff = x_new - x;
            let bspl = step * k[0] - diff;
            let coef = [
                x,
                diff,
                bspl,
                diff - step * k[6] - bspl,
                step * (0..7).map(|j| D[j] * k[j]).sum::<f64>(),
            ];
            let segment = DenseSegment { t0: t, h: step, coef };
            stats.steps += 1;
            stats.min_step = stats.min_step.min(step);
            stats.max_step = stats.max_step.max(step);
            on_step(&segment, k[6]);
            t = if last { t1 } else { t + step };
            x = x_new;
            k1 = k[6];
            if !last {
                h = step * factor;
            }
        } else {
            stats.rejected += 1;
            h = step * factor.min(1.0);
            if h < floor {
                return Err(Error::StepUnderflow { t, x, step: h });
            }
        }
    }
    if stats.steps == 0 {
        stats.min_step = 0.0;
    }
    Ok((x, stats))
}

/// Final position only, without storing the path.
pub fn integrate_endpoint<V: VelocityField + ?Sized>(
    field: &V,
    x0: f64,
    t0: f64,
    t1: f64,
    options: &IntegratorOptions,
) -> Result<f64> {
    Ok(drive(field, x0, t0, t1, options, |_, _| {})?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// End of an accepted integrator step.
    Step,
    /// Requested output time, from the dense interpolant.
    Output,
}

impl SampleKind {
    pub fn code(&self) -> u8 {
        match self {
            SampleKind::Step => 0,
            SampleKind::Output => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub kind: SampleKind,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    samples: Vec<TrajectorySample>,
    segments: Vec<DenseSegment>,
    stats: IntegratorStats,
}

/// Integrates and records every step plus the requested output times.
pub fn integrate_trajectory<V: VelocityField + ?Sized>(
    field: &V,
    x0: f64,
    t0: f64,
    t1: f64,
    options: &IntegratorOptions,
    output_times: &[f64],
) -> Result<Trajectory> {
    let mut outputs: Vec<f64> = output_times
        .iter()
        .copied()
        .filter(|t| *t >= t0 && *t <= t1)
        .collect();
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();
    let v0 = field
        .velocity(x0, t0)
        .map_err(|_| Error::NodeEncountered { t: t0, x: x0 })?;
    let mut samples = vec![TrajectorySample {
        t: t0,
        x: x0,
        v: v0,
        kind: SampleKind::Step,
    }];
    let mut segments = Vec::new();
    let mut next = outputs.iter().position(|&t| t > t0).unwrap_or(outputs.len());
    let (_, stats) = drive(field, x0, t0, t1, options, |seg, v_end| {
        while next < outputs.len() && outputs[next] < seg.t1() {
            let t = outputs[next];
            let x = seg.position(t);
            let v = field.velocity(x, t).unwrap_or(f64::NAN);
            samples.push(TrajectorySample {
                t,
                x,
                v,
                kind: SampleKind::Output,
            });
            next += 1;
        }
        if next < outputs.len() && outputs[next] == seg.t1() {
            next += 1;
        }
        samples.push(TrajectorySample {
            t: seg.t1(),
            x: seg.x1(),
            v: v_end,
            kind: SampleKind::Step,
        });
        segments.push(*seg);
    })?;
    Ok(Trajectory {
        samples,
        segments,
        stats,
    })
}

impl Trajectory {
    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    pub fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }

    pub fn stats(&self) -> IntegratorStats {
        self.stats
    }

    pub fn start(&self) -> (f64, f64) {
        (self.samples[0].t, self.samples[0].x)
    }

    pub fn end(&self) -> (f64, f64) {
        let last = self.samples[self.samples.len() - 1];
        (last.t, last.x)
    }

    /// x(t) from the dense output.
    pub fn position_at(&self, t: f64) -> Option<f64> {
        if self.segments.is_empty() {
            return (t == self.samples[0].t).then_some(self.samples[0].x);
        }
        let k = self.segments.partition_point(|s| s.t1() < t);
        let seg = self.segments.get(k)?;
        (t >= seg.t0).then(|| seg.position(t))
    }

    /// First time the path reaches `target`, located by bisection on the
    /// dense output.
    pub fn first_passage(&self, target: f64) -> Option<f64> {
        let start = self.samples[0].x;
        let side = (target - start).signum();
        for seg in &self.segments {
            if (target - seg.x1()) * side > 0.0 {
                continue;
            }
            let (mut lo, mut hi) = (seg.t0, seg.t1());
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if (target - seg.position(mid)) * side > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        None
    }

    /// Largest |v| along the path: the best step sample, refined by a
    /// golden-section search over the neighbouring steps.
    pub fn peak_speed<V: VelocityField + ?Sized>(&self, field: &V) -> (f64, f64) {
        let steps: Vec<&TrajectorySample> = self
            .samples
            .iter()
            .filter(|s| s.kind == SampleKind::Step)
            .collect();
        let (k, best) = steps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.v.abs().total_cmp(&b.1.v.abs()))
            .map(|(k, s)| (k, **s))
            .expect("trajectory has a start sample");
        let lo = steps[k.saturating_sub(1)].t;
        let hi = steps[(k + 1).min(steps.len() - 1)].t;
        let speed = |t: f64| {
            self.position_at(t)
                .and_then(|x| field.velocity(x, t).ok())
                .map_or(0.0, f64::abs)
        };
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        for _ in 0..80 {
            let c = b - golden * (b - a);
            let d = a + golden * (b - a);
            if speed(c) > speed(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let t = 0.5 * (a + b);
        let refined = speed(t);
        if refined > best.v.abs() {
            (t, refined)
        } else {
            (best.t, best.v.abs())
        }
    }

    /// Fraction of the elapsed time during which |v| < `speed`, measured
    /// by integrating the indicator over the dense output.
    pub fn time_fraction_below<V: VelocityField + ?Sized>(&self, field: &V, speed: f64, per_step: usize) -> f64 {
        let mut below = 0.0;
        let mut total = 0.0;
        for seg in &self.segments {
            let dt = seg.h / per_step as f64;
            for j in 0..per_step {
                let t = seg.t0 + (j as f64 + 0.5) * dt;
                let v = field.velocity(seg.position(t), t).unwrap_or(f64::INFINITY);
                if v.abs() < speed {
                    below += dt;
                }
                total += dt;
            }
        }
        if total > 0.0 {
            below / total
        } else {
            0.0
        }
    }

    /// CSV with columns t, x, v, step_flag (0 = integrator step, 1 = output time).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "t,x,v,step_flag")?;
        for s in &self.samples {
            writeln!(out, "{:e},{:e},{:e},{}", s.t, s.x, s.v, s.kind.code())?;
        }
        out.flush()?;
        Ok(())
    }
}

/// λ₀ over the first-passage time to x₀ ± λ₀, the sign following the net
/// displacement of the path.
pub fn time_averaged_velocity(trajectory: &Trajectory, x0: f64, lambda0: f64) -> Result<f64> {
    let (t_start, _) = trajectory.start();
    let (_, x_end) = trajectory.end();
    let direction = if x_end >= x0 { 1.0 } else { -1.0 };
    let distance = lambda0.abs();
    let crossing = trajectory
        .first_passage(x0 + direction * distance)
        .ok_or(Error::NoPassage { distance })?;
    Ok(direction * distance / (crossing - t_start))
}
