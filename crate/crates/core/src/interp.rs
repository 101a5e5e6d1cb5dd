//! Interpolants: natural cubic splines for tabulated data and quintic
//! Hermite interpolation on uniform grids.

use crate::error::{Error, Result};

/// Natural cubic spline through strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: format!("{} abscissae but {} values", xs.len(), ys.len()),
            });
        }
        if xs.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: "a spline needs at least three points".into(),
            });
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: "abscissae must be strictly increasing".into(),
            });
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: "non-finite entry".into(),
            });
        }
        let n = xs.len();
        // Tridiagonal solve for the second derivatives (natural ends).
        let mut second = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
                - (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            u[i] = (6.0 * slope / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
        }
        second[n - 1] = 0.0;
        for k in (0..n - 1).rev() {
            second[k] = second[k] * second[k + 1] + u[k];
        }
        Ok(CubicSpline { xs, ys, second })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let a = (self.xs[k + 1] - x) / h;
        let b = (x - self.xs[k]) / h;
        a * self.ys[k]
            + b * self.ys[k + 1]
            + ((a * a * a - a) * self.second[k] + (b * b * b - b) * self.second[k + 1]) * h * h
                / 6.0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let a = (self.xs[k + 1] - x) / h;
        let b = (x - self.xs[k]) / h;
        (self.ys[k + 1] - self.ys[k]) / h
            - (3.0 * a * a - 1.0) / 6.0 * h * self.second[k]
            + (3.0 * b * b - 1.0) / 6.0 * h * self.second[k + 1]
    }
}

/// Uniform grid x_i = start + i * step, i in 0..len.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, len: usize) -> Self {
        assert!(len >= 2 && end > start);
        UniformGrid {
            start,
            step: (end - start) / (len - 1) as f64,
            len,
        }
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.len - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start && x <= self.end()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.x(i))
    }

    /// Quintic Hermite weights at `x`, or `None` outside the grid.
    pub fn hermite(&self, x: f64) -> Option<HermiteWeights> {
        if !self.contains(x) {
            return None;
        }
        let s = (x - self.start) / self.step;
        let i = (s.floor() as usize).min(self.len - 2);
        let u = s - i as f64;
        Some(HermiteWeights::new(i, u, self.step))
    }
}

/// Basis weights of the quintic Hermite interpolant on one cell, for the
/// value and first derivative, applied to (y, y', y'') at both ends.
#[derive(Debug, Clone, Copy)]
pub struct HermiteWeights {
    pub index: usize,
    pub value: [f64; 6],
    pub slope: [f64; 6],
}

impl HermiteWeights {
    fn new(index: usize, u: f64, h: f64) -> Self {
        let u2 = u * u;
        let u3 = u2 * u;
        let u4 = u3 * u;
        let u5 = u4 * u;
        let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
        let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
        let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
        let h3 = 0.5 * (u3 - 2.0 * u4 + u5);
        let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
        let h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
        let d0 = -30.0 * u2 + 60.0 * u3 - 30.0 * u4;
        let d1 = 1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4;
        let d2 = 0.5 * (2.0 * u - 9.0 * u2 + 12.0 * u3 - 5.0 * u4);
        let d3 = 0.5 * (3.0 * u2 - 8.0 * u3 + 5.0 * u4);
        let d4 = -12.0 * u2 + 28.0 * u3 - 15.0 * u4;
        let d5 = 30.0 * u2 - 60.0 * u3 + 30.0 * u4;
        let hh = h * h;
        HermiteWeights {
            index,
            // Order: y_i, y'_i, y''_i, y_{i+1}, y'_{i+1}, y''_{i+1}
            value: [h0, h * h1, hh * h2, h5, h * h4, hh * h3],
            slope: [d0 / h, d1, h * d2, d5 / h, d4, h * d3],
        }
    }

    /// Interpolated value and derivative of tabulated (y, y', y'').
    pub fn apply(&self, y: &[f64], dy: &[f64], d2y: &[f64]) -> (f64, f64) {
        let i = self.index;
        let data = [y[i], dy[i], d2y[i], y[i + 1], dy[i + 1], d2y[i + 1]];
        let mut v = 0.0;
        let mut d = 0.0;
        for (k, y) in data.iter().enumerate() {
            v += self.value[k] * y;
            d += self.slope[k] * y;
        }
        (v, d)
    }
}
