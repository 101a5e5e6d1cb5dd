pub mod equivariance;
pub mod fig_rho;
pub mod fig_trajectory;
pub mod husimi;
pub mod levels;
pub mod property_suite;

/// `count` midpoints of equal cells spanning (lo, hi).
pub(crate) fn cell_midpoints(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo + (hi - lo) * (k as f64 + 0.5) / count as f64)
        .collect()
}

pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}
