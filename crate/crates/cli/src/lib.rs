//! Experiment harness for the viscous nonlinear wave laboratory: config
//! parsing, experiment orchestration, deterministic reports, and the
//! power-law fitting used by every exponent verdict.

pub mod config;
pub mod experiments;
pub mod report;
pub mod runner;

use vnlw_core::fit::fit_loglog;

/// Least-squares exponent fit on log-log axes: `(slope, intercept, r^2)`.
/// Requires at least three strictly positive points.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> anyhow::Result<(f64, f64, f64)> {
    let fit = fit_loglog(xs, ys)?;
    Ok((fit.slope, fit.intercept, fit.r_squared))
}
