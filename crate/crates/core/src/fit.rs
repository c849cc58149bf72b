//! Least-squares power-law fitting on log-log axes.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit<T> {
    /// Fitted exponent.
    pub slope: T,
    /// Intercept in log space (log of the prefactor).
    pub intercept: T,
    /// Coefficient of determination of the log-log regression.
    pub r_squared: T,
}

/// Fit `y ~ C x^slope` by least squares on `(log x, log y)`.
/// Requires at least three strictly positive points.
pub fn fit_loglog<T: Real>(xs: &[T], ys: &[T]) -> Result<LogLogFit<T>> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::InvalidFitInput);
    }
    if xs.iter().chain(ys.iter()).any(|v| !(*v > T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidFitInput);
    }
    let n = from_usize::<T>(xs.len());
    let lx: Vec<T> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().copied().sum::<T>() / n;
    let my = ly.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (x, y) in lx.iter().zip(&ly) {
        let dx = *x - mx;
        let dy = *y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == T::zero() {
        return Err(Error::InvalidFitInput);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == T::zero() {
        T::one()
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(LogLogFit { slope, intercept, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_square_law() {
        let xs = [1.0f64, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let fit = fit_loglog(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn prefactor_recovered() {
        let xs = [0.5f64, 1.0, 2.0, 5.0, 9.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.sqrt()).collect();
        let fit = fit_loglog(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, 0.5, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_loglog(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_loglog(&[1.0, -2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_loglog(&[1.0, 2.0, 3.0], &[0.0, 2.0, 3.0]).is_err());
    }
}
