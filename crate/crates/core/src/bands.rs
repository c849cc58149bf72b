//! Dyadic frequency decomposition: the smooth cutoff `theta`, the shell bump
//! `beta(r) = theta(r) - theta(2r)`, and the projection onto dyadic shells.
//!
//! `theta` is a quintic-smoothstep transition, 1 on `r <= 1` and 0 on
//! `r >= 2`; it is C^2, which is all the discrete checks need. The shells
//! telescope: summing `beta(r / 2^j)` over `j = -J..=J` gives exactly 1 on
//! `2^{-J} <= r <= 2^{J}`.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::scalar::Real;
use num_complex::Complex;

fn smoothstep5<T: Real>(u: T) -> T {
    let u = u.clamp(T::zero(), T::one());
    u * u * u * (u * (u * T::lit(6.0) - T::lit(15.0)) + T::lit(10.0))
}

/// Smooth cutoff: 1 on `r <= 1`, 0 on `r >= 2`.
pub fn theta<T: Real>(r: T) -> T {
    if r <= T::one() {
        T::one()
    } else if r >= T::lit(2.0) {
        T::zero()
    } else {
        T::one() - smoothstep5(r - T::one())
    }
}

/// Shell bump supported in `[1/2, 2]`.
pub fn beta<T: Real>(r: T) -> T {
    theta(r) - theta(T::lit(2.0) * r)
}

/// Whether the dyadic shell `2^{j-1} <= |xi| <= 2^{j+1}` meets the resolved
/// band of the grid.
pub fn shell_within_band<T: Real>(grid: &GridSpec<T>, j: i32) -> bool {
    let lo = T::lit(2f64.powi(j - 1));
    let hi = T::lit(2f64.powi(j + 1));
    lo <= grid.max_freq_mag() && hi >= grid.delta_xi()
}

/// Littlewood-Paley projection onto the shell at scale `2^j`.
pub fn lp_projection<T: Real>(field: &SpectralField<T>, j: i32) -> SpectralField<T> {
    let scale = T::lit(2f64.powi(j));
    field.map_modes_by_mag(|r| Complex::new(beta(r / scale), T::zero()))
}

/// Sum of shell projections over `j in lo..=hi`, as a single multiplier.
pub fn lp_partial_sum<T: Real>(field: &SpectralField<T>, lo: i32, hi: i32) -> SpectralField<T> {
    field.map_modes_by_mag(|r| {
        let mut acc = T::zero();
        for j in lo..=hi {
            acc += beta(r / T::lit(2f64.powi(j)));
        }
        Complex::new(acc, T::zero())
    })
}

/// Validating wrapper used by the frequency-localized evolution.
pub fn require_shell_in_band<T: Real>(grid: &GridSpec<T>, j: i32) -> Result<()> {
    if shell_within_band(grid, j) {
        Ok(())
    } else {
        Err(Error::ShellOutsideBand { j })
    }
}
