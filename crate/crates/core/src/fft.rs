//! n-dimensional FFT plumbing behind `SpectralField`.
//!
//! Modes are calibrated to the continuum transform on `[-L, L)^n`:
//!
//! ```text
//!   modes[k] = h^n * sum_j u(x_j) exp(-i xi_k . x_j),      h = 2L/N
//!   u(x_j)   = (2 pi)^-n * dxi^n * sum_k modes[k] exp(i xi_k . x_j)
//! ```
//!
//! Because samples are based at `x = -L`, each axis picks up a `(-1)^k`
//! phase relative to the raw FFT; `GridSpec::index_parity` tracks it.
//! Planners are created per call: planning is cheap next to the transforms
//! at the sizes used here, and it keeps every entry point reentrant.

use crate::grid::GridSpec;
use crate::scalar::Real;
use num_complex::Complex;
use rustfft::FftPlanner;

fn transform_all_axes<T: Real>(grid: &GridSpec<T>, data: &mut [Complex<T>], forward: bool) {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let mut planner = FftPlanner::<T>::new();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex::new(T::zero(), T::zero()); n];

    for axis in 0..dim {
        // Stride between consecutive entries along `axis` (axis 0 slowest).
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        let total = grid.len();
        for base_block in (0..total).step_by(block) {
            for offset in 0..stride {
                let base = base_block + offset;
                if stride == 1 {
                    let s = &mut data[base..base + n];
                    fft.process_with_scratch(s, &mut scratch);
                } else {
                    for (l, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + l * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (l, v) in line.iter().enumerate() {
                        data[base + l * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Physical samples (lattice order) to calibrated modes.
pub fn physical_to_modes<T: Real>(grid: &GridSpec<T>, samples: &[Complex<T>]) -> Vec<Complex<T>> {
    debug_assert_eq!(samples.len(), grid.len());
    let mut data = samples.to_vec();
    transform_all_axes(grid, &mut data, true);
    let scale = grid.cell_volume();
    for (i, v) in data.iter_mut().enumerate() {
        let s = if grid.index_parity(i) { -scale } else { scale };
        *v = v.scale(s);
    }
    data
}

/// Calibrated modes to physical samples (lattice order).
pub fn modes_to_physical<T: Real>(grid: &GridSpec<T>, modes: &[Complex<T>]) -> Vec<Complex<T>> {
    debug_assert_eq!(modes.len(), grid.len());
    let scale = (T::lit(2.0) * grid.half_width()).powi(-(grid.dim() as i32));
    let mut data: Vec<Complex<T>> = modes
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let s = if grid.index_parity(i) { -scale } else { scale };
            v.scale(s)
        })
        .collect();
    transform_all_axes(grid, &mut data, false);
    data
}

/// Embed modes into a grid refined by `factor` (same box, zeros in the new
/// high-frequency slots). The Nyquist row is copied, not split; fields that
/// are resolved carry negligible mass there.
pub fn pad_modes<T: Real>(
    grid: &GridSpec<T>,
    modes: &[Complex<T>],
    factor: usize,
) -> (GridSpec<T>, Vec<Complex<T>>) {
    let big = grid.refined(factor);
    let mut out = vec![Complex::new(T::zero(), T::zero()); big.len()];
    for (i, v) in modes.iter().enumerate() {
        let signed = grid.signed_indices(i);
        let mut axes = [0usize; crate::grid::MAX_DIM];
        for a in 0..grid.dim() {
            axes[a] = big.storage_index(signed[a]);
        }
        out[big.flat_index(&axes[..grid.dim()])] = *v;
    }
    (big, out)
}

/// Restrict modes on a refined grid back to the base band.
pub fn truncate_modes<T: Real>(
    big: &GridSpec<T>,
    big_modes: &[Complex<T>],
    base: &GridSpec<T>,
) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); base.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        let signed = base.signed_indices(i);
        let mut axes = [0usize; crate::grid::MAX_DIM];
        for a in 0..base.dim() {
            axes[a] = big.storage_index(signed[a]);
        }
        *slot = big_modes[big.flat_index(&axes[..base.dim()])];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_err(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn roundtrip_identity() {
        for (dim, n) in [(1usize, 32usize), (2, 16), (3, 8)] {
            let grid = GridSpec::new(dim, n, 3.5).unwrap();
            let samples: Vec<Complex<f64>> = (0..grid.len())
                .map(|i| Complex::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
                .collect();
            let modes = physical_to_modes(&grid, &samples);
            let back = modes_to_physical(&grid, &modes);
            assert!(max_err(&samples, &back) < 1e-12);
        }
    }

    #[test]
    fn plane_wave_lands_on_single_mode() {
        // u(x) = exp(i k pi/L x) has calibrated mode value (2L)^n at k.
        let grid = GridSpec::new(2, 16, 5.0).unwrap();
        let k = [3i64, -2i64];
        let dxi = grid.delta_xi();
        let samples: Vec<Complex<f64>> = (0..grid.len())
            .map(|i| {
                let x = grid.point(i);
                let phase = dxi * (k[0] as f64 * x[0] + k[1] as f64 * x[1]);
                Complex::from_polar(1.0, phase)
            })
            .collect();
        let modes = physical_to_modes(&grid, &samples);
        let flat = grid.flat_index(&[grid.storage_index(k[0]), grid.storage_index(k[1])]);
        assert_relative_eq!(modes[flat].re, grid.box_volume(), max_relative = 1e-12);
        assert!(modes[flat].im.abs() < 1e-9);
        let off_mass: f64 = modes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != flat)
            .map(|(_, v)| v.norm())
            .sum();
        assert!(off_mass < 1e-8 * grid.box_volume());
    }

    #[test]
    fn pad_then_truncate_is_identity() {
        let grid = GridSpec::new(2, 8, 2.0).unwrap();
        let modes: Vec<Complex<f64>> = (0..grid.len())
            .map(|i| Complex::new(i as f64, -(i as f64) * 0.5))
            .collect();
        let (big, padded) = pad_modes(&grid, &modes, 3);
        let back = truncate_modes(&big, &padded, &grid);
        assert_eq!(modes, back);
    }

    #[test]
    fn padding_preserves_samples_of_bandlimited_field() {
        // A band-limited field resampled on the fine grid must interpolate
        // the coarse samples at the shared points.
        let grid = GridSpec::new(1, 16, 2.0).unwrap();
        let samples: Vec<Complex<f64>> = (0..16)
            .map(|i| {
                let x = grid.point(i)[0];
                Complex::new((x * std::f64::consts::PI / 2.0).cos(), 0.0)
            })
            .collect();
        let modes = physical_to_modes(&grid, &samples);
        let (big, padded) = pad_modes(&grid, &modes, 2);
        let fine = modes_to_physical(&big, &padded);
        for i in 0..16 {
            // Shared points: every second fine sample.
            assert_relative_eq!(fine[2 * i].re, samples[i].re, epsilon = 1e-12);
        }
    }
}
