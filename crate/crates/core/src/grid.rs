//! Truncated-periodic discretization of R^n.
//!
//! The physical box is `[-L, L)^n` sampled at `N` points per axis,
//! `x_i = -L + i * 2L/N`. The frequency lattice is `xi = k * pi/L` with
//! signed integer indices `k in {-N/2, ..., N/2 - 1}` per axis; the Nyquist
//! index appears once, at `-N/2`.
//!
//! Canonical mode ordering (also the on-disk order): storage index `i` per
//! axis runs `0..N` in FFT order, i.e. signed index `k = i` for `i < N/2`
//! and `k = i - N` otherwise; axes are row-major with axis 0 slowest. This
//! ordering is fixed so that dumped fields are bit-stable.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Real};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    dim: usize,
    points_per_axis: usize,
    half_width: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(dim: usize, points_per_axis: usize, half_width: T) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidDimension(dim));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidPointCount(points_per_axis));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidHalfWidth(half_width.to_f64_lossy()));
        }
        Ok(Self { dim, points_per_axis, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    /// Total number of lattice points (= number of modes).
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical sample spacing `2L/N`.
    pub fn delta_x(&self) -> T {
        T::lit(2.0) * self.half_width / from_usize(self.points_per_axis)
    }

    /// Frequency spacing `pi/L`.
    pub fn delta_xi(&self) -> T {
        T::PI() / self.half_width
    }

    /// Physical cell volume `(2L/N)^n`.
    pub fn cell_volume(&self) -> T {
        self.delta_x().powi(self.dim as i32)
    }

    /// Frequency cell volume `(pi/L)^n`.
    pub fn freq_cell_volume(&self) -> T {
        self.delta_xi().powi(self.dim as i32)
    }

    /// Box volume `(2L)^n`.
    pub fn box_volume(&self) -> T {
        (T::lit(2.0) * self.half_width).powi(self.dim as i32)
    }

    /// Largest per-axis frequency magnitude, `(N/2) * pi/L` (the Nyquist line).
    pub fn nyquist(&self) -> T {
        from_usize::<T>(self.points_per_axis / 2) * self.delta_xi()
    }

    /// Largest lattice frequency magnitude (box corner), `sqrt(n) * nyquist`.
    pub fn max_freq_mag(&self) -> T {
        from_usize::<T>(self.dim).sqrt() * self.nyquist()
    }

    /// Signed index for a storage index along one axis.
    #[inline]
    pub fn signed_index(&self, i: usize) -> i64 {
        let n = self.points_per_axis;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Storage index for a signed index along one axis.
    #[inline]
    pub fn storage_index(&self, k: i64) -> usize {
        let n = self.points_per_axis as i64;
        (k.rem_euclid(n)) as usize
    }

    /// Decompose a flat mode index into per-axis storage indices
    /// (axis 0 slowest).
    #[inline]
    pub fn axis_indices(&self, flat: usize) -> [usize; MAX_DIM] {
        let n = self.points_per_axis;
        let mut out = [0usize; MAX_DIM];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            out[a] = rem % n;
            rem /= n;
        }
        out
    }

    #[inline]
    pub fn flat_index(&self, axes: &[usize]) -> usize {
        let n = self.points_per_axis;
        let mut flat = 0usize;
        for a in 0..self.dim {
            flat = flat * n + axes[a];
        }
        flat
    }

    /// Signed multi-index of a flat mode index.
    #[inline]
    pub fn signed_indices(&self, flat: usize) -> [i64; MAX_DIM] {
        let axes = self.axis_indices(flat);
        let mut out = [0i64; MAX_DIM];
        for a in 0..self.dim {
            out[a] = self.signed_index(axes[a]);
        }
        out
    }

    /// Frequency vector `xi` at a flat mode index. Entries past `dim` are zero.
    #[inline]
    pub fn freq(&self, flat: usize) -> [T; MAX_DIM] {
        let k = self.signed_indices(flat);
        let dxi = self.delta_xi();
        let mut out = [T::zero(); MAX_DIM];
        for a in 0..self.dim {
            out[a] = T::lit(k[a] as f64) * dxi;
        }
        out
    }

    /// `|xi|` at a flat mode index.
    #[inline]
    pub fn freq_mag(&self, flat: usize) -> T {
        let xi = self.freq(flat);
        let mut s = T::zero();
        for a in 0..self.dim {
            s += xi[a] * xi[a];
        }
        s.sqrt()
    }

    /// `|xi|^2` at a flat mode index.
    #[inline]
    pub fn freq_mag_sq(&self, flat: usize) -> T {
        let xi = self.freq(flat);
        let mut s = T::zero();
        for a in 0..self.dim {
            s += xi[a] * xi[a];
        }
        s
    }

    /// Parity of the sum of storage indices; the `(-1)^k` phase that links
    /// the FFT layout to samples based at `x = -L`.
    #[inline]
    pub fn index_parity(&self, flat: usize) -> bool {
        let axes = self.axis_indices(flat);
        let mut s = 0usize;
        for a in 0..self.dim {
            s += axes[a];
        }
        s % 2 == 1
    }

    /// Physical point at a flat lattice index.
    #[inline]
    pub fn point(&self, flat: usize) -> [T; MAX_DIM] {
        let axes = self.axis_indices(flat);
        let dx = self.delta_x();
        let mut out = [T::zero(); MAX_DIM];
        for a in 0..self.dim {
            out[a] = -self.half_width + from_usize::<T>(axes[a]) * dx;
        }
        out
    }

    /// Flat storage index of the flipped mode `-k`, used by the Hermitian
    /// symmetry check. The Nyquist row maps to itself.
    #[inline]
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let axes = self.axis_indices(flat);
        let n = self.points_per_axis;
        let mut flipped = [0usize; MAX_DIM];
        for a in 0..self.dim {
            flipped[a] = (n - axes[a]) % n;
        }
        self.flat_index(&flipped[..self.dim])
    }

    /// Grid for the same box sampled at `factor * N` points per axis.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            dim: self.dim,
            points_per_axis: self.points_per_axis * factor,
            half_width: self.half_width,
        }
    }

    /// Grid with the same mode count on a rescaled box `[-L', L')^n`.
    pub fn with_half_width(&self, half_width: T) -> Result<Self> {
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidHalfWidth(half_width.to_f64_lossy()));
        }
        Ok(Self { half_width, ..*self })
    }
}

/// Enumerate all multi-indices `alpha` with `|alpha| <= k` in `dim` variables.
pub fn multi_indices_up_to(dim: usize, k: usize) -> Vec<[usize; MAX_DIM]> {
    let mut out = Vec::new();
    match dim {
        1 => {
            for a in 0..=k {
                out.push([a, 0, 0]);
            }
        }
        2 => {
            for a in 0..=k {
                for b in 0..=(k - a) {
                    out.push([a, b, 0]);
                }
            }
        }
        3 => {
            for a in 0..=k {
                for b in 0..=(k - a) {
                    for c in 0..=(k - a - b) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        _ => unreachable!("dim checked at grid construction"),
    }
    out
}
