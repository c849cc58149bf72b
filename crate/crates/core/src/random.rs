//! Wiener randomization of Cauchy data: the unit partition of frequency
//! space, the randomized data map `f -> sum_k h_k(omega) P_k f`, and the
//! Monte Carlo estimators behind the probabilistic experiments.
//!
//! Randomness is counter-based: each unit cell `k` (and field tag) derives
//! its own ChaCha8 stream from the master seed by SplitMix64 mixing, so
//! draws depend only on `(seed, tag, k)` and never on iteration order or
//! thread count.

use crate::error::{Error, Result};
use crate::field::{CauchyData, Lp, SpectralField};
use crate::grid::{GridSpec, MAX_DIM};
use crate::propagator::{evolve_homogeneous, PropagatorParams};
use crate::quad::{gl_integrate, integrate_uniform};
use crate::scalar::{from_usize, Real};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::sync::OnceLock;

// --------------------------------------------------------------------------
// Seeding

/// Reproducible seed: a master value plus per-`(tag, k)` derived streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    /// Independent sub-seed for Monte Carlo sample `index`.
    pub fn for_sample(&self, index: u64) -> Self {
        Self {
            master: splitmix(self.master ^ splitmix(index.wrapping_add(SAMPLE_SALT))),
        }
    }

    /// Stream keyed on `(master, tag, k)`; identical inputs always yield
    /// identical draws, across runs and thread counts.
    pub fn stream(&self, tag: u32, k: &[i64]) -> ChaCha8Rng {
        let mut state = splitmix(self.master ^ ((tag as u64) << 32 | 0xA5A5_5A5A));
        for (a, &ka) in k.iter().enumerate() {
            state = splitmix(state ^ (ka as u64).rotate_left(8 * a as u32 + 1));
        }
        let mut seed = [0u8; 32];
        let mut word = state;
        for chunk in seed.chunks_exact_mut(8) {
            word = splitmix(word);
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

const SAMPLE_SALT: u64 = 0x5EED_0000_0000_0001;

// --------------------------------------------------------------------------
// Random laws

/// Mean-zero, unit-variance draw laws with finite sixth moments.
/// `AllOnes` is the degenerate hook: it reproduces the data exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomLaw {
    Rademacher,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    UniformSym,
    /// Standard normal conditioned on `|z| <= 4`, rescaled to unit variance.
    TruncatedGaussian,
    AllOnes,
}

/// Variance of the standard normal conditioned on `|z| <= 4`; computed once
/// by quadrature against the normal density.
fn truncated_variance() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| {
        let density = |z: f64| (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mass = gl_integrate(-4.0, 4.0, 64, density);
        let second = gl_integrate(-4.0, 4.0, 64, |z| z * z * density(z));
        second / mass
    })
}

impl RandomLaw {
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            RandomLaw::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            RandomLaw::UniformSym => rng.gen_range(-1.0f64..1.0) * 3f64.sqrt(),
            RandomLaw::TruncatedGaussian => {
                let sigma = truncated_variance().sqrt();
                loop {
                    let z: f64 = StandardNormal.sample(rng);
                    if z.abs() <= 4.0 {
                        return z / sigma;
                    }
                }
            }
            RandomLaw::AllOnes => 1.0,
        }
    }

    /// Theoretical m-th moment (exact for the first two laws, quadrature
    /// for the truncated Gaussian).
    pub fn moment(&self, m: u32) -> f64 {
        match self {
            RandomLaw::Rademacher => {
                if m % 2 == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            RandomLaw::UniformSym => {
                if m % 2 == 0 {
                    3f64.powi(m as i32 / 2) / (m as f64 + 1.0)
                } else {
                    0.0
                }
            }
            RandomLaw::TruncatedGaussian => {
                if m % 2 == 1 {
                    return 0.0;
                }
                let density =
                    |z: f64| (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
                let mass = gl_integrate(-4.0, 4.0, 64, density);
                let sigma2 = truncated_variance();
                gl_integrate(-4.0, 4.0, 64, |z: f64| z.powi(m as i32) * density(z))
                    / (mass * sigma2.powi(m as i32 / 2))
            }
            RandomLaw::AllOnes => 1.0,
        }
    }

    pub fn sixth_moment(&self) -> f64 {
        self.moment(6)
    }
}

// --------------------------------------------------------------------------
// Partition of unity

fn sigma_1d<T: Real>(u: T) -> T {
    // C^2 smoothstep shoulder: 1 on |u| <= 1, 0 on |u| >= 2.
    crate::bands::theta(u.abs())
}

/// Partition of unity on frequency space built from translates of the
/// product bump `sigma(xi) = prod_a sigma_1d(xi_a)`, normalized so that
/// `sum_k psi(xi - k) = 1` identically. Support lives in the sup-norm ball
/// of radius 2 around each integer lattice point.
#[derive(Debug, Clone)]
pub struct UnitPartition<T: Real> {
    grid: GridSpec<T>,
    /// Unit-lattice points whose bump meets the grid band.
    ks: Vec<[i64; MAX_DIM]>,
    /// Sparse per-k weights on the mode lattice: (flat index, psi value).
    entries: Vec<Vec<(usize, T)>>,
    /// Measured range of `sum_k psi^2` over the grid band.
    pub psi_sq_min: T,
    pub psi_sq_max: T,
    /// Largest deviation of `sum_k psi` from 1 over the grid band.
    pub sum_defect: T,
}

impl<T: Real> UnitPartition<T> {
    pub fn build(grid: &GridSpec<T>) -> Result<Self> {
        // Unit cells need room: a band narrower than one cell plus the
        // bump radius cannot host the partition.
        if grid.nyquist() < T::lit(3.0) {
            return Err(Error::PartitionBandTooSmall {
                needed: 3.0,
                have: grid.nyquist().to_f64_lossy(),
            });
        }
        let dim = grid.dim();
        let k_max = grid.nyquist().to_f64_lossy().ceil() as i64 + 2;
        let mut ks = Vec::new();
        // Per-axis storage indices within distance < 2 of a given integer.
        let n = grid.points_per_axis();
        let dxi = grid.delta_xi();
        let axis_hits = |ka: i64| -> Vec<usize> {
            (0..n)
                .filter(|&i| {
                    let xi = T::lit(grid.signed_index(i) as f64) * dxi;
                    (xi - T::lit(ka as f64)).abs() < T::lit(2.0)
                })
                .collect()
        };
        // Cache per-axis hits for every k value in range.
        let mut hit_cache = std::collections::HashMap::new();
        for ka in -k_max..=k_max {
            hit_cache.insert(ka, axis_hits(ka));
        }

        let mut entries = Vec::new();
        let mut k_iter: Vec<[i64; MAX_DIM]> = Vec::new();
        {
            let mut push = |k: [i64; MAX_DIM]| k_iter.push(k);
            match dim {
                1 => {
                    for a in -k_max..=k_max {
                        push([a, 0, 0]);
                    }
                }
                2 => {
                    for a in -k_max..=k_max {
                        for b in -k_max..=k_max {
                            push([a, b, 0]);
                        }
                    }
                }
                _ => {
                    for a in -k_max..=k_max {
                        for b in -k_max..=k_max {
                            for c in -k_max..=k_max {
                                push([a, b, c]);
                            }
                        }
                    }
                }
            }
        }

        // Normalizer: sum of sigma over all integer translates, evaluated
        // pointwise (only the <= 3^n nearby cells contribute).
        let normalizer = |xi: &[T]| -> T {
            let mut total = T::zero();
            let lo_hi: Vec<(i64, i64)> = (0..dim)
                .map(|a| {
                    let x = xi[a].to_f64_lossy();
                    ((x - 2.0).ceil() as i64, (x + 2.0).floor() as i64)
                })
                .collect();
            let mut idx = [0i64; MAX_DIM];
            fn rec<T: Real>(
                a: usize,
                dim: usize,
                lo_hi: &[(i64, i64)],
                idx: &mut [i64; MAX_DIM],
                xi: &[T],
                total: &mut T,
            ) {
                if a == dim {
                    let mut s = T::one();
                    for b in 0..dim {
                        s *= sigma_1d(xi[b] - T::lit(idx[b] as f64));
                    }
                    *total += s;
                    return;
                }
                for j in lo_hi[a].0..=lo_hi[a].1 {
                    idx[a] = j;
                    rec(a + 1, dim, lo_hi, idx, xi, total);
                }
            }
            rec(0, dim, &lo_hi, &mut idx, xi, &mut total);
            total
        };

        let mut psi_sum = vec![T::zero(); grid.len()];
        let mut psi_sq = vec![T::zero(); grid.len()];
        for k in k_iter {
            let mut cell_entries = Vec::new();
            // Cartesian product of the per-axis hit lists.
            let empty = Vec::new();
            let lists: Vec<&Vec<usize>> = (0..dim)
                .map(|a| hit_cache.get(&k[a]).unwrap_or(&empty))
                .collect();
            if lists.iter().any(|l| l.is_empty()) {
                continue;
            }
            let mut stack = vec![0usize; dim];
            'outer: loop {
                let mut axes = [0usize; MAX_DIM];
                for a in 0..dim {
                    axes[a] = lists[a][stack[a]];
                }
                let flat = grid.flat_index(&axes[..dim]);
                let xi = grid.freq(flat);
                let mut s = T::one();
                for a in 0..dim {
                    s *= sigma_1d(xi[a] - T::lit(k[a] as f64));
                }
                if s > T::zero() {
                    let w = s / normalizer(&xi[..dim]);
                    cell_entries.push((flat, w));
                    psi_sum[flat] += w;
                    psi_sq[flat] += w * w;
                }
                // Advance the cartesian counter.
                let mut a = 0;
                loop {
                    stack[a] += 1;
                    if stack[a] < lists[a].len() {
                        break;
                    }
                    stack[a] = 0;
                    a += 1;
                    if a == dim {
                        break 'outer;
                    }
                }
            }
            if !cell_entries.is_empty() {
                ks.push(k);
                entries.push(cell_entries);
            }
        }

        let mut sum_defect = T::zero();
        let mut sq_min = T::infinity();
        let mut sq_max = T::zero();
        for i in 0..grid.len() {
            sum_defect = sum_defect.max((psi_sum[i] - T::one()).abs());
            sq_min = sq_min.min(psi_sq[i]);
            sq_max = sq_max.max(psi_sq[i]);
        }
        Ok(Self {
            grid: *grid,
            ks,
            entries,
            psi_sq_min: sq_min,
            psi_sq_max: sq_max,
            sum_defect,
        })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn cells(&self) -> &[[i64; MAX_DIM]] {
        &self.ks
    }

    /// `psi(xi - k)` at an arbitrary frequency (not only lattice points).
    pub fn psi_at(&self, xi: &[T], k: &[i64]) -> T {
        let dim = self.grid.dim();
        let mut s = T::one();
        for a in 0..dim {
            s *= sigma_1d(xi[a] - T::lit(k[a] as f64));
        }
        if s == T::zero() {
            return T::zero();
        }
        // Recompute the normalizer pointwise.
        let mut total = T::zero();
        let lo_hi: Vec<(i64, i64)> = (0..dim)
            .map(|a| {
                let x = xi[a].to_f64_lossy();
                ((x - 2.0).ceil() as i64, (x + 2.0).floor() as i64)
            })
            .collect();
        let mut idx = vec![0i64; dim];
        fn rec<T: Real>(
            a: usize,
            dim: usize,
            lo_hi: &[(i64, i64)],
            idx: &mut Vec<i64>,
            xi: &[T],
            total: &mut T,
        ) {
            if a == dim {
                let mut s = T::one();
                for b in 0..dim {
                    s *= sigma_1d(xi[b] - T::lit(idx[b] as f64));
                }
                *total += s;
                return;
            }
            for j in lo_hi[a].0..=lo_hi[a].1 {
                idx[a] = j;
                rec(a + 1, dim, lo_hi, idx, xi, total);
            }
        }
        rec(0, dim, &lo_hi, &mut idx, xi, &mut total);
        s / total
    }

    /// Unit-cell projection `P_k f = F^{-1}(psi(xi - k) f_hat)`.
    pub fn project(&self, field: &SpectralField<T>, k: &[i64]) -> SpectralField<T> {
        assert_eq!(field.grid(), &self.grid, "partition belongs to another grid");
        let mut modes = vec![Complex::new(T::zero(), T::zero()); self.grid.len()];
        if let Some(pos) = self.ks.iter().position(|kk| &kk[..self.grid.dim()] == k) {
            for &(idx, w) in &self.entries[pos] {
                modes[idx] = field.modes()[idx].scale(w);
            }
        }
        SpectralField::from_modes(self.grid, modes)
    }

    /// The random Fourier multiplier `sum_k h_k psi(xi - k)` for one field.
    fn random_multiplier(&self, law: RandomLaw, seed: &SeedSpec, tag: u32) -> Vec<T> {
        let mut mult = vec![T::zero(); self.grid.len()];
        for (pos, k) in self.ks.iter().enumerate() {
            let mut rng = seed.stream(tag, &k[..self.grid.dim()]);
            let h = T::lit(law.draw(&mut rng));
            for &(idx, w) in &self.entries[pos] {
                mult[idx] += h * w;
            }
        }
        mult
    }
}

/// Wiener randomization of the Cauchy data: independent streams for the
/// displacement (tag 0) and velocity (tag 1) cells.
pub fn randomize<T: Real>(
    data: &CauchyData<T>,
    partition: &UnitPartition<T>,
    law: RandomLaw,
    seed: &SeedSpec,
) -> CauchyData<T> {
    assert_eq!(data.grid(), partition.grid(), "partition belongs to another grid");
    let mf = partition.random_multiplier(law, seed, 0);
    let mg = partition.random_multiplier(law, seed, 1);
    let f = SpectralField::from_modes(
        *data.grid(),
        data.displacement
            .modes()
            .iter()
            .zip(&mf)
            .map(|(c, &w)| c.scale(w))
            .collect(),
    );
    let g = SpectralField::from_modes(
        *data.grid(),
        data.velocity
            .modes()
            .iter()
            .zip(&mg)
            .map(|(c, &w)| c.scale(w))
            .collect(),
    );
    CauchyData { displacement: f, velocity: g, sobolev_index: data.sobolev_index }
}

// --------------------------------------------------------------------------
// Monte Carlo statistics

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McStat {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub ci95: (f64, f64),
}

impl McStat {
    pub fn from_samples(values: &[f64]) -> Self {
        let m = values.len();
        let mean = values.iter().sum::<f64>() / m as f64;
        let var = if m > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0)
        } else {
            0.0
        };
        let stderr = (var / m as f64).sqrt();
        Self {
            estimate: mean,
            stderr,
            samples: m,
            ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
        }
    }
}

/// Empirical moments 1..=6 of a law plus the large-deviation ratios
/// `||sum_k h_k c_k||_{L^p(Omega)} / (sum |c_k|^2)^{1/2}` over random
/// coefficient vectors, for `p in {2, 4, 6}`.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub moments: [McStat; 6],
    /// `(p, max ratio over coefficient vectors)`.
    pub large_deviation: Vec<(u32, f64)>,
}

pub fn moment_report(law: RandomLaw, m_samples: usize, seed: &SeedSpec) -> MomentReport {
    assert!(m_samples >= 1000, "need >= 1e3 samples for the moment table");
    let draws: Vec<f64> = (0..m_samples)
        .map(|i| {
            let mut rng = seed.for_sample(i as u64).stream(7, &[0]);
            law.draw(&mut rng)
        })
        .collect();
    let moments: Vec<McStat> = (1..=6)
        .map(|m| {
            let powered: Vec<f64> = draws.iter().map(|x| x.powi(m)).collect();
            McStat::from_samples(&powered)
        })
        .collect();

    // Large-deviation check over 100 coefficient vectors of length 64.
    // One stream per (vector, omega); the draws within a sample come from
    // sequential positions of that stream. All three p-norms share the sums.
    let n_vectors = 100;
    let dim_c = 64i64;
    let m_omega = 2000;
    let mut worst = [0.0f64; 3];
    for v in 0..n_vectors {
        let mut crng = seed.for_sample(900_000 + v as u64).stream(8, &[0]);
        let coeffs: Vec<Complex<f64>> = (0..dim_c)
            .map(|_| Complex::new(crng.gen_range(-1.0..1.0), crng.gen_range(-1.0..1.0)))
            .collect();
        let l2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut acc = [0.0f64; 3];
        for w in 0..m_omega {
            let mut rng = seed.for_sample((v * m_omega + w) as u64).stream(9, &[v as i64]);
            let mut sum = Complex::new(0.0, 0.0);
            for c in &coeffs {
                sum += c * law.draw(&mut rng);
            }
            let n2 = sum.norm_sqr();
            acc[0] += n2;
            acc[1] += n2 * n2;
            acc[2] += n2 * n2 * n2;
        }
        for (slot, &p) in [2u32, 4, 6].iter().enumerate() {
            let lp = (acc[slot] / m_omega as f64).powf(1.0 / p as f64);
            worst[slot] = worst[slot].max(lp / l2);
        }
    }
    MomentReport {
        moments: moments.try_into().unwrap(),
        large_deviation: vec![(2, worst[0]), (4, worst[1]), (6, worst[2])],
    }
}

/// Unit-scale Bernstein ratio `||P_k f||_{p2} / ||P_k f||_{p1}`.
pub fn bernstein_check<T: Real>(
    partition: &UnitPartition<T>,
    field: &SpectralField<T>,
    k: &[i64],
    p1: Lp<T>,
    p2: Lp<T>,
) -> Result<T> {
    let piece = partition.project(field, k);
    let denom = piece.lebesgue_norm(p1)?;
    if denom == T::zero() {
        return Err(Error::ZeroData);
    }
    Ok(piece.lebesgue_norm(p2)? / denom)
}

/// One free-evolution sixth-power mass `int_0^T ||u^omega(t)||_{L^6}^6 dt`.
fn free_l6_sixth_power<T: Real>(
    data: &CauchyData<T>,
    partition: &UnitPartition<T>,
    law: RandomLaw,
    seed: &SeedSpec,
    horizon: T,
    time_nodes: usize,
) -> f64 {
    let randomized = randomize(data, partition, law, seed);
    let params = PropagatorParams::model();
    let dt = horizon / from_usize::<T>(time_nodes);
    let values: Vec<T> = (0..=time_nodes)
        .map(|i| {
            let (u, _) = evolve_homogeneous(&randomized, from_usize::<T>(i) * dt, &params);
            u.lebesgue_norm(Lp::finite(6.0)).unwrap().powi(6)
        })
        .collect();
    integrate_uniform(&values, dt).to_f64_lossy()
}

/// Monte Carlo estimate of `E ||u^omega||^6_{L^6([0,T] x box)}` for each
/// horizon in `horizons`, with common random numbers across horizons.
pub fn mc_free_l6<T: Real>(
    data: &CauchyData<T>,
    partition: &UnitPartition<T>,
    law: RandomLaw,
    seed: &SeedSpec,
    horizons: &[T],
    m_samples: usize,
    time_nodes: usize,
) -> Vec<(T, McStat)> {
    assert!(m_samples >= 50, "averaging estimates need >= 50 samples");
    horizons
        .iter()
        .map(|&horizon| {
            let values: Vec<f64> = (0..m_samples)
                .into_par_iter()
                .map(|i| {
                    let sub = seed.for_sample(i as u64);
                    free_l6_sixth_power(data, partition, law, &sub, horizon, time_nodes)
                })
                .collect();
            (horizon, McStat::from_samples(&values))
        })
        .collect()
}

/// Tail bound report: empirical `P(||u^omega||_{L^6([0,T] x box)} >= lambda)`
/// with a 95% Wilson interval.
#[derive(Debug, Clone, Copy)]
pub struct TailReport {
    pub fraction: f64,
    pub wilson_ci: (f64, f64),
    pub samples: usize,
}

pub fn tail_probability<T: Real>(
    data: &CauchyData<T>,
    partition: &UnitPartition<T>,
    law: RandomLaw,
    seed: &SeedSpec,
    lambda: T,
    horizon: T,
    m_samples: usize,
    time_nodes: usize,
) -> TailReport {
    assert!(m_samples >= 200, "tail estimates need >= 200 samples");
    let hits: usize = (0..m_samples)
        .into_par_iter()
        .map(|i| {
            let sub = seed.for_sample(i as u64);
            let mass = free_l6_sixth_power(data, partition, law, &sub, horizon, time_nodes);
            usize::from(mass.powf(1.0 / 6.0) >= lambda.to_f64_lossy())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let n = m_samples as f64;
    let p_hat = hits as f64 / n;
    let z = 1.96f64;
    let denom = 1.0 + z * z / n;
    let center = (p_hat + z * z / (2.0 * n)) / denom;
    let half = z * ((p_hat * (1.0 - p_hat) + z * z / (4.0 * n)) / n).sqrt() / denom;
    TailReport {
        fraction: p_hat,
        wilson_ci: ((center - half).max(0.0), (center + half).min(1.0)),
        samples: m_samples,
    }
}
