//! Property-level invariants of the discretization: transform round trips,
//! Plancherel, norm monotonicity, partition telescoping, and a single-
//! precision instantiation smoke test.

use num_complex::Complex;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use vnlw_core::field::Lp;
use vnlw_core::grid::GridSpec;
use vnlw_core::SpectralField;

#[test]
fn thousand_roundtrips_stay_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let (dim, n, l) = match case % 4 {
            0 => (1usize, 64usize, 5.0),
            1 => (1, 32, 12.0),
            2 => (2, 16, 3.0),
            _ => (3, 8, 2.0),
        };
        let grid = GridSpec::<f64>::new(dim, n, l).unwrap();
        let samples: Vec<Complex<f64>> = (0..grid.len())
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let field = SpectralField::from_complex_samples(grid, samples.clone());
        let rebuilt = SpectralField::from_modes(grid, field.modes().to_vec());
        let scale = samples.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (a, b) in rebuilt.samples().iter().zip(&samples) {
            worst = worst.max((a - b).norm() / scale);
        }
    }
    assert!(worst <= 1e-12, "worst relative roundtrip error {worst:.3e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plancherel_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = GridSpec::<f64>::new(1, 64, 7.0).unwrap();
        let samples: Vec<Complex<f64>> = (0..grid.len())
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let f = SpectralField::from_complex_samples(grid, samples);
        let physical = f.lebesgue_norm(Lp::finite(2.0)).unwrap();
        let spectral = f.sobolev_norm(0.0, false);
        prop_assert!((physical - spectral).abs() <= 1e-10 * physical.max(1e-30));
    }

    #[test]
    fn sobolev_monotone_in_s(seed in any::<u64>(), s1 in -2.0f64..2.0, ds in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = GridSpec::<f64>::new(1, 32, 4.0).unwrap();
        let samples: Vec<Complex<f64>> = (0..grid.len())
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), 0.0))
            .collect();
        let f = SpectralField::from_complex_samples(grid, samples);
        let lo = f.sobolev_norm(s1, false);
        let hi = f.sobolev_norm(s1 + ds, false);
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn real_fields_are_hermitian(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = GridSpec::<f64>::new(2, 16, 3.0).unwrap();
        let samples: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = SpectralField::from_real_samples(grid, &samples);
        prop_assert!(f.hermitian_defect() <= 1e-12 * f.max_mode_mag().max(1.0));
    }
}

#[test]
fn beta_partition_covers_band_on_grid() {
    let grid = GridSpec::<f64>::new(2, 64, 9.0).unwrap();
    let f = SpectralField::from_physical_fn(grid, |x| {
        (3.0 * x[0]).cos() * (-(x[0] * x[0] + x[1] * x[1]) / 3.0).exp()
    });
    let sum = vnlw_core::bands::lp_partial_sum(&f, -10, 10);
    let mut worst = 0.0f64;
    for i in 0..grid.len() {
        let r = grid.freq_mag(i);
        if r < 2f64.powi(-10) || r > 2f64.powi(10) {
            continue;
        }
        worst = worst.max((sum.modes()[i] - f.modes()[i]).norm());
    }
    assert!(worst <= 1e-12 * f.max_mode_mag());
}

#[test]
fn dyadic_shells_nearly_preserve_homogeneous_norm() {
    // sum_j ||f_j||^2 over shells stays within [c, 1] of ||f||^2 since the
    // squared bumps sum to at most 1 and at least 1/2 on overlaps.
    let grid = GridSpec::<f64>::new(1, 256, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut modes = vec![Complex::new(0.0, 0.0); grid.len()];
    for k in 2..=60i64 {
        let v = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        modes[grid.storage_index(k)] = v;
        modes[grid.storage_index(-k)] = v.conj();
    }
    let f = SpectralField::from_modes(grid, modes);
    let s = 0.5f64;
    let total = f.sobolev_norm(s, true).powi(2);
    let mut shells = 0.0;
    for j in -4..=8 {
        shells += vnlw_core::bands::lp_projection(&f, j).sobolev_norm(s, true).powi(2);
    }
    let ratio = shells / total;
    assert!(ratio <= 1.0 + 1e-12, "shell sum exceeded the norm: {ratio}");
    assert!(ratio >= 0.4, "shell sum degenerate: {ratio}");
}

#[test]
fn f32_instantiation_works_at_reduced_tolerance() {
    let grid = GridSpec::<f32>::new(1, 64, 6.0f32).unwrap();
    let f = SpectralField::<f32>::from_physical_fn(grid, |x| (-x[0] * x[0]).exp());
    let rebuilt = SpectralField::from_modes(grid, f.modes().to_vec());
    let worst = f
        .samples()
        .iter()
        .zip(rebuilt.samples())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f32, f32::max);
    assert!(worst <= 1e-5);
    let l2 = f.lebesgue_norm(Lp::finite(2.0)).unwrap();
    let h0 = f.sobolev_norm(0.0, false);
    assert!((l2 - h0).abs() <= 1e-4 * l2);
}

#[test]
fn dump_header_is_sixteen_bytes_and_canonical() {
    let dir = std::env::temp_dir().join("vnlw-dump-layout");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("layout.vnlw");
    let grid = GridSpec::<f64>::new(2, 8, 2.5).unwrap();
    let f = SpectralField::from_physical_fn(grid, |x| x[0] - x[1]);
    f.write_dump(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 16 + grid.len() * 16);
    assert_eq!(&bytes[0..4], b"VNLW");
    assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 2);
    assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 8);
    assert_eq!(f64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2.5);
    // Row-major mode order: entry (i0, i1) lives at flat = i0 * N + i1.
    let flat = grid.flat_index(&[3, 5]);
    let off = 16 + flat * 16;
    let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    assert_eq!(re, f.modes()[flat].re);
    std::fs::remove_file(&path).ok();
}
