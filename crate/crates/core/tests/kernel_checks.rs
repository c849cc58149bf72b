//! Kernel laboratory checks: radial symmetry, norm stability under grid
//! refinement, the scaling family, the explicit convolution formula, decay
//! rates, and the link between `S(t)` and discrete convolution with `K_t`.

use vnlw_core::field::Lp;
use vnlw_core::grid::GridSpec;
use vnlw_core::kernel::*;
use vnlw_core::propagator::s_operator;
use vnlw_core::SpectralField;

#[test]
fn kernel_is_real_and_radial_in_2d() {
    // Angular spread is measured inside the trustworthy radius L/2; beyond
    // it the box images dominate and are direction dependent by geometry.
    let grid = GridSpec::<f64>::new(2, 1024, 40.0).unwrap();
    let profile = unit_kernel(&grid);
    assert!(profile.imag_defect <= 1e-10, "imag defect {}", profile.imag_defect);
    let peak = profile.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let spread = profile
        .radii
        .iter()
        .zip(&profile.spread)
        .filter(|(r, _)| **r <= 20.0)
        .map(|(_, s)| *s)
        .fold(0.0, f64::max);
    assert!(spread <= 1e-6 * peak, "angular spread {:.3e} of peak {peak:.3}", spread);
    assert_eq!(profile.radii[0], 0.0);
}

#[test]
fn l1_norm_stable_under_refinement() {
    let coarse = kernel_field(&GridSpec::<f64>::new(1, 2048, 30.0).unwrap(), 1.0);
    let fine = kernel_field(&GridSpec::<f64>::new(1, 8192, 60.0).unwrap(), 1.0);
    let l1c = coarse.lebesgue_norm(Lp::finite(1.0)).unwrap();
    let l1f = fine.lebesgue_norm(Lp::finite(1.0)).unwrap();
    assert!(l1c.is_finite() && l1f.is_finite());
    assert!(
        ((l1c - l1f) / l1f).abs() <= 0.01,
        "L1 moved {l1c} -> {l1f} under refinement"
    );
    // L2 and Linf as well, at the looser stability budget.
    for p in [Lp::finite(2.0), Lp::Infinity] {
        let a = coarse.lebesgue_norm(p).unwrap();
        let b = fine.lebesgue_norm(p).unwrap();
        assert!(((a - b) / b).abs() <= 0.02);
    }
}

#[test]
fn scaled_kernel_lq_norms_follow_the_scaling_law() {
    // ||K_t||_q = t^{1 - n + n/q} ||K||_q, measured on matched grids so the
    // rescaling is exact at the lattice level.
    let t = 2.0f64;
    for (dim, n, l) in [(1usize, 2048usize, 30.0f64), (2, 256, 15.0)] {
        let base = GridSpec::<f64>::new(dim, n, l).unwrap();
        let shrunk = GridSpec::<f64>::new(dim, n, l / t).unwrap();
        for q in [1.0, 2.0, 4.0] {
            let kt = kernel_field(&base, t).lebesgue_norm(Lp::finite(q)).unwrap();
            let k1 = kernel_field(&shrunk, 1.0).lebesgue_norm(Lp::finite(q)).unwrap();
            let predicted = t.powf(1.0 - dim as f64 + dim as f64 / q) * k1;
            assert!(
                ((kt - predicted) / predicted).abs() <= 1e-8,
                "n = {dim}, q = {q}: {kt} vs {predicted}"
            );
        }
    }
}

#[test]
fn s_operator_is_discrete_convolution_with_kt() {
    // Circular convolution of the kernel samples with phi, times the cell
    // volume, equals the multiplier route.
    let grid = GridSpec::<f64>::new(1, 128, 10.0).unwrap();
    let t = 0.7f64;
    let phi = SpectralField::from_physical_fn(grid, |x| (-x[0] * x[0] / 2.0).exp() * (1.3 * x[0]).cos());
    let via_multiplier = s_operator(&phi, t).unwrap();
    let kt: Vec<f64> = kernel_field(&grid, t).samples().iter().map(|c| c.re).collect();
    let ph: Vec<f64> = phi.samples().iter().map(|c| c.re).collect();
    let n = grid.len();
    let h = grid.delta_x();
    let mut worst = 0.0f64;
    for j in 0..n {
        let mut acc = 0.0;
        for m in 0..n {
            // x_j - x_m = (j - m) h, whose lattice index is j - m + N/2.
            acc += kt[m] * ph[(j + n + n / 2 - m) % n];
        }
        let conv = acc * h;
        worst = worst.max((conv - via_multiplier.samples()[j].re).abs());
    }
    assert!(worst <= 1e-8, "convolution defect {worst:.3e}");
}

#[test]
fn explicit_formula_one_dimensional() {
    let grid = GridSpec::<f64>::new(1, 4096, 40.0).unwrap();
    let err = explicit_formula_check(1, &grid).unwrap();
    assert!(err <= 1e-3, "n = 1 explicit formula error {err:.3e}");
}

#[test]
fn explicit_formula_two_dimensional() {
    let grid = GridSpec::<f64>::new(2, 1024, 40.0).unwrap();
    let err = explicit_formula_check(2, &grid).unwrap();
    assert!(err <= 1e-2, "n = 2 explicit formula error {err:.3e}");
}

#[test]
fn explicit_formula_rejects_unresolved_grid() {
    let grid = GridSpec::<f64>::new(1, 16, 10.0).unwrap();
    assert!(explicit_formula_check(1, &grid).is_err());
}

#[test]
fn unit_kernel_decay_rates() {
    // Sharp envelope decay: slope <= -(n + 1) + 0.3.
    let p1 = unit_kernel(&GridSpec::<f64>::new(1, 4096, 40.0).unwrap());
    let f1 = decay_fit(&p1, 3.0, 20.0).unwrap();
    assert!(f1.slope <= -1.7, "n = 1 decay slope {}", f1.slope);

    let p2 = unit_kernel(&GridSpec::<f64>::new(2, 1024, 40.0).unwrap());
    let f2 = decay_fit(&p2, 3.0, 15.0).unwrap();
    assert!(f2.slope <= -2.7, "n = 2 decay slope {}", f2.slope);
}
