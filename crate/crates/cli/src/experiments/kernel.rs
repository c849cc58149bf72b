//! Kernel suite: radial symmetry, total mass, the scaling identity, the
//! explicit Poisson/wave convolution formula in n = 1, 2, 3, and envelope
//! decay rates.

use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Table};
use vnlw_core::kernel::*;
use vnlw_core::propagator::mult_b;
use vnlw_core::Grid64;

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg);

    // Radial symmetry on a well-resolved 2-D grid, inside the trustworthy
    // radius L/2.
    let grid2 = Grid64::new(2, 1024, 40.0)?;
    let profile2 = radial_profile(&kernel_field(&grid2, 1.0));
    let peak = profile2.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let spread = profile2
        .radii
        .iter()
        .zip(&profile2.spread)
        .filter(|(r, _)| **r <= 20.0)
        .map(|(_, s)| *s)
        .fold(0.0, f64::max);
    report.verdict(
        "radial_symmetry",
        profile2.imag_defect <= 1e-10 && spread <= 1e-6 * peak,
        format!(
            "imag defect {:.2e}, angular spread {:.3e} of peak {:.4}",
            profile2.imag_defect, spread, peak
        ),
    );

    // Total mass: h^n sum K equals the multiplier at xi = 0, whose
    // removable-singularity value is exactly 1.
    let grid1 = Grid64::new(1, 4096, 40.0)?;
    let field1 = kernel_field(&grid1, 1.0);
    let mass: f64 = field1.samples().iter().map(|c| c.re).sum::<f64>() * grid1.delta_x();
    let expected = mult_b(0.0f64, 1.0, 1.0);
    report.verdict(
        "kernel_mass",
        (mass - expected).abs() <= 1e-6,
        format!("integral {mass:.12} vs zero-frequency multiplier {expected}"),
    );

    // Scaling identity K_t = t^{1-n} K(x/t) at the lattice level.
    let t = 2.0f64;
    let direct = kernel_at_scale(&grid1, t)?;
    let rescaled = scaled_kernel(&unit_kernel(&Grid64::new(1, 4096, 20.0)?), t)?;
    let sup = direct
        .values
        .iter()
        .zip(&rescaled.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    report.verdict(
        "scaling_identity",
        sup <= 1e-8,
        format!("sup difference between direct and rescaled profiles {sup:.3e}"),
    );

    // Explicit convolution formula in all three dimensions.
    let checks = [
        (1usize, Grid64::new(1, 4096, 40.0)?, 1e-3),
        (2, Grid64::new(2, 1024, 40.0)?, 1e-2),
        (3, Grid64::new(3, 256, 20.0)?, 1e-2),
    ];
    let mut formula = Table::new("kernel_explicit_formula", &["dim", "sup_relative_error", "tolerance"]);
    for (dim, grid, tol) in checks {
        let err = explicit_formula_check(dim, &grid)?;
        formula.push(vec![dim as f64, err, tol]);
        report.verdict(
            &format!("explicit_formula_n{dim}"),
            err <= tol,
            format!("sup relative error {err:.3e} (tolerance {tol:.0e})"),
        );
    }
    report.tables.push(formula);

    // Envelope decay slopes against log(1 + r).
    let p1 = unit_kernel(&grid1);
    let f1 = decay_fit(&p1, 3.0, 20.0)?;
    report.verdict(
        "decay_n1",
        f1.slope <= -1.7,
        format!("n = 1 envelope slope {:.3} (need <= -1.7)", f1.slope),
    );
    let f2 = decay_fit(&profile2, 3.0, 15.0)?;
    report.verdict(
        "decay_n2",
        f2.slope <= -2.7,
        format!("n = 2 envelope slope {:.3} (need <= -2.7)", f2.slope),
    );
    report.fit("decay_n1", &f1);
    report.fit("decay_n2", &f2);

    // Profile table in the canonical schema.
    let mut prof = Table::new("kernel_profile", &["radius", "value", "envelope_flag"]);
    let env: std::collections::BTreeSet<usize> = p1.envelope_indices().into_iter().collect();
    for i in 0..p1.radii.len() {
        if p1.radii[i] <= 20.0 {
            prof.push(vec![p1.radii[i], p1.values[i], f64::from(u8::from(env.contains(&i)))]);
        }
    }
    report.tables.push(prof);

    Ok(report)
}
