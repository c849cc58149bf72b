//! Randomization suite: partition invariants, the degenerate all-ones hook,
//! law moments, and the Khintchine-type large-deviation ratios.

use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, StatEntry, Table};
use vnlw_core::random::{moment_report, randomize, RandomLaw, SeedSpec, UnitPartition};

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid.build()?;
    let random = cfg.random.expect("validated: random section present");
    let seed = SeedSpec::new(random.seed);
    let partition = UnitPartition::build(&grid)?;

    report.verdict(
        "partition_sums_to_one",
        partition.sum_defect <= 1e-12,
        format!("max |sum_k psi - 1| over the band: {:.3e}", partition.sum_defect),
    );
    let mut ptable = Table::new("partition", &["psi_sq_min", "psi_sq_max", "sum_defect"]);
    ptable.push(vec![partition.psi_sq_min, partition.psi_sq_max, partition.sum_defect]);
    report.tables.push(ptable);

    let data = cfg.data.build(&grid);
    let same = randomize(&data, &partition, RandomLaw::AllOnes, &seed);
    let defect = same
        .displacement
        .modes()
        .iter()
        .zip(data.displacement.modes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let scale = data.displacement.max_mode_mag().max(1e-30);
    report.verdict(
        "all_ones_reproduces_data",
        defect <= 1e-12 * scale,
        format!("max mode deviation {defect:.3e} (scale {scale:.3e})"),
    );

    let w1 = randomize(&data, &partition, random.law.build(), &seed);
    let w2 = randomize(&data, &partition, random.law.build(), &SeedSpec::new(random.seed + 1));
    let diff = w1
        .displacement
        .modes()
        .iter()
        .zip(w2.displacement.modes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    report.verdict(
        "seeds_differ",
        diff > 0.0,
        format!("max mode difference across seeds {diff:.3e}"),
    );

    // Law moments.
    let rad = moment_report(RandomLaw::Rademacher, 2000, &seed);
    let evens_exact = [2usize, 4, 6]
        .iter()
        .all(|&m| rad.moments[m - 1].estimate == 1.0);
    report.verdict(
        "rademacher_moments_exact",
        evens_exact,
        format!(
            "even moments ({}, {}, {})",
            rad.moments[1].estimate, rad.moments[3].estimate, rad.moments[5].estimate
        ),
    );

    let m_samples = cfg.sweep.mc_samples.unwrap_or(10_000).max(1000);
    let uni = moment_report(RandomLaw::UniformSym, m_samples, &seed);
    let sixth = uni.moments[5];
    report.stats.push(StatEntry::from_mc("uniform_sym_sixth_moment", &sixth));
    let target = 27.0 / 7.0;
    report.verdict(
        "uniform_sym_sixth_moment",
        (sixth.estimate - target).abs() <= 3.0 * sixth.stderr,
        format!(
            "sixth moment {:.4} +- {:.4} vs 27/7 = {:.4}",
            sixth.estimate, sixth.stderr, target
        ),
    );

    // Large-deviation ratios across the shipped laws.
    let mut ldtable = Table::new("large_deviation", &["law", "p", "max_ratio"]);
    let mut all_bounded = true;
    for (li, law) in [
        RandomLaw::Rademacher,
        RandomLaw::UniformSym,
        RandomLaw::TruncatedGaussian,
    ]
    .into_iter()
    .enumerate()
    {
        let rep = moment_report(law, 1000, &seed);
        for (p, ratio) in rep.large_deviation {
            ldtable.push(vec![li as f64, p as f64, ratio]);
            all_bounded &= ratio <= 3.0;
        }
    }
    report.tables.push(ldtable);
    report.verdict(
        "large_deviation_bounded",
        all_bounded,
        "||sum h_k c_k||_{L^p(Omega)} / ||c||_2 <= 3 for p in {2,4,6} across laws".into(),
    );

    Ok(report)
}
