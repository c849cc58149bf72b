//! Averaging experiment: the Monte Carlo sixth-power mass of the randomized
//! free evolution against the window length, its fitted T-exponent, and
//! degree-6 homogeneity.

use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, StatEntry, Table};
use vnlw_core::fit::fit_loglog;
use vnlw_core::random::{mc_free_l6, SeedSpec, UnitPartition};
use vnlw_core::CauchyData;

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid.build()?;
    if grid.dim() != 2 {
        anyhow::bail!("config rejected: the averaging estimate lives in two dimensions");
    }
    let random = cfg.random.expect("validated");
    let law = random.law.build();
    let seed = SeedSpec::new(random.seed);
    let partition = UnitPartition::build(&grid)?;
    let data = cfg.data.build(&grid);
    let s = cfg.sweep.s.unwrap_or(data.sobolev_index);

    let horizons = if cfg.sweep.horizons.is_empty() {
        vec![0.125, 0.25, 0.5, 1.0]
    } else {
        cfg.sweep.horizons.clone()
    };
    let m = cfg.sweep.mc_samples.unwrap_or(200);
    let nodes = cfg.sweep.time_nodes.unwrap_or(32);

    let stats = mc_free_l6(&data, &partition, law, &seed, &horizons, m, nodes);
    let mut table = Table::new("averaging", &["horizon", "estimate", "stderr", "samples"]);
    for (t, st) in &stats {
        table.push(vec![*t, st.estimate, st.stderr, st.samples as f64]);
        report
            .stats
            .push(StatEntry::from_mc(&format!("sixth_mass_T_{t}"), st));
    }
    report.tables.push(table);

    let ts: Vec<f64> = stats.iter().map(|(t, _)| *t).collect();
    let es: Vec<f64> = stats.iter().map(|(_, st)| st.estimate).collect();
    let fitted = fit_loglog(&ts, &es)?;
    report.fit("averaging_t_exponent", &fitted);
    let target = s + 1.0 / 6.0;
    report.verdict(
        "t_exponent_positive_near_target",
        fitted.slope > 0.0 && (fitted.slope - target).abs() <= 0.5 * target,
        format!(
            "E||u||_6^6 ~ T^{{{:.3}}} vs s + 1/6 = {target:.3} (+-50%)",
            fitted.slope
        ),
    );

    // Degree-6 homogeneity under data doubling, common draws.
    let doubled = CauchyData::new(
        data.displacement.scale(2.0),
        data.velocity.scale(2.0),
        data.sobolev_index,
    )?;
    let t_ref = horizons[horizons.len() / 2];
    let base = mc_free_l6(&data, &partition, law, &seed, &[t_ref], m, nodes)[0].1;
    let big = mc_free_l6(&doubled, &partition, law, &seed, &[t_ref], m, nodes)[0].1;
    let ratio = big.estimate / base.estimate;
    report.verdict(
        "degree_six_homogeneity",
        (ratio - 64.0).abs() <= 6.4,
        format!("doubling the data scaled the estimate by {ratio:.3} (expect 64)"),
    );
    Ok(report)
}
