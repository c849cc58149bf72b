//! Tail-probability experiment: empirical exceedance fractions of the
//! randomized free evolution with Wilson intervals, Chebyshev consistency,
//! and monotonicity in the window length.

use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Table};
use vnlw_core::random::{mc_free_l6, tail_probability, SeedSpec, UnitPartition};

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid.build()?;
    let random = cfg.random.expect("validated");
    let law = random.law.build();
    let seed = SeedSpec::new(random.seed);
    let partition = UnitPartition::build(&grid)?;
    let data = cfg.data.build(&grid);

    let m = cfg.sweep.mc_samples.unwrap_or(200).max(200);
    let nodes = cfg.sweep.time_nodes.unwrap_or(24);
    let horizons = if cfg.sweep.horizons.is_empty() {
        vec![0.25, 0.5, 1.0]
    } else {
        cfg.sweep.horizons.clone()
    };
    let lambdas = if cfg.sweep.thresholds.is_empty() {
        vec![0.25, 0.5, 1.0]
    } else {
        cfg.sweep.thresholds.clone()
    };

    // lambda -> 0 limit: every draw exceeds the threshold.
    let t_mid = horizons[horizons.len() / 2];
    let all = tail_probability(&data, &partition, law, &seed, 1e-12, t_mid, m, nodes);
    report.verdict(
        "tiny_threshold_is_certain",
        all.fraction == 1.0,
        format!("fraction at lambda -> 0: {}", all.fraction),
    );

    // Chebyshev against the empirically measured sixth-power mass.
    let sixth = mc_free_l6(&data, &partition, law, &seed, &[t_mid], m, nodes)[0]
        .1
        .estimate;
    let mut table = Table::new("tails", &["horizon", "lambda", "fraction", "wilson_lo", "wilson_hi"]);
    let mut chebyshev_ok = true;
    for &lambda in &lambdas {
        let t = tail_probability(&data, &partition, law, &seed, lambda, t_mid, m, nodes);
        chebyshev_ok &= t.fraction <= sixth / lambda.powi(6) + 1e-12;
        table.push(vec![t_mid, lambda, t.fraction, t.wilson_ci.0, t.wilson_ci.1]);
    }
    report.verdict(
        "chebyshev_consistent",
        chebyshev_ok,
        format!("fractions bounded by measured sixth mass {sixth:.4e} / lambda^6"),
    );

    // Monotone in the window (common draws).
    let lambda_mid = lambdas[lambdas.len() / 2];
    let mut prev = -1.0f64;
    let mut monotone = true;
    let mut sorted = horizons.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &t in &sorted {
        let frac = tail_probability(&data, &partition, law, &seed, lambda_mid, t, m, nodes).fraction;
        monotone &= frac >= prev;
        table.push(vec![t, lambda_mid, frac, 0.0, 0.0]);
        prev = frac;
    }
    report.verdict(
        "tail_monotone_in_window",
        monotone,
        format!("exceedance fraction non-decreasing over windows {sorted:?}"),
    );
    report.tables.push(table);
    Ok(report)
}
