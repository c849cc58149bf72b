//! Oscillator experiment: the linear case against cosine, energy drift,
//! and the period by two independent routes.

use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Table};
use vnlw_core::oscillator::{period_first_return, period_quadrature, solve_oscillator};

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg);
    let mut table = Table::new("oscillator", &["p", "period_quadrature", "period_return", "energy_drift"]);

    // p = 1 reproduces cos to 1e-9.
    let lin = solve_oscillator::<f64>(1, 20.0, 1e-10)?;
    let mut worst = 0.0f64;
    for i in 0..400 {
        let t = i as f64 * 0.05;
        let (v, w) = lin.eval(t);
        worst = worst.max((v - t.cos()).abs()).max((w + t.sin()).abs());
    }
    report.verdict(
        "p1_matches_cosine",
        worst <= 1e-9,
        format!("max deviation from cos over [0,20]: {worst:.3e}"),
    );

    for p in [1u32, 3, 5] {
        let quad = period_quadrature::<f64>(p)?;
        let ret = period_first_return::<f64>(p, 1e-10)?;
        let sol = solve_oscillator::<f64>(p, 20.0, 1e-10)?;
        table.push(vec![p as f64, quad, ret, sol.energy_drift]);
        if p > 1 {
            report.verdict(
                &format!("p{p}_energy_drift"),
                sol.energy_drift <= 1e-10,
                format!("energy drift per period {:.3e}", sol.energy_drift),
            );
        }
        report.verdict(
            &format!("p{p}_period_routes_agree"),
            (quad - ret).abs() <= 1e-8 * quad,
            format!("quadrature {quad:.12} vs first return {ret:.12}"),
        );
    }

    let t3 = period_quadrature::<f64>(3)?;
    report.verdict(
        "p3_period_value",
        (t3 - 7.4163).abs() <= 1e-4,
        format!("p = 3 period {t3:.6} vs 7.4163"),
    );

    report.tables.push(table);
    Ok(report)
}
