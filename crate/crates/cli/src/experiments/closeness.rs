//! Closeness-to-limit experiment: solve the `nu`-perturbed problem from a
//! smooth bump and measure the sup-`H^k` distance to the closed-form limit
//! solution across a ladder of viscosities; the fitted slope of error
//! against `nu` is the verdict.

use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Table};
use vnlw_core::fit::fit_loglog;
use vnlw_core::oscillator::solve_oscillator;
use vnlw_core::solver::{closeness_error, SolveStatus};

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid.build()?;
    let data = cfg.data.build(&grid);
    let k = cfg.sweep.sobolev_k.unwrap_or(3);
    let horizon = cfg.sweep.horizon.unwrap_or(2.0);
    let nus = if cfg.sweep.nus.is_empty() {
        vec![0.1, 0.05, 0.025, 0.0125]
    } else {
        cfg.sweep.nus.clone()
    };
    let osc = solve_oscillator::<f64>(cfg.solver.p, horizon, 1e-10)?;

    let mut table = Table::new("closeness", &["nu", "sup_error"]);
    let mut errors = Vec::new();
    for &nu in &nus {
        let mut run_cfg = cfg.solver.build();
        run_cfg.nu = nu;
        let out = closeness_error(&data.displacement, k, horizon, &run_cfg, &osc)?;
        if let SolveStatus::Blowup { time, diagnostic } = out.status {
            report.ceiling = Some(format!(
                "diagnostic norm {diagnostic:.3e} crossed the ceiling at t = {time:.3} (nu = {nu})"
            ));
        }
        table.push(vec![nu, out.sup_error]);
        errors.push(out.sup_error);
    }
    report.tables.push(table);

    let fitted = fit_loglog(&nus, &errors)?;
    report.fit("closeness_slope", &fitted);
    report.verdict(
        "closeness_slope_in_bracket",
        (0.8..=1.1).contains(&fitted.slope),
        format!(
            "sup-H^{k} error ~ nu^{{{:.3}}} over nu = {:?} (need slope in [0.8, 1.1])",
            fitted.slope, nus
        ),
    );
    Ok(report)
}
