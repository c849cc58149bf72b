//! Picard experiment: contraction of the fixed-point map on small data,
//! agreement of its limit with the time stepper, and the bisection for the
//! contraction threshold of the free-evolution size.

use crate::config::ExperimentConfig;
use crate::report::{ExperimentReport, Table};
use vnlw_core::field::Lp;
use vnlw_core::propagator::{free_evolution_series, PropagatorParams};
use vnlw_core::solver::{picard_solve, solve_ivp, xt_norm, PicardStatus, SolveStatus};
use vnlw_core::{CauchyData, SpectralField};

fn scaled(data: &CauchyData<f64>, a: f64) -> CauchyData<f64> {
    CauchyData::new(
        data.displacement.scale(a),
        data.velocity.scale(a),
        data.sobolev_index,
    )
    .expect("same grid")
}

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    let mut report = ExperimentReport::new(cfg);
    let grid = cfg.grid.build()?;
    let data = cfg.data.build(&grid);
    let params = PropagatorParams::model();
    let horizon = cfg.sweep.horizon.unwrap_or(1.0).min(1.0);
    let nodes = cfg.sweep.time_nodes.unwrap_or(64);
    let solver = cfg.solver.build();

    // Contraction record on the configured (small) data.
    let free = free_evolution_series(&data, horizon, nodes, &params);
    let free_l6 = free.spacetime_norm(Lp::finite(6.0), Lp::finite(6.0))?;
    let mut probe_cfg = solver;
    probe_cfg.picard_tol = 1e-300; // exhaust the budget to expose the ratios
    probe_cfg.picard_max_iter = 6;
    let probe = picard_solve(&free, &probe_cfg)?;
    let mut ratios = Vec::new();
    for w in probe.distances.windows(2) {
        if w[0] > 1e-280 {
            ratios.push(w[1] / w[0]);
        }
    }
    let mut dist_table = Table::new("picard_distances", &["iteration", "distance"]);
    for (i, d) in probe.distances.iter().enumerate() {
        dist_table.push(vec![(i + 1) as f64, *d]);
    }
    report.tables.push(dist_table);
    report.verdict(
        "contraction_ratio_below_half",
        probe.distances.len() >= 5 && ratios.iter().all(|r| *r <= 0.5),
        format!(
            "free size {free_l6:.4}; consecutive-distance ratios {ratios:?} over {} iterations",
            probe.distances.len()
        ),
    );

    // The limit agrees with the stepper in X_T.
    let mut tight = solver;
    tight.picard_tol = 1e-12;
    tight.picard_max_iter = 60;
    let picard = picard_solve(&free, &tight)?;
    let converged = matches!(picard.status, PicardStatus::Converged { .. });
    let steps_per_node = ((horizon / solver.dt) / nodes as f64).round() as usize;
    let mut ivp_cfg = solver;
    ivp_cfg.output_every = steps_per_node.max(1);
    let ivp = solve_ivp(&data, horizon, &ivp_cfg)?;
    let agree = if converged && ivp.status == SolveStatus::Completed {
        let diffs: Vec<SpectralField<f64>> = (0..=nodes)
            .map(|i| {
                free.fields[i]
                    .add(&picard.v.fields[i])
                    .sub(&ivp.trajectory.states[i].0)
            })
            .collect();
        xt_norm(&diffs, free.dt)?
    } else {
        f64::NAN
    };
    report.verdict(
        "fixed_point_matches_stepper",
        converged && agree <= 1e-4,
        format!("X_T distance between the Picard limit and the stepper: {agree:.3e}"),
    );

    // Bisection for the contraction threshold in data amplitude; reported
    // as the free-evolution L6 size at the boundary.
    let contracts = |a: f64| -> anyhow::Result<(bool, f64)> {
        let d = scaled(&data, a);
        let fr = free_evolution_series(&d, horizon, nodes, &params);
        let size = fr.spacetime_norm(Lp::finite(6.0), Lp::finite(6.0))?;
        let out = picard_solve(&fr, &tight)?;
        Ok((matches!(out.status, PicardStatus::Converged { .. }), size))
    };
    let mut lo = 1.0f64; // the configured data is expected to contract
    let mut hi = 16.0f64;
    let (ok_lo, _) = contracts(lo)?;
    let mut threshold_size = f64::NAN;
    if ok_lo {
        // Grow hi until failure (or accept everything at this scale).
        let mut hi_fails = false;
        for _ in 0..6 {
            let (ok, _) = contracts(hi)?;
            if ok {
                hi *= 2.0;
            } else {
                hi_fails = true;
                break;
            }
        }
        if hi_fails {
            for _ in 0..12 {
                let mid = 0.5 * (lo + hi);
                let (ok, size) = contracts(mid)?;
                if ok {
                    lo = mid;
                    threshold_size = size;
                } else {
                    hi = mid;
                }
            }
        }
    }
    let mut bisect = Table::new("picard_threshold", &["amplitude_low", "amplitude_high", "free_l6_at_boundary"]);
    bisect.push(vec![lo, hi, threshold_size]);
    report.tables.push(bisect);
    report.verdict(
        "small_data_below_threshold",
        ok_lo,
        format!(
            "configured data contracts; contraction boundary bracketed in amplitude [{lo:.3}, {hi:.3}], free L6 size {threshold_size:.4}"
        ),
    );
    Ok(report)
}
