//! Nonlinear solver checks: splitting structure and order, energy audits,
//! odd symmetry, the Picard fixed point against the time stepper, the
//! scaled solution family, and the inflation scan plumbing.

use num_complex::Complex;
use vnlw_core::field::Lp;
use vnlw_core::grid::GridSpec;
use vnlw_core::propagator::{
    evolve_homogeneous, free_evolution_series, PropagatorParams,
};
use vnlw_core::solver::*;
use vnlw_core::{CauchyData, SpectralField};

fn gaussian(grid: GridSpec<f64>, amp: f64, width: f64) -> SpectralField<f64> {
    SpectralField::from_physical_fn(grid, move |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        amp * (-r2 / (2.0 * width * width)).exp()
    })
}

fn max_mode_diff(a: &SpectralField<f64>, b: &SpectralField<f64>) -> f64 {
    a.modes()
        .iter()
        .zip(b.modes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn splitting_degenerates_to_exact_linear_flow() {
    let grid = GridSpec::<f64>::new(1, 64, 8.0).unwrap();
    let f = gaussian(grid, 0.8, 1.5);
    let g = f.scale(-0.2);
    let data = CauchyData::new(f, g, 0.0).unwrap();
    let dt = 0.05;

    // Two half linear flows equal one exact step.
    let (u1, ut1) = linear_flow(&data.displacement, &data.velocity, dt / 2.0, 1.0);
    let (u2, ut2) = linear_flow(&u1, &ut1, dt / 2.0, 1.0);
    let (ue, ute) = evolve_homogeneous(&data, dt, &PropagatorParams::model());
    let scale = ue.max_mode_mag().max(1.0);
    assert!(max_mode_diff(&u2, &ue) <= 1e-12 * scale);
    assert!(max_mode_diff(&ut2, &ute) <= 1e-12 * scale);

    // The kick on zero data is the identity, so a full step from zero
    // amplitude is exactly linear.
    let zero = SpectralField::zeros(grid);
    let cfg = SolverConfig::quintic(1.0, dt);
    let (su, sut) = step(&zero, &zero, &cfg);
    assert_eq!(su.max_mode_mag(), 0.0);
    assert_eq!(sut.max_mode_mag(), 0.0);
}

#[test]
fn strang_self_convergence_is_second_order() {
    let grid = GridSpec::<f64>::new(1, 64, 8.0).unwrap();
    let data = CauchyData::zero_velocity(gaussian(grid, 1.2, 1.5), 0.0);
    let horizon = 0.5;
    let run = |dt: f64| {
        let cfg = SolverConfig {
            output_every: (horizon / dt).round() as usize,
            ..SolverConfig::quintic(1.0, dt)
        };
        let out = solve_ivp(&data, horizon, &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::Completed);
        out.trajectory.states.last().unwrap().0.clone()
    };
    let reference = run(horizon / 512.0);
    let errs: Vec<f64> = [16.0, 32.0, 64.0]
        .iter()
        .map(|n| {
            run(horizon / n)
                .sub(&reference)
                .sobolev_norm(0.0, false)
        })
        .collect();
    let order1 = (errs[0] / errs[1]).log2();
    let order2 = (errs[1] / errs[2]).log2();
    assert!(
        order1 >= 1.9 && order2 >= 1.9,
        "observed orders {order1:.2}, {order2:.2} (errors {errs:?})"
    );
}

#[test]
fn small_amplitude_step_matches_linear_to_fifth_order() {
    let grid = GridSpec::<f64>::new(1, 64, std::f64::consts::PI).unwrap();
    let params = PropagatorParams::model();
    for &amp in &[1e-2f64, 1e-3] {
        let mut modes = vec![Complex::new(0.0, 0.0); grid.len()];
        modes[grid.storage_index(1)] = Complex::new(amp, 0.0);
        modes[grid.storage_index(-1)] = Complex::new(amp, 0.0);
        let data = CauchyData::zero_velocity(SpectralField::from_modes(grid, modes), 0.0);
        let cfg = SolverConfig::quintic(1.0, 0.1);
        let (u, _) = step(&data.displacement, &data.velocity, &cfg);
        let (ul, _) = evolve_homogeneous(&data, 0.1, &params);
        let defect = max_mode_diff(&u, &ul);
        // The quintic kick contributes O(dt amp^5 vol-factors).
        assert!(
            defect <= 50.0 * 0.1 * amp.powi(5) * grid.box_volume().powi(2),
            "defect {defect:.3e} too large for amp {amp}"
        );
    }
}

#[test]
fn zero_data_stays_zero_and_odd_symmetry_holds() {
    let grid = GridSpec::<f64>::new(2, 16, 6.0).unwrap();
    let cfg = SolverConfig::quintic(1.0, 0.05);
    let zero = CauchyData::zero_velocity(SpectralField::zeros(grid), 0.0);
    let out = solve_ivp(&zero, 0.5, &cfg).unwrap();
    assert_eq!(out.status, SolveStatus::Completed);
    for (u, ut) in &out.trajectory.states {
        assert_eq!(u.max_mode_mag(), 0.0);
        assert_eq!(ut.max_mode_mag(), 0.0);
    }

    // p odd: solve(-f, -g) = -solve(f, g) to rounding.
    let f = gaussian(grid, 0.9, 1.2);
    let g = f.scale(0.1);
    let plus = solve_ivp(&CauchyData::new(f.clone(), g.clone(), 0.0).unwrap(), 0.5, &cfg).unwrap();
    let minus = solve_ivp(
        &CauchyData::new(f.scale(-1.0), g.scale(-1.0), 0.0).unwrap(),
        0.5,
        &cfg,
    )
    .unwrap();
    let scale = plus.trajectory.states.last().unwrap().0.max_mode_mag();
    for ((up, utp), (um, utm)) in plus.trajectory.states.iter().zip(&minus.trajectory.states) {
        assert!(max_mode_diff(&up.scale(-1.0), um) <= 1e-12 * scale);
        assert!(max_mode_diff(&utp.scale(-1.0), utm) <= 1e-12 * scale);
    }
}

#[test]
fn full_energy_never_increases() {
    let grid = GridSpec::<f64>::new(2, 32, 8.0).unwrap();
    let data = CauchyData::zero_velocity(gaussian(grid, 0.6, 1.5), 0.0);
    let cfg = SolverConfig::quintic(1.0, 0.01);
    let out = solve_ivp(&data, 1.0, &cfg).unwrap();
    let e0 = full_energy(
        &out.trajectory.states[0].0,
        &out.trajectory.states[0].1,
        1.0,
        5,
    );
    let mut prev = e0;
    for (u, ut) in &out.trajectory.states[1..] {
        let e = full_energy(u, ut, 1.0, 5);
        assert!(
            e <= prev + 1e-6 * e0,
            "energy rose beyond the per-step budget: {prev} -> {e}"
        );
        prev = e;
    }
}

#[test]
fn energy_nu_k_structure() {
    let grid = GridSpec::<f64>::new(1, 64, std::f64::consts::PI).unwrap();
    let zero = SpectralField::zeros(grid);
    assert_eq!(energy_nu_k(&zero, &zero, 0.5, 2), 0.0);

    // Single real mode cos(x): hand formula with the box volume factor.
    let u = SpectralField::from_physical_fn(grid, |x| x[0].cos());
    let ut = SpectralField::from_physical_fn(grid, |x| 0.5 * x[0].cos());
    let nu = 0.7;
    let vol = grid.box_volume();
    // ||cos||_L2^2 = L (here vol/2), |xi| = 1 on the support.
    let expect = 0.5 * (0.25 * vol / 2.0 + nu * nu * 1.0 * vol / 2.0);
    let got = energy_nu_k(&u, &ut, nu, 0);
    assert!((got - expect).abs() <= 1e-16f64.sqrt() * expect);

    // Monotone in k.
    let mut prev = 0.0;
    for k in 0..4 {
        let e = energy_nu_k(&u, &ut, nu, k);
        assert!(e >= prev);
        prev = e;
    }
}

#[test]
fn picard_zero_free_evolution_converges_immediately() {
    let grid = GridSpec::<f64>::new(2, 16, 6.0).unwrap();
    let zero = CauchyData::zero_velocity(SpectralField::zeros(grid), 0.5);
    let params = PropagatorParams::model();
    let free = free_evolution_series(&zero, 1.0, 16, &params);
    let cfg = SolverConfig::quintic(1.0, 0.05);
    let out = picard_solve(&free, &cfg).unwrap();
    assert!(matches!(out.status, PicardStatus::Converged { iterations: 1 }));
    for f in &out.v.fields {
        assert_eq!(f.max_mode_mag(), 0.0);
    }
}

#[test]
fn picard_contracts_on_small_data() {
    let grid = GridSpec::<f64>::new(2, 32, 8.0).unwrap();
    let data = CauchyData::zero_velocity(gaussian(grid, 0.35, 1.2), 0.5);
    let params = PropagatorParams::model();
    let free = free_evolution_series(&data, 1.0, 64, &params);
    let mut cfg = SolverConfig::quintic(1.0, 1.0 / 64.0);
    cfg.picard_tol = 1e-300; // run the full iteration budget
    cfg.picard_max_iter = 6;
    let out = picard_solve(&free, &cfg).unwrap();
    assert!(matches!(out.status, PicardStatus::MaxIterationsExceeded));
    assert!(out.distances.len() >= 6);
    for w in out.distances.windows(2) {
        if w[0] > 1e-280 {
            assert!(
                w[1] / w[0] <= 0.5,
                "consecutive-distance ratio {} above 1/2",
                w[1] / w[0]
            );
        }
    }
}

#[test]
fn picard_reports_non_contraction_on_large_data() {
    let grid = GridSpec::<f64>::new(2, 16, 6.0).unwrap();
    let data = CauchyData::zero_velocity(gaussian(grid, 3.5, 1.2), 0.5);
    let params = PropagatorParams::model();
    let free = free_evolution_series(&data, 1.0, 32, &params);
    let cfg = SolverConfig::quintic(1.0, 1.0 / 32.0);
    let out = picard_solve(&free, &cfg).unwrap();
    assert!(
        matches!(out.status, PicardStatus::NonContraction { .. }),
        "expected divergence, got {:?}",
        out.status
    );
}

#[test]
fn picard_limit_agrees_with_time_stepper() {
    let grid = GridSpec::<f64>::new(2, 32, 8.0).unwrap();
    let data = CauchyData::zero_velocity(gaussian(grid, 0.35, 1.2), 0.5);
    let params = PropagatorParams::model();
    let nodes = 64usize;
    let free = free_evolution_series(&data, 1.0, nodes, &params);
    let mut cfg = SolverConfig::quintic(1.0, 1.0 / 512.0);
    cfg.picard_tol = 1e-12;
    let picard = picard_solve(&free, &cfg).unwrap();
    assert!(matches!(picard.status, PicardStatus::Converged { .. }));

    let mut ivp_cfg = cfg;
    ivp_cfg.output_every = 512 / nodes;
    let ivp = solve_ivp(&data, 1.0, &ivp_cfg).unwrap();
    assert_eq!(ivp.status, SolveStatus::Completed);

    // X_T distance between u_free + v and the stepped solution.
    let diffs: Vec<SpectralField<f64>> = (0..=nodes)
        .map(|i| {
            free.fields[i]
                .add(&picard.v.fields[i])
                .sub(&ivp.trajectory.states[i].0)
        })
        .collect();
    let dist = xt_norm(&diffs, free.dt).unwrap();
    assert!(dist <= 1e-4, "X_T distance {dist:.3e}");
}

#[test]
fn blowup_detector_is_a_typed_outcome() {
    let grid = GridSpec::<f64>::new(1, 64, 8.0).unwrap();
    let data = CauchyData::zero_velocity(gaussian(grid, 1.0, 1.5), 0.0);
    let mut cfg = SolverConfig::quintic(1.0, 0.05);
    cfg.norm_ceiling = 1e-3; // artificially low ceiling trips immediately
    let out = solve_ivp(&data, 0.5, &cfg).unwrap();
    match out.status {
        SolveStatus::Blowup { time, diagnostic } => {
            assert!(time > 0.0 && diagnostic > 1e-3);
        }
        SolveStatus::Completed => panic!("ceiling did not trip"),
    }
}

#[test]
fn family_identity_and_initial_data_closed_form() {
    let grid = GridSpec::<f64>::new(2, 32, 8.0).unwrap();
    let phi0 = gaussian(grid, 0.8, 1.3);
    let data = CauchyData::zero_velocity(phi0.clone(), 0.25);

    // lambda = nu = 1: the family member is phi itself.
    let cfg1 = SolverConfig::quintic(1.0, 0.02);
    let traj1 = solve_ivp(&data, 0.4, &cfg1).unwrap().trajectory;
    let (u, _) = family_state(&traj1, 1.0, 0.2, 5).unwrap();
    let idx = (0.2 / traj1.dt).round() as usize;
    assert_eq!(u.grid(), traj1.grid());
    assert!(max_mode_diff(&u, &traj1.states[idx].0) == 0.0);

    // t = 0 matches lambda^{-1/2} phi0(nu x / lambda) built directly.
    let nu = 0.5;
    let lambda = 0.3;
    let cfg = SolverConfig::quintic(nu, 0.02);
    let traj = solve_ivp(&data, 0.4, &cfg).unwrap().trajectory;
    let (u0, ut0) = family_state(&traj, lambda, 0.0, 5).unwrap();
    let scaled_grid = grid.with_half_width(8.0 * lambda / nu).unwrap();
    let direct = SpectralField::from_physical_fn(scaled_grid, |x| {
        let y0 = nu * x[0] / lambda;
        let y1 = nu * x[1] / lambda;
        lambda.powf(-0.5) * 0.8 * (-(y0 * y0 + y1 * y1) / (2.0 * 1.3 * 1.3)).exp()
    });
    let worst = u0
        .samples()
        .iter()
        .zip(direct.samples())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(
        worst <= 1e-8 * direct.samples().iter().map(|c| c.norm()).fold(0.0, f64::max),
        "family t=0 defect {worst:.3e}"
    );
    assert_eq!(ut0.max_mode_mag(), 0.0); // zero initial velocity scales to zero
}

#[test]
fn family_initial_norm_obeys_the_scaling_bound() {
    // ||u^(nu,lambda)(0)||_{H^s} <= C lambda^{s_cr - s} nu^{s - n/2} with a
    // stable constant across the sweep.
    let grid = GridSpec::<f64>::new(2, 32, 8.0).unwrap();
    let phi0 = gaussian(grid, 0.8, 1.3);
    let data = CauchyData::zero_velocity(phi0, 0.25);
    let s = 0.25f64;
    let s_cr = 0.5f64;
    let mut constants = Vec::new();
    for nu in [0.8, 0.4, 0.2] {
        let cfg = SolverConfig::quintic(nu, 0.02);
        let traj = solve_ivp(&data, 0.1, &cfg).unwrap().trajectory;
        for frac in [1.0, 0.5, 0.1] {
            let lambda = nu * frac;
            let norm0 = family_hs_norm(&traj, lambda, 0, s, 5);
            constants.push(norm0 / (lambda.powf(s_cr - s) * nu.powf(s - 1.0)));
        }
    }
    let cmax = constants.iter().copied().fold(0.0, f64::max);
    let cmin = constants.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(cmax.is_finite() && cmax > 0.0);
    assert!(cmax / cmin <= 3.0, "constant drifted: {cmin}..{cmax}");
}

#[test]
fn family_member_satisfies_the_model_equation() {
    // Residual oracle: apply (d_tt - Lap + sqrt(-Lap) d_t) + u^5 to the
    // scaled family member using centered differences in its own clock.
    let grid = GridSpec::<f64>::new(1, 128, 8.0).unwrap();
    let phi0 = gaussian(grid, 0.7, 1.4);
    let data = CauchyData::zero_velocity(phi0, 0.25);
    let nu = 0.5;
    let lambda = 0.25;
    let cfg = SolverConfig {
        output_every: 1,
        ..SolverConfig::quintic(nu, 0.002)
    };
    let traj = solve_ivp(&data, 0.2, &cfg).unwrap().trajectory;
    let idx = 50usize;
    let dt_fam = lambda * traj.dt;
    let t = idx as f64 * dt_fam;
    let (um, _) = family_state(&traj, lambda, t - dt_fam, 5).unwrap();
    let (uc, utc) = family_state(&traj, lambda, t, 5).unwrap();
    let (up, _) = family_state(&traj, lambda, t + dt_fam, 5).unwrap();

    let utt = up.add(&um).add_scaled(&uc, -2.0).scale(1.0 / (dt_fam * dt_fam));
    let lap = uc
        .apply_radial_multiplier(|r| Complex::new(-r * r, 0.0))
        .unwrap();
    let half_ut = utc
        .apply_radial_multiplier(|r| Complex::new(r, 0.0))
        .unwrap();
    let quintic = dealiased_power(&uc, 5, 3);
    let residual = utt.sub(&lap).add(&half_ut).add(&quintic);
    let res = residual.sobolev_norm(0.0, false);
    let scale = lap.sobolev_norm(0.0, false) + quintic.sobolev_norm(0.0, false);
    assert!(
        res <= 2e-2 * scale,
        "family residual {res:.3e} vs term scale {scale:.3e}"
    );
}

#[test]
fn inflation_scan_guards_and_critical_invariance() {
    let grid = GridSpec::<f64>::new(2, 32, 8.0).unwrap();
    let phi0 = SpectralField::from_physical_fn(grid, |x| {
        0.8 * (6.0 * x[0]).cos() * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp()
    });
    let cfg = SolverConfig::quintic(1.0, 0.02);

    // s outside (0, s_cr) is rejected with the domain.
    for bad_s in [0.0, 0.5, 0.7] {
        assert!(inflation_scan(&phi0, bad_s, &[0.1], &[0.5], 0.2, &cfg).is_err());
    }

    // At s = s_cr the initial critical norm is lambda-invariant at fixed nu.
    let nu = 0.5;
    let run_cfg = SolverConfig::quintic(nu, 0.02);
    let data = CauchyData::zero_velocity(phi0.clone(), 0.5);
    let traj = solve_ivp(&data, 0.1, &run_cfg).unwrap().trajectory;
    let norms: Vec<f64> = [1.0, 0.5, 0.25, 0.1]
        .iter()
        .map(|f| family_hs_norm(&traj, nu * f, 0, 0.5, 5))
        .collect();
    let base = norms[0];
    for n in &norms {
        assert!(
            ((n - base) / base).abs() <= 0.02,
            "critical norm drifted along the lambda sweep: {norms:?}"
        );
    }

    // Smoke: a tiny sweep produces rows with finite ratios >= 1.
    let scan = inflation_scan(&phi0, 0.25, &[0.05], &[0.5, 0.25], 0.5, &cfg).unwrap();
    assert_eq!(scan.rows.len(), 2);
    for row in &scan.rows {
        assert!(row.ratio.is_finite() && row.ratio >= 1.0 - 1e-12);
        assert!(row.lambda <= row.nu);
    }
}
