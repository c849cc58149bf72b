//! Time integration of the (perturbed) viscous nonlinear wave equation
//! `u_tt - nu^2 Lap u + nu sqrt(-Lap) u_t + u^p = 0` by Strang splitting
//! around the exact linear flow, the Picard fixed-point route through the
//! Duhamel integral, scaled solution families, and the closeness-to-limit
//! and norm-inflation experiments.
//!
//! The stiff linear part is diagonal in Fourier space and integrated
//! exactly, so the step has no stability limit; the nonlinear kick
//! `u_t -= dt u^p` is evaluated pseudo-spectrally with zero padding that
//! removes aliasing of the p-fold product entirely.

use crate::error::{Error, Result};
use crate::field::{critical_exponent, CauchyData, Lp, SpectralField};
use crate::fft;
use crate::fit::{fit_loglog, LogLogFit};
use crate::grid::{multi_indices_up_to, GridSpec};
use crate::oscillator::{phi0_field, phi0_velocity, OscillatorSolution};
use crate::propagator::{
    duhamel_all_nodes, mult_a, mult_b, PropagatorParams, TimeSeries, Trajectory,
};
use crate::scalar::{from_usize, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Odd nonlinearity degree, >= 3 (quintic by default).
    pub p: u32,
    /// Visco-dispersive parameter in (0, 1].
    pub nu: T,
    pub dt: T,
    /// Zero-padding factor for the p-fold product; >= (p+1)/2.
    pub dealias_factor: usize,
    pub picard_tol: T,
    pub picard_max_iter: usize,
    /// Sobolev index of the blowup diagnostic `||u||_{H^{k+1}} + ||u_t||_{H^k}`.
    pub diag_k: usize,
    pub norm_ceiling: T,
    /// Trajectory sampling stride, in steps.
    pub output_every: usize,
}

impl<T: Real> SolverConfig<T> {
    pub fn quintic(nu: T, dt: T) -> Self {
        Self {
            p: 5,
            nu,
            dt,
            dealias_factor: 3,
            picard_tol: T::lit(1e-10),
            picard_max_iter: 60,
            diag_k: 3,
            norm_ceiling: T::lit(1e6),
            output_every: 1,
        }
    }

    pub fn validate(&self, grid: &GridSpec<T>) -> Result<()> {
        if self.p < 3 || self.p % 2 == 0 {
            return Err(Error::InvalidSolverConfig(format!(
                "nonlinearity degree must be odd >= 3, got {}",
                self.p
            )));
        }
        if !(self.nu > T::zero() && self.nu <= T::one()) {
            return Err(Error::InvalidSolverConfig(format!(
                "nu must lie in (0, 1], got {}",
                self.nu.to_f64_lossy()
            )));
        }
        if !(self.dt > T::zero()) {
            return Err(Error::InvalidSolverConfig("dt must be positive".into()));
        }
        let needed = ((self.p + 1) / 2) as usize;
        if self.dealias_factor < needed {
            return Err(Error::InvalidSolverConfig(format!(
                "dealias factor {} below the exact-dealiasing floor {}",
                self.dealias_factor, needed
            )));
        }
        if self.output_every == 0 {
            return Err(Error::InvalidSolverConfig("output stride must be >= 1".into()));
        }
        // The linear flow is exact at any dt; this only bounds the splitting
        // error entering through the stiffest resolved mode.
        let stiffness = self.dt * self.nu * grid.max_freq_mag();
        if stiffness > T::lit(10.0) {
            return Err(Error::InvalidSolverConfig(format!(
                "dt nu |xi|_max = {} exceeds the splitting sanity bound 10",
                stiffness.to_f64_lossy()
            )));
        }
        Ok(())
    }
}

/// Exact linear flow applied to a state pair for a time `t`.
pub fn linear_flow<T: Real>(
    u: &SpectralField<T>,
    ut: &SpectralField<T>,
    t: T,
    nu: T,
) -> (SpectralField<T>, SpectralField<T>) {
    let grid = *u.grid();
    let n = grid.len();
    let um = u.modes();
    let vm = ut.modes();
    let mut new_u = Vec::with_capacity(n);
    let mut new_ut = Vec::with_capacity(n);
    for i in 0..n {
        let m = grid.freq_mag(i);
        let a = mult_a(m, t, nu);
        let b = mult_b(m, t, nu);
        let a_dt = -nu * nu * m * m * b;
        let b_dt = a - nu * m * b;
        new_u.push(um[i].scale(a) + vm[i].scale(b));
        new_ut.push(um[i].scale(a_dt) + vm[i].scale(b_dt));
    }
    (
        SpectralField::from_modes(grid, new_u),
        SpectralField::from_modes(grid, new_ut),
    )
}

/// `u^p` evaluated pseudo-spectrally on the zero-padded grid, truncated back
/// to the base band. Fields are treated as real-valued.
pub fn dealiased_power<T: Real>(u: &SpectralField<T>, p: u32, factor: usize) -> SpectralField<T> {
    let grid = u.grid();
    let (big, padded) = fft::pad_modes(grid, u.modes(), factor);
    let fine = fft::modes_to_physical(&big, &padded);
    let powered: Vec<num_complex::Complex<T>> = fine
        .iter()
        .map(|c| num_complex::Complex::new(c.re.powi(p as i32), T::zero()))
        .collect();
    let fine_modes = fft::physical_to_modes(&big, &powered);
    SpectralField::from_modes(*grid, fft::truncate_modes(&big, &fine_modes, grid))
}

/// One Strang step: half linear flow, full nonlinear kick, half linear flow.
pub fn step<T: Real>(
    u: &SpectralField<T>,
    ut: &SpectralField<T>,
    cfg: &SolverConfig<T>,
) -> (SpectralField<T>, SpectralField<T>) {
    let half = cfg.dt * T::lit(0.5);
    let (u1, ut1) = linear_flow(u, ut, half, cfg.nu);
    let kick = dealiased_power(&u1, cfg.p, cfg.dealias_factor);
    let ut2 = ut1.add_scaled(&kick, -cfg.dt);
    linear_flow(&u1, &ut2, half, cfg.nu)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus<T> {
    Completed,
    /// The diagnostic norm crossed the ceiling or stopped being finite;
    /// a typed outcome, not an error.
    Blowup { time: T, diagnostic: T },
}

#[derive(Debug, Clone)]
pub struct SolveOutcome<T: Real> {
    pub trajectory: Trajectory<T>,
    pub status: SolveStatus<T>,
}

fn diagnostic_norm<T: Real>(u: &SpectralField<T>, ut: &SpectralField<T>, k: usize) -> T {
    u.sobolev_norm(from_usize::<T>(k + 1), false) + ut.sobolev_norm(from_usize::<T>(k), false)
}

/// March the Cauchy problem to time `horizon` (an integer number of steps),
/// sampling every `output_every` steps.
pub fn solve_ivp<T: Real>(
    data: &CauchyData<T>,
    horizon: T,
    cfg: &SolverConfig<T>,
) -> Result<SolveOutcome<T>> {
    cfg.validate(data.grid())?;
    let steps_f = horizon / cfg.dt;
    let steps = steps_f.round().to_f64_lossy() as usize;
    if steps == 0 || (steps_f - steps_f.round()).abs() > T::lit(1e-9) {
        return Err(Error::NonIntegerStepCount {
            t: horizon.to_f64_lossy(),
            dt: cfg.dt.to_f64_lossy(),
        });
    }
    if steps % cfg.output_every != 0 {
        return Err(Error::InvalidSolverConfig(format!(
            "output stride {} does not divide the step count {}",
            cfg.output_every, steps
        )));
    }
    let params = PropagatorParams::new(cfg.nu);
    let mut u = data.displacement.clone();
    let mut ut = data.velocity.clone();
    let mut states = vec![(u.clone(), ut.clone())];
    for i in 1..=steps {
        let (nu_, nut) = step(&u, &ut, cfg);
        u = nu_;
        ut = nut;
        let diag = diagnostic_norm(&u, &ut, cfg.diag_k);
        if !diag.is_finite() || diag > cfg.norm_ceiling {
            let dt_out = cfg.dt * from_usize::<T>(cfg.output_every);
            return Ok(SolveOutcome {
                trajectory: Trajectory { params, dt: dt_out, states },
                status: SolveStatus::Blowup {
                    time: from_usize::<T>(i) * cfg.dt,
                    diagnostic: diag,
                },
            });
        }
        if i % cfg.output_every == 0 {
            states.push((u.clone(), ut.clone()));
        }
    }
    let dt_out = cfg.dt * from_usize::<T>(cfg.output_every);
    Ok(SolveOutcome {
        trajectory: Trajectory { params, dt: dt_out, states },
        status: SolveStatus::Completed,
    })
}

/// `nu`-wave energy of order `k`: the quadratic energy summed over all
/// spatial derivatives `|alpha| <= k`, computed spectrally.
pub fn energy_nu_k<T: Real>(
    u: &SpectralField<T>,
    ut: &SpectralField<T>,
    nu: T,
    k: usize,
) -> T {
    let grid = u.grid();
    let alphas = multi_indices_up_to(grid.dim(), k);
    let mut sum = T::zero();
    for i in 0..grid.len() {
        let xi = grid.freq(i);
        let mut weight = T::zero();
        for alpha in &alphas {
            let mut w = T::one();
            for a in 0..grid.dim() {
                w *= xi[a].powi(2 * alpha[a] as i32);
            }
            weight += w;
        }
        let kinetic = ut.modes()[i].norm_sqr();
        let elastic = nu * nu * grid.freq_mag_sq(i) * u.modes()[i].norm_sqr();
        sum += weight * (kinetic + elastic);
    }
    let two_pi = T::lit(2.0) * T::PI();
    let measure = grid.freq_cell_volume() / two_pi.powi(grid.dim() as i32);
    T::lit(0.5) * measure * sum
}

/// Potential term `int u^{p+1}/(p+1) dx` of the full energy.
pub fn potential_energy<T: Real>(u: &SpectralField<T>, p: u32) -> T {
    let mut acc = T::zero();
    for c in u.samples() {
        acc += c.re.powi(p as i32 + 1);
    }
    acc * u.grid().cell_volume() / from_usize::<T>(p as usize + 1)
}

/// Full discrete energy `E_nu + int u^{p+1}/(p+1)`, non-increasing along
/// homogeneous runs.
pub fn full_energy<T: Real>(
    u: &SpectralField<T>,
    ut: &SpectralField<T>,
    nu: T,
    p: u32,
) -> T {
    crate::propagator::energy_nu(u, ut, nu) + potential_energy(u, p)
}

/// The fixed-point solution space norm `||v||_{X_T}`: the `C^0 H^{1/2}`
/// max over stored samples plus the `L^6_t L^6_x` space-time norm.
pub fn xt_norm<T: Real>(fields: &[SpectralField<T>], dt: T) -> Result<T> {
    let refs: Vec<&SpectralField<T>> = fields.iter().collect();
    let c0 = refs
        .iter()
        .map(|f| f.sobolev_norm(T::lit(0.5), false))
        .fold(T::zero(), T::max);
    let l6 = crate::propagator::spacetime_norm(&refs, dt, Lp::finite(6.0), Lp::finite(6.0))?;
    Ok(c0 + l6)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PicardStatus {
    Converged { iterations: usize },
    /// Distances grew for three consecutive iterations.
    NonContraction { at_iteration: usize },
    MaxIterationsExceeded,
}

#[derive(Debug, Clone)]
pub struct PicardOutcome<T: Real> {
    /// The last iterate `v_m` (the correction; the solution is `u_free + v`).
    pub v: TimeSeries<T>,
    /// `||v_{m+1} - v_m||_{X_T}` per iteration.
    pub distances: Vec<T>,
    pub status: PicardStatus,
}

/// Picard iteration for the fixed point `v = -Duhamel((u_free + v)^p)` on
/// the node grid of `u_free`, measured in the `X_T` norm.
pub fn picard_solve<T: Real>(u_free: &TimeSeries<T>, cfg: &SolverConfig<T>) -> Result<PicardOutcome<T>> {
    cfg.validate(u_free.grid())?;
    assert!(
        u_free.final_time() <= T::one() + T::lit(1e-9),
        "the fixed-point window is 0 < T <= 1"
    );
    let params = PropagatorParams::new(cfg.nu);
    let grid = *u_free.grid();
    let nodes = u_free.fields.len();
    let mut v = TimeSeries::new(
        u_free.dt,
        vec![SpectralField::zeros(grid); nodes],
    );
    let mut distances = Vec::new();
    let mut growth_streak = 0usize;
    for iter in 0..cfg.picard_max_iter {
        let source = TimeSeries::new(
            u_free.dt,
            (0..nodes)
                .map(|i| {
                    let total = u_free.fields[i].add(&v.fields[i]);
                    dealiased_power(&total, cfg.p, cfg.dealias_factor)
                })
                .collect(),
        );
        let next = duhamel_all_nodes(&source, &params);
        let next = TimeSeries::new(
            next.dt,
            next.fields.into_iter().map(|f| f.scale(-T::one())).collect(),
        );
        let diffs: Vec<SpectralField<T>> = (0..nodes)
            .map(|i| next.fields[i].sub(&v.fields[i]))
            .collect();
        let dist = xt_norm(&diffs, u_free.dt)?;
        let prev = distances.last().copied();
        distances.push(dist);
        v = next;
        if dist <= cfg.picard_tol {
            return Ok(PicardOutcome {
                v,
                distances,
                status: PicardStatus::Converged { iterations: iter + 1 },
            });
        }
        if let Some(prev) = prev {
            if dist >= prev {
                growth_streak += 1;
                if growth_streak >= 3 {
                    return Ok(PicardOutcome {
                        v,
                        distances,
                        status: PicardStatus::NonContraction { at_iteration: iter + 1 },
                    });
                }
            } else {
                growth_streak = 0;
            }
        }
        if !dist.is_finite() {
            return Ok(PicardOutcome {
                v,
                distances,
                status: PicardStatus::NonContraction { at_iteration: iter + 1 },
            });
        }
    }
    Ok(PicardOutcome { v, distances, status: PicardStatus::MaxIterationsExceeded })
}

/// Report of the closeness experiment against the oscillator limit.
#[derive(Debug, Clone)]
pub struct ClosenessOutcome<T: Real> {
    /// `sup_t (||u - phi0_limit||_{H^k} + ||u_t - d/dt phi0_limit||_{H^k})`.
    pub sup_error: T,
    /// Per-sample error table `(t, error)`.
    pub table: Vec<(T, T)>,
    pub status: SolveStatus<T>,
}

/// Integrate the `nu`-perturbed problem from data `(phi0, 0)` and measure
/// the distance to the closed-form limit solution in `H^k`.
pub fn closeness_error<T: Real>(
    phi0: &SpectralField<T>,
    k: usize,
    horizon: T,
    cfg: &SolverConfig<T>,
    osc: &OscillatorSolution<T>,
) -> Result<ClosenessOutcome<T>> {
    let data = CauchyData::zero_velocity(phi0.clone(), from_usize::<T>(k));
    let outcome = solve_ivp(&data, horizon, cfg)?;
    let kf = from_usize::<T>(k);
    let mut table = Vec::new();
    let mut sup = T::zero();
    for (i, (u, ut)) in outcome.trajectory.states.iter().enumerate() {
        let t = from_usize::<T>(i) * outcome.trajectory.dt;
        let limit_u = phi0_field(phi0, t, osc);
        let limit_ut = phi0_velocity(phi0, t, osc);
        let err = u.sub(&limit_u).sobolev_norm(kf, false)
            + ut.sub(&limit_ut).sobolev_norm(kf, false);
        sup = sup.max(err);
        table.push((t, err));
    }
    Ok(ClosenessOutcome { sup_error: sup, table, status: outcome.status })
}

/// The two-symmetry solution family
/// `u^(nu,lambda)(t, x) = lambda^{-2/(p-1)} phi^(nu)(t/lambda, nu x/lambda)`
/// realized exactly by re-housing the trajectory state on the rescaled box
/// `[-L lambda/nu, L lambda/nu)^n` (mode-for-mode, no resampling error).
pub fn family_state<T: Real>(
    traj: &Trajectory<T>,
    lambda: T,
    t: T,
    p: u32,
) -> Result<(SpectralField<T>, SpectralField<T>)> {
    let nu = traj.params.nu;
    assert!(lambda > T::zero() && lambda <= nu, "family requires 0 < lambda <= nu");
    let tau = t / lambda;
    let idx_f = tau / traj.dt;
    let idx = idx_f.round().to_f64_lossy() as usize;
    if idx >= traj.states.len() || (idx_f - idx_f.round()).abs() > T::lit(1e-6) {
        return Err(Error::TimeOutOfRange(t.to_f64_lossy()));
    }
    let grid = traj.grid();
    let scaled_grid = grid.with_half_width(grid.half_width() * lambda / nu)?;
    let n = grid.dim() as i32;
    let alpha = T::lit(2.0 / (p as f64 - 1.0));
    let amp_u = lambda.powf(-alpha) * (lambda / nu).powi(n);
    // One extra 1/lambda from the time derivative of the inner clock.
    let amp_ut = amp_u / lambda;
    let (u, ut) = &traj.states[idx];
    let scaled_u = SpectralField::from_modes(
        scaled_grid,
        u.modes().iter().map(|c| c.scale(amp_u)).collect(),
    );
    let scaled_ut = SpectralField::from_modes(
        scaled_grid,
        ut.modes().iter().map(|c| c.scale(amp_ut)).collect(),
    );
    Ok((scaled_u, scaled_ut))
}

/// `H^s` norm of the family member at trajectory index `idx`, computed
/// directly from the base-grid modes (equivalent to building the rescaled
/// field and measuring it, without materializing it).
pub fn family_hs_norm<T: Real>(
    traj: &Trajectory<T>,
    lambda: T,
    idx: usize,
    s: T,
    p: u32,
) -> T {
    let nu = traj.params.nu;
    let grid = traj.grid();
    let mu = nu / lambda; // frequency magnification
    let alpha = T::lit(2.0 / (p as f64 - 1.0));
    let n = grid.dim() as i32;
    let amp = lambda.powf(-alpha) * (lambda / nu).powi(n);
    let modes = traj.states[idx].0.modes();
    let mut sum = T::zero();
    for i in 0..grid.len() {
        let w = (T::one() + mu * mu * grid.freq_mag_sq(i)).powf(s);
        sum += w * modes[i].norm_sqr();
    }
    let two_pi = T::lit(2.0) * T::PI();
    let measure = (mu * grid.delta_xi()).powi(n) / two_pi.powi(n);
    amp * (measure * sum).sqrt()
}

#[derive(Debug, Clone)]
pub struct InflationRow<T> {
    pub nu: T,
    pub lambda: T,
    pub eps_target: T,
    /// `||u(0)||_{H^s}` of the scaled family member.
    pub norm0: T,
    pub norm_max: T,
    /// Time (in the family clock) at which the max occurs.
    pub t_max: T,
    pub ratio: T,
    /// Set when the curve would demand lambda > nu and it was clamped.
    pub lambda_clamped: bool,
}

#[derive(Debug, Clone)]
pub struct InflationScan<T: Real> {
    pub s: T,
    pub s_critical: T,
    pub rows: Vec<InflationRow<T>>,
    /// Late-window growth fit of `||phi^(nu)(t)||_{H^s}` per `nu`.
    pub growth_fits: Vec<(T, LogLogFit<T>)>,
}

/// Sweep `(nu, lambda)` along the fixed-initial-norm curve
/// `eps = lambda^{s_cr - s} nu^{s - n/2} ||phi0||_{H^s_hom}` and record the
/// inflation ratios of the scaled family. `tau_max` is the horizon of the
/// underlying `phi^(nu)` runs (in the slow clock).
pub fn inflation_scan<T: Real>(
    phi0: &SpectralField<T>,
    s: T,
    eps_targets: &[T],
    nus: &[T],
    tau_max: T,
    cfg: &SolverConfig<T>,
) -> Result<InflationScan<T>> {
    let dim = phi0.grid().dim();
    let s_cr = critical_exponent::<T>(dim, cfg.p);
    if !(s > T::zero() && s < s_cr) {
        return Err(Error::InvalidSobolevIndex {
            s: s.to_f64_lossy(),
            lo: 0.0,
            hi: s_cr.to_f64_lossy(),
        });
    }
    let phi0_hs = phi0.sobolev_norm(s, true);
    if phi0_hs == T::zero() {
        return Err(Error::ZeroData);
    }
    let mut rows = Vec::new();
    let mut growth_fits = Vec::new();
    for &nu in nus {
        let mut run_cfg = *cfg;
        run_cfg.nu = nu;
        let data = CauchyData::zero_velocity(phi0.clone(), s);
        let outcome = solve_ivp(&data, tau_max, &run_cfg)?;
        let traj = &outcome.trajectory;

        // Late-window growth of the unscaled run (second half of the window).
        let times = traj.times();
        let half = times.len() / 2;
        let window: Vec<T> = times[half..].to_vec();
        let norms: Vec<T> = traj.states[half..]
            .iter()
            .map(|(u, _)| u.sobolev_norm(s, false))
            .collect();
        if window.len() >= 3 {
            if let Ok(fitted) = fit_loglog(&window, &norms) {
                growth_fits.push((nu, fitted));
            }
        }

        for &eps in eps_targets {
            // Solve the curve for lambda.
            let half_n = from_usize::<T>(dim) * T::lit(0.5);
            let lambda_raw = (eps / (nu.powf(s - half_n) * phi0_hs))
                .powf((s_cr - s).recip());
            let (lambda, clamped) = if lambda_raw > nu {
                (nu, true)
            } else {
                (lambda_raw, false)
            };
            let mut norm_max = T::zero();
            let mut arg_max = T::zero();
            let norm0 = family_hs_norm(traj, lambda, 0, s, cfg.p);
            for idx in 0..traj.states.len() {
                let v = family_hs_norm(traj, lambda, idx, s, cfg.p);
                if v > norm_max {
                    norm_max = v;
                    arg_max = from_usize::<T>(idx) * traj.dt * lambda;
                }
            }
            rows.push(InflationRow {
                nu,
                lambda,
                eps_target: eps,
                norm0,
                norm_max,
                t_max: arg_max,
                ratio: norm_max / norm0,
                lambda_clamped: clamped,
            });
        }
    }
    Ok(InflationScan { s, s_critical: s_cr, rows, growth_fits })
}
