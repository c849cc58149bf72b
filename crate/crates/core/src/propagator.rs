//! Exact per-mode solution operators for the linear viscous wave equation
//!
//! ```text
//!   u_tt - nu^2 Lap u + nu sqrt(-Lap) u_t = 0
//! ```
//!
//! whose Fourier symbol is the damped oscillator
//! `w'' + nu |xi| w' + nu^2 |xi|^2 w = 0` with roots
//! `nu |xi| (-1 +- i sqrt(3)) / 2`. The displacement and velocity
//! multipliers A and B below solve it exactly; their time derivatives close
//! under the algebra `A' = -nu^2 |xi|^2 B`, `B' = A - nu |xi| B`, so
//! velocities are computed from closed forms, never finite differences.

use crate::error::{Error, Result};
use crate::field::{CauchyData, Lp, SpectralField};
use crate::grid::GridSpec;
use crate::quad::simpson_weights;
use crate::scalar::{from_usize, Real};
use num_complex::Complex;

/// Visco-dispersive parameter; `nu = 1` is the model equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorParams<T> {
    pub nu: T,
}

impl<T: Real> PropagatorParams<T> {
    pub fn new(nu: T) -> Self {
        assert!(nu > T::zero(), "viscosity parameter must be positive");
        Self { nu }
    }

    pub fn model() -> Self {
        Self { nu: T::one() }
    }
}

/// `sin(z)/z` with a 3-term Taylor branch below `|z| = 1e-4`; the seam is
/// below double-precision relative error 1e-14.
pub fn sinc<T: Real>(z: T) -> T {
    if z.abs() < T::lit(1e-4) {
        let z2 = z * z;
        T::one() - z2 / T::lit(6.0) + z2 * z2 / T::lit(120.0)
    } else {
        z.sin() / z
    }
}

/// Displacement multiplier: coefficient of `f_hat` in the evolved mode,
/// `e^{-nu|xi|t/2} (cos(sqrt3 nu|xi|t/2) + sin(sqrt3 nu|xi|t/2)/sqrt3)`.
pub fn mult_a<T: Real>(xi_mag: T, t: T, nu: T) -> T {
    let a = nu * xi_mag * T::lit(0.5);
    let b = T::lit(3.0).sqrt() * a;
    (-a * t).exp() * ((b * t).cos() + (b * t).sin() / T::lit(3.0).sqrt())
}

/// Velocity multiplier: coefficient of `g_hat`,
/// `e^{-nu|xi|t/2} sin(sqrt3 nu|xi|t/2) / (sqrt3 nu|xi| / 2)`; equals `t`
/// at `xi = 0`.
pub fn mult_b<T: Real>(xi_mag: T, t: T, nu: T) -> T {
    let a = nu * xi_mag * T::lit(0.5);
    let b = T::lit(3.0).sqrt() * a;
    t * (-a * t).exp() * sinc(b * t)
}

/// `d/dt` of `mult_a`: `-nu^2 |xi|^2 mult_b`.
pub fn mult_a_dt<T: Real>(xi_mag: T, t: T, nu: T) -> T {
    -nu * nu * xi_mag * xi_mag * mult_b(xi_mag, t, nu)
}

/// `d/dt` of `mult_b`: `mult_a - nu |xi| mult_b`.
pub fn mult_b_dt<T: Real>(xi_mag: T, t: T, nu: T) -> T {
    mult_a(xi_mag, t, nu) - nu * xi_mag * mult_b(xi_mag, t, nu)
}

/// Per-mode fundamental matrix `[[A, B], [A', B']]` at time `t`.
pub fn fundamental_matrix<T: Real>(xi_mag: T, t: T, nu: T) -> [[T; 2]; 2] {
    let a = mult_a(xi_mag, t, nu);
    let b = mult_b(xi_mag, t, nu);
    [[a, b], [-nu * nu * xi_mag * xi_mag * b, a - nu * xi_mag * b]]
}

/// Exact homogeneous evolution: `(u(t), du/dt(t))` from Cauchy data.
pub fn evolve_homogeneous<T: Real>(
    data: &CauchyData<T>,
    t: T,
    params: &PropagatorParams<T>,
) -> (SpectralField<T>, SpectralField<T>) {
    assert!(t >= T::zero(), "homogeneous evolution runs forward in time");
    let grid = *data.grid();
    let nu = params.nu;
    let n = grid.len();
    let mut u = Vec::with_capacity(n);
    let mut ut = Vec::with_capacity(n);
    let fm = data.displacement.modes();
    let gm = data.velocity.modes();
    for i in 0..n {
        let m = grid.freq_mag(i);
        let a = mult_a(m, t, nu);
        let b = mult_b(m, t, nu);
        let a_dt = -nu * nu * m * m * b;
        let b_dt = a - nu * m * b;
        u.push(fm[i].scale(a) + gm[i].scale(b));
        ut.push(fm[i].scale(a_dt) + gm[i].scale(b_dt));
    }
    (
        SpectralField::from_modes(grid, u),
        SpectralField::from_modes(grid, ut),
    )
}

/// Time-indexed sequence of states of one linear or nonlinear evolution,
/// on a uniform time grid starting at zero.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real> {
    pub params: PropagatorParams<T>,
    pub dt: T,
    pub states: Vec<(SpectralField<T>, SpectralField<T>)>,
}

impl<T: Real> Trajectory<T> {
    pub fn grid(&self) -> &GridSpec<T> {
        self.states[0].0.grid()
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.states.len())
            .map(|i| from_usize::<T>(i) * self.dt)
            .collect()
    }

    pub fn final_time(&self) -> T {
        from_usize::<T>(self.states.len() - 1) * self.dt
    }

    pub fn displacements(&self) -> Vec<&SpectralField<T>> {
        self.states.iter().map(|(u, _)| u).collect()
    }

    /// `L^q_t L^r_x` norm of the displacement over the stored window.
    pub fn spacetime_norm(&self, q: Lp<T>, r: Lp<T>) -> Result<T> {
        spacetime_norm(&self.displacements(), self.dt, q, r)
    }
}

/// Uniformly sampled single-field history (e.g. a source term).
#[derive(Debug, Clone)]
pub struct TimeSeries<T: Real> {
    pub dt: T,
    pub fields: Vec<SpectralField<T>>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(dt: T, fields: Vec<SpectralField<T>>) -> Self {
        assert!(dt > T::zero() && fields.len() >= 2, "need a uniform grid of samples");
        Self { dt, fields }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        self.fields[0].grid()
    }

    pub fn final_time(&self) -> T {
        from_usize::<T>(self.fields.len() - 1) * self.dt
    }

    pub fn node_of(&self, t: T) -> Result<usize> {
        let idx = (t / self.dt).round();
        let i = idx.to_f64_lossy() as usize;
        if i >= self.fields.len() || (t - idx * self.dt).abs() > self.dt * T::lit(1e-9) {
            return Err(Error::TimeOutOfRange(t.to_f64_lossy()));
        }
        Ok(i)
    }

    pub fn spacetime_norm(&self, q: Lp<T>, r: Lp<T>) -> Result<T> {
        let refs: Vec<&SpectralField<T>> = self.fields.iter().collect();
        spacetime_norm(&refs, self.dt, q, r)
    }
}

/// `L^q_t L^r_x` norm of uniformly spaced field samples: composite Simpson
/// in time of the spatial norm to the q-th power: `L^inf_t` is the max.
pub fn spacetime_norm<T: Real>(
    fields: &[&SpectralField<T>],
    dt: T,
    q: Lp<T>,
    r: Lp<T>,
) -> Result<T> {
    if fields.len() < 2 {
        return Err(Error::EmptyTrajectory);
    }
    let spatial: Vec<T> = fields
        .iter()
        .map(|f| f.lebesgue_norm(r))
        .collect::<Result<_>>()?;
    match q {
        Lp::Infinity => Ok(spatial.into_iter().fold(T::zero(), T::max)),
        Lp::Finite(q) => {
            if q < T::one() {
                return Err(Error::InvalidLebesgueExponent(q.to_f64_lossy()));
            }
            let w = simpson_weights::<T>(spatial.len() - 1);
            let mut acc = T::zero();
            for (v, wi) in spatial.iter().zip(&w) {
                acc += v.powf(q) * *wi;
            }
            Ok((acc * dt).powf(q.recip()))
        }
    }
}

/// Sample the homogeneous evolution on `m + 1` uniform nodes over `[0, T]`.
pub fn sample_homogeneous<T: Real>(
    data: &CauchyData<T>,
    horizon: T,
    m: usize,
    params: &PropagatorParams<T>,
) -> Trajectory<T> {
    assert!(m >= 1);
    let dt = horizon / from_usize::<T>(m);
    let states = (0..=m)
        .map(|i| evolve_homogeneous(data, from_usize::<T>(i) * dt, params))
        .collect();
    Trajectory { params: *params, dt, states }
}

/// Free-evolution displacement history on `m + 1` nodes (velocities dropped).
pub fn free_evolution_series<T: Real>(
    data: &CauchyData<T>,
    horizon: T,
    m: usize,
    params: &PropagatorParams<T>,
) -> TimeSeries<T> {
    let traj = sample_homogeneous(data, horizon, m, params);
    TimeSeries::new(traj.dt, traj.states.into_iter().map(|(u, _)| u).collect())
}

/// Duhamel integral for the inhomogeneous problem with zero data:
/// `u(t) = int_0^t B(xi, t - tau) F_hat(tau) dtau` per mode, by composite
/// Simpson on the stored source grid; the velocity uses the closed-form
/// kernel derivative. `t` must be one of the source nodes.
pub fn duhamel<T: Real>(
    source: &TimeSeries<T>,
    t: T,
    params: &PropagatorParams<T>,
) -> Result<(SpectralField<T>, SpectralField<T>)> {
    let target = source.node_of(t)?;
    let grid = *source.grid();
    let nu = params.nu;
    let dt = source.dt;
    let n = grid.len();
    let mut u = vec![Complex::new(T::zero(), T::zero()); n];
    let mut ut = vec![Complex::new(T::zero(), T::zero()); n];
    if target > 0 {
        let w = simpson_weights::<T>(target);
        for j in 0..=target {
            let lag = from_usize::<T>(target - j) * dt;
            let fm = source.fields[j].modes();
            let wj = w[j] * dt;
            for i in 0..n {
                let m = grid.freq_mag(i);
                u[i] += fm[i].scale(wj * mult_b(m, lag, nu));
                ut[i] += fm[i].scale(wj * mult_b_dt(m, lag, nu));
            }
        }
    }
    Ok((
        SpectralField::from_modes(grid, u),
        SpectralField::from_modes(grid, ut),
    ))
}

/// Duhamel displacement at every source node. Shares the per-mode kernel
/// table across targets; this is the workhorse of the fixed-point solver.
pub fn duhamel_all_nodes<T: Real>(
    source: &TimeSeries<T>,
    params: &PropagatorParams<T>,
) -> TimeSeries<T> {
    let grid = *source.grid();
    let nodes = source.fields.len();
    let dt = source.dt;
    let nu = params.nu;
    let nmodes = grid.len();

    // kernel[d * nmodes + i] = B(|xi_i|, d * dt).
    let mut kernel = vec![T::zero(); nodes * nmodes];
    for d in 0..nodes {
        let lag = from_usize::<T>(d) * dt;
        for i in 0..nmodes {
            kernel[d * nmodes + i] = mult_b(grid.freq_mag(i), lag, nu);
        }
    }
    let weights: Vec<Vec<T>> = (0..nodes).map(|m| simpson_weights::<T>(m)).collect();

    let mut out = Vec::with_capacity(nodes);
    for target in 0..nodes {
        let mut acc = vec![Complex::new(T::zero(), T::zero()); nmodes];
        if target > 0 {
            let w = &weights[target];
            for j in 0..=target {
                let wj = w[j] * dt;
                let krow = &kernel[(target - j) * nmodes..(target - j + 1) * nmodes];
                let fm = source.fields[j].modes();
                for i in 0..nmodes {
                    acc[i] += fm[i].scale(wj * krow[i]);
                }
            }
        }
        out.push(SpectralField::from_modes(grid, acc));
    }
    TimeSeries::new(dt, out)
}

/// `S(t)`: the velocity propagator of the model equation as an operator,
/// i.e. convolution with the kernel `K_t`. Requires `t > 0`.
pub fn s_operator<T: Real>(phi: &SpectralField<T>, t: T) -> Result<SpectralField<T>> {
    if t <= T::zero() {
        return Err(Error::NonPositiveTime(t.to_f64_lossy()));
    }
    Ok(phi.map_modes_by_mag(|m| Complex::new(mult_b(m, t, T::one()), T::zero())))
}

/// Homogeneous evolution restricted to the dyadic shell at `2^j`
/// (Fourier multipliers commute, so the order does not matter).
pub fn freq_localized_evolution<T: Real>(
    data: &CauchyData<T>,
    t: T,
    j: i32,
    params: &PropagatorParams<T>,
) -> Result<(SpectralField<T>, SpectralField<T>)> {
    crate::bands::require_shell_in_band(data.grid(), j)?;
    let (u, ut) = evolve_homogeneous(data, t, params);
    Ok((crate::bands::lp_projection(&u, j), crate::bands::lp_projection(&ut, j)))
}

fn inv<T: Real>(p: Lp<T>) -> T {
    match p {
        Lp::Infinity => T::zero(),
        Lp::Finite(v) => v.recip(),
    }
}

/// Scaling (gap) condition `1/q + n/r = n/2 - s`, to 1e-12.
pub fn gap_condition<T: Real>(q: Lp<T>, r: Lp<T>, s: T, dim: usize) -> bool {
    let lhs = inv(q) + from_usize::<T>(dim) * inv(r);
    let rhs = from_usize::<T>(dim) * T::lit(0.5) - s;
    (lhs - rhs).abs() <= T::lit(1e-12)
}

/// Keel-Tao sigma-admissibility: `q, r >= 2`, `(q, r, sigma) != (2, inf, 1)`,
/// and `2/q + 2 sigma / r <= sigma`.
pub fn sigma_admissible<T: Real>(q: Lp<T>, r: Lp<T>, sigma: T) -> bool {
    let two = T::lit(2.0);
    let ge2 = |p: Lp<T>| match p {
        Lp::Infinity => true,
        Lp::Finite(v) => v >= two,
    };
    if !ge2(q) || !ge2(r) || sigma <= T::zero() {
        return false;
    }
    let excluded = matches!(q, Lp::Finite(v) if (v - two).abs() <= T::lit(1e-12))
        && matches!(r, Lp::Infinity)
        && (sigma - T::one()).abs() <= T::lit(1e-12);
    if excluded {
        return false;
    }
    two * inv(q) + two * sigma * inv(r) <= sigma + T::lit(1e-12)
}

/// Homogeneous estimate ratio
/// `(||u||_{L^q L^r} + ||u(T)||_{H^s_hom} + ||u_t(T)||_{H^{s-1}_hom})
///  / (||f||_{H^s_hom} + ||g||_{H^{s-1}_hom})`
/// measured on `m + 1` uniform time samples.
pub fn strichartz_ratio<T: Real>(
    data: &CauchyData<T>,
    horizon: T,
    q: Lp<T>,
    r: Lp<T>,
    s: T,
    m: usize,
    params: &PropagatorParams<T>,
) -> Result<T> {
    let dim = data.grid().dim();
    if !gap_condition(q, r, s, dim) {
        return Err(Error::GapConditionViolated {
            q: q.value(),
            r: r.value(),
            s: s.to_f64_lossy(),
            n: dim,
        });
    }
    let denom = data.displacement.sobolev_norm(s, true)
        + data.velocity.sobolev_norm(s - T::one(), true);
    if denom == T::zero() {
        return Err(Error::ZeroData);
    }
    let traj = sample_homogeneous(data, horizon, m, params);
    let spacetime = traj.spacetime_norm(q, r)?;
    let (u_end, ut_end) = traj.states.last().unwrap();
    let num = spacetime
        + u_end.sobolev_norm(s, true)
        + ut_end.sobolev_norm(s - T::one(), true);
    Ok(num / denom)
}

/// Inhomogeneous `C^0 H^s` ratio:
/// `||Duhamel(F)||_{C^0([0,T]; H^s)} / ||F||_{L^{q'} L^{r'}}` with the dual
/// gap condition `n/2 - s = 1/q' + n/r' - 2`.
pub fn duhamel_c0hs_ratio<T: Real>(
    source: &TimeSeries<T>,
    horizon: T,
    s: T,
    q_tilde: T,
    r_tilde: T,
    params: &PropagatorParams<T>,
) -> Result<T> {
    assert!(
        horizon > T::zero() && horizon <= T::one() + T::lit(1e-12),
        "the uniform-in-T estimate window is 0 < T <= 1"
    );
    let dim = source.grid().dim();
    let conj = |p: T| p / (p - T::one());
    let qp = conj(q_tilde);
    let rp = conj(r_tilde);
    let lhs = from_usize::<T>(dim) * T::lit(0.5) - s;
    let rhs = qp.recip() + from_usize::<T>(dim) * rp.recip() - T::lit(2.0);
    if (lhs - rhs).abs() > T::lit(1e-12) {
        return Err(Error::GapConditionViolated {
            q: q_tilde.to_f64_lossy(),
            r: r_tilde.to_f64_lossy(),
            s: s.to_f64_lossy(),
            n: dim,
        });
    }
    let end = source.node_of(horizon)?;
    let clipped = TimeSeries::new(source.dt, source.fields[..=end].to_vec());
    let denom = clipped.spacetime_norm(Lp::Finite(qp), Lp::Finite(rp))?;
    if denom == T::zero() {
        return Err(Error::ZeroData);
    }
    let u = duhamel_all_nodes(&clipped, params);
    let c0hs = u
        .fields
        .iter()
        .map(|f| f.sobolev_norm(s, false))
        .fold(T::zero(), T::max);
    Ok(c0hs / denom)
}

/// Quadratic wave energy adapted to the viscosity parameter:
/// `E_nu = 1/2 ||u_t||_L2^2 + (nu^2/2) ||grad u||_L2^2`.
pub fn energy_nu<T: Real>(u: &SpectralField<T>, ut: &SpectralField<T>, nu: T) -> T {
    let kinetic = ut.l2_norm().powi(2);
    let gradient = u.sobolev_norm(T::one(), true).powi(2);
    T::lit(0.5) * (kinetic + nu * nu * gradient)
}

/// Exact dissipation rate of `E_nu` along the homogeneous flow:
/// `dE/dt = -nu ||u_t||^2` in the half-derivative norm.
pub fn dissipation_rate<T: Real>(ut: &SpectralField<T>, nu: T) -> T {
    -nu * ut.sobolev_norm(T::lit(0.5), true).powi(2)
}
