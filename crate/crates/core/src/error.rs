use thiserror::Error;

/// Errors raised by contract violations on the library surface. Numerical
/// outcomes that the caller is expected to handle (blowup, non-contraction)
/// are typed results, not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 1, 2, or 3, got {0}")]
    InvalidDimension(usize),
    #[error("points per axis must be a power of two >= 8, got {0}")]
    InvalidPointCount(usize),
    #[error("box half-width must be positive, got {0}")]
    InvalidHalfWidth(f64),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("multiplier produced a non-finite value at |xi| = {xi_mag}")]
    NonFiniteMultiplier { xi_mag: f64 },
    #[error("Lebesgue exponent must satisfy p >= 1, got {0}")]
    InvalidLebesgueExponent(f64),
    #[error("trajectory must hold at least two uniformly spaced samples")]
    EmptyTrajectory,
    #[error("scaling by {lambda} pushes spectral mass {fraction:.3e} beyond the Nyquist band")]
    BandViolation { lambda: f64, fraction: f64 },
    #[error("dyadic shell j = {j} lies outside the resolved band")]
    ShellOutsideBand { j: i32 },
    #[error("operator requires t > 0, got {0}")]
    NonPositiveTime(f64),
    #[error("gap condition 1/q + n/r = n/2 - s fails for q={q}, r={r}, s={s}, n={n}")]
    GapConditionViolated { q: f64, r: f64, s: f64, n: usize },
    #[error("ratio undefined for zero data")]
    ZeroData,
    #[error("source history does not cover the requested time {0}")]
    TimeOutOfRange(f64),
    #[error("oscillator exponent must be a positive odd integer, got {0}")]
    InvalidOscillatorExponent(u32),
    #[error("solver config rejected: {0}")]
    InvalidSolverConfig(String),
    #[error("requested horizon is not an integer number of steps: T={t}, dt={dt}")]
    NonIntegerStepCount { t: f64, dt: f64 },
    #[error("partition of unity does not cover the data band (need margin {needed}, have {have})")]
    PartitionBandTooSmall { needed: f64, have: f64 },
    #[error("Sobolev index {s} outside the admissible range {lo}..{hi}")]
    InvalidSobolevIndex { s: f64, lo: f64, hi: f64 },
    #[error("log-log fit needs >= 3 strictly positive points")]
    InvalidFitInput,
    #[error("kernel decay window [{lo}, {hi}] holds fewer than 3 usable points")]
    DecayWindowTooNarrow { lo: f64, hi: f64 },
    #[error("field dump is malformed: {0}")]
    MalformedDump(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
