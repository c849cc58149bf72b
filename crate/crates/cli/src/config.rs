//! Experiment configuration: a single TOML file, fail-closed (unknown keys
//! are rejected so golden runs stay honest).

use serde::{Deserialize, Serialize};
use std::path::Path;
use vnlw_core::random::RandomLaw;
use vnlw_core::solver::SolverConfig;
use vnlw_core::{CauchyData, Field64, Grid64, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Closeness,
    Inflation,
    Strichartz,
    C0hs,
    Kernel,
    Oscillator,
    Randomize,
    Averaging,
    Tails,
    Picard,
    Probabilistic,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Closeness => "closeness",
            Self::Inflation => "inflation",
            Self::Strichartz => "strichartz",
            Self::C0hs => "c0hs",
            Self::Kernel => "kernel",
            Self::Oscillator => "oscillator",
            Self::Randomize => "randomize",
            Self::Averaging => "averaging",
            Self::Tails => "tails",
            Self::Picard => "picard",
            Self::Probabilistic => "probabilistic",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "closeness" => Self::Closeness,
            "inflation" => Self::Inflation,
            "strichartz" => Self::Strichartz,
            "c0hs" => Self::C0hs,
            "kernel" => Self::Kernel,
            "oscillator" => Self::Oscillator,
            "randomize" => Self::Randomize,
            "averaging" => Self::Averaging,
            "tails" => Self::Tails,
            "picard" => Self::Picard,
            "probabilistic" => Self::Probabilistic,
        _ => return None,
        })
    }

    pub fn needs_seed(&self) -> bool {
        matches!(
            self,
            Self::Randomize | Self::Averaging | Self::Tails | Self::Probabilistic
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub points: usize,
    pub half_width: f64,
}

impl GridSection {
    pub fn build(&self) -> anyhow::Result<Grid64> {
        Ok(Grid64::new(self.dim, self.points, self.half_width)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub p: u32,
    pub nu: f64,
    pub dt: f64,
    pub dealias_factor: usize,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub diag_k: usize,
    pub norm_ceiling: f64,
    pub output_every: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = SolverConfig::<f64>::quintic(1.0, 0.01);
        Self {
            p: c.p,
            nu: c.nu,
            dt: c.dt,
            dealias_factor: c.dealias_factor,
            picard_tol: c.picard_tol,
            picard_max_iter: c.picard_max_iter,
            diag_k: c.diag_k,
            norm_ceiling: c.norm_ceiling,
            output_every: c.output_every,
        }
    }
}

impl SolverSection {
    pub fn build(&self) -> SolverConfig<f64> {
        SolverConfig {
            p: self.p,
            nu: self.nu,
            dt: self.dt,
            dealias_factor: self.dealias_factor,
            picard_tol: self.picard_tol,
            picard_max_iter: self.picard_max_iter,
            diag_k: self.diag_k,
            norm_ceiling: self.norm_ceiling,
            output_every: self.output_every,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawName {
    Rademacher,
    UniformSym,
    TruncatedGaussian,
    AllOnes,
}

impl LawName {
    pub fn build(&self) -> RandomLaw {
        match self {
            Self::Rademacher => RandomLaw::Rademacher,
            Self::UniformSym => RandomLaw::UniformSym,
            Self::TruncatedGaussian => RandomLaw::TruncatedGaussian,
            Self::AllOnes => RandomLaw::AllOnes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSection {
    pub law: LawName,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    /// `amp exp(-|x|^2 / (2 w^2))`.
    Gaussian,
    /// Gaussian times `cos(m x_0)`; zero-mean, spectrum centered at `m`.
    ModulatedGaussian,
    /// Random phases on the dyadic-ish shell `|xi| ~ shell_radius`.
    Shell,
    /// Random Hermitian modes up to integer band `band`.
    RandomBandlimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub kind: DataKind,
    pub amplitude: f64,
    pub width: f64,
    pub modulation: f64,
    pub shell_radius: f64,
    pub band: i64,
    /// Velocity is `velocity_scale` times the displacement.
    pub velocity_scale: f64,
    /// Sobolev regularity metadata carried by the data.
    pub sobolev_index: f64,
    /// Seed for the random data kinds (distinct from the law seed).
    pub data_seed: u64,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            kind: DataKind::Gaussian,
            amplitude: 1.0,
            width: 1.5,
            modulation: 4.0,
            shell_radius: 3.0,
            band: 8,
            velocity_scale: 0.0,
            sobolev_index: 0.0,
            data_seed: 7,
        }
    }
}

impl DataSection {
    pub fn build(&self, grid: &Grid64) -> CauchyData<f64> {
        let f = build_field(grid, self);
        let g = f.scale(self.velocity_scale);
        CauchyData::new(f, g, self.sobolev_index).expect("same grid by construction")
    }
}

fn build_field(grid: &Grid64, spec: &DataSection) -> Field64 {
    use rand::Rng as _;
    use rand_chacha::rand_core::SeedableRng as _;
    match spec.kind {
        DataKind::Gaussian => {
            let (a, w) = (spec.amplitude, spec.width);
            SpectralField::from_physical_fn(*grid, move |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                a * (-r2 / (2.0 * w * w)).exp()
            })
        }
        DataKind::ModulatedGaussian => {
            let (a, w, m) = (spec.amplitude, spec.width, spec.modulation);
            SpectralField::from_physical_fn(*grid, move |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                a * (m * x[0]).cos() * (-r2 / (2.0 * w * w)).exp()
            })
        }
        DataKind::Shell => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.data_seed);
            let rho = spec.shell_radius;
            let mut modes = vec![num_complex::Complex::new(0.0, 0.0); grid.len()];
            for i in 0..grid.len() {
                let r = grid.freq_mag(i);
                if (r - rho).abs() <= 0.5 * grid.delta_xi().max(0.25) {
                    let j = grid.conjugate_index(i);
                    if modes[i].norm() == 0.0 && modes[j].norm() == 0.0 {
                        let v = num_complex::Complex::from_polar(
                            spec.amplitude,
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        );
                        modes[i] = v;
                        modes[j] = v.conj();
                    }
                }
            }
            SpectralField::from_modes(*grid, modes)
        }
        DataKind::RandomBandlimited => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.data_seed);
            let mut modes = vec![num_complex::Complex::new(0.0, 0.0); grid.len()];
            for i in 0..grid.len() {
                let signed = grid.signed_indices(i);
                let band_ok = (0..grid.dim()).all(|a| signed[a].abs() <= spec.band);
                let zero = (0..grid.dim()).all(|a| signed[a] == 0);
                if band_ok && !zero && modes[i].norm() == 0.0 {
                    let j = grid.conjugate_index(i);
                    let v = num_complex::Complex::new(
                        spec.amplitude * rng.gen_range(-1.0..1.0),
                        spec.amplitude * rng.gen_range(-1.0..1.0),
                    );
                    modes[i] = v;
                    modes[j] = v.conj();
                }
            }
            SpectralField::from_modes(*grid, modes)
        }
    }
}

/// Sweep knobs. Experiments validate the subset they need; unknown keys are
/// rejected by serde, missing required ones at validation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub nus: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub horizons: Vec<f64>,
    pub eps_targets: Vec<f64>,
    pub widths: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub s: Option<f64>,
    pub sobolev_k: Option<usize>,
    pub horizon: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub time_nodes: Option<usize>,
    pub mc_samples: Option<usize>,
    pub family_size: Option<usize>,
    pub epsilon: Option<f64>,
    pub target_probability: Option<f64>,
    pub ratio_target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub random: Option<RandomSection>,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub write_fields: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into(), write_fields: false }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| anyhow::anyhow!("malformed config: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.grid.build()?;
        if self.experiment.needs_seed() && self.random.is_none() {
            anyhow::bail!(
                "experiment '{}' draws random data: a [random] section with law and seed is required",
                self.experiment.name()
            );
        }
        for (name, range) in [
            ("sweep.nus", &self.sweep.nus),
            ("sweep.horizons", &self.sweep.horizons),
            ("sweep.eps_targets", &self.sweep.eps_targets),
        ] {
            if range.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                anyhow::bail!("{name} must hold positive finite values");
            }
        }
        Ok(())
    }
}
