//! Runs one experiment end to end: parse, override, dispatch, write
//! the report, and map the outcome to the exit-code contract
//! (0 pass, 1 malformed config, 2 verdict failure, 3 resource ceiling).

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::experiments;
use crate::report::{exit_code, ExperimentReport};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct RunOptions {
    pub experiment: String,
    pub config_path: PathBuf,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub fn execute(opts: &RunOptions) -> i32 {
    match prepare(opts) {
        Ok(cfg) => {
            if let Some(threads) = opts.threads {
                // A failed build means a global pool already exists (e.g.
                // under tests); the run proceeds on that pool.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            let started = Instant::now();
            match experiments::run(&cfg) {
                Ok(report) => {
                    let dir = Path::new(&cfg.output.dir);
                    if let Err(e) = finalize(&report, dir, started) {
                        eprintln!("error: cannot write report: {e}");
                        return 1;
                    }
                    for v in &report.verdicts {
                        eprintln!(
                            "[{}] {}: {}",
                            if v.pass { "pass" } else { "FAIL" },
                            v.name,
                            v.detail
                        );
                    }
                    if let Some(c) = &report.ceiling {
                        eprintln!("[ceiling] {c}");
                    }
                    exit_code(&report)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn prepare(opts: &RunOptions) -> anyhow::Result<ExperimentConfig> {
    let kind = ExperimentKind::parse(&opts.experiment).ok_or_else(|| {
        anyhow::anyhow!(
            "unknown experiment '{}'; expected one of closeness, inflation, strichartz, c0hs, \
             kernel, oscillator, randomize, averaging, tails, picard, probabilistic",
            opts.experiment
        )
    })?;
    let mut cfg = ExperimentConfig::from_path(&opts.config_path)?;
    if cfg.experiment != kind {
        anyhow::bail!(
            "config names experiment '{}' but the command line asked for '{}'",
            cfg.experiment.name(),
            kind.name()
        );
    }
    if let Some(seed) = opts.seed {
        match &mut cfg.random {
            Some(r) => r.seed = seed,
            None => anyhow::bail!(
                "--seed given but the config has no [random] section to override"
            ),
        }
    }
    if let Some(out) = &opts.out {
        cfg.output.dir = out.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Write the deterministic report plus a non-deterministic timing sidecar
/// (timing stays out of report.json so reports are byte-stable).
fn finalize(report: &ExperimentReport, dir: &Path, started: Instant) -> anyhow::Result<()> {
    report.write(dir)?;
    let elapsed = started.elapsed();
    std::fs::write(
        dir.join("timing.txt"),
        format!("wall_clock_seconds = {:.3}\n", elapsed.as_secs_f64()),
    )?;
    eprintln!(
        "report written to {} ({:.2}s)",
        dir.join("report.json").display(),
        elapsed.as_secs_f64()
    );
    Ok(())
}
