//! One module per experiment; each consumes the parsed config and produces
//! a deterministic report.

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::ExperimentReport;

pub mod averaging;
pub mod c0hs;
pub mod closeness;
pub mod inflation;
pub mod kernel;
pub mod oscillator;
pub mod picard;
pub mod probabilistic;
pub mod randomize;
pub mod strichartz;
pub mod tails;

pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentReport> {
    match cfg.experiment {
        ExperimentKind::Closeness => closeness::run(cfg),
        ExperimentKind::Inflation => inflation::run(cfg),
        ExperimentKind::Strichartz => strichartz::run(cfg),
        ExperimentKind::C0hs => c0hs::run(cfg),
        ExperimentKind::Kernel => kernel::run(cfg),
        ExperimentKind::Oscillator => oscillator::run(cfg),
        ExperimentKind::Randomize => randomize::run(cfg),
        ExperimentKind::Averaging => averaging::run(cfg),
        ExperimentKind::Tails => tails::run(cfg),
        ExperimentKind::Picard => picard::run(cfg),
        ExperimentKind::Probabilistic => probabilistic::run(cfg),
    }
}
