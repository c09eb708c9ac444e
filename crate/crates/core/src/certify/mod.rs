//! The two certification processes and the statistics behind their intervals.

mod decision;
pub(crate) mod interval;
mod log;
mod metrics;
mod process;

pub use decision::{draw_prediction, DecisionThresholds, OutcomeRecord};
pub use interval::{
    classic_interval, clt_summary, uncertainty_interval, wilson_from_mean, CltAccumulator, CltSummary,
    ConfidenceInterval, Estimator,
};
pub use log::{IterationLog, IterationRow, ProcessKind, RunSummary};
pub use metrics::{moving_average, simulated_fraction};
pub use process::{run_brute_force, run_proxy_process, Context, ProcessConfig, ProcessOutcome, StopRule};
