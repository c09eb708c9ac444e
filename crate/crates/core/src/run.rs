//! Running one or both processes from a [`RunConfig`] and writing artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certify::{run_brute_force, run_proxy_process, Context, ProcessKind, ProcessOutcome, RunSummary};
use crate::config::RunConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessSelection {
    Brute,
    Proxy,
    Both,
}

impl ProcessSelection {
    pub fn kinds(self) -> &'static [ProcessKind] {
        match self {
            ProcessSelection::Brute => &[ProcessKind::Brute],
            ProcessSelection::Proxy => &[ProcessKind::Proxy],
            ProcessSelection::Both => &[ProcessKind::Brute, ProcessKind::Proxy],
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompletedRun {
    pub kind: ProcessKind,
    pub outcome: ProcessOutcome,
    pub summary: RunSummary,
}

pub fn execute(ctx: &Context, cfg: &RunConfig, kind: ProcessKind) -> Result<CompletedRun> {
    let pc = cfg.process_config();
    let outcome = match kind {
        ProcessKind::Brute => run_brute_force(ctx, &pc)?,
        ProcessKind::Proxy => run_proxy_process(ctx, &pc)?,
    };
    let summary = RunSummary {
        process: kind,
        p_min: outcome.interval.p_min,
        p_max: outcome.interval.p_max,
        iterations: outcome.iterations,
        simulations: outcome.simulations,
        alpha: cfg.alpha,
        seed: cfg.seed,
    };
    Ok(CompletedRun { kind, outcome, summary })
}

/// Creates `dir` and checks a file can be written there.
pub fn prepare_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write_probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

/// Writes `<kind>_log.csv` and `<kind>_summary.json`; returns both paths.
pub fn write_artifacts(run: &CompletedRun, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let csv = dir.join(format!("{}_log.csv", run.kind.name()));
    let json = dir.join(format!("{}_summary.json", run.kind.name()));
    run.outcome.log.save(&csv)?;
    run.summary.save(&json)?;
    Ok((csv, json))
}

/// Side-by-side table of iterations, bounds, relative error and length.
pub fn comparison_table(runs: &[CompletedRun], reference: Option<f64>) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:<22}", "");
    for r in runs {
        let _ = write!(s, "{:>14}", r.kind.name());
    }
    s.push('\n');
    let mut line = |label: &str, f: &dyn Fn(&CompletedRun) -> String| {
        let _ = write!(s, "{label:<22}");
        for r in runs {
            let _ = write!(s, "{:>14}", f(r));
        }
        s.push('\n');
    };
    line("iterations", &|r| r.summary.iterations.to_string());
    line("simulations", &|r| r.summary.simulations.to_string());
    line("p_min", &|r| format!("{:.5}", r.summary.p_min));
    line("p_max", &|r| format!("{:.5}", r.summary.p_max));
    if let Some(p) = reference {
        line("relative error (%)", &|r| {
            let mid = 0.5 * (r.summary.p_min + r.summary.p_max);
            format!("{:.3}", 100.0 * (mid - p).abs() / p)
        });
    }
    line("interval length", &|r| format!("{:.5}", r.summary.p_max - r.summary.p_min));
    s
}
