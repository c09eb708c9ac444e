//! Per-iteration log (CSV) and per-run summary (JSON).

use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One row per scenario, in draw order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub scenario_id: u64,
    pub p_pred: Option<f64>,
    pub sigma_star: Option<f64>,
    pub entropy: Option<f64>,
    pub simulated: bool,
    pub p_min: f64,
    pub p_max: f64,
    pub n_sims: u64,
    /// Left empty unless timing is recorded, so logs stay reproducible.
    pub elapsed_s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationLog {
    pub rows: Vec<IterationRow>,
}

impl IterationLog {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "scenario_id",
                "p_pred",
                "sigma_star",
                "entropy",
                "simulated",
                "p_min",
                "p_max",
                "n_sims",
                "elapsed_s",
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let rows = r.deserialize().collect::<std::result::Result<Vec<IterationRow>, _>>()?;
        Ok(IterationLog { rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Brute,
    Proxy,
}

impl ProcessKind {
    pub fn name(self) -> &'static str {
        match self {
            ProcessKind::Brute => "brute",
            ProcessKind::Proxy => "proxy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub process: ProcessKind,
    pub p_min: f64,
    pub p_max: f64,
    pub iterations: u64,
    pub simulations: u64,
    pub alpha: f64,
    pub seed: u64,
}

impl RunSummary {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)
            .map_err(|source| Error::Json { context: path.display().to_string(), source })?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { context: path.display().to_string(), source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row_strategy() -> impl Strategy<Value = IterationRow> {
        (
            any::<u64>(),
            proptest::option::of(0.0f64..=1.0),
            proptest::option::of(0.0f64..2.0),
            proptest::option::of(0.0f64..=1.0),
            any::<bool>(),
            (0.0f64..=1.0, 0.0f64..=1.0),
            any::<u64>(),
            proptest::option::of(0.0f64..1e5),
        )
            .prop_map(|(id, p, s, h, sim, (a, b), n, t)| IterationRow {
                scenario_id: id,
                p_pred: p,
                sigma_star: s,
                entropy: h,
                simulated: sim,
                p_min: a.min(b),
                p_max: a.max(b),
                n_sims: n,
                elapsed_s: t,
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in proptest::collection::vec(row_strategy(), 0..20)) {
            let log = IterationLog { rows };
            let mut buf = Vec::new();
            log.write_csv(&mut buf).unwrap();
            let back = IterationLog::read_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back, log);
        }
    }

    #[test]
    fn header_layout() {
        let log = IterationLog {
            rows: vec![IterationRow {
                scenario_id: 3,
                p_pred: None,
                sigma_star: None,
                entropy: None,
                simulated: true,
                p_min: 0.25,
                p_max: 0.5,
                n_sims: 4,
                elapsed_s: None,
            }],
        };
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "scenario_id,p_pred,sigma_star,entropy,simulated,p_min,p_max,n_sims,elapsed_s\n3,,,,true,0.25,0.5,4,\n"
        );
    }

    #[test]
    fn summary_json_keys() {
        let s = RunSummary {
            process: ProcessKind::Proxy,
            p_min: 0.1,
            p_max: 0.2,
            iterations: 5,
            simulations: 3,
            alpha: 0.05,
            seed: 9,
        };
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v["process"], "proxy");
        for key in ["p_min", "p_max", "iterations", "simulations", "alpha", "seed"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
