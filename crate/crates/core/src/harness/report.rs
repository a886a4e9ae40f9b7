use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::diagnostics::{ConvergenceRow, DriftSummary, EnergySample, OrderFit};
use crate::error::{KgError, Result};
use crate::integrators::Scheme;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceInfo {
    pub scheme: Scheme,
    pub tau: f64,
    pub steps: usize,
    pub certified_with: Option<Scheme>,
    /// err_metric between the two reference runs.
    pub certification_gap: Option<f64>,
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowUpRecord {
    pub tau: f64,
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSweep {
    pub scheme: Scheme,
    pub rows: Vec<ConvergenceRow>,
    pub blow_ups: Vec<BlowUpRecord>,
    /// Absent when fewer than two usable rows remain.
    pub fit: Option<OrderFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRun {
    pub scheme: Scheme,
    pub h: f64,
    pub samples: Vec<EnergySample>,
    pub drift: Option<DriftSummary>,
    pub blow_up: Option<BlowUpRecord>,
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub scheme: Scheme,
    pub step: usize,
    pub time: f64,
    pub file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub seed: Option<u64>,
    pub code_version: String,
    pub reference: Option<ReferenceInfo>,
    pub sweeps: Vec<SchemeSweep>,
    pub energy: Vec<EnergyRun>,
    pub snapshots: Vec<SnapshotRecord>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            kind: config.kind,
            config: config.clone(),
            seed: config.datum.seed(),
            code_version: CODE_VERSION.to_string(),
            reference: None,
            sweeps: Vec::new(),
            energy: Vec::new(),
            snapshots: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn has_blow_up(&self) -> bool {
        self.sweeps.iter().any(|s| !s.blow_ups.is_empty())
            || self.energy.iter().any(|e| e.blow_up.is_some())
    }

    pub fn sweep(&self, scheme: Scheme) -> Option<&SchemeSweep> {
        self.sweeps.iter().find(|s| s.scheme == scheme)
    }

    pub fn energy_run(&self, scheme: Scheme) -> Option<&EnergyRun> {
        self.energy.iter().find(|e| e.scheme == scheme)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes `<kind>.json` and one `<kind>_<scheme>.csv` per scheme into
    /// `dir`, returning the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let kind = self.kind.name();
        let mut written = Vec::new();
        for sweep in &self.sweeps {
            let path = dir.join(format!("{kind}_{}.csv", sweep.scheme));
            write_rows(&path, &sweep.rows)?;
            written.push(path);
        }
        for run in &self.energy {
            let path = dir.join(format!("{kind}_{}.csv", run.scheme));
            write_samples(&path, &run.samples)?;
            written.push(path);
        }
        let path = dir.join(format!("{kind}.json"));
        std::fs::write(&path, self.to_json()?)?;
        written.push(path);
        Ok(written)
    }
}

fn io(e: csv::Error) -> KgError {
    KgError::Io(e.into())
}

/// CSV with header `tau,err,seconds`.
pub fn write_rows(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["tau", "err", "seconds"]).map_err(io)?;
    for r in rows {
        w.write_record(&[r.tau.to_string(), r.err.to_string(), r.wall_clock_seconds.to_string()])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with header `time,energy,rel_err`.
pub fn write_samples(path: &Path, samples: &[EnergySample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["time", "energy", "rel_err"]).map_err(io)?;
    for s in samples {
        w.write_record(&[s.time.to_string(), s.energy.to_string(), s.relative_error.to_string()])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
