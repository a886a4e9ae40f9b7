//! Experiment runner behind the `kgsym` binary: JSON configs in, CSV and
//! JSON reports (and optional state snapshots) out.

pub mod config;
pub mod report;
pub mod runner;
pub mod snapshot;

use std::path::{Path, PathBuf};

pub use config::{DatumSpec, ExperimentConfig, ExperimentKind, ReferencePolicy, SnapshotFormat};
pub use report::{RunReport, SchemeSweep};
pub use runner::{run, run_convergence, run_efficiency, run_energy_drift, run_simulate, Snapshot};

use crate::error::Result;
use report::SnapshotRecord;

/// Writes snapshot files, records them in the report, then writes the
/// report's CSV and JSON files. Returns every path written.
pub fn write_outputs(report: &mut RunReport, snapshots: &[Snapshot], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let format = report.config.snapshot_format;
    let ext = match format {
        SnapshotFormat::Csv => "csv",
        SnapshotFormat::Binary => "bin",
    };
    let mut written = Vec::new();
    report.snapshots.clear();
    for s in snapshots {
        let file = format!("snapshot_{}_{:08}.{ext}", s.scheme, s.step);
        let path = dir.join(&file);
        snapshot::write_snapshot(&path, &s.state, format)?;
        report.snapshots.push(SnapshotRecord {
            scheme: s.scheme,
            step: s.step,
            time: s.time,
            file,
        });
        written.push(path);
    }
    written.extend(report.write(dir)?);
    Ok(written)
}
