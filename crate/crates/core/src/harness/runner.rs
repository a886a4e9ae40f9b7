use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;

use super::config::{whole_steps, ExperimentConfig, ExperimentKind};
use super::report::{BlowUpRecord, EnergyRun, ReferenceInfo, RunReport, SchemeSweep};
use crate::diagnostics::{drift_series, energy, err_metric, fit_order, ConvergenceRow, EnergySample};
use crate::error::{KgError, Result};
use crate::integrators::{evolve, Scheme};
use crate::nonlinearity::Nonlinearity;
use crate::StateU;

/// A state saved during `run_simulate`.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub scheme: Scheme,
    pub step: usize,
    pub time: f64,
    pub state: StateU,
}

/// Dispatches on `config.kind`. Snapshots are only produced by simulate runs.
pub fn run(config: &ExperimentConfig, threads: Option<usize>) -> Result<(RunReport, Vec<Snapshot>)> {
    config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| KgError::Config(e.to_string()))?;
    pool.install(|| match config.kind {
        ExperimentKind::Convergence => run_convergence(config).map(|r| (r, Vec::new())),
        ExperimentKind::Efficiency => run_efficiency(config).map(|r| (r, Vec::new())),
        ExperimentKind::EnergyDrift => run_energy_drift(config).map(|r| (r, Vec::new())),
        ExperimentKind::Simulate => run_simulate(config),
    })
}

fn expect_kind(config: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if config.kind != kind {
        return Err(KgError::Config(format!(
            "expected a {} config, got {}",
            kind.name(),
            config.kind.name()
        )));
    }
    config.validate()
}

fn final_state(
    u0: &StateU,
    scheme: Scheme,
    tau: f64,
    steps: usize,
    nl: &Nonlinearity,
) -> Result<StateU> {
    evolve(u0, scheme, tau, steps, nl, usize::MAX, |_, _, _| {})
}

/// Fine-step reference at `τ_min / refinement`, certified by a second
/// scheme when the policy asks for it.
pub fn certified_reference(config: &ExperimentConfig, u0: &StateU) -> Result<(StateU, ReferenceInfo)> {
    let nl = config.nonlinearity()?;
    let policy = config.reference;
    let tau_min = *config.taus.last().expect("validated sweep");
    let tau = tau_min / policy.refinement as f64;
    let steps = whole_steps(config.t_end, tau_min)? * policy.refinement;
    let clock = Instant::now();
    let mut schemes = vec![policy.scheme];
    schemes.extend(policy.certify_with);
    let mut runs: Vec<Result<StateU>> = schemes
        .par_iter()
        .map(|&s| final_state(u0, s, tau, steps, &nl))
        .collect();
    let reference = runs.remove(0)?;
    let gap = match runs.pop() {
        Some(other) => {
            let gap = err_metric(&other?, &reference)?;
            if !(gap <= policy.tolerance) {
                return Err(KgError::Certification {
                    gap,
                    tolerance: policy.tolerance,
                });
            }
            Some(gap)
        }
        None => None,
    };
    info!("reference {} at tau = {tau:e}: certification gap {gap:?}", policy.scheme);
    Ok((
        reference,
        ReferenceInfo {
            scheme: policy.scheme,
            tau,
            steps,
            certified_with: policy.certify_with,
            certification_gap: gap,
            wall_clock_seconds: clock.elapsed().as_secs_f64(),
        },
    ))
}

enum Outcome {
    Row(ConvergenceRow),
    BlowUp(BlowUpRecord),
}

fn sweep(config: &ExperimentConfig) -> Result<RunReport> {
    let clock = Instant::now();
    let nl = config.nonlinearity()?;
    let u0 = config.initial_state()?;
    let (reference, info) = certified_reference(config, &u0)?;
    let jobs: Vec<(Scheme, f64)> = config
        .schemes
        .iter()
        .flat_map(|&s| config.taus.iter().map(move |&t| (s, t)))
        .collect();
    let outcomes: Vec<Result<Outcome>> = jobs
        .par_iter()
        .map(|&(scheme, tau)| {
            let steps = whole_steps(config.t_end, tau)?;
            let start = Instant::now();
            match final_state(&u0, scheme, tau, steps, &nl) {
                Ok(state) => Ok(Outcome::Row(ConvergenceRow {
                    tau,
                    err: err_metric(&state, &reference)?,
                    wall_clock_seconds: start.elapsed().as_secs_f64(),
                })),
                Err(KgError::BlowUp { step }) => {
                    warn!("{scheme} blew up at step {step} with tau = {tau}");
                    Ok(Outcome::BlowUp(BlowUpRecord { tau, step }))
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut report = RunReport::new(config);
    report.reference = Some(info);
    let mut outcomes = outcomes.into_iter();
    for &scheme in &config.schemes {
        let mut entry = SchemeSweep {
            scheme,
            rows: Vec::new(),
            blow_ups: Vec::new(),
            fit: None,
        };
        for _ in &config.taus {
            match outcomes.next().expect("one outcome per job")? {
                Outcome::Row(r) => entry.rows.push(r),
                Outcome::BlowUp(b) => entry.blow_ups.push(b),
            }
        }
        entry.fit = match fit_order(&entry.rows) {
            Ok(fit) => Some(fit),
            Err(KgError::TooFewRows(n)) => {
                warn!("{scheme}: only {n} usable rows, no order fitted");
                None
            }
            Err(e) => return Err(e),
        };
        report.sweeps.push(entry);
    }
    report.wall_clock_seconds = clock.elapsed().as_secs_f64();
    Ok(report)
}

pub fn run_convergence(config: &ExperimentConfig) -> Result<RunReport> {
    expect_kind(config, ExperimentKind::Convergence)?;
    sweep(config)
}

/// Same sweep as `run_convergence`; the rows carry the (seconds, err) pairs.
pub fn run_efficiency(config: &ExperimentConfig) -> Result<RunReport> {
    expect_kind(config, ExperimentKind::Efficiency)?;
    sweep(config)
}

/// Runs one scheme at step `h` to `t_end`, sampling energy every stride and
/// keeping the states at `keep` step indices.
fn energy_run(
    config: &ExperimentConfig,
    u0: &StateU,
    scheme: Scheme,
    keep: &[usize],
) -> Result<(EnergyRun, Vec<Snapshot>)> {
    let nl = config.nonlinearity()?;
    let h = config.step_size()?;
    let steps = whole_steps(config.t_end, h)?;
    let h0 = energy(u0, &nl);
    let clock = Instant::now();
    let mut samples = Vec::new();
    let mut kept = Vec::new();
    let stride = if keep.is_empty() { config.stride } else { 1 };
    let result = evolve(u0, scheme, h, steps, &nl, stride, |n, t, s| {
        if n % config.stride == 0 || n == steps {
            let e = energy(s, &nl);
            let relative_error = if h0 != 0.0 { (e - h0) / h0 } else { e - h0 };
            samples.push(EnergySample {
                time: t,
                energy: e,
                relative_error,
            });
        }
        if keep.contains(&n) {
            kept.push(Snapshot {
                scheme,
                step: n,
                time: t,
                state: s.clone(),
            });
        }
    });
    let blow_up = match result {
        Ok(_) => None,
        Err(KgError::BlowUp { step }) => {
            warn!("{scheme} blew up at step {step}");
            Some(BlowUpRecord { tau: h, step })
        }
        Err(e) => return Err(e),
    };
    let window = config.drift_window.unwrap_or((0.0, config.t_end));
    let drift = match blow_up {
        None => Some(drift_series(&samples, window)?),
        Some(_) => None,
    };
    let run = EnergyRun {
        scheme,
        h,
        samples,
        drift,
        blow_up,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
    };
    Ok((run, kept))
}

pub fn run_energy_drift(config: &ExperimentConfig) -> Result<RunReport> {
    expect_kind(config, ExperimentKind::EnergyDrift)?;
    let clock = Instant::now();
    let u0 = config.initial_state()?;
    let runs: Vec<Result<(EnergyRun, Vec<Snapshot>)>> = config
        .schemes
        .par_iter()
        .map(|&s| energy_run(config, &u0, s, &[]))
        .collect();
    let mut report = RunReport::new(config);
    for r in runs {
        report.energy.push(r?.0);
    }
    report.wall_clock_seconds = clock.elapsed().as_secs_f64();
    Ok(report)
}

/// One run per listed scheme; snapshots at the configured times plus the
/// final state.
pub fn run_simulate(config: &ExperimentConfig) -> Result<(RunReport, Vec<Snapshot>)> {
    expect_kind(config, ExperimentKind::Simulate)?;
    let clock = Instant::now();
    let u0 = config.initial_state()?;
    let h = config.step_size()?;
    let mut keep: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&t| whole_steps(t, h))
        .collect::<Result<_>>()?;
    keep.push(whole_steps(config.t_end, h)?);
    keep.sort_unstable();
    keep.dedup();
    let runs: Vec<Result<(EnergyRun, Vec<Snapshot>)>> = config
        .schemes
        .par_iter()
        .map(|&s| energy_run(config, &u0, s, &keep))
        .collect();
    let mut report = RunReport::new(config);
    let mut snapshots = Vec::new();
    for r in runs {
        let (run, kept) = r?;
        report.energy.push(run);
        snapshots.extend(kept);
    }
    report.wall_clock_seconds = clock.elapsed().as_secs_f64();
    Ok((report, snapshots))
}
