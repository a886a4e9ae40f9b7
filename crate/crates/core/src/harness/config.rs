use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::initial_data::{make_rough, make_soliton, RoughDatumSpec, SolitonDatumSpec};
use crate::integrators::Scheme;
use crate::nonlinearity::Nonlinearity;
use crate::{Grid, StateU};

/// How far `T/τ` may sit from an integer.
pub const STEP_COUNT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Convergence,
    Efficiency,
    EnergyDrift,
    Simulate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Efficiency => "efficiency",
            ExperimentKind::EnergyDrift => "energy-drift",
            ExperimentKind::Simulate => "simulate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DatumSpec {
    Rough(RoughDatumSpec),
    Soliton(SolitonDatumSpec),
}

impl DatumSpec {
    pub fn seed(&self) -> Option<u64> {
        match self {
            DatumSpec::Rough(r) => Some(r.seed),
            DatumSpec::Soliton(_) => None,
        }
    }

    pub fn build(&self, grid: &Grid) -> Result<StateU> {
        match self {
            DatumSpec::Rough(r) => make_rough(r, grid),
            DatumSpec::Soliton(s) => make_soliton(s, grid),
        }
    }
}

/// Reference solution for error measurements: `scheme` at
/// `τ_min / refinement`, cross-checked against `certify_with` at the same
/// step size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePolicy {
    #[serde(default = "default_ref_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    #[serde(default = "default_certifier")]
    pub certify_with: Option<Scheme>,
    #[serde(default = "default_cert_tol")]
    pub tolerance: f64,
}

fn default_ref_scheme() -> Scheme {
    Scheme::Slri2
}
fn default_refinement() -> usize {
    128
}
fn default_certifier() -> Option<Scheme> {
    Some(Scheme::Lri2)
}
fn default_cert_tol() -> f64 {
    1e-9
}

impl Default for ReferencePolicy {
    fn default() -> Self {
        Self {
            scheme: default_ref_scheme(),
            refinement: default_refinement(),
            certify_with: default_certifier(),
            tolerance: default_cert_tol(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_nl")]
    pub nonlinearity: String,
    pub grid_n: usize,
    #[serde(default)]
    pub dealias: bool,
    pub datum: DatumSpec,
    pub t_end: f64,
    /// Step sizes for convergence and efficiency sweeps, strictly decreasing.
    #[serde(default)]
    pub taus: Vec<f64>,
    /// Step size for energy-drift and simulate runs.
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub reference: ReferencePolicy,
    /// Energy/observation sampling stride in steps.
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Window `[t_lo, t_hi]` for drift statistics; defaults to `[0, t_end]`.
    #[serde(default)]
    pub drift_window: Option<(f64, f64)>,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub snapshot_format: SnapshotFormat,
}

fn default_nl() -> String {
    "sine".to_string()
}
fn default_stride() -> usize {
    10
}

/// Number of whole steps of size `tau` in `t_end`.
pub fn whole_steps(t_end: f64, tau: f64) -> Result<usize> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(KgError::Config(format!("step size must be positive, got {tau}")));
    }
    let ratio = t_end / tau;
    let n = ratio.round();
    if (ratio - n).abs() > STEP_COUNT_TOL * n.max(1.0) {
        return Err(KgError::Config(format!(
            "t_end = {t_end} is not a whole number of steps of {tau}"
        )));
    }
    Ok(n as usize)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| KgError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KgError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity> {
        Nonlinearity::by_name(&self.nonlinearity)
            .map_err(|e| KgError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_n)
            .map(|g| g.with_dealiasing(self.dealias))
            .map_err(|e| KgError::Config(e.to_string()))
    }

    pub fn initial_state(&self) -> Result<StateU> {
        self.datum
            .build(&self.grid()?)
            .map_err(|e| KgError::Config(e.to_string()))
    }

    /// Replaces the rough datum's seed; soliton data have none.
    pub fn override_seed(&mut self, seed: u64) {
        if let DatumSpec::Rough(r) = &mut self.datum {
            r.seed = seed;
        }
    }

    pub fn step_size(&self) -> Result<f64> {
        self.h
            .ok_or_else(|| KgError::Config(format!("{} needs a step size h", self.kind.name())))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(KgError::Config(m));
        if self.schemes.is_empty() {
            return bad("no schemes listed".into());
        }
        self.nonlinearity()?;
        self.grid()?;
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be finite and non-negative, got {}", self.t_end));
        }
        if self.stride == 0 {
            return bad("stride must be at least 1".into());
        }
        match self.kind {
            ExperimentKind::Convergence | ExperimentKind::Efficiency => {
                if self.taus.len() < 2 {
                    return bad("a sweep needs at least two step sizes".into());
                }
                if self.taus.windows(2).any(|w| !(w[1] < w[0])) {
                    return bad("step sizes must be strictly decreasing".into());
                }
                for &tau in &self.taus {
                    whole_steps(self.t_end, tau)?;
                }
                if self.reference.refinement == 0 {
                    return bad("reference refinement must be at least 1".into());
                }
            }
            ExperimentKind::EnergyDrift | ExperimentKind::Simulate => {
                let h = self.step_size()?;
                whole_steps(self.t_end, h)?;
                for &t in &self.snapshot_times {
                    let n = whole_steps(t, h)?;
                    if t > self.t_end || (n == 0 && t != 0.0) {
                        return bad(format!("snapshot time {t} outside [0, t_end]"));
                    }
                }
            }
        }
        if let Some((lo, hi)) = self.drift_window {
            if !(lo <= hi) {
                return bad(format!("drift window [{lo}, {hi}] is empty"));
            }
        }
        Ok(())
    }
}
