//! Energy, the relative error gauge, order fitting and drift statistics.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::grid::{sobolev_norm, spectral_derivative, to_physical_pair, to_physical_unchecked};
use crate::grid::{SpectralField, StateU};
use crate::nonlinearity::Nonlinearity;

/// Errors at or below this level are treated as exact (round-off only)
/// and left out of order fits.
pub const EXACT_ERR_FLOOR: f64 = 1e-10;

/// `∫ (½|∂ₜu|² + ½|∂ₓu|² + V(u)) dx` by the trapezoidal rule on the grid,
/// which is exact for the grid's trigonometric polynomials.
pub fn energy(state: &StateU, nl: &Nonlinearity) -> f64 {
    let grid = state.grid();
    let du = spectral_derivative(&state.u);
    let (v, ux) = to_physical_pair(&state.v, &du);
    let u = to_physical_unchecked(&state.u);
    let sum: f64 = (0..grid.num_points())
        .map(|j| 0.5 * v[j] * v[j] + 0.5 * ux[j] * ux[j] + (nl.potential)(u[j]))
        .sum();
    grid.spacing() * sum
}

fn diff_norm(a: &SpectralField, b: &SpectralField, s: f64) -> f64 {
    let d = a
        .coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| x - y)
        .collect();
    sobolev_norm(&SpectralField::from_coeffs(a.grid(), d).expect("same grid"), s)
}

/// `‖u - u_ref‖_{H¹}/‖u_ref‖_{H¹} + ‖v - v_ref‖_{L²}/‖v_ref‖_{L²}`.
/// The reference supplies the denominators.
pub fn err_metric(numerical: &StateU, reference: &StateU) -> Result<f64> {
    numerical.check_grid(reference.grid())?;
    let nu = sobolev_norm(&reference.u, 1.0);
    let nv = sobolev_norm(&reference.v, 0.0);
    if nu == 0.0 {
        return Err(KgError::DegenerateReference { component: "H¹ (u)" });
    }
    if nv == 0.0 {
        return Err(KgError::DegenerateReference { component: "L² (v)" });
    }
    Ok(diff_norm(&numerical.u, &reference.u, 1.0) / nu
        + diff_norm(&numerical.v, &reference.v, 0.0) / nv)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub time: f64,
    pub energy: f64,
    /// `(H(t) - H(0))/H(0)`
    pub relative_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub err: f64,
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    /// Least-squares slope of log(err) against log(τ).
    pub slope: f64,
    /// Slopes between consecutive usable rows.
    pub pairwise: Vec<f64>,
    /// Indices of rows left out (exact or non-finite error).
    pub excluded: Vec<usize>,
}

/// Least-squares slope of `(x, y)`.
pub fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub fn fit_order(rows: &[ConvergenceRow]) -> Result<OrderFit> {
    let mut excluded = Vec::new();
    let mut pts = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if !r.err.is_finite() || r.err <= EXACT_ERR_FLOOR {
            if r.err.is_finite() {
                warn!("τ = {}: err {:e} is at round-off level; treating as exact", r.tau, r.err);
            }
            excluded.push(i);
        } else if r.tau > 0.0 {
            pts.push((r.tau.ln(), r.err.ln()));
        } else {
            excluded.push(i);
        }
    }
    if pts.len() < 2 {
        return Err(KgError::TooFewRows(pts.len()));
    }
    let pairwise = pts
        .windows(2)
        .map(|w| (w[0].1 - w[1].1) / (w[0].0 - w[1].0))
        .collect();
    Ok(OrderFit {
        slope: ls_slope(&pts),
        pairwise,
        excluded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSummary {
    pub window: (f64, f64),
    pub max_abs_relative_error: f64,
    /// Least-squares slope of |relative error| against time.
    pub trend: f64,
}

pub fn drift_series(samples: &[EnergySample], window: (f64, f64)) -> Result<DriftSummary> {
    let (lo, hi) = window;
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.time >= lo && s.time <= hi)
        .map(|s| (s.time, s.relative_error.abs()))
        .collect();
    if pts.is_empty() {
        return Err(KgError::EmptyWindow { lo, hi });
    }
    Ok(DriftSummary {
        window,
        max_abs_relative_error: pts.iter().map(|p| p.1).fold(0.0, f64::max),
        trend: if pts.len() > 1 { ls_slope(&pts) } else { 0.0 },
    })
}
