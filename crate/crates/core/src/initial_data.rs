//! Initial data: seeded random `H^θ × H^{θ-1}` data and the sech soliton.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::grid::{bracket, sobolev_norm, Grid, SpectralField, StateU};

/// Random datum with coefficients `ξ_l ⟨l⟩^{-θ-1/2}` for `u` and
/// `ζ_l ⟨l⟩^{-θ+1/2}` for `v`, normalized in H¹ and L² and then scaled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughDatumSpec {
    pub theta: f64,
    pub seed: u64,
    /// Modes with |l| < max_frequency are populated.
    pub max_frequency: usize,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl RoughDatumSpec {
    pub fn new(theta: f64, seed: u64, max_frequency: usize) -> Self {
        Self {
            theta,
            seed,
            max_frequency,
            scale: 1.0,
        }
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.theta > 0.5) || !self.theta.is_finite() {
            return Err(KgError::Parameter(format!(
                "Sobolev exponent must exceed 1/2, got {}",
                self.theta
            )));
        }
        if self.max_frequency == 0 || self.max_frequency > grid.n() {
            return Err(KgError::Parameter(format!(
                "max_frequency {} outside 1..={}",
                self.max_frequency,
                grid.n()
            )));
        }
        if !self.scale.is_finite() {
            return Err(KgError::Parameter("datum scale is not finite".into()));
        }
        Ok(())
    }
}

/// Unnormalized random profiles `(φ₁, φ₂)`.
///
/// For each l ≥ 0 the generator draws `ξ_l` and `ξ_{-l}` uniform on [0, 1];
/// mode l gets `(ξ_l + iξ_{-l})/√2 · ⟨l⟩^{-p}` and mode -l its conjugate,
/// so the profile is real with |coefficient| ≤ ⟨l⟩^{-p}. The mean mode uses
/// `ξ_0` alone.
pub fn rough_profiles(spec: &RoughDatumSpec, grid: &Grid) -> Result<(SpectralField, SpectralField)> {
    spec.validate(grid)?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut draw = |power: f64| {
        let mut field = SpectralField::zeros(grid);
        for l in 0..spec.max_frequency as i64 {
            let a: f64 = rng.gen();
            let b: f64 = rng.gen();
            let w = bracket(l).powf(-power);
            let c = if l == 0 {
                Complex64::new(a * w, 0.0)
            } else {
                Complex64::new(a, b) * (w / std::f64::consts::SQRT_2)
            };
            field.set_coeff(l, c);
            if l > 0 {
                field.set_coeff(-l, c.conj());
            }
        }
        field
    };
    let phi1 = draw(spec.theta + 0.5);
    let phi2 = draw(spec.theta - 0.5);
    Ok((phi1, phi2))
}

pub fn make_rough(spec: &RoughDatumSpec, grid: &Grid) -> Result<StateU> {
    let (phi1, phi2) = rough_profiles(spec, grid)?;
    let u = phi1.scaled(spec.scale / sobolev_norm(&phi1, 1.0));
    let v = phi2.scaled(spec.scale / sobolev_norm(&phi2, 0.0));
    StateU::new(u, v)
}

/// `u₀ = A√(2a/b) sech(rx)`, `v₀ = cA√(2a/b) r sech(rx) tanh(rx)`,
/// `r = √(a/(a² - c²))`, with amplitude `A` (1/10 by default).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonDatumSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(default = "tenth")]
    pub amplitude: f64,
}

fn tenth() -> f64 {
    0.1
}

impl SolitonDatumSpec {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self {
            a,
            b,
            c,
            amplitude: 0.1,
        }
    }

    pub fn width_parameter(&self) -> Result<f64> {
        let Self { a, b, c, .. } = *self;
        if !(a > 0.0 && b > 0.0 && a * a > c * c) {
            return Err(KgError::Parameter(format!(
                "soliton needs a > 0, b > 0, a² > c²; got a={a}, b={b}, c={c}"
            )));
        }
        Ok((a / (a * a - c * c)).sqrt())
    }
}

pub fn make_soliton(spec: &SolitonDatumSpec, grid: &Grid) -> Result<StateU> {
    let r = spec.width_parameter()?;
    let peak = spec.amplitude * (2.0 * spec.a / spec.b).sqrt();
    let xs = grid.points();
    let u: Vec<f64> = xs.iter().map(|&x| peak / (r * x).cosh()).collect();
    let v: Vec<f64> = xs
        .iter()
        .map(|&x| spec.c * peak * r * (r * x).tanh() / (r * x).cosh())
        .collect();
    StateU::from_physical(grid, &u, &v)
}
