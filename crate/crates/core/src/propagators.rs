//! Per-mode evaluation of the wave group `e^{tL}` and the two φ-filters.
//!
//! On Fourier mode `l` the generator acts on `(û_l, v̂_l)` as the real 2×2
//! block `L_l = [[0, 1], [-l², 0]]`, so every function of `L` is a real
//! 2×2 matrix per mode. With `k = |l|` and `θ = 2τk`:
//!
//! * `φ₂(-2τL_l) = a(θ)·I + 2τ·b(θ)·L_l`, `a = (1-cos θ)/θ²`, `b = (sin θ - θ)/θ³`
//! * `φ(-2τL_l)  = 2τ·c(θ)·L_l`, `c = 2(sin θ - θ)/θ³`
//!
//! Writing the odd parts against `L_l` instead of `L_l/k` makes the zero
//! mode (where `L_0` is nilpotent) the `θ → 0` limit of the same formulas.

use std::ops::Mul;

use crate::error::Result;
use crate::grid::{Grid, SpectralField, StateU};

/// Below this |θ| the filter coefficients use their Taylor series.
pub const SERIES_THRESHOLD: f64 = 0.5;

const SERIES_TERMS: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeMatrix {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl ModeMatrix {
    pub const IDENTITY: Self = Self::new(1.0, 0.0, 0.0, 1.0);
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    /// The generator block `L_l`.
    pub fn generator(l: i64) -> Self {
        let k2 = (l * l) as f64;
        Self::new(0.0, 1.0, -k2, 0.0)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.scale(-1.0))
    }

    #[inline]
    pub fn apply<T>(&self, x: T, y: T) -> (T, T)
    where
        T: Mul<f64, Output = T> + std::ops::Add<Output = T> + Copy,
    {
        (x * self.a11 + y * self.a12, x * self.a21 + y * self.a22)
    }

    pub fn max_abs(&self) -> f64 {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.sub(*o).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }
}

impl Mul for ModeMatrix {
    type Output = ModeMatrix;

    fn mul(self, o: ModeMatrix) -> ModeMatrix {
        ModeMatrix::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

/// `e^{tL_l}`.
pub fn exp_mode(l: i64, t: f64) -> ModeMatrix {
    if l == 0 {
        return ModeMatrix::new(1.0, t, 0.0, 1.0);
    }
    let k = l.unsigned_abs() as f64;
    let (s, c) = (k * t).sin_cos();
    ModeMatrix::new(c, s / k, -k * s, c)
}

// Σ_m (-1)^m θ^{2m} / (2m + offset)!
fn alternating_series(theta: f64, offset: u32) -> f64 {
    let x2 = theta * theta;
    let mut term = 1.0 / (1..=offset).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..SERIES_TERMS {
        let m = m as f64;
        let o = offset as f64;
        term *= -x2 / ((2.0 * m + o - 1.0) * (2.0 * m + o));
        sum += term;
    }
    sum
}

/// `(1 - cos θ)/θ²`
pub fn phi2_even_coeff(theta: f64) -> f64 {
    if theta.abs() < SERIES_THRESHOLD {
        alternating_series(theta, 2)
    } else {
        let h = (0.5 * theta).sin();
        2.0 * h * h / (theta * theta)
    }
}

/// `(sin θ - θ)/θ³`
pub fn phi2_odd_coeff(theta: f64) -> f64 {
    if theta.abs() < SERIES_THRESHOLD {
        -alternating_series(theta, 3)
    } else {
        (theta.sin() - theta) / (theta * theta * theta)
    }
}

/// `φ₂(-2τL_l)`.
pub fn phi2_of_generator(l: i64, tau: f64) -> ModeMatrix {
    let theta = 2.0 * tau * l.unsigned_abs() as f64;
    ModeMatrix::IDENTITY
        .scale(phi2_even_coeff(theta))
        .add(ModeMatrix::generator(l).scale(2.0 * tau * phi2_odd_coeff(theta)))
}

/// `φ(-2τL_l)` with `φ(A) = 2A⁻²(sinh A - A)`.
pub fn phi_of_generator(l: i64, tau: f64) -> ModeMatrix {
    let theta = 2.0 * tau * l.unsigned_abs() as f64;
    ModeMatrix::generator(l).scale(4.0 * tau * phi2_odd_coeff(theta))
}

/// `τ² e^{τL} φ₂(-2τL)` on mode `l`.
pub fn phi2_filter_mode(l: i64, tau: f64) -> ModeMatrix {
    (exp_mode(l, tau) * phi2_of_generator(l, tau)).scale(tau * tau)
}

/// `τ² e^{τL} φ(-2τL)` on mode `l`.
pub fn sym_filter_mode(l: i64, tau: f64) -> ModeMatrix {
    (exp_mode(l, tau) * phi_of_generator(l, tau)).scale(tau * tau)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagator {
    Identity,
    /// `e^{τL}`
    Exp,
    /// `e^{2τL}`
    Exp2,
    /// `e^{-τL}`
    ExpNeg,
    /// `τ² e^{τL} φ₂(-2τL)`
    Phi2Filter,
    /// `τ² e^{τL} φ(-2τL)`
    SymFilter,
}

/// All per-mode operators at one step size, in grid storage order.
#[derive(Clone, Debug)]
pub struct PropagatorTable {
    grid: Grid,
    tau: f64,
    pub(crate) exp: Vec<ModeMatrix>,
    pub(crate) exp2: Vec<ModeMatrix>,
    pub(crate) exp_neg: Vec<ModeMatrix>,
    pub(crate) phi2_filter: Vec<ModeMatrix>,
    pub(crate) sym_filter: Vec<ModeMatrix>,
}

impl PropagatorTable {
    pub fn build(grid: &Grid, tau: f64) -> Result<Self> {
        if tau.is_nan() {
            return Err(crate::error::KgError::Parameter("step size is NaN".into()));
        }
        let per_mode = |f: fn(i64, f64) -> ModeMatrix, t: f64| -> Vec<ModeMatrix> {
            grid.modes().map(|l| f(l, t)).collect()
        };
        Ok(Self {
            grid: grid.clone(),
            tau,
            exp: per_mode(exp_mode, tau),
            exp2: per_mode(exp_mode, 2.0 * tau),
            exp_neg: per_mode(exp_mode, -tau),
            phi2_filter: per_mode(phi2_filter_mode, tau),
            sym_filter: per_mode(sym_filter_mode, tau),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Per-mode matrices of one operator, in storage order.
    pub fn matrices(&self, which: Propagator) -> &[ModeMatrix] {
        match which {
            Propagator::Identity => &[],
            Propagator::Exp => &self.exp,
            Propagator::Exp2 => &self.exp2,
            Propagator::ExpNeg => &self.exp_neg,
            Propagator::Phi2Filter => &self.phi2_filter,
            Propagator::SymFilter => &self.sym_filter,
        }
    }

    pub fn mode_matrix(&self, which: Propagator, l: i64) -> ModeMatrix {
        match which {
            Propagator::Identity => ModeMatrix::IDENTITY,
            _ => self.matrices(which)[self.grid.slot(l)],
        }
    }

    pub fn apply(&self, which: Propagator, state: &StateU) -> Result<StateU> {
        state.check_grid(&self.grid)?;
        if which == Propagator::Identity {
            return Ok(state.clone());
        }
        Ok(apply_matrices(self.matrices(which), state))
    }
}

pub(crate) fn apply_matrices(mats: &[ModeMatrix], state: &StateU) -> StateU {
    let grid = state.grid();
    let mut u = SpectralField::zeros(grid);
    let mut v = SpectralField::zeros(grid);
    let (uc, vc) = (state.u.coeffs(), state.v.coeffs());
    for (i, m) in mats.iter().enumerate() {
        let (a, b) = m.apply(uc[i], vc[i]);
        u.coeffs_mut()[i] = a;
        v.coeffs_mut()[i] = b;
    }
    StateU { u, v }
}
