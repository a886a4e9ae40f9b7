//! Periodic grid on [-π, π), the Fourier transform pair and Sobolev norms.
//!
//! A field is stored as 2N complex coefficients `û_l` with
//! `u(x) = Σ_l û_l e^{ilx}`, l = -N..N-1. Storage follows FFT order: slot `i`
//! holds mode `i` for `i < N` and mode `i - 2N` otherwise, so the Nyquist
//! mode -N lives in slot N.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{KgError, Result};

/// Relative tolerance for the Hermitian symmetry check in [`to_physical`].
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone)]
pub struct Grid {
    n: usize,
    dealias: bool,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    /// Grid with `2n` points `x_j = jπ/n`, j = -n..n-1.
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(KgError::InvalidGrid(n));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            dealias: false,
            forward: planner.plan_fft_forward(2 * n),
            inverse: planner.plan_fft_inverse(2 * n),
        })
    }

    /// Enables 2/3-rule truncation of pseudospectral nonlinear products.
    pub fn with_dealiasing(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    /// Half the number of points; also the largest |mode|.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        2 * self.n
    }

    pub fn spacing(&self) -> f64 {
        PI / self.n as f64
    }

    /// Coordinate of storage point `k` (k = 0..2N), i.e. `x_{k-N}`.
    pub fn point(&self, k: usize) -> f64 {
        (k as f64 - self.n as f64) * PI / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.num_points()).map(|k| self.point(k)).collect()
    }

    /// Mode number held by storage slot `i`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n {
            i as i64
        } else {
            i as i64 - 2 * self.n as i64
        }
    }

    /// Storage slot of mode `l`, for l in -N..N-1.
    #[inline]
    pub fn slot(&self, l: i64) -> usize {
        debug_assert!(l >= -(self.n as i64) && l < self.n as i64);
        l.rem_euclid(2 * self.n as i64) as usize
    }

    /// Slot of the Hermitian partner (mode -l) of slot `i`.
    #[inline]
    pub fn partner(&self, i: usize) -> usize {
        (2 * self.n - i) % (2 * self.n)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.num_points()).map(move |i| self.mode(i))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_points() {
            return Err(KgError::Dimension {
                expected: self.num_points(),
                got: len,
            });
        }
        Ok(())
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.dealias == other.dealias
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("dealias", &self.dealias)
            .finish()
    }
}

/// Japanese bracket: 1 at the origin, |l| elsewhere.
#[inline]
pub fn bracket(l: i64) -> f64 {
    if l == 0 {
        1.0
    } else {
        l.unsigned_abs() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.num_points()],
        }
    }

    /// Wraps coefficients given in storage order.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        grid.check_len(coeffs.len())?;
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Builds a field from a mode-indexed closure.
    pub fn from_modes(grid: &Grid, f: impl Fn(i64) -> Complex64) -> Self {
        let coeffs = (0..grid.num_points()).map(|i| f(grid.mode(i))).collect();
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, l: i64) -> Complex64 {
        self.coeffs[self.grid.slot(l)]
    }

    pub fn set_coeff(&mut self, l: i64, value: Complex64) {
        let s = self.grid.slot(l);
        self.coeffs[s] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest Hermitian defect |c_l - conj(c_{-l})|, with its mode.
    pub fn hermitian_defect(&self) -> (i64, f64) {
        let mut worst = (0, 0.0);
        for i in 0..self.coeffs.len() {
            let d = (self.coeffs[i] - self.coeffs[self.grid.partner(i)].conj()).norm();
            if d > worst.1 {
                worst = (self.grid.mode(i), d);
            }
        }
        worst
    }

    /// Projects onto the Hermitian (real-function) subspace.
    pub fn symmetrize(&mut self) {
        symmetrize(&self.grid, &mut self.coeffs);
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Zeroes modes with |l| > 2N/3.
    pub fn truncate_two_thirds(&mut self) {
        let cut = (2 * self.grid.n()) as i64 / 3;
        for i in 0..self.coeffs.len() {
            if self.grid.mode(i).abs() > cut {
                self.coeffs[i] = Complex64::new(0.0, 0.0);
            }
        }
    }
}

fn symmetrize(grid: &Grid, c: &mut [Complex64]) {
    let n = grid.n();
    c[0].im = 0.0;
    c[n].im = 0.0;
    for i in 1..n {
        let j = grid.partner(i);
        let avg = (c[i] + c[j].conj()) * 0.5;
        c[i] = avg;
        c[j] = avg.conj();
    }
}

#[inline]
fn parity(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Grid values of a real field. Fails if the spectrum is not Hermitian.
pub fn to_physical(field: &SpectralField) -> Result<Vec<f64>> {
    let scale = field
        .coeffs
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let (mode, defect) = field.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(KgError::SymmetryViolation { mode, defect });
    }
    Ok(to_physical_unchecked(field))
}

pub(crate) fn to_physical_unchecked(field: &SpectralField) -> Vec<f64> {
    let grid = &field.grid;
    let mut buf: Vec<Complex64> = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * parity(i))
        .collect();
    grid.inverse.process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Grid values of two real fields with a single complex transform.
pub(crate) fn to_physical_pair(a: &SpectralField, b: &SpectralField) -> (Vec<f64>, Vec<f64>) {
    let grid = &a.grid;
    let i_unit = Complex64::new(0.0, 1.0);
    let mut buf: Vec<Complex64> = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .enumerate()
        .map(|(i, (x, y))| (x + i_unit * y) * parity(i))
        .collect();
    grid.inverse.process(&mut buf);
    buf.into_iter().map(|z| (z.re, z.im)).unzip()
}

/// Spectral coefficients of real grid values; Hermitian by construction.
pub fn to_spectral(grid: &Grid, values: &[f64]) -> Result<SpectralField> {
    grid.check_len(values.len())?;
    let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    grid.forward.process(&mut buf);
    let inv_m = 1.0 / grid.num_points() as f64;
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= parity(i) * inv_m;
    }
    symmetrize(grid, &mut buf);
    Ok(SpectralField {
        grid: grid.clone(),
        coeffs: buf,
    })
}

/// Spectral coefficients of two real arrays with a single complex transform.
pub(crate) fn to_spectral_pair(
    grid: &Grid,
    a: &[f64],
    b: &[f64],
) -> Result<(SpectralField, SpectralField)> {
    grid.check_len(a.len())?;
    grid.check_len(b.len())?;
    let mut buf: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    grid.forward.process(&mut buf);
    let m = grid.num_points();
    let half_inv_m = 0.5 / m as f64;
    let mut ca = vec![Complex64::new(0.0, 0.0); m];
    let mut cb = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        let z = buf[i];
        let zc = buf[grid.partner(i)].conj();
        let s = parity(i) * half_inv_m;
        ca[i] = (z + zc) * s;
        // (z - zc) / (2i)
        let d = z - zc;
        cb[i] = Complex64::new(d.im, -d.re) * s;
    }
    symmetrize(grid, &mut ca);
    symmetrize(grid, &mut cb);
    Ok((
        SpectralField {
            grid: grid.clone(),
            coeffs: ca,
        },
        SpectralField {
            grid: grid.clone(),
            coeffs: cb,
        },
    ))
}

/// `(Σ_l ⟨l⟩^{2s} |û_l|²)^{1/2}`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    weighted_norm_sq(field, |l| bracket(l).powf(2.0 * s)).sqrt()
}

/// Homogeneous seminorm `(Σ_l |l|^{2s} |û_l|²)^{1/2}`.
pub fn homogeneous_norm(field: &SpectralField, s: f64) -> f64 {
    weighted_norm_sq(field, |l| {
        if l == 0 {
            0.0
        } else {
            (l.unsigned_abs() as f64).powf(2.0 * s)
        }
    })
    .sqrt()
}

fn weighted_norm_sq(field: &SpectralField, weight: impl Fn(i64) -> f64) -> f64 {
    field
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| weight(field.grid.mode(i)) * c.norm_sqr())
        .sum()
}

/// The `d/dx` multiplier `il`. The Nyquist mode has no real derivative
/// on the grid and is mapped to zero along with the mean.
pub fn spectral_derivative(field: &SpectralField) -> SpectralField {
    let n = field.grid.n();
    let coeffs = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == n {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, field.grid.mode(i) as f64)
            }
        })
        .collect();
    SpectralField {
        grid: field.grid.clone(),
        coeffs,
    }
}

/// The pair `U = (u, ∂ₜu)` in spectral form.
#[derive(Clone, Debug, PartialEq)]
pub struct StateU {
    pub u: SpectralField,
    pub v: SpectralField,
}

impl StateU {
    pub fn new(u: SpectralField, v: SpectralField) -> Result<Self> {
        if u.grid != v.grid {
            return Err(KgError::GridMismatch {
                left: u.grid.n(),
                right: v.grid.n(),
            });
        }
        Ok(Self { u, v })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            u: SpectralField::zeros(grid),
            v: SpectralField::zeros(grid),
        }
    }

    /// State from grid values of `u` and `v`.
    pub fn from_physical(grid: &Grid, u: &[f64], v: &[f64]) -> Result<Self> {
        Ok(Self {
            u: to_spectral(grid, u)?,
            v: to_spectral(grid, v)?,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.u.grid
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            u: self.u.scaled(a),
            v: self.v.scaled(a),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.u.max_abs_diff(&other.u).max(self.v.max_abs_diff(&other.v))
    }

    pub fn max_abs(&self) -> f64 {
        self.u
            .coeffs
            .iter()
            .chain(&self.v.coeffs)
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.grid() != grid {
            return Err(KgError::GridMismatch {
                left: self.grid().n(),
                right: grid.n(),
            });
        }
        Ok(())
    }
}

/// `|W|_α` (homogeneous) or `‖W‖_α`: the first component in Ḣ^α or H^α,
/// the second in H^{α-1}.
pub fn state_norm(state: &StateU, alpha: f64, homogeneous: bool) -> f64 {
    let u_sq = if homogeneous {
        homogeneous_norm(&state.u, alpha).powi(2)
    } else {
        sobolev_norm(&state.u, alpha).powi(2)
    };
    (u_sq + sobolev_norm(&state.v, alpha - 1.0).powi(2)).sqrt()
}
