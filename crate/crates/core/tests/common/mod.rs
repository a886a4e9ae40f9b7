//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use kgsym::{Grid, SpectralField, StateU};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

pub type Mat<const D: usize> = [[f64; D]; D];

fn mat_mul<const D: usize>(a: &Mat<D>, b: &Mat<D>) -> Mat<D> {
    let mut c = [[0.0; D]; D];
    for i in 0..D {
        for k in 0..D {
            for j in 0..D {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn norm_inf<const D: usize>(a: &Mat<D>) -> f64 {
    a.iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^A` by scaling to norm ≤ 1/2, a 30-term power series, and squaring.
pub fn expm<const D: usize>(a: &Mat<D>) -> Mat<D> {
    let mut s = 0;
    while norm_inf(a) / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let scale = 2f64.powi(-s);
    let mut small = *a;
    small.iter_mut().flatten().for_each(|x| *x *= scale);
    let mut sum = [[0.0; D]; D];
    let mut term = [[0.0; D]; D];
    for i in 0..D {
        sum[i][i] = 1.0;
        term[i][i] = 1.0;
    }
    for k in 1..=30 {
        term = mat_mul(&term, &small);
        term.iter_mut().flatten().for_each(|x| *x /= k as f64);
        for i in 0..D {
            for j in 0..D {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

/// Balancing weight: `L_l` conjugated by diag(1, w) is `[[0, k], [-k, 0]]`.
pub fn weight(l: i64) -> f64 {
    if l == 0 {
        1.0
    } else {
        l.unsigned_abs() as f64
    }
}

/// `L_l` in the balanced basis.
pub fn balanced_generator(l: i64) -> Mat<2> {
    let w = weight(l);
    let k2 = (l * l) as f64;
    [[0.0, w], [-k2 / w, 0.0]]
}

/// Brings an implementation matrix `[a11, a12, a21, a22]` to the balanced basis.
pub fn balance(l: i64, m: [f64; 4]) -> Mat<2> {
    let w = weight(l);
    [[m[0], m[1] * w], [m[2] / w, m[3]]]
}

pub fn scaled(a: &Mat<2>, s: f64) -> Mat<2> {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn oracle_exp(l: i64, t: f64) -> Mat<2> {
    expm(&scaled(&balanced_generator(l), t))
}

/// `φ₂(A)` as the top-right block of `exp [[A, I, 0], [0, 0, I], [0, 0, 0]]`.
pub fn oracle_phi2(a: &Mat<2>) -> Mat<2> {
    let mut big = [[0.0; 6]; 6];
    for i in 0..2 {
        for j in 0..2 {
            big[i][j] = a[i][j];
        }
        big[i][i + 2] = 1.0;
        big[i + 2][i + 4] = 1.0;
    }
    let e = expm(&big);
    [[e[0][4], e[0][5]], [e[1][4], e[1][5]]]
}

/// `τ² e^{τL} φ₂(-2τL)` in the balanced basis.
pub fn oracle_phi2_filter(l: i64, tau: f64) -> Mat<2> {
    let a = scaled(&balanced_generator(l), -2.0 * tau);
    scaled(&mat_mul(&oracle_exp(l, tau), &oracle_phi2(&a)), tau * tau)
}

/// `τ² e^{τL} φ(-2τL)` with `φ(A) = φ₂(A) - φ₂(-A)`, balanced basis.
pub fn oracle_sym_filter(l: i64, tau: f64) -> Mat<2> {
    let a = scaled(&balanced_generator(l), -2.0 * tau);
    let p = oracle_phi2(&a);
    let m = oracle_phi2(&scaled(&a, -1.0));
    let phi = [
        [p[0][0] - m[0][0], p[0][1] - m[0][1]],
        [p[1][0] - m[1][0], p[1][1] - m[1][1]],
    ];
    scaled(&mat_mul(&oracle_exp(l, tau), &phi), tau * tau)
}

pub fn max_diff(a: &Mat<2>, b: &Mat<2>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).abs());
        }
    }
    d
}

pub fn max_entry(a: &Mat<2>) -> f64 {
    a.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

/// Semi-discrete system `u' = v`, `v' = u_xx + f(u)` in Fourier
/// coefficients for modes -N..N-1, with f(u) evaluated by direct DFT.
pub struct SpectralOde {
    pub n: usize,
    pub f: fn(f64) -> f64,
}

#[derive(Clone, Debug)]
pub struct OdeState {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl SpectralOde {
    fn modes(&self) -> impl Iterator<Item = i64> {
        let n = self.n as i64;
        -n..n
    }

    fn point(&self, j: usize) -> f64 {
        (j as f64 - self.n as f64) * PI / self.n as f64
    }

    fn physical(&self, c: &[Complex64]) -> Vec<f64> {
        (0..2 * self.n)
            .map(|j| {
                let x = self.point(j);
                self.modes()
                    .zip(c)
                    .map(|(l, a)| (a * Complex64::from_polar(1.0, l as f64 * x)).re)
                    .sum()
            })
            .collect()
    }

    fn spectral(&self, vals: &[f64]) -> Vec<Complex64> {
        let m = 2.0 * self.n as f64;
        self.modes()
            .map(|l| {
                vals.iter()
                    .enumerate()
                    .map(|(j, &y)| y * Complex64::from_polar(1.0, -(l as f64) * self.point(j)))
                    .sum::<Complex64>()
                    / m
            })
            .collect()
    }

    fn rhs(&self, s: &OdeState) -> OdeState {
        let fu: Vec<f64> = self.physical(&s.u).into_iter().map(self.f).collect();
        let fh = self.spectral(&fu);
        let v = self
            .modes()
            .zip(s.u.iter().zip(&fh))
            .map(|(l, (u, f))| -(l * l) as f64 * u + f)
            .collect();
        OdeState { u: s.v.clone(), v }
    }

    fn axpy(s: &OdeState, a: f64, d: &OdeState) -> OdeState {
        let comb = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(p, q)| p + q * a).collect()
        };
        OdeState {
            u: comb(&s.u, &d.u),
            v: comb(&s.v, &d.v),
        }
    }

    /// Classical RK4 over time `t` (either sign) in `substeps` steps.
    pub fn rk4(&self, s0: &OdeState, t: f64, substeps: usize) -> OdeState {
        let dt = t / substeps as f64;
        let mut s = s0.clone();
        for _ in 0..substeps {
            let k1 = self.rhs(&s);
            let k2 = self.rhs(&Self::axpy(&s, dt / 2.0, &k1));
            let k3 = self.rhs(&Self::axpy(&s, dt / 2.0, &k2));
            let k4 = self.rhs(&Self::axpy(&s, dt, &k3));
            let mut next = Self::axpy(&s, dt / 6.0, &k1);
            next = Self::axpy(&next, dt / 3.0, &k2);
            next = Self::axpy(&next, dt / 3.0, &k3);
            s = Self::axpy(&next, dt / 6.0, &k4);
        }
        s
    }

    pub fn from_state(&self, st: &StateU) -> OdeState {
        OdeState {
            u: self.modes().map(|l| st.u.coeff(l)).collect(),
            v: self.modes().map(|l| st.v.coeff(l)).collect(),
        }
    }

    pub fn to_state(&self, grid: &Grid, s: &OdeState) -> StateU {
        let field = |c: &[Complex64]| {
            let mut f = SpectralField::zeros(grid);
            for (l, a) in self.modes().zip(c) {
                f.set_coeff(l, *a);
            }
            f.symmetrize();
            f
        };
        StateU::new(field(&s.u), field(&s.v)).unwrap()
    }
}

/// Largest coefficient-wise distance between two states, in the energy
/// weighting `⟨l⟩|û| + |v̂|`.
pub fn energy_distance(a: &StateU, b: &StateU) -> f64 {
    let g = a.grid();
    g.modes()
        .map(|l| {
            let w = kgsym::grid::bracket(l);
            w * (a.u.coeff(l) - b.u.coeff(l)).norm() + (a.v.coeff(l) - b.v.coeff(l)).norm()
        })
        .fold(0.0, f64::max)
}

/// A smooth two-harmonic state on `grid`.
pub fn smooth_state(grid: &Grid, phase: f64) -> StateU {
    let xs = grid.points();
    let u: Vec<f64> = xs
        .iter()
        .map(|&x| 0.6 * (x + phase).cos() + 0.25 * (2.0 * x).sin() + 0.1)
        .collect();
    let v: Vec<f64> = xs
        .iter()
        .map(|&x| 0.4 * (3.0 * x - phase).sin() - 0.2 * x.cos())
        .collect();
    StateU::from_physical(grid, &u, &v).unwrap()
}

/// Random Hermitian state with coefficients of size ⟨l⟩^{-2} in u and
/// ⟨l⟩^{-1} in v.
pub fn random_state(g: &Grid, rng: &mut impl Rng) -> StateU {
    let mut draw = |p: f64| {
        let mut f = SpectralField::zeros(g);
        for l in g.modes() {
            let w = kgsym::grid::bracket(l).powf(-p);
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            f.set_coeff(l, c * w);
        }
        f.symmetrize();
        f
    };
    let u = draw(2.0);
    let v = draw(1.0);
    StateU::new(u, v).unwrap()
}
