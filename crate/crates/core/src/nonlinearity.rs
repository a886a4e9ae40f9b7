//! Pointwise nonlinearities `f = -V'` and pseudospectral evaluation of
//! `F(U) = (0, f(u))` and `H(U) = (-f(u), f'(u)·∂ₜu)`.

use std::fmt;

use crate::error::{KgError, Result};
use crate::grid::{to_physical_pair, to_physical_unchecked, to_spectral, to_spectral_pair};
use crate::grid::{SpectralField, StateU};

#[derive(Clone, Copy)]
pub struct Nonlinearity {
    pub name: &'static str,
    pub f: fn(f64) -> f64,
    pub fprime: fn(f64) -> f64,
    /// Potential `V` with `f = -V'`.
    pub potential: fn(f64) -> f64,
    /// Whether `f`, `f'`, `f''` are globally bounded, as the error theory assumes.
    pub lipschitz_certified: bool,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("lipschitz_certified", &self.lipschitz_certified)
            .finish()
    }
}

impl PartialEq for Nonlinearity {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

fn zero(_: f64) -> f64 {
    0.0
}

impl Nonlinearity {
    /// Sine-Gordon: `f = sin u`, `V = cos u`.
    pub const SINE: Self = Self {
        name: "sine",
        f: f64::sin,
        fprime: f64::cos,
        potential: f64::cos,
        lipschitz_certified: true,
    };

    /// Focusing cubic `f = u³`; not globally Lipschitz.
    pub const CUBIC: Self = Self {
        name: "cubic",
        f: |u| u * u * u,
        fprime: |u| 3.0 * u * u,
        potential: |u| -0.25 * u * u * u * u,
        lipschitz_certified: false,
    };

    /// `f ≡ 0` and `f' ≡ 0`: the linear wave equation.
    pub const LINEAR: Self = Self {
        name: "linear",
        f: zero,
        fprime: zero,
        potential: zero,
        lipschitz_certified: true,
    };

    pub const ALL: [Self; 3] = [Self::SINE, Self::CUBIC, Self::LINEAR];

    pub fn by_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|nl| nl.name == name)
            .ok_or_else(|| KgError::UnknownName {
                kind: "nonlinearity",
                name: name.to_string(),
            })
    }
}

/// Spectra of `f(u)` and, when requested, `f'(u)·v`.
pub(crate) struct NonlinearTerms {
    pub f_u: SpectralField,
    pub fprime_v: Option<SpectralField>,
}

pub(crate) fn nonlinear_terms(state: &StateU, nl: &Nonlinearity, with_h: bool) -> NonlinearTerms {
    let grid = state.grid();
    let (mut f_u, mut fprime_v) = if with_h {
        let (u, v) = to_physical_pair(&state.u, &state.v);
        let fu: Vec<f64> = u.iter().map(|&x| (nl.f)(x)).collect();
        let gv: Vec<f64> = u
            .iter()
            .zip(&v)
            .map(|(&x, &y)| (nl.fprime)(x) * y)
            .collect();
        let (a, b) = to_spectral_pair(grid, &fu, &gv).expect("grid-sized buffers");
        (a, Some(b))
    } else {
        let u = to_physical_unchecked(&state.u);
        let fu: Vec<f64> = u.iter().map(|&x| (nl.f)(x)).collect();
        (to_spectral(grid, &fu).expect("grid-sized buffer"), None)
    };
    if grid.dealias() {
        f_u.truncate_two_thirds();
        if let Some(g) = fprime_v.as_mut() {
            g.truncate_two_thirds();
        }
    }
    NonlinearTerms { f_u, fprime_v }
}

/// `F(U) = (0, f(u))`.
pub fn eval_f(state: &StateU, nl: &Nonlinearity) -> StateU {
    let terms = nonlinear_terms(state, nl, false);
    StateU {
        u: SpectralField::zeros(state.grid()),
        v: terms.f_u,
    }
}

/// `H(U) = (-f(u), f'(u)·v)`.
pub fn eval_h(state: &StateU, nl: &Nonlinearity) -> StateU {
    let terms = nonlinear_terms(state, nl, true);
    StateU {
        u: terms.f_u.scaled(-1.0),
        v: terms.fprime_v.expect("requested"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{to_physical, Grid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn constant_state(g: &Grid, u: f64, v: f64) -> StateU {
        let n = g.num_points();
        StateU::from_physical(g, &vec![u; n], &vec![v; n]).unwrap()
    }

    #[test]
    fn derivatives_agree_with_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = 1e-5;
        for nl in Nonlinearity::ALL {
            for _ in 0..100 {
                let x: f64 = rng.gen_range(-3.0..3.0);
                let fd = ((nl.f)(x + h) - (nl.f)(x - h)) / (2.0 * h);
                assert!(((nl.fprime)(x) - fd).abs() <= 1e-6, "{} f'", nl.name);
                let dv = ((nl.potential)(x + h) - (nl.potential)(x - h)) / (2.0 * h);
                assert!(((nl.f)(x) + dv).abs() <= 1e-6, "{} -V'", nl.name);
            }
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(Nonlinearity::by_name("sine").unwrap(), Nonlinearity::SINE);
        assert!(!Nonlinearity::by_name("cubic").unwrap().lipschitz_certified);
        assert!(matches!(
            Nonlinearity::by_name("quartic"),
            Err(KgError::UnknownName { .. })
        ));
    }

    #[test]
    fn eval_f_examples() {
        let g = Grid::new(8).unwrap();
        let out = eval_f(&StateU::zeros(&g), &Nonlinearity::SINE);
        assert_eq!(out.max_abs(), 0.0);

        let out = eval_f(&constant_state(&g, FRAC_PI_2, 0.0), &Nonlinearity::SINE);
        assert!(out.u.coeffs().iter().all(|c| c.norm() == 0.0));
        for y in to_physical(&out.v).unwrap() {
            assert!((y - 1.0).abs() < 1e-15);
        }

        let u: Vec<f64> = g.points().iter().map(|x| 0.3 * x.cos()).collect();
        let s = StateU::from_physical(&g, &u, &vec![0.0; 16]).unwrap();
        let out = eval_f(&s, &Nonlinearity::SINE);
        for (y, x) in to_physical(&out.v).unwrap().iter().zip(g.points()) {
            assert!((y - (0.3 * x.cos()).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn eval_h_examples() {
        let g = Grid::new(8).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| (3.0 * x).sin() - 0.2).collect();
        let s = StateU::from_physical(&g, &vec![0.0; 16], &v).unwrap();
        let out = eval_h(&s, &Nonlinearity::SINE);
        assert!(out.u.coeffs().iter().all(|c| c.norm() < 1e-16));
        assert!(out.v.max_abs_diff(&s.v) < 1e-15);

        let u: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
        let s = StateU::from_physical(&g, &u, &vec![0.0; 16]).unwrap();
        let out = eval_h(&s, &Nonlinearity::SINE);
        for (y, x) in to_physical(&out.u).unwrap().iter().zip(g.points()) {
            assert!((y + x.cos().sin()).abs() < 1e-15);
        }
        assert!(out.v.coeffs().iter().all(|c| c.norm() < 1e-16));

        assert_eq!(eval_h(&StateU::zeros(&g), &Nonlinearity::CUBIC).max_abs(), 0.0);
    }

    #[test]
    fn outputs_are_hermitian() {
        let g = Grid::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u: Vec<f64> = (0..32).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..32).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let s = StateU::from_physical(&g, &u, &v).unwrap();
        for nl in Nonlinearity::ALL {
            let h = eval_h(&s, &nl);
            assert_eq!(h.u.hermitian_defect().1, 0.0);
            assert_eq!(h.v.hermitian_defect().1, 0.0);
            assert_eq!(eval_f(&s, &nl).v.hermitian_defect().1, 0.0);
        }
    }
}
