//! The one-step integrators LRI1/LRI2, their symmetric two-step
//! counterparts sLRI1/sLRI2, and the generic symmetrization of any
//! one-step exponential integrator `U ↦ e^{τL}U + Ψ_τ(U)`:
//!
//! ```text
//! U^{n+1} = e^{2τL} U^{n-1} + Ψ_τ(U^n) - e^{2τL} Ψ_{-τ}(U^n)
//! U^1     = e^{τL} U^0 + Ψ_τ(U^0)
//! ```

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::grid::{Grid, SpectralField, StateU};
use crate::nonlinearity::{nonlinear_terms, Nonlinearity};
use crate::propagators::{apply_matrices, ModeMatrix, PropagatorTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Lri1,
    Slri1,
    Lri2,
    Slri2,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Lri1, Scheme::Slri1, Scheme::Lri2, Scheme::Slri2];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Lri1 => "lri1",
            Scheme::Slri1 => "slri1",
            Scheme::Lri2 => "lri2",
            Scheme::Slri2 => "slri2",
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, Scheme::Slri1 | Scheme::Slri2)
    }

    /// Second-order schemes need `H(U)` as well as `F(U)`.
    pub fn uses_h(self) -> bool {
        matches!(self, Scheme::Lri2 | Scheme::Slri2)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = KgError;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| KgError::UnknownName {
                kind: "scheme",
                name: s.to_string(),
            })
    }
}

/// `(U^{n-1}, U^n)` for the two-step schemes.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStepState {
    pub prev: StateU,
    pub curr: StateU,
    pub step_index: usize,
    pub tau: f64,
}

impl TwoStepState {
    /// Swaps the window and flips the sign of τ, so stepping runs backward.
    pub fn reversed(&self) -> Self {
        Self {
            prev: self.curr.clone(),
            curr: self.prev.clone(),
            step_index: self.step_index,
            tau: -self.tau,
        }
    }
}

fn check(state: &StateU, table: &PropagatorTable) -> Result<()> {
    state.check_grid(table.grid())
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `e^{τL}(U + τF(U))`, plus `S₂(τ)H(U)` when `filter` is given.
fn one_step(
    state: &StateU,
    table: &PropagatorTable,
    nl: &Nonlinearity,
    filter: Option<&[ModeMatrix]>,
) -> StateU {
    let tau = table.tau();
    let terms = nonlinear_terms(state, nl, filter.is_some());
    let grid = state.grid();
    let mut u = SpectralField::zeros(grid);
    let mut v = SpectralField::zeros(grid);
    let (uc, vc, fc) = (state.u.coeffs(), state.v.coeffs(), terms.f_u.coeffs());
    for i in 0..uc.len() {
        let (mut a, mut b) = table.exp[i].apply(uc[i], vc[i] + fc[i] * tau);
        if let (Some(s), Some(g)) = (filter, terms.fprime_v.as_ref()) {
            let (c, d) = s[i].apply(-fc[i], g.coeffs()[i]);
            a += c;
            b += d;
        }
        u.coeffs_mut()[i] = a;
        v.coeffs_mut()[i] = b;
    }
    StateU { u, v }
}

/// `e^{2τL}U^{n-1} + 2τe^{τL}F(U^n)`, plus `S(τ)H(U^n)` when `filter` is given.
fn two_step(
    ts: &TwoStepState,
    table: &PropagatorTable,
    nl: &Nonlinearity,
    filter: Option<&[ModeMatrix]>,
) -> TwoStepState {
    let tau = table.tau();
    let terms = nonlinear_terms(&ts.curr, nl, filter.is_some());
    let grid = ts.curr.grid();
    let mut u = SpectralField::zeros(grid);
    let mut v = SpectralField::zeros(grid);
    let (pu, pv, fc) = (ts.prev.u.coeffs(), ts.prev.v.coeffs(), terms.f_u.coeffs());
    for i in 0..pu.len() {
        let (mut a, mut b) = table.exp2[i].apply(pu[i], pv[i]);
        let (c, d) = table.exp[i].apply(zero(), fc[i] * (2.0 * tau));
        a += c;
        b += d;
        if let (Some(s), Some(g)) = (filter, terms.fprime_v.as_ref()) {
            let (c, d) = s[i].apply(-fc[i], g.coeffs()[i]);
            a += c;
            b += d;
        }
        u.coeffs_mut()[i] = a;
        v.coeffs_mut()[i] = b;
    }
    TwoStepState {
        prev: ts.curr.clone(),
        curr: StateU { u, v },
        step_index: ts.step_index + 1,
        tau: ts.tau,
    }
}

/// LRI1: `e^{τL}U + τe^{τL}F(U)`. Also the starting step of sLRI1.
pub fn step_lri1(state: &StateU, table: &PropagatorTable, nl: &Nonlinearity) -> Result<StateU> {
    check(state, table)?;
    Ok(one_step(state, table, nl, None))
}

/// LRI2: LRI1 plus `τ²e^{τL}φ₂(-2τL)H(U)`. Also the starting step of sLRI2.
pub fn step_lri2(state: &StateU, table: &PropagatorTable, nl: &Nonlinearity) -> Result<StateU> {
    check(state, table)?;
    Ok(one_step(state, table, nl, Some(&table.phi2_filter)))
}

/// sLRI1: `U^{n+1} = e^{2τL}U^{n-1} + 2τe^{τL}F(U^n)`.
pub fn step_slri1(
    ts: &TwoStepState,
    table: &PropagatorTable,
    nl: &Nonlinearity,
) -> Result<TwoStepState> {
    check(&ts.prev, table)?;
    check(&ts.curr, table)?;
    Ok(two_step(ts, table, nl, None))
}

/// sLRI2: sLRI1 plus `τ²e^{τL}φ(-2τL)H(U^n)`.
pub fn step_slri2(
    ts: &TwoStepState,
    table: &PropagatorTable,
    nl: &Nonlinearity,
) -> Result<TwoStepState> {
    check(&ts.prev, table)?;
    check(&ts.curr, table)?;
    Ok(two_step(ts, table, nl, Some(&table.sym_filter)))
}

/// The correction `Ψ_τ` of a one-step integrator `U ↦ e^{τL}U + Ψ_τ(U)`.
/// The step size (of either sign) is taken from the table.
pub trait Correction {
    fn psi(&self, state: &StateU, table: &PropagatorTable, nl: &Nonlinearity) -> StateU;
}

impl<F> Correction for F
where
    F: Fn(&StateU, &PropagatorTable, &Nonlinearity) -> StateU,
{
    fn psi(&self, state: &StateU, table: &PropagatorTable, nl: &Nonlinearity) -> StateU {
        self(state, table, nl)
    }
}

/// `Ψ_τ(U) = τe^{τL}F(U)`, the Lie splitting correction.
#[derive(Clone, Copy, Debug, Default)]
pub struct LieCorrection;

impl Correction for LieCorrection {
    fn psi(&self, state: &StateU, table: &PropagatorTable, nl: &Nonlinearity) -> StateU {
        let terms = nonlinear_terms(state, nl, false);
        let f = StateU {
            u: SpectralField::zeros(state.grid()),
            v: terms.f_u.scaled(table.tau()),
        };
        apply_matrices(&table.exp, &f)
    }
}

/// `Ψ_τ(U) = τe^{τL}F(U) + τ²e^{τL}φ₂(-2τL)H(U)`, the low-regularity
/// corrected Lie splitting.
#[derive(Clone, Copy, Debug, Default)]
pub struct CorrectedLieCorrection;

impl Correction for CorrectedLieCorrection {
    fn psi(&self, state: &StateU, table: &PropagatorTable, nl: &Nonlinearity) -> StateU {
        let terms = nonlinear_terms(state, nl, true);
        let f = StateU {
            u: SpectralField::zeros(state.grid()),
            v: terms.f_u.scaled(table.tau()),
        };
        let h = StateU {
            u: terms.f_u.scaled(-1.0),
            v: terms.fprime_v.expect("requested"),
        };
        add(
            &apply_matrices(&table.exp, &f),
            &apply_matrices(&table.phi2_filter, &h),
        )
    }
}

fn add(a: &StateU, b: &StateU) -> StateU {
    combine(a, b, 1.0)
}

fn combine(a: &StateU, b: &StateU, sb: f64) -> StateU {
    let field = |x: &SpectralField, y: &SpectralField| {
        let c = x
            .coeffs()
            .iter()
            .zip(y.coeffs())
            .map(|(p, q)| p + q * sb)
            .collect();
        SpectralField::from_coeffs(x.grid(), c).expect("same grid")
    };
    StateU {
        u: field(&a.u, &b.u),
        v: field(&a.v, &b.v),
    }
}

/// A one-step exponential integrator given by its correction.
#[derive(Clone, Debug)]
pub struct OneStepScheme<C> {
    pub correction: C,
}

impl<C: Correction> OneStepScheme<C> {
    pub fn new(correction: C) -> Self {
        Self { correction }
    }

    pub fn step(&self, state: &StateU, table: &PropagatorTable, nl: &Nonlinearity) -> StateU {
        add(
            &apply_matrices(&table.exp, state),
            &self.correction.psi(state, table, nl),
        )
    }
}

/// The symmetric two-step scheme generated from a one-step scheme.
#[derive(Clone, Debug)]
pub struct Symmetrized<C> {
    scheme: OneStepScheme<C>,
    forward: PropagatorTable,
    backward: PropagatorTable,
}

pub fn symmetrize<C: Correction>(
    scheme: OneStepScheme<C>,
    grid: &Grid,
    tau: f64,
) -> Result<Symmetrized<C>> {
    Ok(Symmetrized {
        scheme,
        forward: PropagatorTable::build(grid, tau)?,
        backward: PropagatorTable::build(grid, -tau)?,
    })
}

impl<C: Correction> Symmetrized<C> {
    pub fn tau(&self) -> f64 {
        self.forward.tau()
    }

    /// `U^1 = e^{τL}U^0 + Ψ_τ(U^0)`.
    pub fn start(&self, initial: &StateU, nl: &Nonlinearity) -> Result<TwoStepState> {
        check(initial, &self.forward)?;
        Ok(TwoStepState {
            prev: initial.clone(),
            curr: self.scheme.step(initial, &self.forward, nl),
            step_index: 1,
            tau: self.tau(),
        })
    }

    pub fn step(&self, ts: &TwoStepState, nl: &Nonlinearity) -> Result<TwoStepState> {
        check(&ts.prev, &self.forward)?;
        check(&ts.curr, &self.forward)?;
        let c = &self.scheme.correction;
        let psi_fwd = c.psi(&ts.curr, &self.forward, nl);
        let psi_bwd = c.psi(&ts.curr, &self.backward, nl);
        let propagated = apply_matrices(&self.forward.exp2, &combine(&ts.prev, &psi_bwd, -1.0));
        Ok(TwoStepState {
            prev: ts.curr.clone(),
            curr: add(&propagated, &psi_fwd),
            step_index: ts.step_index + 1,
            tau: ts.tau,
        })
    }
}

#[derive(Clone, Debug)]
enum Window {
    Single(StateU),
    Pair(TwoStepState),
}

/// Time loop for one scheme at a fixed step size.
#[derive(Clone, Debug)]
pub struct Stepper {
    scheme: Scheme,
    table: PropagatorTable,
    nl: Nonlinearity,
    window: Window,
    steps: usize,
}

impl Stepper {
    pub fn new(scheme: Scheme, initial: StateU, tau: f64, nl: Nonlinearity) -> Result<Self> {
        let table = PropagatorTable::build(initial.grid(), tau)?;
        Ok(Self {
            scheme,
            table,
            nl,
            window: Window::Single(initial),
            steps: 0,
        })
    }

    /// Resumes a two-step scheme from an explicit window.
    pub fn from_window(scheme: Scheme, ts: TwoStepState, nl: Nonlinearity) -> Result<Self> {
        if !scheme.is_symmetric() {
            return Err(KgError::Parameter(format!(
                "{scheme} is a one-step scheme and has no two-step window"
            )));
        }
        let table = PropagatorTable::build(ts.curr.grid(), ts.tau)?;
        let steps = ts.step_index;
        Ok(Self {
            scheme,
            table,
            nl,
            window: Window::Pair(ts),
            steps,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn tau(&self) -> f64 {
        self.table.tau()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.table.tau()
    }

    pub fn state(&self) -> &StateU {
        match &self.window {
            Window::Single(s) => s,
            Window::Pair(ts) => &ts.curr,
        }
    }

    pub fn window(&self) -> Option<&TwoStepState> {
        match &self.window {
            Window::Pair(ts) => Some(ts),
            Window::Single(_) => None,
        }
    }

    pub fn into_state(self) -> StateU {
        match self.window {
            Window::Single(s) => s,
            Window::Pair(ts) => ts.curr,
        }
    }

    pub fn step(&mut self) -> Result<()> {
        let (table, nl) = (&self.table, &self.nl);
        let next = match (&self.window, self.scheme) {
            (Window::Single(s), Scheme::Lri1) => Window::Single(one_step(s, table, nl, None)),
            (Window::Single(s), Scheme::Lri2) => {
                Window::Single(one_step(s, table, nl, Some(&table.phi2_filter)))
            }
            (Window::Single(s), Scheme::Slri1 | Scheme::Slri2) => {
                let filter = self.scheme.uses_h().then_some(&table.phi2_filter[..]);
                Window::Pair(TwoStepState {
                    prev: s.clone(),
                    curr: one_step(s, table, nl, filter),
                    step_index: 1,
                    tau: table.tau(),
                })
            }
            (Window::Pair(ts), Scheme::Slri1) => Window::Pair(two_step(ts, table, nl, None)),
            (Window::Pair(ts), Scheme::Slri2) => {
                Window::Pair(two_step(ts, table, nl, Some(&table.sym_filter)))
            }
            (Window::Pair(_), _) => unreachable!("one-step schemes never hold a pair"),
        };
        self.steps += 1;
        self.window = next;
        if !self.state().is_finite() {
            return Err(KgError::BlowUp { step: self.steps });
        }
        Ok(())
    }
}

/// Runs `n_steps` steps. `observe(step, time, state)` is called at step 0,
/// every `stride` steps, and after the final step.
pub fn evolve(
    initial: &StateU,
    scheme: Scheme,
    tau: f64,
    n_steps: usize,
    nl: &Nonlinearity,
    stride: usize,
    mut observe: impl FnMut(usize, f64, &StateU),
) -> Result<StateU> {
    let stride = stride.max(1);
    let mut stepper = Stepper::new(scheme, initial.clone(), tau, *nl)?;
    observe(0, 0.0, stepper.state());
    for _ in 0..n_steps {
        stepper.step()?;
        let n = stepper.steps();
        if n % stride == 0 || n == n_steps {
            observe(n, stepper.time(), stepper.state());
        }
    }
    Ok(stepper.into_state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{state_norm, to_physical, to_spectral};
    use crate::propagators::Propagator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth_state(g: &Grid) -> StateU {
        let u: Vec<f64> = g
            .points()
            .iter()
            .map(|x| 0.8 * x.cos() + 0.3 * (2.0 * x).sin())
            .collect();
        let v: Vec<f64> = g.points().iter().map(|x| 0.5 * (3.0 * x).cos() - 0.1).collect();
        StateU::from_physical(g, &u, &v).unwrap()
    }

    fn random_state(g: &Grid, rng: &mut ChaCha8Rng) -> StateU {
        let mut draw = || -> Vec<f64> {
            (0..g.num_points()).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let (u, v) = (draw(), draw());
        StateU::from_physical(g, &u, &v).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("rk4".parse::<Scheme>().is_err());
    }

    #[test]
    fn linear_problem_is_propagated_exactly() {
        let g = Grid::new(16).unwrap();
        let s = smooth_state(&g);
        let tau = 0.05;
        let table = PropagatorTable::build(&g, tau).unwrap();
        let nl = Nonlinearity::LINEAR;
        let exact = table.apply(Propagator::Exp, &s).unwrap();
        assert!(step_lri1(&s, &table, &nl).unwrap().max_abs_diff(&exact) < 1e-15);
        assert!(step_lri2(&s, &table, &nl).unwrap().max_abs_diff(&exact) < 1e-15);

        let ts = TwoStepState {
            prev: s.clone(),
            curr: exact.clone(),
            step_index: 1,
            tau,
        };
        let e2 = table.apply(Propagator::Exp2, &s).unwrap();
        assert!(step_slri1(&ts, &table, &nl).unwrap().curr.max_abs_diff(&e2) < 1e-15);
        assert!(step_slri2(&ts, &table, &nl).unwrap().curr.max_abs_diff(&e2) < 1e-15);

        let n = 40;
        let far = PropagatorTable::build(&g, n as f64 * tau).unwrap();
        let target = far.apply(Propagator::Exp, &s).unwrap();
        for scheme in Scheme::ALL {
            let out = evolve(&s, scheme, tau, n, &nl, 1, |_, _, _| {}).unwrap();
            assert!(out.max_abs_diff(&target) < 1e-11, "{scheme}");
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let g = Grid::new(16).unwrap();
        let s = smooth_state(&g);
        let table = PropagatorTable::build(&g, 0.0).unwrap();
        for nl in [Nonlinearity::SINE, Nonlinearity::CUBIC] {
            assert_eq!(step_lri1(&s, &table, &nl).unwrap(), s);
            assert_eq!(step_lri2(&s, &table, &nl).unwrap(), s);
        }
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let table = PropagatorTable::build(&Grid::new(16).unwrap(), 0.1).unwrap();
        let s = StateU::zeros(&Grid::new(8).unwrap());
        assert!(matches!(
            step_lri1(&s, &table, &Nonlinearity::SINE),
            Err(KgError::GridMismatch { .. })
        ));
        let ts = TwoStepState {
            prev: s.clone(),
            curr: s,
            step_index: 1,
            tau: 0.1,
        };
        assert!(step_slri2(&ts, &table, &Nonlinearity::SINE).is_err());
    }

    #[test]
    fn slri1_reversal_identity() {
        let g = Grid::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let nl = Nonlinearity::SINE;
        for tau in [0.1, -0.1, 0.01, -0.01] {
            let fwd = PropagatorTable::build(&g, tau).unwrap();
            let bwd = PropagatorTable::build(&g, -tau).unwrap();
            let ts = TwoStepState {
                prev: random_state(&g, &mut rng),
                curr: random_state(&g, &mut rng),
                step_index: 1,
                tau,
            };
            let next = step_slri1(&ts, &fwd, &nl).unwrap().curr;
            // U^{n-1} = e^{-2τL}U^{n+1} - 2τe^{-τL}F(U^n)
            let f = crate::nonlinearity::eval_f(&ts.curr, &nl);
            let back = combine(
                &bwd.apply(Propagator::Exp2, &next).unwrap(),
                &bwd.apply(Propagator::Exp, &f).unwrap(),
                -2.0 * tau,
            );
            assert!(back.max_abs_diff(&ts.prev) < 1e-12);
        }
    }

    #[test]
    fn reversibility_of_two_step_schemes() {
        let g = Grid::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let nl = Nonlinearity::SINE;
        for (scheme, tau) in [(Scheme::Slri1, 0.1), (Scheme::Slri2, -0.01), (Scheme::Slri2, 0.1)] {
            let fwd = PropagatorTable::build(&g, tau).unwrap();
            let bwd = PropagatorTable::build(&g, -tau).unwrap();
            let ts = TwoStepState {
                prev: random_state(&g, &mut rng),
                curr: random_state(&g, &mut rng),
                step_index: 3,
                tau,
            };
            let step = |t: &TwoStepState, table: &PropagatorTable| match scheme {
                Scheme::Slri1 => step_slri1(t, table, &nl).unwrap(),
                _ => step_slri2(t, table, &nl).unwrap(),
            };
            let next = step(&ts, &fwd);
            let back = step(&next.reversed(), &bwd);
            assert!(back.curr.max_abs_diff(&ts.prev) < 1e-12);
        }
    }

    #[test]
    fn symmetrized_lie_is_slri1() {
        let g = Grid::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let nl = Nonlinearity::SINE;
        let tau = 0.07;
        let table = PropagatorTable::build(&g, tau).unwrap();
        let sym = symmetrize(OneStepScheme::new(LieCorrection), &g, tau).unwrap();
        let sym2 = symmetrize(OneStepScheme::new(CorrectedLieCorrection), &g, tau).unwrap();
        for _ in 0..10 {
            let ts = TwoStepState {
                prev: random_state(&g, &mut rng),
                curr: random_state(&g, &mut rng),
                step_index: 1,
                tau,
            };
            let a = sym.step(&ts, &nl).unwrap().curr;
            let b = step_slri1(&ts, &table, &nl).unwrap().curr;
            assert!(a.max_abs_diff(&b) < 1e-12);
            let a = sym2.step(&ts, &nl).unwrap().curr;
            let b = step_slri2(&ts, &table, &nl).unwrap().curr;
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
        let u0 = random_state(&g, &mut rng);
        let start = sym.start(&u0, &nl).unwrap();
        assert!(start.curr.max_abs_diff(&step_lri1(&u0, &table, &nl).unwrap()) < 1e-14);
        let start = sym2.start(&u0, &nl).unwrap();
        assert!(start.curr.max_abs_diff(&step_lri2(&u0, &table, &nl).unwrap()) < 1e-14);
    }

    #[test]
    fn symmetrized_zero_correction_is_pure_propagation() {
        let g = Grid::new(8).unwrap();
        let none = |s: &StateU, _: &PropagatorTable, _: &Nonlinearity| StateU::zeros(s.grid());
        let sym = symmetrize(OneStepScheme::new(none), &g, 0.2).unwrap();
        let table = PropagatorTable::build(&g, 0.2).unwrap();
        let s = smooth_state(&g);
        let ts = TwoStepState {
            prev: s.clone(),
            curr: smooth_state(&g).scaled(2.0),
            step_index: 1,
            tau: 0.2,
        };
        let out = sym.step(&ts, &Nonlinearity::SINE).unwrap();
        let e2 = table.apply(Propagator::Exp2, &s).unwrap();
        assert!(out.curr.max_abs_diff(&e2) < 1e-15);
    }

    #[test]
    fn single_step_of_symmetric_scheme_is_its_starting_rule() {
        let g = Grid::new(16).unwrap();
        let s = smooth_state(&g);
        let table = PropagatorTable::build(&g, 0.1).unwrap();
        let nl = Nonlinearity::SINE;
        let one = evolve(&s, Scheme::Slri1, 0.1, 1, &nl, 1, |_, _, _| {}).unwrap();
        assert_eq!(one, step_lri1(&s, &table, &nl).unwrap());
        let one = evolve(&s, Scheme::Slri2, 0.1, 1, &nl, 1, |_, _, _| {}).unwrap();
        assert_eq!(one, step_lri2(&s, &table, &nl).unwrap());
    }

    #[test]
    fn backward_run_recovers_initial_state() {
        let g = Grid::new(16).unwrap();
        let s = smooth_state(&g);
        let nl = Nonlinearity::SINE;
        let n = 50;
        for scheme in [Scheme::Slri1, Scheme::Slri2] {
            let mut fwd = Stepper::new(scheme, s.clone(), 0.02, nl).unwrap();
            for _ in 0..n {
                fwd.step().unwrap();
            }
            let window = fwd.window().unwrap().reversed();
            let mut bwd = Stepper::from_window(scheme, window, nl).unwrap();
            for _ in 0..n - 1 {
                bwd.step().unwrap();
            }
            assert!(bwd.state().max_abs_diff(&s) < 1e-9, "{scheme}");
        }
        let one = Stepper::new(Scheme::Lri1, s.clone(), 0.1, nl).unwrap();
        assert!(Stepper::from_window(
            Scheme::Lri1,
            TwoStepState {
                prev: s.clone(),
                curr: s,
                step_index: 1,
                tau: 0.1
            },
            nl
        )
        .is_err());
        drop(one);
    }

    #[test]
    fn observer_stride() {
        let g = Grid::new(8).unwrap();
        let mut seen = Vec::new();
        evolve(
            &smooth_state(&g),
            Scheme::Slri2,
            0.1,
            25,
            &Nonlinearity::SINE,
            10,
            |n, t, _| seen.push((n, t)),
        )
        .unwrap();
        let steps: Vec<usize> = seen.iter().map(|p| p.0).collect();
        assert_eq!(steps, vec![0, 10, 20, 25]);
        assert!((seen[3].1 - 2.5).abs() < 1e-15);
    }

    #[test]
    fn blow_up_is_reported_with_step() {
        let g = Grid::new(8).unwrap();
        let u: Vec<f64> = g.points().iter().map(|x| 3.0 + x.cos()).collect();
        let s = StateU::from_physical(&g, &u, &vec![0.0; 16]).unwrap();
        let err = evolve(&s, Scheme::Lri1, 0.5, 200, &Nonlinearity::CUBIC, 1, |_, _, _| {})
            .unwrap_err();
        assert!(matches!(err, KgError::BlowUp { step } if step > 1 && step < 200));
    }

    #[test]
    fn consistency_with_the_vector_field() {
        // (step(U) - U)/τ → LU + F(U)
        let g = Grid::new(8).unwrap();
        let s = smooth_state(&g);
        let nl = Nonlinearity::SINE;
        let f = crate::nonlinearity::eval_f(&s, &nl);
        let lu = StateU {
            u: s.v.clone(),
            v: SpectralField::from_modes(&g, |l| -s.u.coeff(l) * (l * l) as f64),
        };
        let rhs = add(&lu, &f);
        let scale = rhs.max_abs();
        for scheme in Scheme::ALL {
            let diff = |tau: f64| {
                let one = evolve(&s, scheme, tau, 1, &nl, 1, |_, _, _| {}).unwrap();
                combine(&one, &s, -1.0).scaled(1.0 / tau)
            };
            let (d6, d7) = (diff(1e-6), diff(1e-7));
            assert!(d6.max_abs_diff(&rhs) < 1e-4 * scale, "{scheme}");
            // Richardson: error shrinks by ~10 with τ
            let e6 = d6.max_abs_diff(&rhs);
            let e7 = d7.max_abs_diff(&rhs);
            assert!(e7 < 0.5 * e6 || e7 < 1e-8 * scale, "{scheme}: {e6} {e7}");
        }
    }

    #[test]
    fn linear_energy_is_invariant_under_group() {
        let g = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let s = random_state(&g, &mut rng);
        for t in [0.3, -1.7, 12.5] {
            let table = PropagatorTable::build(&g, t).unwrap();
            let out = table.apply(Propagator::Exp, &s).unwrap();
            for alpha in [1.0, 1.5, 2.0] {
                let a = state_norm(&s, alpha, true);
                let b = state_norm(&out, alpha, true);
                assert!((a - b).abs() <= 1e-12 * a);
            }
        }
        // real-valued output survives the full loop
        let out = evolve(&s, Scheme::Slri2, 0.05, 20, &Nonlinearity::SINE, 1, |_, _, _| {})
            .unwrap();
        assert!(to_physical(&out.u).is_ok());
        let _ = to_spectral(&g, &to_physical(&out.v).unwrap()).unwrap();
    }
}
