//! Fourier pseudospectral solver for the semilinear Klein-Gordon equation
//! `u_tt - u_xx = f(u)` on the 1-D torus, with explicit low-regularity
//! exponential integrators and their symmetric two-step versions.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod initial_data;
pub mod integrators;
pub mod nonlinearity;
pub mod propagators;

pub use error::{KgError, Result};
pub use grid::{Grid, SpectralField, StateU};
pub use integrators::{Scheme, Stepper, TwoStepState};
pub use nonlinearity::Nonlinearity;
pub use propagators::PropagatorTable;
