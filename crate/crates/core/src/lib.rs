//! Inverse scattering transform for the Korteweg–de Vries equation
//! `q_t - 6 q q_x + q_xxx = 0` with real initial data supported on the half-line.
//!
//! The pipeline runs forward scattering ([`scattering`]), builds the deformed
//! contour and symbol ([`contour`]), solves the Hankel/Fredholm problem
//! ([`hankel`]) and evaluates the trace formula for `q(x, t)` ([`reconstruct`]).
//! [`validate`] turns the classical identities into residual checks and
//! [`pde_ref`] is an independent pseudo-spectral integrator and [`pipeline`]
//! drives all of it from one configuration.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.

pub mod contour;
pub mod error;
pub mod hankel;
pub mod pde_ref;
pub mod pipeline;
pub mod potential;
pub mod quadrature;
pub mod reconstruct;
pub mod scalar;
pub mod scattering;
pub mod validate;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

pub type Potential = potential::Potential<f64>;
pub type GridSpec = potential::GridSpec<f64>;
