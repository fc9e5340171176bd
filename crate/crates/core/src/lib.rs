//! Verification toolkit for the period annulus of the quadratic Hamiltonian
//! triangle `H00 = xy(1 - x - y)` under quadratic perturbations.
//!
//! The crate evaluates the Abelian integrals over the ovals of
//! `H = x(y^2 - (x-3)^2)`, their Picard–Fuchs flow, the ratio
//! `w = I2'/I0'`, exact polynomial identities (resultants, Sturm counts),
//! zero counts of the principal displacement function `J(h)`, and direct
//! Poincaré-map simulation of the perturbed vector field.

pub mod acceptance;
pub mod cli;
pub mod cyclicity;
pub mod error;
pub mod geometry;
pub mod ode;
pub mod picard_fuchs;
pub mod polyalg;
pub mod quadrature;
pub mod ratio;
pub mod simulate;

pub use error::{Error, Result};
pub use geometry::{EnergyLevel, OvalExtent};
pub use quadrature::IntegralFrame;
