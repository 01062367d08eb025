//! Radial positive ground states of `-Δu + ωu = u^p + u^{(d+2)/(d-2)}` on `R^d`,
//! computed by shooting, together with numerical checks of the functional
//! identities, the critical rescaling, decay estimates, radial nondegeneracy
//! and the Pucci–Serrin uniqueness condition.

pub mod asymptotics;
pub mod cache;
pub mod cli;
pub mod domain;
pub mod error;
pub mod radial_ode;
pub mod pucci_serrin;
pub mod rescale;
pub mod spectral;

pub use error::{Error, Result};
