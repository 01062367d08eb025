//! Core types, the Talenti bubble, radial quadrature and the variational functionals.

pub mod functionals;
pub mod grid;
pub mod params;
pub mod profile;
pub mod talenti;

pub use functionals::{
    functionals, lemma45_check, nehari_scale, nehari_scale_from_report, FunctionalReport, WeightedIdentity,
};
pub use grid::RadialGrid;
pub use params::ProblemParams;
pub use profile::{ClosedForm, CoreModel, RadialProfile, TailModel};
pub use talenti::{lambda_w, talenti};
