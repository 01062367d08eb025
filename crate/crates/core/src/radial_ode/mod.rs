//! Shooting for the radial ODE `u'' + (d-1)/r u' = ωu - u^p - u^q`.

pub mod census;
pub mod integrator;
pub mod shoot;

pub use census::{ground_state_census, Census, CensusCandidate, MIN_SAMPLES};
pub use integrator::{State, StepControl, Stepper};
pub use shoot::{
    classify, integrate_shot, ode_energy, ode_residual, shoot, shoot_in_bracket, RadialEquation, ShootOptions,
    ShootingResult, ShotClass, ShotOptions, Trajectory,
};
