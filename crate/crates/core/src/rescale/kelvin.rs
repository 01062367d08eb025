use crate::domain::profile::{CoreModel, RadialProfile, TailModel};
use crate::error::{Error, Result};

/// `K[u](r) = r^{-(d-2)} u(1/r)`, sampled on the inverted grid.
///
/// The image of the tail becomes the core model and the image of the core
/// becomes an algebraic tail `u(0) r^{-(d-2)}`.
pub fn kelvin(u: &RadialProfile, d: u32) -> Result<RadialProfile> {
    if u.dim() != d {
        return Err(Error::InvalidInput(format!("profile dimension {} does not match d = {d}", u.dim())));
    }
    let last = *u.values().last().unwrap_or(&0.0);
    if matches!(u.tail(), TailModel::Zero) && last != 0.0 {
        return Err(Error::IncompleteProfile(format!(
            "profile has no tail model but u(r_N) = {last:e}"
        )));
    }
    let dd = d as f64;
    let grid = u.grid().inverted();
    let (values, derivs): (Vec<f64>, Vec<f64>) = grid
        .nodes()
        .iter()
        .map(|&rho| {
            let (v, dv) = u.eval(1.0 / rho);
            let pw = rho.powf(-(dd - 2.0));
            (pw * v, -(dd - 2.0) * pw / rho * v - pw / (rho * rho) * dv)
        })
        .collect();
    let tail = match u.core() {
        CoreModel::KelvinImage { tail } => tail.clone(),
        CoreModel::Flat => {
            TailModel::PowerExp { amplitude: u.value_at_origin(), rate: 0.0, power: dd - 2.0 }
        }
    };
    let core = CoreModel::KelvinImage { tail: u.tail().clone() };
    RadialProfile::new(grid, values, derivs, tail, core)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::functionals::talenti_grid;
    use crate::domain::talenti::talenti;

    #[test]
    fn fixed_sphere_and_involution() {
        let w = RadialProfile::talenti(talenti_grid(5).unwrap()).unwrap();
        let k = kelvin(&w, 5).unwrap();
        assert!((k.eval(1.0).0 - talenti(5, 1.0).unwrap()).abs() < 1e-12);
        let kk = kelvin(&k, 5).unwrap();
        for (a, b) in kk.values().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-8 * b.abs().max(1e-300) + 1e-14);
        }
    }

    #[test]
    fn single_profile_isometry() {
        let w = RadialProfile::talenti(talenti_grid(5).unwrap()).unwrap();
        let k = kelvin(&w, 5).unwrap();
        let (a, b) = (w.grad_sq().unwrap(), k.grad_sq().unwrap());
        assert!((a / b - 1.0).abs() < 1e-8, "{a} {b}");
    }
}
