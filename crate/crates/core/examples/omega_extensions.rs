//! Extensions `J_ω` defined by `s₊(u) = ω s₋(u)`, and their `t` counterparts.

use lc_jacobi::jost::{calibrate_t, gamma_t_at};
use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let model = LcModel::new(CoefficientModel::power(2.0, 1)?)?;
    let jost = JostConfig::default();
    let spectral = SpectralConfig::default().with_window(-10.0, 10.0);
    for w in [c64(1.0, 0.0), c64(0.0, 1.0), c64(-1.0, 0.0)] {
        let omega = ExtensionParamOmega::new(w)?;
        let cal = calibrate_t(&model, omega, c64(0.0, 1.0), &jost)?;
        let z = c64(0.0, 2.0);
        let gap = (gamma_omega(&model, z, omega, &jost)? - gamma_t_at(&model, z, cal.t)?).norm();
        println!("ω = {w}: t* = {} (closed form {}), |γ_ω(2i) - γ_t*(2i)| = {gap:.1e}", cal.t, cal.t_from_spectrum);

        let by_omega = omega_eigenvalues(&model, omega, &spectral, &jost)?;
        let by_t = eigenvalues(&model, cal.t, &spectral)?;
        println!("   J_ω:  {:.8?}\n   J_t*: {:.8?}", by_omega.eigenvalues, by_t.eigenvalues);
    }
    Ok(())
}
