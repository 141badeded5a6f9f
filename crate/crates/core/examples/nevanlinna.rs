//! The Nevanlinna family `γ_t(z)`, `t ∈ ℝ ∪ {∞}`, and the resolvents of the
//! self-adjoint extensions `J_t`.

use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let model = LcModel::new(CoefficientModel::power(2.0, 1)?)?;
    let ts = [-2.0, -1.0, 0.0, 1.0, 2.0].map(ExtensionParamT::Finite);
    for t in ts.into_iter().chain([ExtensionParamT::Infinite]) {
        let up = gamma_t(&model, c64(0.0, 1.0), t, 1e-10)?;
        let down = gamma_t(&model, c64(0.0, -1.0), t, 1e-10)?;
        println!(
            "t = {t:>3}: γ_t(i) = {up:.10}   |γ_t(-i) - conj γ_t(i)| = {:.1e}",
            (down - up.conj()).norm()
        );
    }

    // R_t(z) e_0 has γ_t(z) as its first entry.
    let z = c64(0.5, 2.0);
    let e0 = [c64(1.0, 0.0)];
    let t = ExtensionParamT::Finite(1.0);
    let r = resolvent_apply(&model, z, t, &e0, 400, 1e-10)?;
    println!("<R_1(z) e_0, e_0> = {:.10}  γ_1(z) = {:.10}", r[0], gamma_t(&model, z, t, 1e-10)?);
    Ok(())
}
