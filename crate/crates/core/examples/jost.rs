//! Jost solutions `f^±` and the coefficients `σ±`, `τ±` of
//! `p = σ₊ f⁺ + σ₋ f⁻`, `q = τ₊ f⁺ + τ₋ f⁻`.

use lc_jacobi::coefficients::Diagonal;
use lc_jacobi::jost::{modulus_identity, scattering_at};
use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let c = CoefficientModel::power(2.0, 1)?.with_diagonal(Diagonal::ConstantBeta(0.5))?;
    let models = [
        ("A", CoefficientModel::power(2.0, 1)?),
        ("B", CoefficientModel::geometric(2.0)?),
        ("C", c),
    ];
    let z = c64(0.0, 1.0);
    for (name, raw) in models {
        let model = LcModel::new(raw)?;
        let (jost, sc) = scattering_at(&model, z, &JostConfig::default())?;
        let (lhs, rhs) = modulus_identity(&model, &sc, jost.n_start)?;
        println!(
            "{name}: N = {:>6}  W = {:.9}  target {:.9}  σ₊ = {:.8}  σ₋ = {:.8}",
            jost.n_start, jost.wronskian, jost.target, sc.sigma_plus, sc.sigma_minus
        );
        println!(
            "   W_J(σ₊τ₋ - σ₋τ₊) = {:.10}   |σ₊|² - |σ₋|² = {lhs:.9} vs {rhs:.9}",
            sc.determinant()
        );
    }
    Ok(())
}
