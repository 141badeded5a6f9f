//! Regime classification of a few coefficient models.

use lc_jacobi::coefficients::Diagonal;
use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let models = [
        ("(n+1)^2", CoefficientModel::power(2.0, 1)?),
        ("2^n", CoefficientModel::geometric(2.0)?),
        ("n+1", CoefficientModel::power(1.0, 1)?),
        ("(n+1)^2, beta = 1.5", CoefficientModel::power(2.0, 1)?.with_diagonal(Diagonal::ConstantBeta(1.5))?),
    ];
    for (name, model) in &models {
        let report = classify(model, 1000, 1e-3)?;
        println!(
            "{name:<22} {:?}  sum 1/a_n = {:.6}  beta_inf ~ {:.3}  alpha_inf ~ {:.4}",
            report.classification, report.carleman_sum_partial, report.beta_inf_estimate, report.alpha_inf_estimate
        );
    }

    let a = &models[0].1;
    for n in 1..4 {
        let d = a.derived(n)?;
        println!("n = {n}: k = {:.6}, theta = {:.6}, phi = {:.6}", d.k.unwrap_or(f64::NAN), d.theta.unwrap_or(f64::NAN), d.phi);
    }
    Ok(())
}
