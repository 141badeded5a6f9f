//! The identity suite behind `lc-jacobi --command verify`.

use lc_jacobi::cli::{verify_suite, VerifyConfig};
use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let model = LcModel::new(CoefficientModel::geometric(2.0)?)?;
    let checks = verify_suite(&model, &VerifyConfig::default());
    for c in &checks {
        let z = c.z.map(|z| format!("{z}")).unwrap_or_default();
        let param = c.param.clone().unwrap_or_default();
        println!(
            "{:<24} {z:>6} {param:>4} {:>10.2e} < {:<8.0e} {}",
            c.check,
            c.residual,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    println!("{}/{} passed", checks.iter().filter(|c| c.pass).count(), checks.len());
    Ok(())
}
