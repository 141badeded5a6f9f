//! Eigenvalues and spectral measures of the extensions `J_t`.

use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let model = LcModel::new(CoefficientModel::power(2.0, 1)?)?;
    let cfg = SpectralConfig::default();

    for t in [ExtensionParamT::Finite(0.0), ExtensionParamT::Infinite] {
        let spectrum = eigenvalues(&model, t, &cfg)?;
        println!("t = {t}: {:.8?}", spectrum.eigenvalues);
    }

    let measure = spectral_measure(&model, ExtensionParamT::Finite(0.0), &cfg)?;
    println!("{:>14} {:>14} {:>10} {:>10}", "lambda", "mass", "|D(λ)|", "mass dev");
    for atom in &measure.atoms {
        println!(
            "{:>14.8} {:>14.6e} {:>10.1e} {:>10.1e}",
            atom.lambda, atom.mass, atom.residual, atom.mass_deviation
        );
    }
    let z = c64(0.0, 1.0);
    println!(
        "Σ m/(λ - i) = {:.6}, γ_0(i) = {:.6}",
        measure.stieltjes(z),
        gamma_t(&model, z, ExtensionParamT::Finite(0.0), 1e-10)?
    );

    let mut csv = Vec::new();
    measure.write_csv(&mut csv)?;
    println!("{} bytes of CSV", csv.len());
    Ok(())
}
