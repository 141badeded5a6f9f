//! Indeterminacy: distinct measures with identical moments.

use lc_jacobi::extensions::compare_moments;
use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let model = LcModel::new(CoefficientModel::power(2.0, 1)?)?;
    println!("s_0..s_6 from the matrix: {:?}", moments(&model, 6, 400)?);

    let cfg = SpectralConfig::default().with_window(-100.0, 100.0);
    for t in [ExtensionParamT::Finite(0.0), ExtensionParamT::Finite(1.0), ExtensionParamT::Infinite] {
        let measure = spectral_measure(&model, t, &cfg)?;
        let worst = compare_moments(&model, &measure, 6, 400)?
            .iter()
            .map(|c| c.relative)
            .fold(0.0, f64::max);
        let smallest: Vec<f64> = measure.nearest_zero(3).iter().map(|a| a.lambda).collect();
        println!("t = {t:>3}: atoms near 0 {smallest:.6?}, worst moment deviation {worst:.1e}");
    }
    Ok(())
}
