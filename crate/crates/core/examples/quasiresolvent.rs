//! The quasiresolvent `𝓡(z)`: a right inverse of `J_max - z` on ℓ².

use lc_jacobi::quasiresolvent::lemma_residuals;
use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let model = LcModel::new(CoefficientModel::power(2.0, 1)?)?;
    let z = c64(1.0, 1.0);
    let r = QuasiResolvent::new(&model, z, 400)?;

    let h: Vec<Complex64> = (0..40).map(|n| c64(1.0 / (n + 1) as f64, (-1f64).powi(n))).collect();
    let u = r.apply(&h, Support::Finite)?;
    println!("(𝓡h)_0..3 = {:.6} {:.6} {:.6}", u[0], u[1], u[2]);
    println!("|(J - z) 𝓡h - h| on interior indices: {:.2e}", r.residual(&h)?);

    let hs = r.hs_report(1e-3);
    println!("Hilbert-Schmidt norm at N = 400: {:.8} (N/2: {:.8})", hs.value, hs.half_value);

    // A vector of the form Γ p(z) + 𝓡h: Γ is read off from u and (J - z)u.
    let table = eval_pq(&model, z, 400)?;
    let gamma = c64(0.3, -2.0);
    let v: Vec<Complex64> = table.p.iter().zip(&u).map(|(p, u)| gamma * p + u).collect();
    println!("recovered Γ = {:.8}", gamma_coefficient(&model, &v, z, Support::SquareSummable)?);

    let (rp, rq) = lemma_residuals(&model, c64(0.0, 1.0), 4096)?;
    println!("decomposition residuals at z = i: {rp:.2e}, {rq:.2e}");
    Ok(())
}
