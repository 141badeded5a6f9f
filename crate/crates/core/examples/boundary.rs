//! Boundary values `s±(u)` of maximal-domain vectors and the Green pairing.

use lc_jacobi::prelude::*;
use lc_jacobi::series::sum_with_tail;

fn main() -> Result<()> {
    let model = LcModel::new(CoefficientModel::power(2.0, 1)?)?;
    let cfg = JostConfig::default();
    let map = BoundaryMap::new(&model, c64(0.0, 1.0), &cfg)?;
    let sc = *map.coeffs();

    // Finitely supported vectors have no boundary values.
    let finite: Vec<Complex64> = (0..20).map(|n| c64(n as f64, 1.0)).collect();
    let s = map.apply(&finite, Support::Finite)?;
    println!("finite u: s₊ = {:.1e}, s₋ = {:.1e}", s.s_plus.norm(), s.s_minus.norm());

    // p(i) and q(i) recover σ± and τ±.
    let table = eval_pq(&model, c64(0.0, 1.0), 1 << 15)?;
    let sp = map.apply(&table.p, Support::SquareSummable)?;
    let sq = map.apply(&table.q, Support::SquareSummable)?;
    println!("s±(p) = {:.8}, {:.8}   σ± = {:.8}, {:.8}", sp.s_plus, sp.s_minus, sc.sigma_plus, sc.sigma_minus);
    println!("s±(q) = {:.8}, {:.8}   τ± = {:.8}, {:.8}", sq.s_plus, sq.s_minus, sc.tau_plus, sc.tau_minus);

    // The same boundary values through another point.
    let at_zero = boundary_data(&model, &table.p, c64(0.0, 0.0), Support::SquareSummable, &cfg)?;
    println!("through z = 0: s₊(p) = {:.8}", at_zero.s_plus);

    let g = green_pairing(&map, &table.p, &table.p, Support::SquareSummable)?;
    let terms: Vec<f64> = table.p.iter().map(|p| p.norm_sqr()).collect();
    let (norm_sq, _) = sum_with_tail(&model, &terms, Support::SquareSummable);
    println!(
        "Green pairing: sequence {:.8}, boundary {:.8}, 2i‖p‖² = {:.8}",
        g.band_limit,
        g.boundary_formula,
        c64(0.0, 2.0 * norm_sq)
    );
    Ok(())
}
