//! Orthonormal polynomials `p_n(z)`, `q_n(z)`, their Wronskian and the
//! scalar products against `p(0)`, `q(0)`.

use lc_jacobi::prelude::*;

fn main() -> Result<()> {
    let model = LcModel::new(CoefficientModel::power(2.0, 1)?)?;
    let z = c64(0.0, 1.0);

    let table = eval_pq(&model, z, 400)?;
    for n in 0..5 {
        println!("p_{n}(i) = {:.6}   q_{n}(i) = {:.6}", table.p[n], table.q[n]);
    }
    println!("max |{{p, q}} - 1| over n < 400: {:.2e}", table.wronskian_deviation(&model));
    println!("tail indicator: {:.2e}", table.tail_indicator);

    let ip = inner_products(&model, z, 1e-10, 1 << 18)?;
    println!(
        "<p(i), p(0)> = {:.10}\n<q(i), q(0)> = {:.10}\n({} terms, tail {:.1e})",
        ip.pp0, ip.qq0, ip.n_used, ip.tail_estimate
    );

    // Plot data: n, Re p, Im p, Re q, Im q.
    table.write_csv(std::io::sink())?;
    Ok(())
}
