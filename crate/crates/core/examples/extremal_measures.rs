//! The extremal 1-invariant measures `ν_t`, `t ∈ [0, 1)`, whose `Λ` is a
//! unit atom at `m^{-t}`, and the residuals certifying them.

use bgw_qsd::construct::extremal_invariant_measure_from;
use bgw_qsd::verify::{eigen_residual, functional_equation_residual};
use bgw_qsd::yaglom::{standard_grid, yaglom_limit};
use bgw_qsd::OffspringDistribution;

fn main() -> bgw_qsd::Result<()> {
    let dist = OffspringDistribution::pure_death(0.5)?;
    let k = 1024;
    let y = yaglom_limit(&dist, k, 1e-14, 10_000)?;
    for t in [0.0, 0.25, 0.5, 0.75] {
        let nu = extremal_invariant_measure_from(&y, t, k, 1e-12)?;
        let eig = eigen_residual(&nu, &dist, 1.0, 512, 128)?;
        let fe = functional_equation_residual(&nu, &dist, 1.0, &standard_grid())?;
        println!(
            "t = {t}: nu(1) = {:.8}, nu(16) = {:.3e}, k nu(k) at 256 = {:.4}, eigen {:.1e}, functional {:.1e}",
            nu.get(1),
            nu.get(16),
            256.0 * nu.get(256),
            eig.residual,
            fe.residual
        );
    }
    Ok(())
}
