//! The Yaglom limit `nu_min` of a geometric offspring law, the survival
//! ratios `p_{n+1} / p_n -> m`, and the identities satisfied by `H`.

use bgw_qsd::yaglom::{h_identity_report, standard_grid, yaglom_limit};
use bgw_qsd::OffspringDistribution;

fn main() -> bgw_qsd::Result<()> {
    let dist = OffspringDistribution::geometric(0.25)?;
    let y = yaglom_limit(&dist, 256, 1e-14, 10_000)?;
    println!("m = {:.6}, converged after {} iterations", y.m, y.iterations);
    for (k, p) in y.nu_min.iter().take(6).enumerate() {
        println!("nu_min({}) = {p:.10}", k + 1);
    }
    for (n, r) in y.ratio_seq.iter().enumerate().step_by(5) {
        println!("p_{}/p_{n} = {r:.12}", n + 1);
    }
    let h = h_identity_report(&y, &dist, &standard_grid());
    println!("H(F(z)) - H(F(0)) - m H(z): {:.1e}", h.h1);
    println!("H(F(0)) - (1 - m):          {:.1e}", h.h2);
    Ok(())
}
