//! Hoppe's map: from `Q = log(1 - H) / log m` to the QSD `G_alpha` by
//! quadrature, and back.

use bgw_qsd::verify::hoppe_roundtrip;
use bgw_qsd::yaglom::standard_grid;
use bgw_qsd::OffspringDistribution;

fn main() -> bgw_qsd::Result<()> {
    let dist = OffspringDistribution::geometric(0.25)?;
    let grid = standard_grid();
    for alpha in [0.3, 0.5, 0.8] {
        let r = hoppe_roundtrip(&dist, alpha, 256, &grid)?;
        println!(
            "alpha = {alpha}: G_alpha(0.5) = {:.12}, |G - (1 - (1-H)^alpha)| {:.1e}, |Q_back - Q| {:.1e}, Q(F) - 1 - Q {:.1e}",
            r.g_alpha[9], r.residual_g, r.residual_q, r.residual_functional
        );
    }
    Ok(())
}
